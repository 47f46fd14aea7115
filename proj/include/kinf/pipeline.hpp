#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kinf/solvers.hpp"

namespace kinf::pipeline {

/// Built-in coefficient H: identity (H = 1), linear (slope y + offset), constant, csv (grid function file).
struct CoefficientConfig {
    std::string type = "linear";
    double slope = 1.0;
    double offset = 0.0;
    Complex value{1.0, 0.0};
    std::filesystem::path path;
};

/// Built-in kernel K: exp_xy (exp(scale x y)), constant, rank_one (scale x^p y^q), zero, csv (matrix file).
struct KernelConfig {
    std::string type = "exp_xy";
    double scale = 1.0;
    Complex value{1.0, 0.0};
    int a_power = 1;
    int b_power = 1;
    std::filesystem::path path;
};

struct RunConfig {
    int depth = 6;
    int depth_max = 12;
    Complex alpha{0.0, 0.0};
    std::vector<Complex> lambdas{Complex(0.3, 0.0)};
    double eps0 = 1.0;
    double ratio = 0.5;
    int bands = 4;
    std::optional<std::size_t> basis_size;  // nullopt = full
    bool strict = false;
    CoefficientConfig coefficient;
    KernelConfig kernel;
    double multiplier_width = 1.0;
    ProbeGrid probe;
    double cutoff = kDefaultCutoff;
    std::uint64_t seed = 1;
    double tolerance = 1e-9;
    std::filesystem::path output = "kinf_out";
};

/// Strict parse: unknown keys and out-of-range values throw InvalidArgument.
/// Relative CSV paths are taken relative to `base_dir`.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

FunctionSource coefficient_source(const RunConfig& config);
KernelSource kernel_source(const RunConfig& config);
SequenceOptions sequence_options(const RunConfig& config);
VerifyOptions verify_options(const RunConfig& config);

/// Complex standard normal values per cell from a seeded mt19937_64.
GridFunction random_function(const MeasureSpace& space, std::uint64_t seed);

enum ExitCode : int { kOk = 0, kConfigError = 1, kConstructionError = 2, kNumericalError = 3 };

int exit_code_for(ErrorKind kind) noexcept;
nlohmann::json error_json(const Error& e);
nlohmann::json complex_json(Complex z);

/// Each command writes its files into `out` (created if needed) and returns an exit code.
int cmd_build_sequence(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);
int cmd_reduce(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);
int cmd_verify(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);

/// One named assertion of the verify battery.
struct Check {
    std::string name;
    double value;
    double threshold;
    bool passed;
};

/// The property battery run by cmd_verify, without file output.
nlohmann::json verify_battery(const RunConfig& config, std::vector<Check>& checks);

/*
 * d^{i+j}/ds^i dt^j of f (i + j <= 3 per axis order) by central differences,
 * Richardson-extrapolated once (step h and h/2), so the truncation error is
 * O(h^4). h <= 0 picks 1e-3, or 2e-3 for total order 3 where rounding dominates.
 */
Complex richardson_derivative(const std::function<Complex(double, double)>& f, int i, int j, double s, double t,
                              double h = 0.0);

}  // namespace kinf::pipeline
