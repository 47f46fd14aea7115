#include "kinf/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "kinf/io.hpp"

namespace kinf::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::InvalidArgument, "config: " + what); }

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where)
{
    if (!j.is_object()) config_error(where + " must be an object");
    for (const auto& [key, _] : j.items()) {
        if (!known.contains(key)) config_error("unknown key '" + key + "' in " + where);
    }
}

double get_real(const json& j, const std::string& key)
{
    if (!j.is_number()) config_error("'" + key + "' must be a number");
    return j.get<double>();
}

int get_int(const json& j, const std::string& key)
{
    if (!j.is_number_integer()) config_error("'" + key + "' must be an integer");
    return j.get<int>();
}

Complex get_complex(const json& j, const std::string& key)
{
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_object()) {
        reject_unknown(j, {"re", "im"}, key);
        const double re = j.contains("re") ? get_real(j["re"], key + ".re") : 0.0;
        const double im = j.contains("im") ? get_real(j["im"], key + ".im") : 0.0;
        return {re, im};
    }
    config_error("'" + key + "' must be a number or {\"re\": .., \"im\": ..}");
}

fs::path resolve(const json& j, const std::string& key, const fs::path& base)
{
    if (!j.is_string()) config_error("'" + key + "' must be a path string");
    fs::path p = j.get<std::string>();
    return p.is_relative() && !base.empty() ? base / p : p;
}

CoefficientConfig parse_coefficient(const json& j, const fs::path& base)
{
    CoefficientConfig c;
    if (j.is_string()) {
        c.type = j.get<std::string>();
    } else {
        reject_unknown(j, {"type", "slope", "offset", "value", "path"}, "coefficient");
        if (!j.contains("type") || !j["type"].is_string()) config_error("coefficient.type is required");
        c.type = j["type"].get<std::string>();
        if (j.contains("slope")) c.slope = get_real(j["slope"], "coefficient.slope");
        if (j.contains("offset")) c.offset = get_real(j["offset"], "coefficient.offset");
        if (j.contains("value")) c.value = get_complex(j["value"], "coefficient.value");
        if (j.contains("path")) c.path = resolve(j["path"], "coefficient.path", base);
    }
    if (c.type != "identity" && c.type != "linear" && c.type != "constant" && c.type != "csv") {
        config_error("coefficient.type must be identity, linear, constant or csv");
    }
    if (c.type == "csv" && c.path.empty()) config_error("coefficient.path is required for csv");
    return c;
}

KernelConfig parse_kernel(const json& j, const fs::path& base)
{
    KernelConfig k;
    if (j.is_string()) {
        k.type = j.get<std::string>();
    } else {
        reject_unknown(j, {"type", "scale", "value", "a_power", "b_power", "path"}, "kernel");
        if (!j.contains("type") || !j["type"].is_string()) config_error("kernel.type is required");
        k.type = j["type"].get<std::string>();
        if (j.contains("scale")) k.scale = get_real(j["scale"], "kernel.scale");
        if (j.contains("value")) k.value = get_complex(j["value"], "kernel.value");
        if (j.contains("a_power")) k.a_power = get_int(j["a_power"], "kernel.a_power");
        if (j.contains("b_power")) k.b_power = get_int(j["b_power"], "kernel.b_power");
        if (j.contains("path")) k.path = resolve(j["path"], "kernel.path", base);
    }
    if (k.type != "exp_xy" && k.type != "constant" && k.type != "rank_one" && k.type != "zero" && k.type != "csv") {
        config_error("kernel.type must be exp_xy, constant, rank_one, zero or csv");
    }
    if (k.a_power < 0 || k.b_power < 0) config_error("kernel powers must be non-negative");
    if (k.type == "csv" && k.path.empty()) config_error("kernel.path is required for csv");
    return k;
}

void ensure_dir(const fs::path& out)
{
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw Error(ErrorKind::InvalidArgument, "cannot create output directory " + out.string());
}

void write_csv(const fs::path& path, const std::string& text) { io::write_text(path, text); }

std::string lambda_label(std::size_t index) { return "lambda_" + std::to_string(index); }

int fail(const fs::path& file, json report, const Error& e, std::ostream& log)
{
    report["error"] = error_json(e);
    io::write_text(file, io::dump_json(report));
    log << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code_for(e.kind());
}

struct Chain {
    KorotkovSequence sequence;
    UnitarySurrogate unitary;
    GridFunction coefficient;
    GridKernel kernel;
    GridFunction phi;
};

Chain build_chain(const RunConfig& config, const KorotkovSequence& sequence)
{
    UnitarySurrogate unitary = UnitarySurrogate::build(sequence, config.basis_size);
    GridFunction h = coefficient_source(config).sample(sequence.space);
    GridKernel k = kernel_source(config).sample(sequence.space);
    GridFunction phi = random_function(sequence.space, config.seed);
    return Chain{sequence, std::move(unitary), std::move(h), std::move(k), std::move(phi)};
}

Complex one_d_stencil(const std::function<Complex(double)>& g, int order, double x, double h)
{
    switch (order) {
    case 0: return g(x);
    case 1: return (g(x + h) - g(x - h)) / (2.0 * h);
    case 2: return (g(x + h) - 2.0 * g(x) + g(x - h)) / (h * h);
    case 3: return (g(x + 2 * h) - 2.0 * g(x + h) + 2.0 * g(x - h) - g(x - 2 * h)) / (2.0 * h * h * h);
    default: throw Error(ErrorKind::InvalidArgument, "finite differences support orders up to 3");
    }
}

Complex central(const std::function<Complex(double, double)>& f, int i, int j, double s, double t, double h)
{
    return one_d_stencil([&](double x) { return one_d_stencil([&](double y) { return f(x, y); }, j, t, h); }, i, s, h);
}

}  // namespace

Complex richardson_derivative(const std::function<Complex(double, double)>& f, int i, int j, double s, double t, double h)
{
    if (h <= 0.0) h = (i + j >= 3) ? 2e-3 : 1e-3;
    const Complex coarse = central(f, i, j, s, t, h);
    const Complex fine = central(f, i, j, s, t, 0.5 * h);
    return (4.0 * fine - coarse) / 3.0;
}

RunConfig parse_config(const json& j, const fs::path& base_dir)
{
    reject_unknown(j, {"depth", "depth_max", "alpha", "lambda", "eps0", "ratio", "bands", "basis_size", "strict",
                       "coefficient", "kernel", "multiplier", "probe", "cutoff", "seed", "tolerance", "output"},
                   "config");
    RunConfig c;
    if (j.contains("depth")) c.depth = get_int(j["depth"], "depth");
    c.depth_max = std::max(c.depth, c.depth_max);
    if (j.contains("depth_max")) c.depth_max = get_int(j["depth_max"], "depth_max");
    if (c.depth < 1 || c.depth > MeasureSpace::kMaxDepth) config_error("depth must lie in [1, 24]");
    if (c.depth_max < c.depth || c.depth_max > MeasureSpace::kMaxDepth) config_error("depth_max must lie in [depth, 24]");
    if (j.contains("alpha")) c.alpha = get_complex(j["alpha"], "alpha");
    if (j.contains("lambda")) {
        c.lambdas.clear();
        if (j["lambda"].is_array()) {
            for (const auto& v : j["lambda"]) c.lambdas.push_back(get_complex(v, "lambda"));
        } else {
            c.lambdas.push_back(get_complex(j["lambda"], "lambda"));
        }
        if (c.lambdas.empty()) config_error("lambda list is empty");
    }
    if (j.contains("eps0")) c.eps0 = get_real(j["eps0"], "eps0");
    if (j.contains("ratio")) c.ratio = get_real(j["ratio"], "ratio");
    if (!(c.eps0 > 0.0)) config_error("eps0 must be positive");
    if (!(c.ratio > 0.0 && c.ratio < 1.0)) config_error("ratio must lie in (0, 1)");
    if (j.contains("bands")) c.bands = get_int(j["bands"], "bands");
    if (c.bands < 1) config_error("bands must be at least 1");
    if (j.contains("basis_size")) {
        const json& b = j["basis_size"];
        if (b.is_string() && b.get<std::string>() == "full") {
            c.basis_size.reset();
        } else if (b.is_number_integer() && b.get<long long>() > 0) {
            c.basis_size = b.get<std::size_t>();
        } else {
            config_error("basis_size must be \"full\" or a positive integer");
        }
    }
    if (j.contains("strict")) {
        if (!j["strict"].is_boolean()) config_error("'strict' must be a boolean");
        c.strict = j["strict"].get<bool>();
    }
    if (j.contains("coefficient")) c.coefficient = parse_coefficient(j["coefficient"], base_dir);
    if (j.contains("kernel")) c.kernel = parse_kernel(j["kernel"], base_dir);
    if (j.contains("multiplier")) {
        const json& m = j["multiplier"];
        if (m.is_string()) {
            if (m.get<std::string>() != "gaussian") config_error("multiplier must be gaussian");
        } else {
            reject_unknown(m, {"type", "width"}, "multiplier");
            if (m.contains("type") && (!m["type"].is_string() || m["type"].get<std::string>() != "gaussian")) {
                config_error("multiplier.type must be gaussian");
            }
            if (m.contains("width")) c.multiplier_width = get_real(m["width"], "multiplier.width");
        }
        if (!(c.multiplier_width > 0.0)) config_error("multiplier.width must be positive");
    }
    if (j.contains("probe")) {
        const json& p = j["probe"];
        reject_unknown(p, {"lo", "hi", "points"}, "probe");
        if (p.contains("lo")) c.probe.lo = get_real(p["lo"], "probe.lo");
        if (p.contains("hi")) c.probe.hi = get_real(p["hi"], "probe.hi");
        if (p.contains("points")) c.probe.points = get_int(p["points"], "probe.points");
        if (!(c.probe.lo < c.probe.hi) || c.probe.points < 2) config_error("probe needs lo < hi and at least 2 points");
    }
    if (j.contains("cutoff")) c.cutoff = get_real(j["cutoff"], "cutoff");
    if (!(c.cutoff > 0.0 && c.cutoff < 1.0)) config_error("cutoff must lie in (0, 1)");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) config_error("seed must be a non-negative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("tolerance")) c.tolerance = get_real(j["tolerance"], "tolerance");
    if (!(c.tolerance > 0.0)) config_error("tolerance must be positive");
    if (j.contains("output")) {
        if (!j["output"].is_string()) config_error("output must be a path string");
        c.output = j["output"].get<std::string>();
    }
    return c;
}

RunConfig load_config(const fs::path& path)
{
    const std::string text = io::read_text(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        config_error(std::string("parse error: ") + e.what());
    }
    return parse_config(j, path.parent_path());
}

FunctionSource coefficient_source(const RunConfig& config)
{
    const CoefficientConfig& c = config.coefficient;
    if (c.type == "identity") return FunctionSource::from_function([](double) { return Complex(1.0); });
    if (c.type == "linear") {
        return FunctionSource::from_function([slope = c.slope, offset = c.offset](double y) { return Complex(slope * y + offset); });
    }
    if (c.type == "constant") return FunctionSource::from_function([v = c.value](double) { return v; });
    std::ifstream in(c.path);
    if (!in) config_error("cannot read " + c.path.string());
    return FunctionSource::from_grid(io::read_grid_function_csv(in));
}

KernelSource kernel_source(const RunConfig& config)
{
    const KernelConfig& k = config.kernel;
    if (k.type == "exp_xy") return KernelSource::from_function([c = k.scale](double x, double y) { return Complex(std::exp(c * x * y)); });
    if (k.type == "constant") return KernelSource::from_function([v = k.value](double, double) { return v; });
    if (k.type == "zero") return KernelSource::from_function([](double, double) { return Complex(0.0); });
    if (k.type == "rank_one") {
        return KernelSource::from_function([c = k.scale, p = k.a_power, q = k.b_power](double x, double y) {
            return Complex(c * std::pow(x, p) * std::pow(y, q));
        });
    }
    std::ifstream in(k.path);
    if (!in) config_error("cannot read " + k.path.string());
    Matrix m = io::read_matrix_csv(in);
    const auto n = static_cast<std::size_t>(m.rows());
    if (m.rows() != m.cols() || n < 2 || (n & (n - 1)) != 0) config_error("kernel CSV must be a 2^depth square matrix");
    int depth = 0;
    while ((std::size_t{1} << depth) < n) ++depth;
    return KernelSource::from_grid(GridKernel(MeasureSpace(depth), std::move(m)));
}

SequenceOptions sequence_options(const RunConfig& config)
{
    return SequenceOptions{config.bands, config.eps0, config.ratio, config.depth_max};
}

VerifyOptions verify_options(const RunConfig& config)
{
    return VerifyOptions{config.tolerance, config.cutoff, config.probe, Multiplier::gaussian(config.multiplier_width)};
}

GridFunction random_function(const MeasureSpace& space, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(static_cast<Eigen::Index>(space.cell_count()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        v[i] = Complex(re, im);
    }
    return GridFunction(space, std::move(v));
}

int exit_code_for(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::SpaceMismatch:
    case ErrorKind::AlphaNotZero: return kConfigError;
    case ErrorKind::NotBisectable:
    case ErrorKind::EmptyBand:
    case ErrorKind::ToleranceUnreachable: return kConstructionError;
    case ErrorKind::QuadratureInsufficient:
    case ErrorKind::NearSingular:
    case ErrorKind::DegenerateSystem: return kNumericalError;
    }
    return kNumericalError;
}

json error_json(const Error& e) { return {{"kind", to_string(e.kind())}, {"message", e.what()}, {"value", e.value()}}; }

json complex_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

int cmd_build_sequence(const RunConfig& config, const fs::path& out, std::ostream& log)
{
    ensure_dir(out);
    const fs::path file = out / "sequence.json";
    try {
        const KorotkovSequence seq = build_sequence(coefficient_source(config), kernel_source(config), config.alpha,
                                                    MeasureSpace(config.depth), sequence_options(config));
        io::write_text(file, io::dump_json(to_json(seq)));
        log << "sequence: " << seq.size() << " bands at depth " << seq.space.depth() << " -> " << file.string() << '\n';
        return kOk;
    } catch (const Error& e) {
        return fail(file, json::object(), e, log);
    }
}

int cmd_reduce(const RunConfig& config, const fs::path& out, std::ostream& log)
{
    ensure_dir(out);
    const fs::path report_file = out / "report.json";
    json report = json::object();
    try {
        const KorotkovSequence seq = build_sequence(coefficient_source(config), kernel_source(config), config.alpha,
                                                    MeasureSpace(config.depth), sequence_options(config));
        io::write_text(out / "sequence.json", io::dump_json(to_json(seq)));
        const Chain chain = build_chain(config, seq);
        const VerifyOptions options = verify_options(config);
        report["depth"] = seq.space.depth();
        report["basis_size"] = chain.unitary.size();
        report["projected"] = chain.unitary.projected();
        report["alpha"] = complex_json(config.alpha);
        report["seed"] = config.seed;

        std::optional<std::string> a0_text;
        std::optional<std::string> a_text;
        bool identical = true;
        bool ok = true;
        json per_lambda = json::array();
        for (std::size_t idx = 0; idx < config.lambdas.size(); ++idx) {
            const Complex lambda = config.lambdas[idx];
            const ThirdKindProblem problem{chain.coefficient, chain.kernel, lambda, GridFunction::zero(seq.space)};
            ThirdKindProblem manufactured = problem;
            manufactured.rhs = forward_third_kind(problem, chain.phi);
            const Reduction red = reduce(manufactured, config.alpha, seq, chain.unitary);
            const std::string a0s = io::to_string(red.pencil.a0.entries);
            const std::string as = io::to_string(red.pencil.a.entries);
            if (!a0_text) {
                a0_text = a0s;
                a_text = as;
                write_csv(out / "A0.csv", a0s);
                write_csv(out / "A.csv", as);
                const std::vector<double> nodes = config.probe.nodes();
                const BilinearKernel t0 = synthesize(red.pencil.a0, red.pencil.basis);
                const BilinearKernel t = synthesize(red.pencil.a, red.pencil.basis);
                for (const auto& [i, j] : {std::pair{0, 0}, std::pair{1, 0}, std::pair{0, 1}}) {
                    const std::string suffix = "_" + std::to_string(i) + std::to_string(j) + ".csv";
                    std::ostringstream s0;
                    io::write_kernel_samples_csv(s0, nodes, nodes, sample_kernel(t0, i, j, nodes, nodes));
                    write_csv(out / ("T0" + suffix), s0.str());
                    std::ostringstream s1;
                    io::write_kernel_samples_csv(s1, nodes, nodes, sample_kernel(t, i, j, nodes, nodes));
                    write_csv(out / ("T" + suffix), s1.str());
                }
            } else {
                identical = identical && a0s == *a0_text && as == *a_text;
            }
            write_csv(out / ("g_" + lambda_label(idx) + ".csv"), io::to_string(Matrix(red.g)));

            ThirdKindProblem for_report = problem;
            const EquivalenceReport eq = verify_equivalence(for_report, config.alpha, seq, chain.unitary, chain.phi, options);
            json entry = eq.to_json();
            entry["lambda"] = complex_json(lambda);
            if (eq.projected) entry["projection_error"] = eq.round_trip_error;
            if (config.alpha != Complex(0.0)) {
                try {
                    const SecondKindSolution sol = solve_second_kind(red.pencil, lambda, red.g);
                    const Vector f = chain.unitary.forward(chain.phi);
                    entry["solve"] = {{"residual", sol.residual},
                                      {"condition", sol.condition},
                                      {"solution_error", (sol.c - f).norm() / std::max(f.norm(), 1e-300)}};
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::NearSingular) throw;
                    entry["solve"] = {{"error", error_json(e)}};
                }
            }
            if (!eq.projected && (eq.passage_residual > config.tolerance || eq.round_trip_error > config.tolerance)) ok = false;
            per_lambda.push_back(std::move(entry));
        }
        report["matrices_identical_across_lambda"] = identical;
        report["reports"] = std::move(per_lambda);
        const bool strict_fail = config.strict && chain.unitary.projected();
        report["strict_projection_failure"] = strict_fail;
        report["passed"] = ok && identical && !strict_fail;
        io::write_text(report_file, io::dump_json(report));
        if (strict_fail) {
            log << "error: basis_size " << chain.unitary.size() << " < " << seq.space.cell_count()
                << " cells with strict set; see projection_error in " << report_file.string() << '\n';
            return kNumericalError;
        }
        if (!ok || !identical) {
            log << "error: passage identity above tolerance; see " << report_file.string() << '\n';
            return kNumericalError;
        }
        log << "reduce: " << config.lambdas.size() << " lambda value(s), N = " << chain.unitary.size() << " -> "
            << out.string() << '\n';
        return kOk;
    } catch (const Error& e) {
        return fail(report_file, std::move(report), e, log);
    }
}

json verify_battery(const RunConfig& config, std::vector<Check>& checks)
{
    auto check = [&](std::string name, double value, double threshold) {
        const bool ok = value <= threshold;
        checks.push_back(Check{std::move(name), value, threshold, ok});
    };

    const KorotkovSequence seq = build_sequence(coefficient_source(config), kernel_source(config), config.alpha,
                                                MeasureSpace(config.depth), sequence_options(config));
    const Chain chain = build_chain(config, seq);
    const VerifyOptions options = verify_options(config);
    const double h = seq.space.cell_measure();

    // Sequence: orthonormality and the two band inequalities.
    {
        const auto n = static_cast<Eigen::Index>(seq.size());
        Matrix e(static_cast<Eigen::Index>(seq.space.cell_count()), n);
        for (Eigen::Index k = 0; k < n; ++k) e.col(k) = seq.functions[static_cast<std::size_t>(k)].values;
        const Matrix gram = (e.adjoint() * e) * h;
        check("sequence_orthonormality", (gram - Matrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-12);
        double s1 = 0.0;
        double s2 = 0.0;
        for (std::size_t k = 0; k < seq.size(); ++k) {
            const auto& d = seq.diagnostics[k];
            s1 = std::max(s1, d.norm_s1 / d.epsilon);
            s2 = std::max(s2, d.norm_s2_sum() * static_cast<double>(k + 1));
        }
        check("band_bound_multiplication", s1, 1.0);
        check("band_bound_kernel", s2, 1.0);
    }

    // Unitary surrogate: Gram defect and isometry on random pairs.
    check("unitary_gram_defect", chain.unitary.gram_defect(), 1e-10);
    {
        double worst = 0.0;
        for (std::uint64_t pair = 0; pair < 10; ++pair) {
            const GridFunction f = random_function(seq.space, config.seed + 1000 + 2 * pair);
            const GridFunction g = random_function(seq.space, config.seed + 1001 + 2 * pair);
            const Complex lhs = chain.unitary.forward(f).dot(chain.unitary.forward(g));
            const Complex rhs = inner_product(g, f);
            worst = std::max(worst, std::abs(lhs - rhs) / (f.norm() * g.norm()));
        }
        check("unitary_isometry", worst, 1e-10);
    }

    json reports = json::array();
    const std::vector<double> points{-3.1, -0.7, 0.0, 1.3, 3.6};
    for (std::size_t idx = 0; idx < config.lambdas.size(); ++idx) {
        const Complex lambda = config.lambdas[idx];
        const std::string tag = "[" + lambda_label(idx) + "]";
        const ThirdKindProblem problem{chain.coefficient, chain.kernel, lambda, GridFunction::zero(seq.space)};
        const EquivalenceReport eq = verify_equivalence(problem, config.alpha, seq, chain.unitary, chain.phi, options);
        json entry = eq.to_json();
        entry["lambda"] = complex_json(lambda);
        check("passage_residual" + tag, eq.passage_residual, config.tolerance);
        check("round_trip_error" + tag, eq.round_trip_error, config.tolerance);

        ThirdKindProblem manufactured = problem;
        manufactured.rhs = forward_third_kind(problem, chain.phi);
        const Reduction red = reduce(manufactured, config.alpha, seq, chain.unitary);
        const Matrix affine_gap = red.pencil.system(lambda) - (red.pencil.system(Complex(0.0)) - lambda * red.pencil.a.entries);
        check("lambda_affinity" + tag, affine_gap.cwiseAbs().maxCoeff(), 0.0);

        const BilinearKernel pencil_kernel = red.pencil.kernel(lambda);
        const BilinearKernel t0 = synthesize(red.pencil.a0, red.pencil.basis);
        const BilinearKernel t = synthesize(red.pencil.a, red.pencil.basis);
        const double scale = std::max(1.0, hs_norm(pencil_kernel));

        double linear_gap = 0.0;
        for (double s : points) {
            for (double u : points) {
                const Complex direct = eval_kernel(pencil_kernel, 0, 0, s, u);
                const Complex split = eval_kernel(t0, 0, 0, s, u) - lambda * eval_kernel(t, 0, 0, s, u);
                linear_gap = std::max(linear_gap, std::abs(direct - split));
            }
        }
        check("pencil_linearity" + tag, linear_gap / scale, 1e-12);

        const MFactorization fac = m_factorize(pencil_kernel.coefficients);
        check("factorization_reconstruction" + tag, fac.reconstruction_error(pencil_kernel.coefficients.entries) / scale, 1e-10);
        double series_gap = 0.0;
        for (int i = 0; i <= 1; ++i) {
            for (int j = 0; j <= 1; ++j) {
                for (double s : points) {
                    const SeriesConsistency sc = series_consistency(pencil_kernel, fac, i, j, s, -0.5 * s + 0.2);
                    const double bound = std::max(1.0, sc.abs_partial_sums.empty() ? 0.0 : sc.abs_partial_sums.back());
                    series_gap = std::max(series_gap, std::abs(sc.direct - sc.via_factorization) / bound);
                }
            }
        }
        check("series_consistency" + tag, series_gap, 1e-10);

        // Smoothness: analytic derivatives against an extrapolated finite-difference oracle.
        const auto f = [&](double s, double u) { return eval_kernel(pencil_kernel, 0, 0, s, u); };
        double fd_gap = 0.0;
        for (int i = 0; i <= 2; ++i) {
            for (int j = 0; i + j <= 2; ++j) {
                double local_scale = 1.0;
                double local_gap = 0.0;
                for (double s : points) {
                    const Complex exact = eval_kernel(pencil_kernel, i, j, s, 0.4 - 0.3 * s);
                    const Complex fd = richardson_derivative(f, i, j, s, 0.4 - 0.3 * s);
                    local_scale = std::max(local_scale, std::abs(exact));
                    local_gap = std::max(local_gap, std::abs(exact - fd));
                }
                fd_gap = std::max(fd_gap, local_gap / local_scale);
            }
        }
        check("derivative_agreement" + tag, fd_gap, 1e-6);

        const double radius = vanishing_radius(pencil_kernel.basis.size());
        check("vanishing_at_infinity" + tag, vanishing_defect(pencil_kernel, radius, options.probe) / scale, 1e-6);

        if (config.alpha != Complex(0.0)) {
            try {
                const SecondKindSolution sol = solve_second_kind(red.pencil, lambda, red.g);
                check("second_kind_residual" + tag, sol.residual, 1e-10);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::NearSingular) throw;
                entry["second_kind_near_singular"] = error_json(e);
            }
        }
        if (eq.first_kind) {
            const FirstKindReport& fk = *eq.first_kind;
            check("first_kind_identity" + tag, fk.identity_residual, config.tolerance);
            check("hilbert_schmidt_bound" + tag, fk.hs.hs_norm_pointwise - fk.hs.bound(), 0.0);
            check("hilbert_schmidt_bound_truncated" + tag, fk.hs.hs_norm - fk.hs.bound(), 0.0);
            checks.push_back(Check{"adjoint_column_decay" + tag, fk.decay_last_quarter, fk.decay_first_quarter,
                                   fk.decay_last_quarter < fk.decay_first_quarter});
            if (!fk.truncated()) check("first_kind_recovery" + tag, fk.recovery_error, 1e-8);
        }
        reports.push_back(std::move(entry));
    }
    return json{{"depth", seq.space.depth()},
                {"basis_size", chain.unitary.size()},
                {"projected", chain.unitary.projected()},
                {"alpha", complex_json(config.alpha)},
                {"sequence", to_json(seq)},
                {"reports", std::move(reports)}};
}

int cmd_verify(const RunConfig& config, const fs::path& out, std::ostream& log)
{
    ensure_dir(out);
    const fs::path file = out / "verify.json";
    std::vector<Check> checks;
    try {
        json report = verify_battery(config, checks);
        json list = json::array();
        json failed = json::array();
        for (const Check& c : checks) {
            list.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"passed", c.passed}});
            if (!c.passed) {
                failed.push_back(c.name);
                log << "FAIL " << c.name << ": " << io::format_double(c.value) << " > " << io::format_double(c.threshold) << '\n';
            }
        }
        const bool passed = failed.empty();
        report["checks"] = std::move(list);
        report["failed"] = std::move(failed);
        report["passed"] = passed;
        io::write_text(file, io::dump_json(report));
        log << "verify: " << checks.size() << " checks, " << (passed ? "all passed" : "failures") << " -> " << file.string() << '\n';
        return passed ? kOk : kNumericalError;
    } catch (const Error& e) {
        return fail(file, json::object(), e, log);
    }
}

}  // namespace kinf::pipeline
