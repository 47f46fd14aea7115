#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "kinf/io.hpp"
#include "kinf/pipeline.hpp"
#include "support.hpp"

using namespace kinf;
namespace pl = kinf::pipeline;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("kinf_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_SUITE("cli_report") {

TEST_CASE("doubles round-trip through 17 significant digits")
{
    for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) CHECK(std::stod(io::format_double(x)) == x);
    const Matrix m = testing::random_matrix(5, 3);
    std::stringstream ss;
    io::write_matrix_csv(ss, m);
    CHECK(io::read_matrix_csv(ss) == m);
}

TEST_CASE("grid function CSV round-trip")
{
    const GridFunction f(build_space(3), testing::random_vector(8, 2));
    std::stringstream ss;
    io::write_grid_function_csv(ss, f);
    const GridFunction g = io::read_grid_function_csv(ss);
    CHECK(g.space == f.space);
    CHECK(g.values == f.values);
    std::stringstream bad("0,1,0\n2,1,0\n");
    CHECK_THROWS_AS(io::read_grid_function_csv(bad), Error);
}

TEST_CASE("config parsing is strict")
{
    using nlohmann::json;
    const auto c = pl::parse_config(json::parse(R"({"depth": 5, "lambda": [0.5, {"re": 1, "im": -2}], "basis_size": 10,
        "kernel": {"type": "rank_one", "a_power": 2}, "alpha": {"re": 0.25}})"));
    CHECK(c.depth == 5);
    CHECK(c.lambdas.size() == 2);
    CHECK(c.lambdas[1] == Complex(1.0, -2.0));
    CHECK(c.basis_size == std::size_t{10});
    CHECK(c.kernel.a_power == 2);
    CHECK(c.alpha == Complex(0.25));
    CHECK_THROWS_AS(pl::parse_config(json::parse(R"({"depht": 5})")), Error);
    CHECK_THROWS_AS(pl::parse_config(json::parse(R"({"kernel": {"type": "exp_xy", "scael": 2}})")), Error);
    CHECK_THROWS_AS(pl::parse_config(json::parse(R"({"depth": 0})")), Error);
    CHECK_THROWS_AS(pl::parse_config(json::parse(R"({"ratio": 1.5})")), Error);
    CHECK_THROWS_AS(pl::parse_config(json::parse(R"({"basis_size": "most"})")), Error);
    CHECK_THROWS_AS(pl::parse_config(json::parse(R"({"coefficient": "quadratic"})")), Error);
}

TEST_CASE("extrapolated differences reach fourth-order accuracy")
{
    const auto f = [](double s, double t) { return Complex(std::sin(s) * std::exp(0.5 * t)); };
    CHECK(std::abs(pl::richardson_derivative(f, 1, 0, 0.3, 0.2) - std::cos(0.3) * std::exp(0.1)) < 1e-11);
    CHECK(std::abs(pl::richardson_derivative(f, 2, 1, 0.3, 0.2) - (-std::sin(0.3) * 0.5 * std::exp(0.1))) < 1e-6);
    CHECK(std::abs(pl::richardson_derivative(f, 0, 3, 0.3, 0.2) - std::sin(0.3) * 0.125 * std::exp(0.1)) < 1e-6);
}

TEST_CASE("build-sequence writes per-band JSON, EmptyBand maps to exit 2")
{
    std::ostringstream log;
    const fs::path out = scratch("seq");
    pl::RunConfig c;
    CHECK(pl::cmd_build_sequence(c, out, log) == pl::kOk);
    const auto j = nlohmann::json::parse(io::read_text(out / "sequence.json"));
    CHECK(j["bands"].size() == 4);
    CHECK(j["bands"][0].contains("k"));

    pl::RunConfig bad;
    bad.coefficient.type = "constant";
    bad.coefficient.value = 5.0;
    bad.alpha = 3.0;
    CHECK(pl::cmd_build_sequence(bad, out, log) == pl::kConstructionError);
    const auto e = nlohmann::json::parse(io::read_text(out / "sequence.json"));
    CHECK(e["error"]["kind"] == "EmptyBand");
}

TEST_CASE("reduce writes matrices once for a lambda sweep and is deterministic")
{
    pl::RunConfig c;
    c.depth = 5;
    c.lambdas = {0.3, Complex(-1.0, 0.5), 1.2};
    c.probe.points = 9;
    std::ostringstream log;
    const fs::path a = scratch("reduce_a");
    const fs::path b = scratch("reduce_b");
    REQUIRE(pl::cmd_reduce(c, a, log) == pl::kOk);
    REQUIRE(pl::cmd_reduce(c, b, log) == pl::kOk);
    for (const char* file : {"A0.csv", "A.csv", "T0_00.csv", "T_10.csv", "T_01.csv", "report.json", "sequence.json"}) {
        REQUIRE(fs::exists(a / file));
        CHECK(io::read_text(a / file) == io::read_text(b / file));
    }
    const auto report = nlohmann::json::parse(io::read_text(a / "report.json"));
    CHECK(report["matrices_identical_across_lambda"] == true);
    CHECK(report["reports"].size() == 3);
    for (const auto& r : report["reports"]) CHECK(r["passage_residual"].get<double>() <= 1e-9);
    // 81 probe pairs in the kernel export.
    std::ifstream t(a / "T0_00.csv");
    int rows = 0;
    for (std::string line; std::getline(t, line);) ++rows;
    CHECK(rows == 81);
}

TEST_CASE("strict projected reduce exits 3 with the projection error")
{
    pl::RunConfig c;
    c.depth = 5;
    c.basis_size = 12;
    c.strict = true;
    std::ostringstream log;
    const fs::path out = scratch("strict");
    CHECK(pl::cmd_reduce(c, out, log) == pl::kNumericalError);
    const auto report = nlohmann::json::parse(io::read_text(out / "report.json"));
    CHECK(report["reports"][0]["projection_error"].get<double>() > 0.0);
    c.strict = false;
    CHECK(pl::cmd_reduce(c, out, log) == pl::kOk);
}

TEST_CASE("verify passes on the demo config and fails loudly at an impossible tolerance")
{
    pl::RunConfig c;
    std::ostringstream log;
    const fs::path out = scratch("verify");
    CHECK(pl::cmd_verify(c, out, log) == pl::kOk);
    const auto report = nlohmann::json::parse(io::read_text(out / "verify.json"));
    CHECK(report["passed"] == true);
    CHECK(report["reports"][0].contains("first_kind"));
    CHECK(report["reports"][0]["first_kind"].contains("hs_norm"));

    c.depth = 3;
    c.tolerance = 1e-18;
    CHECK(pl::cmd_verify(c, out, log) == pl::kNumericalError);
    const auto failed = nlohmann::json::parse(io::read_text(out / "verify.json"));
    CHECK_FALSE(failed["failed"].empty());
}

TEST_CASE("verify with alpha != 0 runs the second-kind checks")
{
    pl::RunConfig c;
    c.alpha = 0.5;
    c.kernel.type = "rank_one";
    c.lambdas = {1.0};
    std::ostringstream log;
    const fs::path out = scratch("verify_alpha");
    CHECK(pl::cmd_verify(c, out, log) == pl::kOk);
    const auto report = nlohmann::json::parse(io::read_text(out / "verify.json"));
    bool saw = false;
    for (const auto& check : report["checks"]) saw = saw || check["name"].get<std::string>().starts_with("second_kind_residual");
    CHECK(saw);
}

TEST_CASE("CSV sources load relative to the config file")
{
    const fs::path dir = scratch("csv");
    const MeasureSpace s = build_space(4);
    std::ostringstream h;
    io::write_grid_function_csv(h, GridFunction::sample(s, [](double y) { return Complex(y); }));
    io::write_text(dir / "h.csv", h.str());
    std::ostringstream k;
    io::write_matrix_csv(k, GridKernel::sample(s, [](double x, double y) { return Complex(x + y); }).entries);
    io::write_text(dir / "k.csv", k.str());
    io::write_text(dir / "run.json", R"({"depth": 4, "coefficient": {"type": "csv", "path": "h.csv"},
        "kernel": {"type": "csv", "path": "k.csv"}, "bands": 2})");
    const auto c = pl::load_config(dir / "run.json");
    std::ostringstream log;
    CHECK(pl::cmd_reduce(c, dir / "out", log) == pl::kOk);
    io::write_text(dir / "broken.json", "{\"depth\": ");
    CHECK_THROWS_AS(pl::load_config(dir / "broken.json"), Error);
}

TEST_CASE("exit codes follow the error kinds")
{
    CHECK(pl::exit_code_for(ErrorKind::InvalidArgument) == 1);
    CHECK(pl::exit_code_for(ErrorKind::EmptyBand) == 2);
    CHECK(pl::exit_code_for(ErrorKind::ToleranceUnreachable) == 2);
    CHECK(pl::exit_code_for(ErrorKind::NearSingular) == 3);
    CHECK(pl::exit_code_for(ErrorKind::DegenerateSystem) == 3);
}

}
