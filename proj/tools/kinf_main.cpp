#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kinf/pipeline.hpp"

namespace pl = kinf::pipeline;

int main(int argc, char** argv)
{
    CLI::App app{"Reduce third-kind integral equations to second- and first-kind ones with smooth kernels"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_dir;

    auto add = [&](const char* name, const char* help) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--out", out_dir, "output directory (default: the config's 'output')");
        return sub;
    };
    CLI::App* build = add("build-sequence", "build the band sequence and write sequence.json");
    CLI::App* reduce = add("reduce", "run the reduction and write A0.csv, A.csv, kernel grids and report.json");
    CLI::App* verify = add("verify", "run the property battery and write verify.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : pl::kConfigError;
    }

    pl::RunConfig config;
    try {
        config = pl::load_config(config_path);
    } catch (const kinf::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return pl::kConfigError;
    }
    const std::filesystem::path out = out_dir.empty() ? config.output : std::filesystem::path(out_dir);

    try {
        if (build->parsed()) return pl::cmd_build_sequence(config, out, std::cerr);
        if (reduce->parsed()) return pl::cmd_reduce(config, out, std::cerr);
        if (verify->parsed()) return pl::cmd_verify(config, out, std::cerr);
    } catch (const kinf::Error& e) {
        std::cerr << "error: " << kinf::to_string(e.kind()) << ": " << e.what() << '\n';
        return pl::exit_code_for(e.kind());
    }
    return pl::kConfigError;
}
