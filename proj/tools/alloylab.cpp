#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "alloy/cli.hpp"

int main(int argc, char** argv) {
    using namespace alloy::cli;
    CLI::App app{"alloylab: numerical experiments for discrete alloy-type random Schroedinger operators"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ALLOY_VERSION));

    std::string config_path;
    std::optional<std::uint64_t> seed, samples;
    std::optional<unsigned> workers;
    std::optional<std::string> out;
    for (const auto& name : subcommands()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON experiment config")->required();
        sub->add_option("--seed", seed, "override ensemble.seed");
        sub->add_option("--samples", samples, "override ensemble.samples");
        sub->add_option("--out", out, "override output.path");
        sub->add_option("--workers", workers, "worker threads (never changes results)");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfig;
    }
    const std::string sub = app.get_subcommands().front()->get_name();
    std::ifstream f(config_path);
    if (!f) {
        std::cerr << "config error: cannot read " << config_path << "\n";
        return kConfig;
    }
    std::stringstream text;
    text << f.rdbuf();
    return run_cli(sub, text.str(), seed, samples, workers, out, std::cerr);
}
