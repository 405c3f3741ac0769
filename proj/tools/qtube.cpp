#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "qtube/cli.hpp"
#include "qtube/errors.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"qtube: scattering in asymptotically straight two-dimensional tubes"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_path;
    int workers = 0;
    int verbosity = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--output", output_path, "output file (default: config 'output' or stdout)");
        sub->add_option("-j,--workers", workers, "worker threads")->check(CLI::PositiveNumber);
        sub->add_flag("-v,--verbose", verbosity, "more progress output on stderr");
    };
    auto* solve = app.add_subcommand("solve", "scattering sets over an energy sweep");
    auto* converge = app.add_subcommand("converge", "lowest-mode entries against the truncation order");
    auto* mufield = app.add_subcommand("mufield", "dump mu(u, v) on a lattice");
    auto* compose = app.add_subcommand("compose", "split at straight sections, solve the parts, recombine");
    for (auto* s : {solve, converge, mufield, compose}) add_common(s);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    qtube::RunConfig cfg;
    try {
        cfg = qtube::load_run_config(config_path);
    } catch (const qtube::Error& e) {
        std::cerr << "qtube: " << e.what() << "\n";
        return 2;
    }
    if (workers > 0) cfg.workers = workers;
    if (!output_path.empty()) cfg.output = output_path;
    cfg.verbosity = std::max(cfg.verbosity, verbosity);

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!cfg.output.empty()) {
        file.open(cfg.output);
        if (!file) {
            std::cerr << "qtube: cannot write " << cfg.output << "\n";
            return 2;
        }
        out = &file;
    }
    try {
        if (solve->parsed()) return qtube::cmd_solve(cfg, *out);
        if (converge->parsed()) return qtube::cmd_converge(cfg, *out);
        if (mufield->parsed()) return qtube::cmd_mufield(cfg, *out);
        return qtube::cmd_compose(cfg, *out);
    } catch (const qtube::InvalidArgument& e) {
        std::cerr << "qtube: " << e.what() << "\n";
        return 2;
    } catch (const qtube::GeometryError& e) {
        std::cerr << "qtube: " << e.what() << "\n";
        return 2;
    } catch (const qtube::Error& e) {
        std::cerr << "qtube: " << e.what() << "\n";
        return 1;
    }
}
