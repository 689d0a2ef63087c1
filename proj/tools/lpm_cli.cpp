#include <iostream>

#include <CLI11.hpp>

#include "cli_commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Random invariant manifolds and foliations by Lyapunov-Perron iteration"};
    app.require_subcommand(1);
    lpm::cli::CliOptions opt;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "JSON run configuration");
        sub->add_option("--seed", seed, "single noise seed, overrides noise.seeds");
        sub->add_option("--out", opt.out, "output directory")->capture_default_str();
        sub->add_option("--threads", opt.threads, "worker threads")->capture_default_str();
        sub->add_flag("--corrected-eq30", opt.corrected_shift_term,
                      "use alpha - eta_cs + i sigma in the sigma-shifted foliation conditions");
    };
    const std::pair<const char*, const char*> commands[] = {
        {"sample-noise", "sample Brownian paths and OU processes"},
        {"check-gaps", "evaluate every spectral gap condition"},
        {"solve-manifold", "sample the centre-unstable manifold graph"},
        {"solve-foliation", "sample one centre-stable leaf"},
        {"intersect", "intersect a leaf with the manifold"},
        {"verify", "run the verification checks"},
        {"plot", "render a manifold or leaf CSV as SVG"}};
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        add_common(sub);
        if (std::string(name) == "plot") sub->add_option("--input", opt.input, "CSV written by a solve command");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : lpm::cli::kUsage;
    }
    opt.command = app.get_subcommands().front()->get_name();
    if (app.get_subcommands().front()->count("--seed")) opt.seed = seed;
    return lpm::cli::run(opt, std::cerr);
}
