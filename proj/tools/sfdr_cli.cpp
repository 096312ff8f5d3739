// Command-line front end: runs one experiment and writes its result CSV.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sfdr/sfdr.hpp"

namespace {

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<std::size_t> trials;
    std::optional<std::string> mode;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "JSON configuration file");
    cmd->add_option("--seed", f.seed, "random seed (overrides the config)");
    cmd->add_option("--out", f.out, "output CSV path (default: stdout)");
    cmd->add_option("--trials", f.trials, "Monte Carlo trials per point (overrides the config)");
    cmd->add_option("--mode", f.mode, "analytic, mc or both")->check(CLI::IsMember({"analytic", "mc", "both"}));
}

nlohmann::json config_json(const CommonFlags& f) {
    return f.config.empty() ? nlohmann::json::object() : sfdr::load_json(f.config);
}

sfdr::SimConfig sim_config(const CommonFlags& f) {
    sfdr::SimConfig cfg = sfdr::sim_config_from_json(config_json(f));
    if (f.seed) cfg.seed = *f.seed;
    if (f.trials) cfg.trials = *f.trials;
    if (f.mode) cfg.mode = *f.mode;
    cfg.validate();
    return cfg;
}

void write_output(const CommonFlags& f, const std::string& text) {
    if (f.out.empty())
        std::fwrite(text.data(), 1, text.size(), stdout);
    else
        sfdr::write_text(f.out, text);
}

void require_analytic(const CommonFlags& f, const char* command) {
    if (f.mode && *f.mode != "analytic") throw sfdr::Error(std::string(command) + " supports --mode analytic only");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Symbol-level selective full-duplex relaying: simulation and analysis"};
    app.require_subcommand(1);

    CommonFlags flags;
    auto* outage = app.add_subcommand("outage", "outage and throughput versus total average links SNR");
    auto* si = app.add_subcommand("si-sweep", "outage versus normalized self-interference variance");
    auto* ber = app.add_subcommand("ber", "end-to-end BER per relaying protocol");
    auto* accuracy = app.add_subcommand("accuracy", "selection accuracy versus SNR and constellation order");
    auto* optimize = app.add_subcommand("optimize", "power / relay-position optimization");
    auto* contour = app.add_subcommand("contour", "outage over power fraction and relay position");
    for (auto* cmd : {outage, si, ber, accuracy, optimize, contour}) add_common(cmd, flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (outage->parsed()) {
            write_output(flags, sfdr::format_results(sfdr::run_outage_experiment(sim_config(flags))));
        } else if (si->parsed()) {
            write_output(flags, sfdr::format_results(sfdr::run_si_sweep(sim_config(flags))));
        } else if (ber->parsed()) {
            write_output(flags, sfdr::format_results(sfdr::run_ber_experiment(sim_config(flags))));
        } else if (accuracy->parsed()) {
            write_output(flags, sfdr::format_results(sfdr::run_selection_accuracy(sim_config(flags))));
        } else if (optimize->parsed()) {
            require_analytic(flags, "optimize");
            const auto cfg = sfdr::optimize_config_from_json(config_json(flags));
            write_output(flags, sfdr::format_results(sfdr::optimum_rows(sfdr::optimize(cfg))));
        } else if (contour->parsed()) {
            require_analytic(flags, "contour");
            const auto j = config_json(flags);
            const auto cfg = sfdr::optimize_config_from_json(j);
            write_output(flags, sfdr::format_contour(sfdr::contour_grid(cfg, sfdr::contour_resolution(j))));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
