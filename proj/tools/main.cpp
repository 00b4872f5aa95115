#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Gaussian-copula dependence model for binary deal outcomes"};
    app.require_subcommand(1);

    std::string config;
    copulasim::cli::Overrides ov;
    std::uint64_t seed = 0;
    std::int64_t reps = 0;
    std::string out_dir;

    auto add_common = [&](CLI::App* sub, bool with_reps) {
        sub->add_option("--config", config, "config file (JSON, schema_version 1)")->required();
        sub->add_option("--seed", seed, "override the config seed");
        if (with_reps) sub->add_option("--reps", reps, "override the replication count");
        sub->add_option("--out", out_dir, "override the output directory");
    };

    CLI::App* gen = app.add_subcommand("gen-data", "reconstruct the deal population");
    add_common(gen, false);
    CLI::App* fitc = app.add_subcommand("fit", "estimate the dependence parameters");
    add_common(fitc, false);
    CLI::App* sim = app.add_subcommand("simulate", "portfolio Monte Carlo, both settings");
    add_common(sim, true);
    CLI::App* rep = app.add_subcommand("report", "merge summaries into moment/tail tables");
    add_common(rep, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : copulasim::cli::kExitConfig;
    }

    for (CLI::App* sub : {gen, fitc, sim, rep}) {
        if (!sub->parsed()) continue;
        if (sub->count("--seed")) ov.seed = seed;
        if (sub->count("--reps")) ov.reps = reps;
        if (sub->count("--out")) ov.out_dir = out_dir;
    }

    if (gen->parsed()) return copulasim::cli::cmd_gen_data(config, ov);
    if (fitc->parsed()) return copulasim::cli::cmd_fit(config, ov);
    if (sim->parsed()) return copulasim::cli::cmd_simulate(config, ov);
    return copulasim::cli::cmd_report(config, ov);
}
