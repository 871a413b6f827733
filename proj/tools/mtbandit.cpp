#include <iostream>

#include <CLI11.hpp>

#include "mtbandit/harness/commands.hpp"

using namespace mtbandit::harness;

int main(int argc, char** argv) {
    CLI::App app{"Multi-task kernelized bandit experiments"};
    app.set_version_flag("--version", version());
    app.require_subcommand(1);

    RunArgs run;
    std::string output_dir;
    unsigned threads = 0;
    auto* run_cmd = app.add_subcommand("run", "Run every trial and algorithm of a config");
    run_cmd->add_option("config", run.config_path, "Config file")->required();
    run_cmd->add_option("--set", run.overrides, "Override, section.key=value (repeatable)");
    run_cmd->add_option("-o,--output-dir", output_dir, "Output directory (overrides experiment.output_dir)");
    run_cmd->add_option("-j,--threads", threads, "Worker threads (default: MTBANDIT_THREADS or all cores)");

    std::string summary, svg;
    auto* plot_cmd = app.add_subcommand("plot", "Render a summary CSV as SVG");
    plot_cmd->add_option("summary", summary, "summary.csv from a run")->required();
    plot_cmd->add_option("out", svg, "Output SVG path")->required();

    std::uint64_t seed = 7;
    auto* validate_cmd = app.add_subcommand("validate", "Run the numerical identity suites");
    validate_cmd->add_option("--seed", seed, "Seed of the random instances");

    ParetoArgs pareto;
    auto* pareto_cmd = app.add_subcommand("pareto", "Write the Pareto-optimal grid points of a config's objective");
    pareto_cmd->add_option("config", pareto.config_path, "Config file")->required();
    pareto_cmd->add_option("out", pareto.out_path, "Output CSV path")->required();
    pareto_cmd->add_option("--set", pareto.overrides, "Override, section.key=value (repeatable)");
    pareto_cmd->add_option("--trial", pareto.trial, "Trial whose objective to use");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (*run_cmd) {
        if (!output_dir.empty()) run.output_dir = output_dir;
        if (threads > 0) run.threads = threads;
        return cmd_run(run, std::cout, std::cerr);
    }
    if (*plot_cmd) return cmd_plot(summary, svg, std::cerr);
    if (*validate_cmd) return cmd_validate(seed, std::cout);
    return cmd_pareto(pareto, std::cerr);
}
