#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mtbandit::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

struct RunArgs {
    std::string config_path;
    std::vector<std::string> overrides;  // "section.key=value"
    std::optional<std::string> output_dir;
    std::optional<unsigned> threads;  // default: worker_count()
};

/// Writes per-trial traces, summary.csv, bayes_regret.csv, config.resolved and manifest.json.
int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err);
int cmd_plot(const std::string& summary_path, const std::string& out_path, std::ostream& err);
int cmd_validate(std::uint64_t seed, std::ostream& out);

struct ParetoArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_path;
    std::size_t trial = 0;
};
int cmd_pareto(const ParetoArgs& args, std::ostream& err);

std::string version();

}  // namespace mtbandit::harness
