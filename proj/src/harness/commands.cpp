#include "mtbandit/harness/commands.hpp"

#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>

#include <json.hpp>

#include "mtbandit/harness/experiment.hpp"
#include "mtbandit/harness/plot.hpp"
#include "mtbandit/harness/trace_io.hpp"
#include "mtbandit/harness/validate.hpp"

namespace mtbandit::harness {

namespace fs = std::filesystem;

namespace {

ConfigDocument load_with_overrides(const std::string& path, const std::vector<std::string>& overrides) {
    ConfigDocument doc = load_config(path);
    for (const auto& o : overrides) doc.apply_override(o);
    return doc;
}

void report(std::ostream& err, const ConfigError& e) { err << "config error: " << e.what() << '\n'; }

std::string trial_stem(const TrialResult& r) { return r.algorithm + "_trial" + std::to_string(r.trial); }

}  // namespace

std::string version() { return MTBANDIT_VERSION; }

int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err) {
    ExperimentConfig config;
    try {
        config = experiment_from_document(load_with_overrides(args.config_path, args.overrides));
    } catch (const ConfigError& e) {
        report(err, e);
        return kExitUsage;
    }

    // Hashed before the -o override so the hash names the experiment, not where it was written.
    const std::string resolved = serialize_config(experiment_to_document(config));
    if (args.output_dir) config.output_dir = *args.output_dir;
    const fs::path dir(config.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        err << "cannot create output directory '" << dir.string() << "': " << ec.message() << '\n';
        return kExitRuntime;
    }

    // Every file written goes into the manifest, in a fixed order.
    std::map<std::string, std::string> hashes;
    std::mutex hashes_mutex;
    auto emit = [&](const std::string& name, const std::string& content) {
        write_file((dir / name).string(), content);
        std::lock_guard<std::mutex> lock(hashes_mutex);
        hashes[name] = sha256_hex(content);
    };

    std::vector<TrialResult> results;
    int status = kExitOk;
    try {
        emit("config.resolved", resolved);
        results = run_experiment(config, args.threads.value_or(worker_count()), [&](const TrialResult& r) {
            emit(trial_stem(r) + "_trace.csv", trace_csv(r.trace));
            if (r.config.algorithm == Algorithm::MTBKB) emit(trial_stem(r) + "_dictionary.csv", dictionary_csv(r.dictionary));
        });
    } catch (const ConfigError& e) {
        report(err, e);
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "run failed: " << e.what() << '\n';
        return kExitRuntime;
    }

    std::vector<std::string> order;
    for (const auto& a : config.algorithms) order.push_back(a.name);
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& r : results) {
        nlohmann::json j{{"trial", r.trial},
                         {"algorithm", r.algorithm},
                         {"seed", r.seed},
                         {"rounds", r.trace.rounds.size()},
                         {"b", r.config.b},
                         {"sigma", r.config.sigma},
                         {"kappa", r.kappa}};
        if (r.config.algorithm == Algorithm::MTBKB) j["q"] = r.trace.q;
        if (r.trace.error) {
            j["error"] = *r.trace.error;
            err << trial_stem(r) << ": stopped after " << r.trace.rounds.size() << " rounds: " << *r.trace.error
                << '\n';
            status = kExitRuntime;
        }
        runs.push_back(std::move(j));
    }

    try {
        emit("summary.csv", summary_csv(summarize(results, order)));
        emit("bayes_regret.csv", bayes_csv(results, order));

        nlohmann::json files = nlohmann::json::array();
        for (const auto& [name, hash] : hashes) files.push_back({{"path", name}, {"sha256", hash}});
        const nlohmann::json manifest{{"name", config.name},
                                      {"version", version()},
                                      {"config_hash", sha256_hex(resolved)},
                                      {"master_seed", config.master_seed},
                                      {"trials", config.trials},
                                      {"runs", runs},
                                      {"files", files}};
        write_file((dir / "manifest.json").string(), manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
        err << "writing outputs failed: " << e.what() << '\n';
        return kExitRuntime;
    }
    out << "wrote " << hashes.size() + 1 << " files to " << dir.string() << '\n';
    return status;
}

int cmd_plot(const std::string& summary_path, const std::string& out_path, std::ostream& err) {
    std::vector<SummaryRow> rows;
    try {
        rows = read_summary(summary_path);
    } catch (const Error& e) {
        err << "bad summary '" << summary_path << "': " << e.what() << '\n';
        return kExitUsage;
    }
    try {
        write_file(out_path, render_svg(rows));
    } catch (const Error& e) {
        err << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

int cmd_validate(std::uint64_t seed, std::ostream& out) {
    ValidateOptions options;
    options.seed = seed;
    const auto results = run_all_suites(options);
    out << format_report(results);
    for (const auto& r : results) {
        if (!r.passed) return kExitRuntime;
    }
    return kExitOk;
}

int cmd_pareto(const ParetoArgs& args, std::ostream& err) {
    try {
        const ExperimentConfig config = experiment_from_document(load_with_overrides(args.config_path, args.overrides));
        const TrialSetup setup = build_trial(config, args.trial);
        write_file(args.out_path, pareto_csv(setup.env));
    } catch (const ConfigError& e) {
        report(err, e);
        return kExitUsage;
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace mtbandit::harness
