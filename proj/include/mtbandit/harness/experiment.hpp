#pragma once

#include <functional>
#include <optional>
#include <string>

#include "mtbandit/bandit.hpp"
#include "mtbandit/benchmarks.hpp"
#include "mtbandit/harness/config.hpp"

namespace mtbandit::harness {

enum class ObjectiveKind { Rkhs, PerturbedSine, ShiftedBranin };

struct ObjectiveSpec {
    ObjectiveKind kind = ObjectiveKind::Rkhs;
    double noise_sigma = 0.1;
    std::size_t anchors = 50;
    /// Perturbed sine bump weights, row-major n x 3; empty means the built-in table.
    std::vector<double> sine_weights;
    std::int64_t branin_tasks = 9;
    std::size_t branin_per_axis = 25;

    bool operator==(const ObjectiveSpec&) const = default;
};

enum class CouplingKind { Identity, Omega, Gram, Explicit };

/// The kernel that generates RKHS objectives and that joint algorithms learn with.
struct KernelSpec {
    KernelFamily family = KernelFamily::SquaredExponential;
    double lengthscale = 0.2;
    std::int64_t tasks = 2;
    CouplingKind coupling = CouplingKind::Gram;
    double omega = 0.5;
    std::vector<double> entries;  // Explicit, row-major

    bool operator==(const KernelSpec&) const = default;
};

/// Joint learns with the configured kernel; Independent with n copies of its scalar part on the diagonal.
enum class KernelUse { Joint, Independent };

struct AlgorithmEntry {
    std::string name;
    Algorithm algorithm = Algorithm::MTKB;
    KernelUse kernel = KernelUse::Joint;
    double eta = 0.1;
    double delta = 0.1;
    double epsilon = 0.5;
    std::size_t horizon = 100;
    std::optional<double> b;      // empty: max_x ||f(x)|| / kappa on the grid
    std::optional<double> sigma;  // empty: the objective's noise level
    double lipschitz = 1.0;
    bool fastpath = true;

    bool operator==(const AlgorithmEntry&) const = default;
};

struct ExperimentConfig {
    std::string name = "experiment";
    std::size_t trials = 1;
    std::uint64_t master_seed = 0;
    std::string output_dir = "out";
    std::vector<std::size_t> checkpoints;  // empty: the horizon only
    std::size_t bayes_draws = 256;
    /// Wall-clock micros in traces; off by default so traces are reproducible byte for byte.
    bool timing = false;
    ObjectiveSpec objective;
    KernelSpec kernel;
    ScalarizationKind scalarization = ScalarizationKind::Chebyshev;
    std::vector<double> reference;
    WeightDistributionKind weights = WeightDistributionKind::InverseWeighted;
    std::vector<AlgorithmEntry> algorithms;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Typed view of a document; throws ConfigError naming the key (and line) on any problem.
ExperimentConfig experiment_from_document(const ConfigDocument& doc);
ConfigDocument experiment_to_document(const ExperimentConfig& config);

/// Seed for (master, trial, label): FNV-1a over the label folded through splitmix64.
std::uint64_t derive_seed(std::uint64_t master, std::size_t trial, const std::string& label);

/// Objective and kernel of one trial, shared by every algorithm in that trial.
struct TrialSetup {
    std::size_t trial = 0;
    Environment env;
    MultiTaskKernel kernel;
    double b_auto = 0.0;
};

TrialSetup build_trial(const ExperimentConfig& config, std::size_t trial);
MultiTaskKernel algorithm_kernel(const AlgorithmEntry& entry, const TrialSetup& setup);
BanditConfig bandit_config(const AlgorithmEntry& entry, const TrialSetup& setup, std::uint64_t seed);
Scalarization scalarization_of(const ExperimentConfig& config);

struct DictionaryRow {
    std::size_t t = 0;
    std::vector<std::size_t> indices;
};

struct TrialResult {
    std::size_t trial = 0;
    std::string algorithm;
    std::uint64_t seed = 0;
    BanditConfig config;
    double kappa = 0.0;
    RunTrace trace;
    std::vector<DictionaryRow> dictionary;  // budgeted runs only
    std::vector<std::size_t> checkpoints;
    Eigen::VectorXd bayes;
};

/// Number of workers: MTBANDIT_THREADS if set and positive, else the hardware concurrency.
unsigned worker_count();

/// Runs every (trial, algorithm) pair on a pool of `threads` workers.
/// `on_done` is called from the worker that finished the pair.
std::vector<TrialResult> run_experiment(const ExperimentConfig& config, unsigned threads,
                                        const std::function<void(const TrialResult&)>& on_done = {});

}  // namespace mtbandit::harness
