#include "mtbandit/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

namespace mtbandit::harness {

namespace {

// Reads typed keys out of one section and rejects anything it was not asked about.
class SectionReader {
public:
    SectionReader(const ConfigSection* section, std::string name) : section_(section), name_(std::move(name)) {}

    bool present() const { return section_ != nullptr; }

    const ConfigValue* raw(const std::string& key) {
        seen_.insert(key);
        return section_ ? section_->find(key) : nullptr;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& message) {
        const ConfigValue* v = section_ ? section_->find(key) : nullptr;
        throw ConfigError(name_ + "." + key, v ? v->line : (section_ ? section_->line : 0), message);
    }

    const ConfigValue& required(const std::string& key) {
        const ConfigValue* v = raw(key);
        if (!v) {
            throw ConfigError(name_ + "." + key, section_ ? section_->line : 0, "missing required key");
        }
        return *v;
    }

    double real(const std::string& key, std::optional<double> fallback) {
        const ConfigValue* v = fallback ? raw(key) : &required(key);
        if (!v) return *fallback;
        if (v->type == ConfigValue::Type::Float) return v->d;
        if (v->type == ConfigValue::Type::Int) return static_cast<double>(v->i);
        fail(key, "expected a number");
    }

    std::int64_t integer(const std::string& key, std::optional<std::int64_t> fallback) {
        const ConfigValue* v = fallback ? raw(key) : &required(key);
        if (!v) return *fallback;
        if (v->type != ConfigValue::Type::Int) fail(key, "expected an integer");
        return v->i;
    }

    std::size_t count(const std::string& key, std::optional<std::size_t> fallback, std::size_t minimum) {
        const std::int64_t v =
            integer(key, fallback ? std::optional<std::int64_t>(static_cast<std::int64_t>(*fallback)) : std::nullopt);
        if (v < static_cast<std::int64_t>(minimum)) fail(key, "must be at least " + std::to_string(minimum));
        return static_cast<std::size_t>(v);
    }

    std::string text(const std::string& key, std::optional<std::string> fallback) {
        const ConfigValue* v = fallback ? raw(key) : &required(key);
        if (!v) return *fallback;
        if (v->type != ConfigValue::Type::String) fail(key, "expected a quoted string");
        return v->s;
    }

    bool flag(const std::string& key, bool fallback) {
        const ConfigValue* v = raw(key);
        if (!v) return fallback;
        if (v->type != ConfigValue::Type::Bool) fail(key, "expected true or false");
        return v->b;
    }

    std::vector<double> numbers(const std::string& key) {
        const ConfigValue* v = raw(key);
        if (!v) return {};
        if (v->type != ConfigValue::Type::List) fail(key, "expected a [list]");
        return v->list;
    }

    /// A number, or the string "auto" (returned as nullopt).
    std::optional<double> real_or_auto(const std::string& key) {
        const ConfigValue* v = raw(key);
        if (!v) return std::nullopt;
        if (v->type == ConfigValue::Type::String && v->s == "auto") return std::nullopt;
        if (v->type == ConfigValue::Type::Float) return v->d;
        if (v->type == ConfigValue::Type::Int) return static_cast<double>(v->i);
        fail(key, "expected a number or \"auto\"");
    }

    void finish() {
        if (!section_) return;
        for (const auto& [k, v] : section_->entries) {
            if (!seen_.count(k)) throw ConfigError(name_ + "." + k, v.line, "unknown key");
        }
    }

private:
    const ConfigSection* section_;
    std::string name_;
    std::set<std::string> seen_;
};

template <typename F>
auto wrap(const std::string& key, int line, F&& f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(key, line, e.what());
    }
}

constexpr const char* kAlgorithmPrefix = "algorithm.";

std::string to_string(ObjectiveKind k) {
    switch (k) {
        case ObjectiveKind::Rkhs: return "rkhs";
        case ObjectiveKind::PerturbedSine: return "perturbed_sine";
        case ObjectiveKind::ShiftedBranin: return "shifted_branin";
    }
    return {};
}

std::string to_string(KernelUse k) { return k == KernelUse::Joint ? "joint" : "independent"; }

bool valid_name(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; });
}

}  // namespace

ExperimentConfig experiment_from_document(const ConfigDocument& doc) {
    for (const auto& s : doc.sections) {
        const bool known = s.name == "experiment" || s.name == "objective" || s.name == "kernel" ||
                           s.name == "scalarization" || s.name.rfind(kAlgorithmPrefix, 0) == 0;
        if (!known) throw ConfigError(s.name, s.line, "unknown section");
    }

    ExperimentConfig c;
    {
        SectionReader r(doc.find("experiment"), "experiment");
        c.name = r.text("name", c.name);
        if (!valid_name(c.name)) r.fail("name", "use letters, digits, '_' or '-'");
        c.trials = r.count("trials", c.trials, 1);
        const std::int64_t seed = r.integer("master_seed", 0);
        if (seed < 0) r.fail("master_seed", "must be nonnegative");
        c.master_seed = static_cast<std::uint64_t>(seed);
        c.output_dir = r.text("output_dir", c.output_dir);
        for (double v : r.numbers("checkpoints")) {
            if (!(v >= 1.0) || v != std::floor(v)) r.fail("checkpoints", "checkpoints must be positive integers");
            c.checkpoints.push_back(static_cast<std::size_t>(v));
        }
        c.bayes_draws = r.count("bayes_draws", c.bayes_draws, 1);
        c.timing = r.flag("timing", c.timing);
        r.finish();
    }
    {
        SectionReader r(doc.find("objective"), "objective");
        const std::string kind = r.text("kind", "rkhs");
        if (kind == "rkhs") {
            c.objective.kind = ObjectiveKind::Rkhs;
        } else if (kind == "perturbed_sine") {
            c.objective.kind = ObjectiveKind::PerturbedSine;
        } else if (kind == "shifted_branin") {
            c.objective.kind = ObjectiveKind::ShiftedBranin;
        } else {
            r.fail("kind", "expected \"rkhs\", \"perturbed_sine\" or \"shifted_branin\"");
        }
        c.objective.noise_sigma = r.real("noise_sigma", c.objective.noise_sigma);
        if (!(c.objective.noise_sigma >= 0.0)) r.fail("noise_sigma", "must be nonnegative");
        c.objective.anchors = r.count("anchors", c.objective.anchors, 0);
        c.objective.sine_weights = r.numbers("weights");
        if (!c.objective.sine_weights.empty() && c.objective.sine_weights.size() % 3 != 0) {
            r.fail("weights", "expected n x 3 entries, row-major");
        }
        c.objective.branin_tasks = r.integer("tasks", c.objective.branin_tasks);
        if (c.objective.branin_tasks < 1) r.fail("tasks", "must be at least 1");
        c.objective.branin_per_axis = r.count("per_axis", c.objective.branin_per_axis, 2);
        r.finish();
    }
    {
        SectionReader r(doc.find("kernel"), "kernel");
        c.kernel.family = wrap("kernel.family", 0, [&] { return kernel_family_from_string(r.text("family", "se")); });
        c.kernel.lengthscale = r.real("lengthscale", c.kernel.lengthscale);
        if (!(c.kernel.lengthscale > 0.0)) r.fail("lengthscale", "must be positive");
        c.kernel.tasks = r.integer("tasks", c.kernel.tasks);
        if (c.kernel.tasks < 1) r.fail("tasks", "must be at least 1");
        c.kernel.omega = r.real("omega", c.kernel.omega);
        const ConfigValue* coupling = r.raw("coupling");
        if (!coupling) {
            c.kernel.coupling = CouplingKind::Gram;
        } else if (coupling->type == ConfigValue::Type::List) {
            c.kernel.coupling = CouplingKind::Explicit;
            c.kernel.entries = coupling->list;
            if (static_cast<std::int64_t>(c.kernel.entries.size()) != c.kernel.tasks * c.kernel.tasks) {
                r.fail("coupling", "explicit coupling needs tasks * tasks entries");
            }
            wrap("kernel.coupling", coupling->line, [&] {
                return CouplingMatrix::from_row_major(c.kernel.entries, c.kernel.tasks);
            });
        } else if (coupling->type == ConfigValue::Type::String && coupling->s == "gram") {
            c.kernel.coupling = CouplingKind::Gram;
        } else if (coupling->type == ConfigValue::Type::String && coupling->s == "omega") {
            c.kernel.coupling = CouplingKind::Omega;
            if (!(c.kernel.omega >= 0.0 && c.kernel.omega <= 1.0)) r.fail("omega", "must lie in [0, 1]");
        } else if (coupling->type == ConfigValue::Type::String && coupling->s == "identity") {
            c.kernel.coupling = CouplingKind::Identity;
        } else {
            r.fail("coupling", "expected \"gram\", \"omega\", \"identity\" or a row-major [list]");
        }
        r.finish();
    }
    {
        SectionReader r(doc.find("scalarization"), "scalarization");
        c.scalarization = wrap("scalarization.kind", 0, [&] { return scalarization_from_string(r.text("kind", "chebyshev")); });
        c.reference = r.numbers("reference");
        c.weights = wrap("scalarization.weights", 0,
                         [&] { return weight_distribution_from_string(r.text("weights", "inverse_weighted")); });
        r.finish();
    }
    for (const auto& s : doc.sections) {
        if (s.name.rfind(kAlgorithmPrefix, 0) != 0) continue;
        SectionReader r(&s, s.name);
        AlgorithmEntry a;
        a.name = s.name.substr(std::string(kAlgorithmPrefix).size());
        if (!valid_name(a.name)) throw ConfigError(s.name, s.line, "algorithm names use letters, digits, '_' or '-'");
        a.algorithm = wrap(s.name + ".algorithm", s.line, [&] { return algorithm_from_string(r.text("algorithm", a.name)); });
        const std::string use = r.text("kernel", "joint");
        if (use == "joint") {
            a.kernel = KernelUse::Joint;
        } else if (use == "independent") {
            a.kernel = KernelUse::Independent;
        } else {
            r.fail("kernel", "expected \"joint\" or \"independent\"");
        }
        a.eta = r.real("eta", std::nullopt);
        a.delta = r.real("delta", std::nullopt);
        a.horizon = r.count("horizon", std::nullopt, 1);
        if (a.algorithm == Algorithm::MTBKB) {
            a.epsilon = r.real("epsilon", std::nullopt);
        } else {
            a.epsilon = r.real("epsilon", a.epsilon);
        }
        a.b = r.real_or_auto("b");
        a.sigma = r.real_or_auto("sigma");
        a.lipschitz = r.real("L", a.lipschitz);
        a.fastpath = r.flag("fastpath", a.fastpath);
        r.finish();

        BanditConfig probe;
        probe.algorithm = a.algorithm;
        probe.eta = a.eta;
        probe.delta = a.delta;
        probe.epsilon = a.epsilon;
        probe.horizon = a.horizon;
        probe.b = a.b.value_or(0.0);
        probe.sigma = a.sigma.value_or(0.0);
        probe.lipschitz = a.lipschitz;
        wrap(s.name, s.line, [&] {
            probe.validate();
            return 0;
        });
        c.algorithms.push_back(std::move(a));
    }
    if (c.algorithms.empty()) throw ConfigError("algorithm", 0, "at least one [algorithm.NAME] section is required");
    if (c.objective.kind == ObjectiveKind::Rkhs && c.objective.anchors == 0) {
        // Allowed: the zero function.
    }
    return c;
}

ConfigDocument experiment_to_document(const ExperimentConfig& c) {
    ConfigDocument doc;
    auto& e = doc.get_or_add("experiment");
    e.set("name", ConfigValue::string(c.name));
    e.set("trials", ConfigValue::integer(static_cast<std::int64_t>(c.trials)));
    e.set("master_seed", ConfigValue::integer(static_cast<std::int64_t>(c.master_seed)));
    e.set("output_dir", ConfigValue::string(c.output_dir));
    if (!c.checkpoints.empty()) {
        e.set("checkpoints", ConfigValue::numbers(std::vector<double>(c.checkpoints.begin(), c.checkpoints.end())));
    }
    e.set("bayes_draws", ConfigValue::integer(static_cast<std::int64_t>(c.bayes_draws)));
    e.set("timing", ConfigValue::boolean(c.timing));

    auto& o = doc.get_or_add("objective");
    o.set("kind", ConfigValue::string(to_string(c.objective.kind)));
    o.set("noise_sigma", ConfigValue::real(c.objective.noise_sigma));
    o.set("anchors", ConfigValue::integer(static_cast<std::int64_t>(c.objective.anchors)));
    if (!c.objective.sine_weights.empty()) o.set("weights", ConfigValue::numbers(c.objective.sine_weights));
    o.set("tasks", ConfigValue::integer(c.objective.branin_tasks));
    o.set("per_axis", ConfigValue::integer(static_cast<std::int64_t>(c.objective.branin_per_axis)));

    auto& k = doc.get_or_add("kernel");
    k.set("family", ConfigValue::string(to_string(c.kernel.family)));
    k.set("lengthscale", ConfigValue::real(c.kernel.lengthscale));
    k.set("tasks", ConfigValue::integer(c.kernel.tasks));
    switch (c.kernel.coupling) {
        case CouplingKind::Identity: k.set("coupling", ConfigValue::string("identity")); break;
        case CouplingKind::Omega: k.set("coupling", ConfigValue::string("omega")); break;
        case CouplingKind::Gram: k.set("coupling", ConfigValue::string("gram")); break;
        case CouplingKind::Explicit: k.set("coupling", ConfigValue::numbers(c.kernel.entries)); break;
    }
    k.set("omega", ConfigValue::real(c.kernel.omega));

    auto& s = doc.get_or_add("scalarization");
    s.set("kind", ConfigValue::string(to_string(c.scalarization)));
    if (!c.reference.empty()) s.set("reference", ConfigValue::numbers(c.reference));
    s.set("weights", ConfigValue::string(to_string(c.weights)));

    for (const auto& a : c.algorithms) {
        auto& sec = doc.get_or_add(kAlgorithmPrefix + a.name);
        sec.set("algorithm", ConfigValue::string(to_string(a.algorithm)));
        sec.set("kernel", ConfigValue::string(to_string(a.kernel)));
        sec.set("eta", ConfigValue::real(a.eta));
        sec.set("delta", ConfigValue::real(a.delta));
        sec.set("epsilon", ConfigValue::real(a.epsilon));
        sec.set("horizon", ConfigValue::integer(static_cast<std::int64_t>(a.horizon)));
        sec.set("b", a.b ? ConfigValue::real(*a.b) : ConfigValue::string("auto"));
        sec.set("sigma", a.sigma ? ConfigValue::real(*a.sigma) : ConfigValue::string("auto"));
        sec.set("L", ConfigValue::real(a.lipschitz));
        sec.set("fastpath", ConfigValue::boolean(a.fastpath));
    }
    return doc;
}

std::uint64_t derive_seed(std::uint64_t master, std::size_t trial, const std::string& label) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : label) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return mix_seed(mix_seed(mix_seed(master) ^ static_cast<std::uint64_t>(trial)) ^ h);
}

TrialSetup build_trial(const ExperimentConfig& c, std::size_t trial) {
    Rng rng(derive_seed(c.master_seed, trial, "objective"));
    const auto n = static_cast<Index>(c.kernel.tasks);
    const ScalarKernel scalar{c.kernel.family, c.kernel.lengthscale};
    std::optional<CouplingMatrix> coupling;
    switch (c.kernel.coupling) {
        case CouplingKind::Identity: coupling = CouplingMatrix::identity(n); break;
        case CouplingKind::Omega: coupling = CouplingMatrix::omega(c.kernel.omega, n); break;
        case CouplingKind::Gram: coupling = CouplingMatrix::random_gram(n, rng); break;
        case CouplingKind::Explicit: coupling = CouplingMatrix::from_row_major(c.kernel.entries, n); break;
    }
    TrialSetup setup{trial, {}, MultiTaskKernel::icm(scalar, *coupling), 0.0};

    switch (c.objective.kind) {
        case ObjectiveKind::Rkhs:
            setup.env = make_rkhs_objective(setup.kernel, rng, c.objective.anchors, c.objective.noise_sigma).env;
            break;
        case ObjectiveKind::PerturbedSine: {
            Eigen::MatrixXd w = default_sine_weights();
            if (!c.objective.sine_weights.empty()) {
                const auto rows = static_cast<Index>(c.objective.sine_weights.size() / 3);
                w = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>>(
                    c.objective.sine_weights.data(), rows, 3);
            }
            setup.env = make_perturbed_sine(w, c.objective.noise_sigma);
            break;
        }
        case ObjectiveKind::ShiftedBranin:
            setup.env = make_shifted_branin(c.objective.branin_tasks, c.objective.branin_per_axis, c.objective.noise_sigma);
            break;
    }
    if (setup.env.tasks() != n) {
        throw ConfigError("kernel.tasks", 0,
                          "objective has " + std::to_string(setup.env.tasks()) + " tasks but the kernel has " +
                              std::to_string(n));
    }
    setup.b_auto = setup.env.values.colwise().norm().maxCoeff() / setup.kernel.kappa();
    return setup;
}

MultiTaskKernel algorithm_kernel(const AlgorithmEntry& entry, const TrialSetup& setup) {
    if (entry.kernel == KernelUse::Joint) return setup.kernel;
    const auto& scalar = setup.kernel.as_icm().scalar;
    return MultiTaskKernel::diagonal(std::vector<ScalarKernel>(static_cast<std::size_t>(setup.kernel.tasks()), scalar));
}

BanditConfig bandit_config(const AlgorithmEntry& entry, const TrialSetup& setup, std::uint64_t seed) {
    BanditConfig b;
    b.algorithm = entry.algorithm;
    b.eta = entry.eta;
    b.delta = entry.delta;
    b.epsilon = entry.epsilon;
    b.horizon = entry.horizon;
    b.b = entry.b.value_or(setup.b_auto);
    b.sigma = entry.sigma.value_or(setup.env.noise_sigma);
    b.kappa = algorithm_kernel(entry, setup).kappa();
    b.lipschitz = entry.lipschitz;
    b.seed = seed;
    return b;
}

Scalarization scalarization_of(const ExperimentConfig& c) {
    Scalarization s;
    s.kind = c.scalarization;
    if (!c.reference.empty()) s.reference = Eigen::Map<const Eigen::VectorXd>(c.reference.data(), static_cast<Index>(c.reference.size()));
    return s;
}

unsigned worker_count() {
    if (const char* env = std::getenv("MTBANDIT_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<TrialResult> run_experiment(const ExperimentConfig& c, unsigned threads,
                                        const std::function<void(const TrialResult&)>& on_done) {
    std::vector<TrialSetup> setups;
    setups.reserve(c.trials);
    for (std::size_t t = 0; t < c.trials; ++t) setups.push_back(build_trial(c, t));

    const Scalarization spec = scalarization_of(c);
    if (!c.reference.empty() && static_cast<Index>(c.reference.size()) != setups.front().env.tasks()) {
        throw ConfigError("scalarization.reference", 0, "reference point must have one entry per task");
    }
    const WeightDistribution dist{c.weights, setups.front().env.tasks()};

    const std::size_t jobs = c.trials * c.algorithms.size();
    std::vector<TrialResult> results(jobs);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&] {
        for (std::size_t j = next++; j < jobs; j = next++) {
            try {
                const std::size_t trial = j / c.algorithms.size();
                const AlgorithmEntry& entry = c.algorithms[j % c.algorithms.size()];
                const TrialSetup& setup = setups[trial];
                TrialResult& res = results[j];
                res.trial = trial;
                res.algorithm = entry.name;
                res.seed = derive_seed(c.master_seed, trial, entry.name);
                res.config = bandit_config(entry, setup, res.seed);
                const MultiTaskKernel kernel = algorithm_kernel(entry, setup);
                res.kappa = kernel.kappa();

                RunOptions options;
                options.use_fastpath = entry.fastpath;
                options.record_timing = c.timing;
                if (entry.algorithm == Algorithm::MTBKB) {
                    options.observer = [&res](const RoundRecord& r, const ExactPosterior*, const NystromPosterior* m) {
                        res.dictionary.push_back({r.t, m->dictionary().indices});
                    };
                }
                res.trace = run(res.config, setup.env, kernel, spec, dist, options);

                for (std::size_t cp : c.checkpoints) {
                    if (cp <= entry.horizon) res.checkpoints.push_back(cp);
                }
                if (res.checkpoints.empty() || res.checkpoints.back() != entry.horizon) {
                    res.checkpoints.push_back(entry.horizon);
                }
                std::sort(res.checkpoints.begin(), res.checkpoints.end());
                res.checkpoints.erase(std::unique(res.checkpoints.begin(), res.checkpoints.end()), res.checkpoints.end());
                Rng bayes_rng(derive_seed(c.master_seed, trial, "bayes"));
                const Eigen::MatrixXd lambdas = draw_weights(dist, c.bayes_draws, bayes_rng);
                res.bayes = bayes_regret(res.trace.played(), setup.env.values, spec, lambdas, res.checkpoints);
                if (on_done) on_done(res);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };

    const unsigned pool = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(jobs)));
    if (pool == 1) {
        work();
    } else {
        std::vector<std::thread> workers;
        for (unsigned i = 0; i < pool; ++i) workers.emplace_back(work);
        for (auto& w : workers) w.join();
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

}  // namespace mtbandit::harness
