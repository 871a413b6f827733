#include "mtbandit/bandit.hpp"

#include <chrono>
#include <cmath>

#include "mtbandit/benchmarks.hpp"

namespace mtbandit {

std::string to_string(Algorithm a) { return a == Algorithm::MTKB ? "mtkb" : "mtbkb"; }

Algorithm algorithm_from_string(const std::string& name) {
    if (name == "mtkb" || name == "mt-kb") return Algorithm::MTKB;
    if (name == "mtbkb" || name == "mt-bkb") return Algorithm::MTBKB;
    throw InvalidInput("unknown algorithm '" + name + "'");
}

void BanditConfig::validate() const {
    if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidInput("eta must be positive");
    if (!(delta > 0.0 && delta <= 1.0)) throw InvalidInput("delta must lie in (0, 1]");
    if (algorithm == Algorithm::MTBKB && !(epsilon > 0.0 && epsilon < 1.0)) {
        throw InvalidInput("epsilon must lie in (0, 1)");
    }
    if (horizon < 1) throw InvalidInput("horizon must be at least 1");
    if (!(b >= 0.0) || !std::isfinite(b)) throw InvalidInput("b must be nonnegative");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidInput("sigma must be nonnegative");
    if (!(lipschitz >= 0.0) || !std::isfinite(lipschitz)) throw InvalidInput("L must be nonnegative");
}

double nystrom_rho(double epsilon) { return (1.0 + epsilon) / (1.0 - epsilon); }

double nystrom_c(double epsilon) { return 1.0 + 1.0 / std::sqrt(1.0 - epsilon); }

double nystrom_q(double epsilon, std::size_t horizon, double delta) {
    return 6.0 * nystrom_rho(epsilon) * std::log(4.0 * static_cast<double>(horizon) / delta) / (epsilon * epsilon);
}

double beta_t(double b, double sigma, double eta, double delta, double logdet_sum) {
    if (!(logdet_sum >= 0.0)) throw InvalidInput("beta_t: log det sum must be nonnegative");
    return b + sigma / std::sqrt(eta) * std::sqrt(2.0 * std::log(1.0 / delta) + logdet_sum);
}

double beta_t(const BanditConfig& c, double logdet_sum) { return beta_t(c.b, c.sigma, c.eta, c.delta, logdet_sum); }

double beta_tilde_t(double b, double sigma, double eta, double delta, double epsilon, double approx_logdet_sum) {
    if (!(approx_logdet_sum >= 0.0)) throw InvalidInput("beta_tilde_t: log det sum must be nonnegative");
    return nystrom_c(epsilon) * b +
           sigma / std::sqrt(eta) * std::sqrt(2.0 * std::log(2.0 / delta) + nystrom_rho(epsilon) * approx_logdet_sum);
}

double beta_tilde_t(const BanditConfig& c, double approx_logdet_sum) {
    return beta_tilde_t(c.b, c.sigma, c.eta, c.delta, c.epsilon, approx_logdet_sum);
}

double acquisition_value(const Scalarization& spec, const Eigen::VectorXd& lambda, double beta,
                         const Eigen::VectorXd& mean, double cov_norm) {
    return scalarize(spec, lambda, mean) + lipschitz_constant(spec, lambda) * beta * std::sqrt(std::max(cov_norm, 0.0));
}

Eigen::VectorXd acquisition_values(const Scalarization& spec, const Eigen::VectorXd& lambda, double beta,
                                   const Prediction& pred) {
    const double scale = lipschitz_constant(spec, lambda) * beta;
    return scalarize_columns(spec, lambda, pred.mean) + scale * pred.cov_norm.cwiseMax(0.0).cwiseSqrt();
}

std::size_t argmax_lowest(const Eigen::VectorXd& values) {
    if (values.size() == 0) throw InvalidInput("argmax: empty input");
    Index best = 0;
    for (Index i = 1; i < values.size(); ++i) {
        if (values(i) > values(best)) best = i;
    }
    return static_cast<std::size_t>(best);
}

Eigen::VectorXd RunTrace::instantaneous_regret() const {
    Eigen::VectorXd out(static_cast<Index>(rounds.size()));
    for (std::size_t i = 0; i < rounds.size(); ++i) out(static_cast<Index>(i)) = rounds[i].inst_regret;
    return out;
}

std::vector<std::size_t> RunTrace::played() const {
    std::vector<std::size_t> out;
    out.reserve(rounds.size());
    for (const auto& r : rounds) out.push_back(r.grid_index);
    return out;
}

namespace {

// Stream tags keep the weight, noise and dictionary draws independent of each other.
constexpr std::uint64_t kWeightStream = 0x1;
constexpr std::uint64_t kNoiseStream = 0x2;
constexpr std::uint64_t kDictionaryStream = 0x3;

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t tag) { return mix_seed(mix_seed(seed) ^ tag); }

template <typename Model>
void loop(Model& model, const BanditConfig& config, const Environment& env, const Scalarization& spec,
          const WeightDistribution& weights, const RunOptions& options, RunTrace& trace) {
    Rng weight_rng(stream_seed(config.seed, kWeightStream));
    Rng noise_rng(stream_seed(config.seed, kNoiseStream));
    constexpr bool budgeted = std::is_same_v<Model, NystromPosterior>;

    for (std::size_t t = 1; t <= config.horizon; ++t) {
        const auto start = std::chrono::steady_clock::now();
        RoundRecord rec;
        rec.t = t;
        rec.lambda = sample_weight(weights, weight_rng);
        if (options.beta_constant) {
            rec.beta = *options.beta_constant;
        } else if constexpr (budgeted) {
            rec.beta = options.budgeted_uses_exact_beta ? beta_t(config, model.approx_logdet_sum())
                                                        : beta_tilde_t(config, model.approx_logdet_sum());
        } else {
            rec.beta = beta_t(config, model.logdet_sum());
        }

        const Eigen::VectorXd acq = acquisition_values(spec, rec.lambda, rec.beta, model.predict(env.grid));
        rec.grid_index = argmax_lowest(acq);
        rec.acquisition = acq(static_cast<Index>(rec.grid_index));
        rec.x = env.grid[rec.grid_index];
        rec.y = env.observe(rec.grid_index, noise_rng);

        if constexpr (budgeted) {
            std::optional<Dictionary> forced;
            if (options.force_full_dictionary) forced = Dictionary::full(model.size() + 1);
            model.update(rec.x, rec.y, forced);
            rec.dictionary_size = model.dictionary_size();
        } else {
            model.update(rec.x, rec.y);
            rec.dictionary_size = model.size();
        }
        rec.post_var = model.cov_norm(rec.x);
        if constexpr (budgeted) {
            rec.logdet_sum = model.approx_logdet_sum();
        } else {
            rec.logdet_sum = model.logdet_sum();
        }

        const ScalarizedOptimum opt = scalarized_optimum(env.values, spec, rec.lambda);
        rec.inst_regret = opt.value - scalarize(spec, rec.lambda, env.values.col(static_cast<Index>(rec.grid_index)));

        if (options.record_timing) {
            rec.micros = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start)
                             .count();
        }
        trace.rounds.push_back(rec);
        trace.logdet_sum = rec.logdet_sum;
        if constexpr (budgeted) {
            if (options.observer) options.observer(trace.rounds.back(), nullptr, &model);
        } else {
            if (options.observer) options.observer(trace.rounds.back(), &model, nullptr);
        }
    }
}

}  // namespace

RunTrace run(const BanditConfig& config, const Environment& env, const MultiTaskKernel& kernel,
             const Scalarization& spec, const WeightDistribution& weights, const RunOptions& options) {
    config.validate();
    if (env.tasks() != kernel.tasks()) throw InvalidInput("run: environment and kernel disagree on the task count");
    if (weights.tasks != kernel.tasks()) throw InvalidInput("run: weight distribution has the wrong dimension");

    RunTrace trace;
    trace.rounds.reserve(config.horizon);
    try {
        if (config.algorithm == Algorithm::MTKB) {
            ExactPosterior model(kernel, config.eta, options.use_fastpath);
            loop(model, config, env, spec, weights, options, trace);
        } else {
            trace.q = options.q_override.value_or(nystrom_q(config.epsilon, config.horizon, config.delta));
            std::optional<NystromMode> mode;
            if (!options.use_fastpath) mode = NystromMode::General;
            NystromPosterior model(kernel, config.eta, trace.q, stream_seed(config.seed, kDictionaryStream), mode);
            loop(model, config, env, spec, weights, options, trace);
        }
    } catch (const Error& e) {
        trace.error = e.what();
    }
    return trace;
}

}  // namespace mtbandit
