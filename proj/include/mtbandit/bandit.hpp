#pragma once

#include <functional>
#include <optional>
#include <string>

#include "mtbandit/environment.hpp"
#include "mtbandit/nystrom.hpp"
#include "mtbandit/posterior.hpp"
#include "mtbandit/scalarize.hpp"

namespace mtbandit {

enum class Algorithm { MTKB, MTBKB };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& name);

struct BanditConfig {
    Algorithm algorithm = Algorithm::MTKB;
    double eta = 0.1;
    double delta = 0.1;
    double epsilon = 0.5;  // budgeted variant only
    std::size_t horizon = 100;
    double b = 1.0;
    double sigma = 0.1;
    /// Only reported; the model's own kappa is what the algorithm uses.
    double kappa = 1.0;
    double lipschitz = 1.0;
    std::uint64_t seed = 0;

    /// Throws InvalidInput on out-of-range parameters.
    void validate() const;
};

/// (1 + eps) / (1 - eps)
double nystrom_rho(double epsilon);
/// 1 + 1 / sqrt(1 - eps)
double nystrom_c(double epsilon);
/// 6 rho log(4 T / delta) / eps^2
double nystrom_q(double epsilon, std::size_t horizon, double delta);

/// b + sigma / sqrt(eta) * sqrt(2 log(1 / delta) + logdet_sum)
double beta_t(double b, double sigma, double eta, double delta, double logdet_sum);
double beta_t(const BanditConfig& config, double logdet_sum);

/// c_eps b + sigma / sqrt(eta) * sqrt(2 log(2 / delta) + rho * approx_logdet_sum)
double beta_tilde_t(double b, double sigma, double eta, double delta, double epsilon, double approx_logdet_sum);
double beta_tilde_t(const BanditConfig& config, double approx_logdet_sum);

/// u(x) = s_lambda(mean) + L_lambda * beta * sqrt(cov_norm)
double acquisition_value(const Scalarization& spec, const Eigen::VectorXd& lambda, double beta,
                         const Eigen::VectorXd& mean, double cov_norm);
Eigen::VectorXd acquisition_values(const Scalarization& spec, const Eigen::VectorXd& lambda, double beta,
                                   const Prediction& pred);

template <typename Model>
double acquisition(const Model& model, const Scalarization& spec, const Eigen::VectorXd& lambda, double beta,
                   const Point& x) {
    if (!(beta >= 0.0)) throw InvalidInput("acquisition: beta must be nonnegative");
    const Prediction p = model.predict(PointList{x});
    return acquisition_value(spec, lambda, beta, p.mean.col(0), p.cov_norm(0));
}

/// Index of the largest value; the lowest index wins ties.
std::size_t argmax_lowest(const Eigen::VectorXd& values);

template <typename Model>
std::pair<std::size_t, Point> select_point(const Model& model, const Scalarization& spec,
                                           const Eigen::VectorXd& lambda, double beta, const PointList& candidates) {
    if (candidates.empty()) throw InvalidInput("select_point: empty candidate list");
    if (!(beta >= 0.0)) throw InvalidInput("select_point: beta must be nonnegative");
    const std::size_t i = argmax_lowest(acquisition_values(spec, lambda, beta, model.predict(candidates)));
    return {i, candidates[i]};
}

struct RoundRecord {
    std::size_t t = 0;  // 1-based
    Eigen::VectorXd lambda;
    std::size_t grid_index = 0;
    Point x;
    Eigen::VectorXd y;
    double acquisition = 0.0;
    double beta = 0.0;
    /// Points the model conditions on: the dictionary size, or t for the exact model.
    std::size_t dictionary_size = 0;
    double inst_regret = 0.0;
    /// ||Gamma_t(x_t, x_t)|| under the model after the update.
    double post_var = 0.0;
    /// The model's log det sum after the update (approximate for the budgeted variant).
    double logdet_sum = 0.0;
    std::int64_t micros = 0;
};

struct RunTrace {
    std::vector<RoundRecord> rounds;
    /// Set when a model error aborted the run; rounds holds everything completed before it.
    std::optional<std::string> error;
    /// Accumulated log det sum of the model at the end of the run (approximate for the budgeted variant).
    double logdet_sum = 0.0;
    double q = 0.0;

    Eigen::VectorXd instantaneous_regret() const;
    std::vector<std::size_t> played() const;
};

struct RunOptions {
    /// Replaces the confidence radius in every round.
    std::optional<double> beta_constant;
    /// Budgeted variant: use the exact-model radius formula on its approximate log det sum.
    bool budgeted_uses_exact_beta = false;
    /// Budgeted variant: keep every history point with probability 1.
    bool force_full_dictionary = false;
    std::optional<double> q_override;
    bool use_fastpath = true;
    bool record_timing = false;
    /// Called after every completed round with whichever model is running.
    std::function<void(const RoundRecord&, const ExactPosterior*, const NystromPosterior*)> observer;
};

/// Runs the exact or budgeted bandit for config.horizon rounds.
///
/// Seeds: weights, noise and dictionary draws use independent streams derived from config.seed.
/// Model errors stop the loop and are reported in RunTrace::error.
RunTrace run(const BanditConfig& config, const Environment& env, const MultiTaskKernel& kernel,
             const Scalarization& spec, const WeightDistribution& weights, const RunOptions& options = {});

}  // namespace mtbandit
