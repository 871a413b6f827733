#pragma once

#include "mtbandit/environment.hpp"
#include "mtbandit/kernels.hpp"
#include "mtbandit/scalarize.hpp"

namespace mtbandit {

/// f = sum_i Gamma(., a_i) c_i together with its norm bounds.
struct RkhsObjective {
    Environment env;
    /// max_x ||f(x)||_2 / kappa over the grid.
    double b = 0.0;
    /// sqrt(c^T G c), the exact RKHS norm.
    double rkhs_norm = 0.0;
    PointList anchors;
    Eigen::MatrixXd coefficients;  // n x m
};

/// Anchors drawn uniformly from the 101-point grid on [0, 1], c_i ~ Uniform[-1, 1]^n.
RkhsObjective make_rkhs_objective(const MultiTaskKernel& kernel, Rng& rng, std::size_t anchors = 50,
                                  double noise_sigma = 0.1);

RkhsObjective rkhs_objective_from(const MultiTaskKernel& kernel, PointList anchors, Eigen::MatrixXd coefficients,
                                  PointList grid, double noise_sigma);

/// Bump weights of the perturbed sine tasks, one row per task over centres 0.05, 0.4, 0.7.
Eigen::MatrixXd default_sine_weights();

/// f_i(x) = sin(2 pi x) + 0.6 sum_j W_ij exp(-(x - c_j)^2 / (2 * 0.1^2)) on the 101-point grid.
Environment make_perturbed_sine(const Eigen::MatrixXd& weights = default_sine_weights(), double noise_sigma = 0.1);

/// Standard Branin-Hoo, minimised at value 0.397887.
double branin(double x1, double x2);

/// Task i (i = 0 .. tasks-1) evaluates -branin / 100 at the input shifted by i% of each axis range, clamped.
Environment make_shifted_branin(Index tasks = 9, std::size_t per_axis = 25, double noise_sigma = 0.1);

/// Indices of grid columns not dominated by any other column (maximisation). Exact duplicates are all kept.
std::vector<std::size_t> pareto_front(const Eigen::MatrixXd& values);
inline std::vector<std::size_t> pareto_front(const Environment& env) { return pareto_front(env.values); }

struct ScalarizedOptimum {
    double value = 0.0;
    std::size_t index = 0;
};

/// Grid maximiser of s_lambda(f). Exact ties go to the largest coordinate sum, then the lowest index,
/// which keeps the answer Pareto optimal even for Chebyshev weights.
ScalarizedOptimum scalarized_optimum(const Eigen::MatrixXd& values, const Scalarization& spec,
                                     const Eigen::VectorXd& lambda);
inline ScalarizedOptimum scalarized_optimum(const Environment& env, const Scalarization& spec,
                                            const Eigen::VectorXd& lambda) {
    return scalarized_optimum(env.values, spec, lambda);
}

/// Running sums of instantaneous regrets.
Eigen::VectorXd cumulative_regret(const Eigen::VectorXd& instantaneous);

/// n x count matrix of weight draws for Monte-Carlo Bayes regret.
Eigen::MatrixXd draw_weights(const WeightDistribution& dist, std::size_t count, Rng& rng);

/// Average over the columns of `lambdas` of s(f(x*)) - max_{s <= T} s(f(x_s)), for each checkpoint T.
/// `played` holds the grid index of every round; checkpoints must be ascending.
Eigen::VectorXd bayes_regret(const std::vector<std::size_t>& played, const Eigen::MatrixXd& values,
                             const Scalarization& spec, const Eigen::MatrixXd& lambdas,
                             const std::vector<std::size_t>& checkpoints);

}  // namespace mtbandit
