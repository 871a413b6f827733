#pragma once

#include "mtbandit/posterior.hpp"

namespace mtbandit {

/// 1/2 log det(I + G_t / eta) of the points seen so far, read from the running sum.
double realized_gain(const ExactPosterior& state);

/// 1/2 log det(I + G / eta) assembled densely.
double dense_gain(const MultiTaskKernel& kernel, const PointList& points, double eta);

/// 1/2 log det(I + K / noise) for a scalar kernel.
double scalar_realized_gain(const ScalarKernel& k, const PointList& points, double noise);

/// Per coupling eigendirection: 1/2 log det(I + (xi_i / eta) K). Zero eigenvalues give exactly 0.
/// The entries sum to the joint gain of the ICM kernel on the same points.
Eigen::VectorXd icm_gain_split(const PointList& points, const CouplingMatrix& coupling, const ScalarKernel& k,
                               double eta);

struct BoundInputs {
    double lipschitz = 1.0;
    double b = 0.0;
    double sigma = 0.0;
    double eta = 0.1;
    double delta = 0.1;
    double kappa = 1.0;
};

/// 2L (b + sigma / sqrt(eta) sqrt(2 log(1/delta) + gain)) sqrt((1 + kappa / eta) T variance_sum)
double regret_bound_value(const BoundInputs& in, double gain, std::size_t horizon, double variance_sum);

/// Budgeted counterpart: 2L (c_eps b + sigma / sqrt(eta) sqrt(2 (log(1/delta) + rho^2 gain)))
/// * sqrt(rho (1 + kappa / eta) T variance_sum)
double budgeted_regret_bound_value(const BoundInputs& in, double epsilon, double gain, std::size_t horizon,
                                   double variance_sum);

/// 2 eta max(kappa, 1) * scalar_gain, the cap on sum_t ||Gamma_t(x_t, x_t)||.
double variance_sum_bound(double kappa, double eta, double scalar_gain);

}  // namespace mtbandit
