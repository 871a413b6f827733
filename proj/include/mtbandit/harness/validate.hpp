#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mtbandit/posterior.hpp"

namespace mtbandit::harness {

struct SuiteResult {
    std::string name;
    bool passed = false;
    /// Largest violation or discrepancy seen, in the units the tolerance is stated in.
    double max_error = 0.0;
    double tolerance = 0.0;
    std::size_t checks = 0;
};

/// Gamma_t(x, x) as seen by the geometry suite. Replaceable so a broken formula can be fed in.
using CovarianceFn = std::function<Eigen::MatrixXd(const ExactPosterior&, const Point&)>;

struct ValidateOptions {
    std::uint64_t seed = 7;
    std::size_t instances = 20;
    double eta = 0.1;
    CovarianceFn covariance;  // empty: ExactPosterior::cov
};

/// sum_s log det(I + Gamma_{s-1}(x_s, x_s) / eta) against the dense log det(I + G_t / eta).
/// Error is relative: |diff| / (1 + |log det|).
SuiteResult schur_telescoping(const ValidateOptions& options = {});
/// (1/eta) sum_s Tr Gamma_s(x_s, x_s) <= log det(I + G_t / eta); error is the excess.
SuiteResult trace_inequality(const ValidateOptions& options = {});
/// Gamma_{t-1} - Gamma_t >= 0 and (1 + kappa/eta) Gamma_t - Gamma_{t-1} >= 0 at every step;
/// error is the most negative eigenvalue, sign flipped.
SuiteResult variance_geometry(const ValidateOptions& options = {});
/// ICM fast path against the block route; error is the larger of the mean l2 and norm gaps.
SuiteResult icm_equivalence(const ValidateOptions& options = {});
/// Budgeted posterior with every point kept against the exact one; error is the larger of the
/// mean l2 and covariance Frobenius gaps.
SuiteResult full_dictionary_exactness(const ValidateOptions& options = {});

std::vector<SuiteResult> run_all_suites(const ValidateOptions& options = {});

/// Fixed-width pass/fail table.
std::string format_report(const std::vector<SuiteResult>& results);

/// Dense Gamma_t(x, x) = Gamma(x, x) - sign * C^T (G_t + eta I)^{-1} C. sign = +1 is the real thing.
Eigen::MatrixXd dense_posterior_cov(const MultiTaskKernel& kernel, const PointList& points, double eta,
                                    const Point& x, double sign = 1.0);

}  // namespace mtbandit::harness
