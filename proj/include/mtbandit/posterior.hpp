#pragma once

#include <optional>

#include "mtbandit/kernels.hpp"
#include "mtbandit/linalg.hpp"

namespace mtbandit {

struct Observation {
    Point x;
    Eigen::VectorXd y;
};

/// Posterior summaries over a batch of query points.
struct Prediction {
    Eigen::MatrixXd mean;      // n x N
    Eigen::VectorXd cov_norm;  // N, ||Gamma_t(x, x)||
};

/// Per-eigendirection representation of an ICM posterior, Gamma = k B with B = sum xi_i u_i u_i^T.
struct IcmFastState {
    ScalarKernel scalar;
    CouplingSpectrum spectrum;
    /// Factor of (xi_i K_t + eta I_t); unused for xi_i == 0.
    std::vector<BlockCholesky> factors;
    /// Y_t^i = [y_1^T u_i, ..., y_t^T u_i]
    std::vector<Eigen::VectorXd> projected;
    /// (xi_i K_t + eta I_t)^{-1} Y_t^i
    std::vector<Eigen::VectorXd> weights;
};

/// Exact vector-valued kernel ridge regression posterior (mu_t, Gamma_t).
class ExactPosterior {
public:
    static constexpr std::size_t kRefactorInterval = 64;

    ExactPosterior(MultiTaskKernel kernel, double eta, bool icm_fastpath = true);

    void update(const Point& x, const Eigen::VectorXd& y);
    void update(const Observation& obs) { update(obs.x, obs.y); }

    const MultiTaskKernel& kernel() const { return kernel_; }
    double eta() const { return eta_; }
    Index tasks() const { return kernel_.tasks(); }
    std::size_t size() const { return points_.size(); }
    const PointList& points() const { return points_; }
    /// Y_t, point-major concatenation of the outputs.
    const Eigen::VectorXd& outputs() const { return outputs_; }

    /// sum_{s<=t} log det(I_n + Gamma_{s-1}(x_s, x_s) / eta)
    double logdet_sum() const { return logdet_sum_; }
    /// log det(I_n + Gamma_t(x, x) / eta); the increment the next update at x would add.
    double logdet_increment(const Point& x) const;

    Eigen::VectorXd mean(const Point& x) const;
    /// Symmetrised Gamma_t(x, x) with eigenvalues clamped to [0, kappa].
    Eigen::MatrixXd cov(const Point& x) const;
    double cov_norm(const Point& x) const;

    bool has_fastpath() const { return fast_.has_value(); }
    const IcmFastState& fastpath() const;
    Eigen::VectorXd icm_mean(const Point& x) const;
    Eigen::MatrixXd icm_cov(const Point& x) const;
    double icm_cov_norm(const Point& x) const;

    /// Means and covariance norms over a batch; uses the ICM fast path when present.
    Prediction predict(const PointList& queries) const;
    /// Same, always through the block (n t x n t) route.
    Prediction predict_general(const PointList& queries) const;

private:
    Eigen::MatrixXd raw_cov(const Point& x) const;
    Eigen::MatrixXd icm_raw_cov(const Point& x) const;
    void update_fastpath(const Point& x, const Eigen::VectorXd& y);

    MultiTaskKernel kernel_;
    double eta_;
    PointList points_;
    Eigen::VectorXd outputs_;
    BlockCholesky chol_;
    Eigen::VectorXd alpha_;
    double logdet_sum_ = 0.0;
    std::optional<IcmFastState> fast_;
};

Eigen::VectorXd posterior_mean(const ExactPosterior& state, const Point& x);
Eigen::MatrixXd posterior_cov(const ExactPosterior& state, const Point& x);
double posterior_cov_norm(const ExactPosterior& state, const Point& x);
Eigen::VectorXd icm_posterior_mean(const ExactPosterior& state, const Point& x);
double icm_posterior_cov_norm(const ExactPosterior& state, const Point& x);

/// Largest eigenvalue of a symmetric matrix, clamped at zero.
double operator_norm_psd(const Eigen::MatrixXd& m);

}  // namespace mtbandit
