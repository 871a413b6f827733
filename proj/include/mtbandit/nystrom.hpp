#pragma once

#include <optional>

#include "mtbandit/posterior.hpp"

namespace mtbandit {

/// Points of the history kept for the current round, with the probability each was drawn with.
struct Dictionary {
    std::vector<std::size_t> indices;  // strictly increasing
    std::vector<double> probs;         // in (0, 1]

    std::size_t size() const { return indices.size(); }
    bool empty() const { return indices.empty(); }

    /// Every one of the first t points, each with probability 1.
    static Dictionary full(std::size_t t);
};

/// One Bernoulli draw per history point with p_i = min(q * norms_i, 1).
///
/// A uniform variate is consumed for every point, so the stream position
/// after the call depends only on t. If nothing is drawn, the last point is
/// kept with p = 1.
Dictionary resample_dictionary(const Eigen::VectorXd& variance_norms, double q, Rng& rng);

enum class NystromMode {
    General,  // n m_t dimensional embeddings of the block kernel
    IcmFast,  // scalar embeddings, one solve per coupling eigendirection
};

/// Posterior of the budgeted bandit, rebuilt from a freshly sampled dictionary after every observation.
class NystromPosterior {
public:
    /// Mode defaults to IcmFast for ICM kernels and General otherwise.
    NystromPosterior(MultiTaskKernel kernel, double eta, double q, std::uint64_t seed,
                     std::optional<NystromMode> mode = std::nullopt);

    /// Appends (x, y), draws a new dictionary over all t points and rebuilds the model.
    /// A forced dictionary replaces the draw; the rng is not advanced in that case.
    void update(const Point& x, const Eigen::VectorXd& y, const std::optional<Dictionary>& forced = std::nullopt);

    const MultiTaskKernel& kernel() const { return kernel_; }
    double eta() const { return eta_; }
    double q() const { return q_; }
    NystromMode mode() const { return mode_; }
    Index tasks() const { return kernel_.tasks(); }
    std::size_t size() const { return points_.size(); }
    const PointList& points() const { return points_; }
    const Dictionary& dictionary() const { return dict_; }
    std::size_t dictionary_size() const { return dict_.size(); }
    /// ||Gamma~_{t-1}(x_i, x_i)|| for every i <= t, the values the last draw was based on.
    const Eigen::VectorXd& last_variance_norms() const { return last_norms_; }

    /// sum_{s<=t} log det(I_n + Gamma~_{s-1}(x_s, x_s) / eta)
    double approx_logdet_sum() const { return approx_logdet_sum_; }

    Eigen::VectorXd mean(const Point& x) const;
    /// Symmetrised, eigenvalues clamped to [0, inf).
    Eigen::MatrixXd cov(const Point& x) const;
    double cov_norm(const Point& x) const;
    Prediction predict(const PointList& queries) const;

    /// Phi~_t(x), (n m_t) x n. General mode only.
    Eigen::MatrixXd embedding(const Point& x) const;

private:
    struct General {
        PointList support;
        Eigen::VectorXd inv_sqrt_p;  // per dictionary point
        Eigen::MatrixXd root_pinv;   // (G~^{1/2})^+
        Eigen::LLT<Eigen::MatrixXd> reg;  // V~ + eta I
        Eigen::VectorXd weights;          // (V~ + eta I)^{-1} sum_s Phi~(x_s) y_s
    };
    struct Fast {
        ScalarKernel scalar;
        CouplingSpectrum spectrum;
        PointList support;
        Eigen::VectorXd inv_sqrt_p;
        Eigen::MatrixXd root_pinv;  // (K~^{1/2})^+
        std::vector<Eigen::LLT<Eigen::MatrixXd>> reg;  // xi_i v + eta I
        std::vector<Eigen::VectorXd> weights;
    };

    void rebuild();
    void rebuild_general();
    void rebuild_fast();
    Eigen::MatrixXd raw_cov(const Point& x) const;
    Prediction predict_general(const PointList& queries, std::vector<Eigen::MatrixXd>* covs) const;
    Prediction predict_fast(const PointList& queries, Eigen::MatrixXd* directional) const;

    MultiTaskKernel kernel_;
    double eta_;
    double q_;
    NystromMode mode_;
    Rng rng_;
    PointList points_;
    std::vector<Eigen::VectorXd> outputs_;
    Dictionary dict_;
    Eigen::VectorXd last_norms_;
    double approx_logdet_sum_ = 0.0;
    General general_;
    Fast fast_;
};

/// Truncation threshold for the pseudo-inverse square root, relative to the largest eigenvalue.
inline constexpr double kNystromPinvTol = 1e-12;

}  // namespace mtbandit
