#include "mtbandit/posterior.hpp"

#include <cmath>

namespace mtbandit {

double operator_norm_psd(const Eigen::MatrixXd& m) { return std::max(max_eigenvalue(m), 0.0); }

ExactPosterior::ExactPosterior(MultiTaskKernel kernel, double eta, bool icm_fastpath)
    : kernel_(std::move(kernel)), eta_(eta), outputs_(0), alpha_(0) {
    if (!(eta_ > 0.0) || !std::isfinite(eta_)) {
        throw InvalidInput("ExactPosterior: eta must be positive");
    }
    if (icm_fastpath && kernel_.is_icm()) {
        const auto& icm = kernel_.as_icm();
        IcmFastState fast{icm.scalar, coupling_spectrum(icm.coupling), {}, {}, {}};
        const auto n = static_cast<std::size_t>(kernel_.tasks());
        fast.factors.resize(n);
        fast.projected.assign(n, Eigen::VectorXd(0));
        fast.weights.assign(n, Eigen::VectorXd(0));
        fast_ = std::move(fast);
    }
}

void ExactPosterior::update(const Point& x, const Eigen::VectorXd& y) {
    const Index n = tasks();
    if (y.size() != n) throw InvalidInput("posterior_update: output dimension mismatch");
    if (!x.allFinite() || !y.allFinite()) throw InvalidInput("posterior_update: non-finite observation");
    if (!points_.empty() && x.size() != points_.front().size()) {
        throw InvalidInput("posterior_update: input dimension mismatch");
    }

    const Eigen::MatrixXd cross = cross_block(kernel_, points_, x);
    const Eigen::MatrixXd diag = kernel_(x, x) + eta_ * Eigen::MatrixXd::Identity(n, n);
    // The Schur complement of the new block is Gamma_t(x, x) + eta I, evaluated before x joins the history.
    const Eigen::MatrixXd schur = chol_.append(cross, diag);
    logdet_sum_ += logdet_spd(schur) - static_cast<double>(n) * std::log(eta_);

    if (fast_) update_fastpath(x, y);

    points_.push_back(x);
    outputs_.conservativeResize(outputs_.size() + n);
    outputs_.tail(n) = y;

    if (points_.size() % kRefactorInterval == 0) chol_.refactor();
    alpha_ = chol_.solve(outputs_);
}

void ExactPosterior::update_fastpath(const Point& x, const Eigen::VectorXd& y) {
    auto& fast = *fast_;
    const auto t = static_cast<Index>(points_.size());
    Eigen::VectorXd kx(t);
    for (Index s = 0; s < t; ++s) kx(s) = fast.scalar(points_[static_cast<std::size_t>(s)], x);
    const double kxx = fast.scalar(x, x);
    const bool refactor = (points_.size() + 1) % kRefactorInterval == 0;

    for (std::size_t i = 0; i < fast.factors.size(); ++i) {
        const double xi = fast.spectrum.eigenvalues(static_cast<Index>(i));
        auto& proj = fast.projected[i];
        proj.conservativeResize(t + 1);
        proj(t) = y.dot(fast.spectrum.eigenvectors.col(static_cast<Index>(i)));
        if (xi <= 0.0) continue;
        Eigen::MatrixXd diag(1, 1);
        diag(0, 0) = xi * kxx + eta_;
        fast.factors[i].append(xi * kx, diag);
        if (refactor) fast.factors[i].refactor();
        fast.weights[i] = fast.factors[i].solve(proj);
    }
}

double ExactPosterior::logdet_increment(const Point& x) const {
    const Index n = tasks();
    return logdet_spd(raw_cov(x) + eta_ * Eigen::MatrixXd::Identity(n, n)) - static_cast<double>(n) * std::log(eta_);
}

Eigen::VectorXd ExactPosterior::mean(const Point& x) const {
    if (points_.empty()) return Eigen::VectorXd::Zero(tasks());
    return cross_block(kernel_, points_, x).transpose() * alpha_;
}

Eigen::MatrixXd ExactPosterior::raw_cov(const Point& x) const {
    Eigen::MatrixXd out = kernel_(x, x);
    if (!points_.empty()) {
        const Eigen::MatrixXd v = chol_.solve_lower(cross_block(kernel_, points_, x));
        out.noalias() -= v.transpose() * v;
    }
    return symmetrized(out);
}

Eigen::MatrixXd ExactPosterior::cov(const Point& x) const { return clamp_eigenvalues(raw_cov(x), 0.0, kernel_.kappa()); }

double ExactPosterior::cov_norm(const Point& x) const { return operator_norm_psd(cov(x)); }

const IcmFastState& ExactPosterior::fastpath() const {
    if (!fast_) throw UnsupportedVariant("ICM fast path requires an ICM kernel (and the fast path enabled)");
    return *fast_;
}

Eigen::VectorXd ExactPosterior::icm_mean(const Point& x) const {
    const auto& fast = fastpath();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(tasks());
    if (points_.empty()) return out;
    Eigen::VectorXd kx(static_cast<Index>(points_.size()));
    for (Index s = 0; s < kx.size(); ++s) kx(s) = fast.scalar(points_[static_cast<std::size_t>(s)], x);
    for (std::size_t i = 0; i < fast.factors.size(); ++i) {
        const double xi = fast.spectrum.eigenvalues(static_cast<Index>(i));
        if (xi <= 0.0) continue;
        out += xi * kx.dot(fast.weights[i]) * fast.spectrum.eigenvectors.col(static_cast<Index>(i));
    }
    return out;
}

Eigen::MatrixXd ExactPosterior::icm_raw_cov(const Point& x) const {
    const auto& fast = fastpath();
    const Index n = tasks();
    Eigen::VectorXd kx(static_cast<Index>(points_.size()));
    for (Index s = 0; s < kx.size(); ++s) kx(s) = fast.scalar(points_[static_cast<std::size_t>(s)], x);
    const double kxx = fast.scalar(x, x);
    Eigen::VectorXd directional(n);
    for (Index i = 0; i < n; ++i) {
        const double xi = fast.spectrum.eigenvalues(i);
        if (xi <= 0.0) {
            directional(i) = 0.0;
            continue;
        }
        double explained = 0.0;
        if (kx.size() > 0) explained = (xi * fast.factors[static_cast<std::size_t>(i)].solve_lower(kx)).squaredNorm();
        directional(i) = xi * kxx - explained;
    }
    const auto& u = fast.spectrum.eigenvectors;
    return u * directional.asDiagonal() * u.transpose();
}

Eigen::MatrixXd ExactPosterior::icm_cov(const Point& x) const {
    return clamp_eigenvalues(icm_raw_cov(x), 0.0, kernel_.kappa());
}

double ExactPosterior::icm_cov_norm(const Point& x) const {
    const auto& fast = fastpath();
    const Index n = tasks();
    Eigen::VectorXd kx(static_cast<Index>(points_.size()));
    for (Index s = 0; s < kx.size(); ++s) kx(s) = fast.scalar(points_[static_cast<std::size_t>(s)], x);
    const double kxx = fast.scalar(x, x);
    double best = 0.0;
    for (Index i = 0; i < n; ++i) {
        const double xi = fast.spectrum.eigenvalues(i);
        if (xi <= 0.0) continue;
        double explained = 0.0;
        if (kx.size() > 0) explained = (xi * fast.factors[static_cast<std::size_t>(i)].solve_lower(kx)).squaredNorm();
        best = std::max(best, xi * kxx - explained);
    }
    return std::min(best, kernel_.kappa());
}

Prediction ExactPosterior::predict(const PointList& queries) const {
    if (!fast_) return predict_general(queries);
    const auto& fast = *fast_;
    const Index n = tasks();
    const auto nq = static_cast<Index>(queries.size());
    Prediction out{Eigen::MatrixXd::Zero(n, nq), Eigen::VectorXd::Zero(nq)};
    const Eigen::MatrixXd kq = cross_gram(fast.scalar, points_, queries);
    Eigen::VectorXd kqq(nq);
    for (Index j = 0; j < nq; ++j) kqq(j) = fast.scalar(queries[static_cast<std::size_t>(j)], queries[static_cast<std::size_t>(j)]);

    for (Index i = 0; i < n; ++i) {
        const double xi = fast.spectrum.eigenvalues(i);
        if (xi <= 0.0) continue;
        const auto& factor = fast.factors[static_cast<std::size_t>(i)];
        Eigen::VectorXd directional = xi * kqq;
        if (!points_.empty()) {
            const Eigen::VectorXd m = xi * (kq.transpose() * fast.weights[static_cast<std::size_t>(i)]);
            out.mean.noalias() += fast.spectrum.eigenvectors.col(i) * m.transpose();
            const Eigen::MatrixXd v = factor.solve_lower(xi * kq);
            directional -= v.colwise().squaredNorm().transpose();
        }
        out.cov_norm = out.cov_norm.cwiseMax(directional);
    }
    out.cov_norm = out.cov_norm.cwiseMax(0.0).cwiseMin(kernel_.kappa());
    return out;
}

Prediction ExactPosterior::predict_general(const PointList& queries) const {
    const Index n = tasks();
    const auto nq = static_cast<Index>(queries.size());
    Prediction out{Eigen::MatrixXd::Zero(n, nq), Eigen::VectorXd::Zero(nq)};
    if (points_.empty()) {
        for (Index j = 0; j < nq; ++j) {
            const auto& q = queries[static_cast<std::size_t>(j)];
            out.cov_norm(j) = operator_norm_psd(clamp_eigenvalues(kernel_(q, q), 0.0, kernel_.kappa()));
        }
        return out;
    }
    const Eigen::MatrixXd c = cross_block(kernel_, points_, queries);
    const Eigen::MatrixXd v = chol_.solve_lower(c);
    for (Index j = 0; j < nq; ++j) {
        const auto& q = queries[static_cast<std::size_t>(j)];
        out.mean.col(j) = c.middleCols(j * n, n).transpose() * alpha_;
        const auto vj = v.middleCols(j * n, n);
        Eigen::MatrixXd cov = kernel_(q, q);
        cov.noalias() -= vj.transpose() * vj;
        out.cov_norm(j) = operator_norm_psd(clamp_eigenvalues(cov, 0.0, kernel_.kappa()));
    }
    return out;
}

Eigen::VectorXd posterior_mean(const ExactPosterior& state, const Point& x) { return state.mean(x); }
Eigen::MatrixXd posterior_cov(const ExactPosterior& state, const Point& x) { return state.cov(x); }
double posterior_cov_norm(const ExactPosterior& state, const Point& x) { return state.cov_norm(x); }
Eigen::VectorXd icm_posterior_mean(const ExactPosterior& state, const Point& x) { return state.icm_mean(x); }
double icm_posterior_cov_norm(const ExactPosterior& state, const Point& x) { return state.icm_cov_norm(x); }

}  // namespace mtbandit
