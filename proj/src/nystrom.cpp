#include "mtbandit/nystrom.hpp"

#include <cmath>
#include <limits>

namespace mtbandit {

Dictionary Dictionary::full(std::size_t t) {
    Dictionary d;
    d.indices.resize(t);
    for (std::size_t i = 0; i < t; ++i) d.indices[i] = i;
    d.probs.assign(t, 1.0);
    return d;
}

Dictionary resample_dictionary(const Eigen::VectorXd& variance_norms, double q, Rng& rng) {
    if (!(q >= 1.0) || !std::isfinite(q)) throw InvalidInput("resample_dictionary: q must be >= 1");
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Dictionary d;
    for (Index i = 0; i < variance_norms.size(); ++i) {
        const double v = variance_norms(i);
        if (!(v >= 0.0)) throw InvalidInput("resample_dictionary: variance norms must be nonnegative");
        const double p = std::min(q * v, 1.0);
        const double u = unif(rng);
        if (u < p) {
            d.indices.push_back(static_cast<std::size_t>(i));
            d.probs.push_back(p);
        }
    }
    if (d.empty() && variance_norms.size() > 0) {
        d.indices.push_back(static_cast<std::size_t>(variance_norms.size() - 1));
        d.probs.push_back(1.0);
    }
    return d;
}

namespace {

// Scales each n-row block i of m by s(i).
void scale_row_blocks(Eigen::MatrixXd& m, const Eigen::VectorXd& s, Index n) {
    for (Index i = 0; i < s.size(); ++i) m.middleRows(i * n, n) *= s(i);
}

void check_dictionary(const Dictionary& d, std::size_t t) {
    if (d.indices.size() != d.probs.size()) throw InvalidInput("dictionary: indices and probabilities differ in length");
    if (t > 0 && d.empty()) throw InvalidInput("dictionary: must be nonempty");
    for (std::size_t j = 0; j < d.size(); ++j) {
        if (d.indices[j] >= t || (j > 0 && d.indices[j] <= d.indices[j - 1])) {
            throw InvalidInput("dictionary: indices must be strictly increasing and inside the history");
        }
        if (!(d.probs[j] > 0.0 && d.probs[j] <= 1.0)) throw InvalidInput("dictionary: probabilities must lie in (0, 1]");
    }
}

}  // namespace

NystromPosterior::NystromPosterior(MultiTaskKernel kernel, double eta, double q, std::uint64_t seed,
                                   std::optional<NystromMode> mode)
    : kernel_(std::move(kernel)), eta_(eta), q_(q), rng_(seed), last_norms_(0) {
    if (!(eta_ > 0.0) || !std::isfinite(eta_)) throw InvalidInput("NystromPosterior: eta must be positive");
    if (!(q_ >= 1.0) || !std::isfinite(q_)) throw InvalidInput("NystromPosterior: q must be >= 1");
    mode_ = mode.value_or(kernel_.is_icm() ? NystromMode::IcmFast : NystromMode::General);
    if (mode_ == NystromMode::IcmFast) {
        const auto& icm = kernel_.as_icm();
        fast_.scalar = icm.scalar;
        fast_.spectrum = coupling_spectrum(icm.coupling);
    }
    rebuild();
}

void NystromPosterior::update(const Point& x, const Eigen::VectorXd& y, const std::optional<Dictionary>& forced) {
    const Index n = tasks();
    if (y.size() != n) throw InvalidInput("nystrom_update: output dimension mismatch");
    if (!x.allFinite() || !y.allFinite()) throw InvalidInput("nystrom_update: non-finite observation");
    if (!points_.empty() && x.size() != points_.front().size()) {
        throw InvalidInput("nystrom_update: input dimension mismatch");
    }
    if (forced) check_dictionary(*forced, points_.size() + 1);

    const Eigen::MatrixXd prior_cov = cov(x);
    approx_logdet_sum_ +=
        logdet_spd(prior_cov + eta_ * Eigen::MatrixXd::Identity(n, n)) - static_cast<double>(n) * std::log(eta_);

    PointList all = points_;
    all.push_back(x);
    last_norms_ = predict(all).cov_norm;

    points_ = std::move(all);
    outputs_.push_back(y);
    dict_ = forced ? *forced : resample_dictionary(last_norms_, q_, rng_);
    rebuild();
}

void NystromPosterior::rebuild() {
    if (mode_ == NystromMode::IcmFast) {
        rebuild_fast();
    } else {
        rebuild_general();
    }
}

void NystromPosterior::rebuild_general() {
    const Index n = tasks();
    auto& g = general_;
    g.support.clear();
    g.inv_sqrt_p.resize(static_cast<Index>(dict_.size()));
    for (std::size_t j = 0; j < dict_.size(); ++j) {
        g.support.push_back(points_[dict_.indices[j]]);
        g.inv_sqrt_p(static_cast<Index>(j)) = 1.0 / std::sqrt(dict_.probs[j]);
    }
    const Index dim = n * static_cast<Index>(dict_.size());
    if (dim == 0) {
        g.root_pinv.resize(0, 0);
        g.weights.resize(0);
        return;
    }

    Eigen::MatrixXd support_gram = block_kernel_matrix(kernel_, g.support);
    scale_row_blocks(support_gram, g.inv_sqrt_p, n);
    support_gram.transposeInPlace();
    scale_row_blocks(support_gram, g.inv_sqrt_p, n);
    g.root_pinv = pinv_sqrt_psd(support_gram, kNystromPinvTol);

    Eigen::MatrixXd cross = cross_block(kernel_, g.support, points_);
    scale_row_blocks(cross, g.inv_sqrt_p, n);
    const Eigen::MatrixXd phi = g.root_pinv * cross;  // nm x nt

    Eigen::VectorXd ys(n * static_cast<Index>(outputs_.size()));
    for (std::size_t s = 0; s < outputs_.size(); ++s) ys.segment(static_cast<Index>(s) * n, n) = outputs_[s];

    Eigen::MatrixXd v = phi * phi.transpose();
    v.diagonal().array() += eta_;
    g.reg.compute(symmetrized(v));
    if (g.reg.info() != Eigen::Success) throw InternalError("nystrom: V + eta I is not positive definite");
    g.weights = g.reg.solve(phi * ys);
}

void NystromPosterior::rebuild_fast() {
    auto& f = fast_;
    const Index n = tasks();
    f.support.clear();
    f.inv_sqrt_p.resize(static_cast<Index>(dict_.size()));
    for (std::size_t j = 0; j < dict_.size(); ++j) {
        f.support.push_back(points_[dict_.indices[j]]);
        f.inv_sqrt_p(static_cast<Index>(j)) = 1.0 / std::sqrt(dict_.probs[j]);
    }
    const auto m = static_cast<Index>(dict_.size());
    f.reg.assign(static_cast<std::size_t>(n), Eigen::LLT<Eigen::MatrixXd>());
    f.weights.assign(static_cast<std::size_t>(n), Eigen::VectorXd(0));
    if (m == 0) {
        f.root_pinv.resize(0, 0);
        return;
    }

    const Eigen::MatrixXd support_gram =
        f.inv_sqrt_p.asDiagonal() * gram(f.scalar, f.support) * f.inv_sqrt_p.asDiagonal();
    f.root_pinv = pinv_sqrt_psd(support_gram, kNystromPinvTol);
    const Eigen::MatrixXd phi = f.root_pinv * (f.inv_sqrt_p.asDiagonal() * cross_gram(f.scalar, f.support, points_));
    const Eigen::MatrixXd v = phi * phi.transpose();

    Eigen::MatrixXd ys(static_cast<Index>(outputs_.size()), n);
    for (std::size_t s = 0; s < outputs_.size(); ++s) ys.row(static_cast<Index>(s)) = outputs_[s].transpose();
    const Eigen::MatrixXd projected = ys * f.spectrum.eigenvectors;  // column i holds Y^i

    for (Index i = 0; i < n; ++i) {
        const double xi = f.spectrum.eigenvalues(i);
        if (xi <= 0.0) continue;
        Eigen::MatrixXd a = xi * v;
        a.diagonal().array() += eta_;
        auto& reg = f.reg[static_cast<std::size_t>(i)];
        reg.compute(symmetrized(a));
        if (reg.info() != Eigen::Success) throw InternalError("nystrom: xi v + eta I is not positive definite");
        f.weights[static_cast<std::size_t>(i)] = reg.solve(phi * projected.col(i));
    }
}

Prediction NystromPosterior::predict_general(const PointList& queries, std::vector<Eigen::MatrixXd>* covs) const {
    const Index n = tasks();
    const auto nq = static_cast<Index>(queries.size());
    const auto& g = general_;
    Prediction out{Eigen::MatrixXd::Zero(n, nq), Eigen::VectorXd::Zero(nq)};
    if (covs) covs->clear();

    Eigen::MatrixXd phi;
    Eigen::MatrixXd lv;
    const bool has_support = g.root_pinv.rows() > 0;
    if (has_support) {
        Eigen::MatrixXd cross = cross_block(kernel_, g.support, queries);
        scale_row_blocks(cross, g.inv_sqrt_p, n);
        phi = g.root_pinv * cross;
        lv = g.reg.matrixL().solve(phi);
    }
    for (Index j = 0; j < nq; ++j) {
        const auto& q = queries[static_cast<std::size_t>(j)];
        Eigen::MatrixXd c = kernel_(q, q);
        if (has_support) {
            const auto pj = phi.middleCols(j * n, n);
            const auto lj = lv.middleCols(j * n, n);
            out.mean.col(j) = pj.transpose() * g.weights;
            c.noalias() -= pj.transpose() * pj;
            c.noalias() += eta_ * (lj.transpose() * lj);
        }
        c = symmetrized(c);
        out.cov_norm(j) = operator_norm_psd(c);
        if (covs) covs->push_back(std::move(c));
    }
    return out;
}

Prediction NystromPosterior::predict_fast(const PointList& queries, Eigen::MatrixXd* directional) const {
    const Index n = tasks();
    const auto nq = static_cast<Index>(queries.size());
    const auto& f = fast_;
    Prediction out{Eigen::MatrixXd::Zero(n, nq), Eigen::VectorXd::Zero(nq)};

    Eigen::VectorXd kqq(nq);
    for (Index j = 0; j < nq; ++j) kqq(j) = f.scalar(queries[static_cast<std::size_t>(j)], queries[static_cast<std::size_t>(j)]);
    const bool has_support = f.root_pinv.rows() > 0;
    Eigen::MatrixXd phi;
    Eigen::VectorXd explained = Eigen::VectorXd::Zero(nq);
    if (has_support) {
        phi = f.root_pinv * (f.inv_sqrt_p.asDiagonal() * cross_gram(f.scalar, f.support, queries));
        explained = phi.colwise().squaredNorm().transpose();
    }
    if (directional) directional->setZero(n, nq);

    for (Index i = 0; i < n; ++i) {
        const double xi = f.spectrum.eigenvalues(i);
        if (xi <= 0.0) continue;
        Eigen::VectorXd d = kqq - explained;
        if (has_support) {
            const auto& reg = f.reg[static_cast<std::size_t>(i)];
            const Eigen::VectorXd m = xi * (phi.transpose() * f.weights[static_cast<std::size_t>(i)]);
            out.mean.noalias() += f.spectrum.eigenvectors.col(i) * m.transpose();
            const Eigen::MatrixXd lv = reg.matrixL().solve(phi);
            d += eta_ * lv.colwise().squaredNorm().transpose();
        }
        d *= xi;
        if (directional) directional->row(i) = d.transpose();
        out.cov_norm = out.cov_norm.cwiseMax(d);
    }
    return out;
}

Prediction NystromPosterior::predict(const PointList& queries) const {
    if (mode_ == NystromMode::IcmFast) return predict_fast(queries, nullptr);
    return predict_general(queries, nullptr);
}

Eigen::MatrixXd NystromPosterior::raw_cov(const Point& x) const {
    if (mode_ == NystromMode::IcmFast) {
        Eigen::MatrixXd d;
        predict_fast(PointList{x}, &d);
        const auto& u = fast_.spectrum.eigenvectors;
        return symmetrized(u * d.col(0).asDiagonal() * u.transpose());
    }
    std::vector<Eigen::MatrixXd> covs;
    predict_general(PointList{x}, &covs);
    return covs.front();
}

Eigen::VectorXd NystromPosterior::mean(const Point& x) const { return predict(PointList{x}).mean.col(0); }

Eigen::MatrixXd NystromPosterior::cov(const Point& x) const {
    return clamp_eigenvalues(raw_cov(x), 0.0, std::numeric_limits<double>::infinity());
}

double NystromPosterior::cov_norm(const Point& x) const { return predict(PointList{x}).cov_norm(0); }

Eigen::MatrixXd NystromPosterior::embedding(const Point& x) const {
    if (mode_ != NystromMode::General) throw UnsupportedVariant("embedding: only available in general mode");
    const Index n = tasks();
    if (general_.root_pinv.rows() == 0) return Eigen::MatrixXd(0, n);
    Eigen::MatrixXd cross = cross_block(kernel_, general_.support, x);
    scale_row_blocks(cross, general_.inv_sqrt_p, n);
    return general_.root_pinv * cross;
}

}  // namespace mtbandit
