#include "mtbandit/kernels.hpp"

#include <algorithm>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace mtbandit {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kPsdRelTol = 1e-9;
// Eigenvalues this small relative to the largest are round-off and are set to exactly zero.
constexpr double kZeroEigenRelTol = 1e-12;

void validate_symmetric_psd(const Eigen::MatrixXd& b, const char* what) {
    if (b.rows() != b.cols() || b.rows() == 0) {
        throw ValidationError(std::string(what) + ": coupling matrix must be square and non-empty");
    }
    if (!b.allFinite()) {
        throw ValidationError(std::string(what) + ": coupling matrix has non-finite entries");
    }
    const double asym = (b - b.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTol * std::max(1.0, b.cwiseAbs().maxCoeff())) {
        std::ostringstream msg;
        msg << what << ": coupling matrix is not symmetric (max |B - B^T| = " << asym << ")";
        throw ValidationError(msg.str());
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b, Eigen::EigenvaluesOnly);
    const double lmax = es.eigenvalues().maxCoeff();
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin < -kPsdRelTol * std::max(lmax, 0.0) || (lmax <= 0.0 && lmin < 0.0)) {
        std::ostringstream msg;
        msg << what << ": coupling matrix is indefinite (eigenvalue " << lmin << ")";
        throw ValidationError(msg.str());
    }
}

}  // namespace

std::string to_string(KernelFamily family) {
    return family == KernelFamily::SquaredExponential ? "se" : "matern52";
}

KernelFamily kernel_family_from_string(const std::string& name) {
    if (name == "se" || name == "squared_exponential") return KernelFamily::SquaredExponential;
    if (name == "matern52" || name == "matern") return KernelFamily::Matern52;
    throw InvalidInput("unknown kernel family '" + name + "'");
}

void ScalarKernel::validate() const {
    if (!(lengthscale > 0.0) || !std::isfinite(lengthscale)) {
        throw InvalidInput("scalar kernel: lengthscale must be positive and finite");
    }
}

double scalar_eval(const ScalarKernel& k, const Point& x, const Point& xp) {
    k.validate();
    return k(x, xp);
}

Eigen::MatrixXd gram(const ScalarKernel& k, const PointList& xs) {
    const auto t = static_cast<Index>(xs.size());
    Eigen::MatrixXd out(t, t);
    for (Index i = 0; i < t; ++i) {
        out(i, i) = k(xs[i], xs[i]);
        for (Index j = 0; j < i; ++j) {
            out(i, j) = out(j, i) = k(xs[i], xs[j]);
        }
    }
    return out;
}

Eigen::MatrixXd cross_gram(const ScalarKernel& k, const PointList& xs, const PointList& ys) {
    Eigen::MatrixXd out(static_cast<Index>(xs.size()), static_cast<Index>(ys.size()));
    for (Index j = 0; j < out.cols(); ++j) {
        for (Index i = 0; i < out.rows(); ++i) {
            out(i, j) = k(xs[i], ys[j]);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// CouplingMatrix

CouplingMatrix::CouplingMatrix(Eigen::MatrixXd entries) : b_(std::move(entries)) {
    validate_symmetric_psd(b_, "CouplingMatrix");
}

CouplingMatrix CouplingMatrix::identity(Index n) { return CouplingMatrix(Eigen::MatrixXd::Identity(n, n)); }

CouplingMatrix CouplingMatrix::omega(double omega, Index n) {
    if (!(omega >= 0.0 && omega <= 1.0)) {
        throw InvalidInput("omega coupling requires omega in [0, 1]");
    }
    Eigen::MatrixXd b = omega * Eigen::MatrixXd::Identity(n, n) +
                        (1.0 - omega) * Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
    return CouplingMatrix(std::move(b));
}

CouplingMatrix CouplingMatrix::gram_of(const Eigen::MatrixXd& a) {
    Eigen::MatrixXd b = a.transpose() * a;
    return CouplingMatrix(0.5 * (b + b.transpose()));
}

CouplingMatrix CouplingMatrix::random_gram(Index n, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::MatrixXd a(n, n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) a(i, j) = unif(rng);
    }
    return gram_of(a);
}

CouplingMatrix CouplingMatrix::from_row_major(std::span<const double> entries, Index n) {
    if (static_cast<Index>(entries.size()) != n * n) {
        throw InvalidInput("coupling matrix: expected n*n entries");
    }
    Eigen::MatrixXd b(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) b(i, j) = entries[static_cast<std::size_t>(i * n + j)];
    }
    return CouplingMatrix(std::move(b));
}

Eigen::MatrixXd CouplingSpectrum::reconstruct() const {
    return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
}

CouplingSpectrum coupling_spectrum(const Eigen::MatrixXd& b) {
    validate_symmetric_psd(b, "coupling_spectrum");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
    const Index n = b.rows();
    CouplingSpectrum out;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    // Eigen returns ascending order.
    for (Index i = 0; i < n; ++i) {
        out.eigenvalues(i) = es.eigenvalues()(n - 1 - i);
        out.eigenvectors.col(i) = es.eigenvectors().col(n - 1 - i);
    }
    const double top = std::max(out.eigenvalues(0), 0.0);
    for (Index i = 0; i < n; ++i) {
        if (out.eigenvalues(i) <= kZeroEigenRelTol * top) out.eigenvalues(i) = 0.0;
    }
    return out;
}

CouplingSpectrum coupling_spectrum(const CouplingMatrix& b) { return coupling_spectrum(b.matrix()); }

// ---------------------------------------------------------------------------
// MultiTaskKernel

MultiTaskKernel::MultiTaskKernel(Variant v) : variant_(std::move(v)) {
    std::visit(
        [this](const auto& spec) {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, Icm>) {
                spec.scalar.validate();
                terms_.emplace_back(spec.scalar, spec.coupling.matrix());
            } else if constexpr (std::is_same_v<T, SumSeparable>) {
                if (spec.terms.empty()) throw InvalidInput("sum-separable kernel needs at least one term");
                for (const auto& [k, b] : spec.terms) {
                    k.validate();
                    terms_.emplace_back(k, b.matrix());
                }
            } else {
                if (spec.scalars.empty()) throw InvalidInput("diagonal kernel needs at least one task");
                const auto n = static_cast<Index>(spec.scalars.size());
                for (Index j = 0; j < n; ++j) {
                    spec.scalars[static_cast<std::size_t>(j)].validate();
                    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
                    e(j, j) = 1.0;
                    terms_.emplace_back(spec.scalars[static_cast<std::size_t>(j)], std::move(e));
                }
            }
        },
        variant_);

    tasks_ = terms_.front().second.rows();
    Eigen::MatrixXd at_origin = Eigen::MatrixXd::Zero(tasks_, tasks_);
    for (const auto& [k, b] : terms_) {
        if (b.rows() != tasks_) throw InvalidInput("multi-task kernel: coupling matrices differ in size");
        at_origin += b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(at_origin, Eigen::EigenvaluesOnly);
    kappa_ = std::max(es.eigenvalues().maxCoeff(), 0.0);
}

MultiTaskKernel MultiTaskKernel::icm(ScalarKernel scalar, CouplingMatrix coupling) {
    return MultiTaskKernel(Icm{scalar, std::move(coupling)});
}

MultiTaskKernel MultiTaskKernel::sum_separable(std::vector<std::pair<ScalarKernel, CouplingMatrix>> terms) {
    return MultiTaskKernel(SumSeparable{std::move(terms)});
}

MultiTaskKernel MultiTaskKernel::diagonal(std::vector<ScalarKernel> scalars) {
    return MultiTaskKernel(Diagonal{std::move(scalars)});
}

const MultiTaskKernel::Icm& MultiTaskKernel::as_icm() const {
    if (const auto* p = std::get_if<Icm>(&variant_)) return *p;
    throw UnsupportedVariant("operation requires an ICM (separable) kernel");
}

Eigen::MatrixXd MultiTaskKernel::operator()(const Point& x, const Point& xp) const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(tasks_, tasks_);
    for (const auto& [k, b] : terms_) out.noalias() += k(x, xp) * b;
    return out;
}

std::string MultiTaskKernel::describe() const {
    std::ostringstream os;
    std::visit(
        [&os, this](const auto& spec) {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, Icm>) {
                os << "icm(" << to_string(spec.scalar.family) << ", l=" << spec.scalar.lengthscale << ", n=" << tasks_
                   << ")";
            } else if constexpr (std::is_same_v<T, SumSeparable>) {
                os << "sum_separable(M=" << spec.terms.size() << ", n=" << tasks_ << ")";
            } else {
                os << "diagonal(n=" << tasks_ << ")";
            }
        },
        variant_);
    return os.str();
}

Eigen::MatrixXd mt_eval(const MultiTaskKernel& kernel, const Point& x, const Point& xp) { return kernel(x, xp); }

namespace {

// out += K (x) B, where K is |rows| x |cols| and blocks are n x n.
void add_kron(Eigen::MatrixXd& out, const Eigen::MatrixXd& k, const Eigen::MatrixXd& b) {
    const Index n = b.rows();
    for (Index j = 0; j < k.cols(); ++j) {
        for (Index i = 0; i < k.rows(); ++i) {
            out.block(i * n, j * n, n, n).noalias() += k(i, j) * b;
        }
    }
}

}  // namespace

Eigen::MatrixXd block_kernel_matrix(const MultiTaskKernel& kernel, const PointList& xs) {
    const Index n = kernel.tasks();
    const auto t = static_cast<Index>(xs.size());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n * t, n * t);
    for (const auto& [k, b] : kernel.terms()) add_kron(out, gram(k, xs), b);
    return out;
}

Eigen::MatrixXd cross_block(const MultiTaskKernel& kernel, const PointList& xs, const Point& x) {
    return cross_block(kernel, xs, PointList{x});
}

Eigen::MatrixXd cross_block(const MultiTaskKernel& kernel, const PointList& xs, const PointList& queries) {
    const Index n = kernel.tasks();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n * static_cast<Index>(xs.size()), n * static_cast<Index>(queries.size()));
    for (const auto& [k, b] : kernel.terms()) add_kron(out, cross_gram(k, xs, queries), b);
    return out;
}

}  // namespace mtbandit
