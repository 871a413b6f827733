#pragma once

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mtbandit/errors.hpp"
#include "mtbandit/types.hpp"

namespace mtbandit {

enum class KernelFamily { SquaredExponential, Matern52 };

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

/// Stationary scalar kernel with unit variance, k(x, x) = 1.
struct ScalarKernel {
    KernelFamily family = KernelFamily::SquaredExponential;
    double lengthscale = 1.0;

    void validate() const;

    template <typename DerivedA, typename DerivedB>
    typename DerivedA::Scalar operator()(const Eigen::MatrixBase<DerivedA>& x,
                                         const Eigen::MatrixBase<DerivedB>& xp) const {
        using Scalar = typename DerivedA::Scalar;
        if (x.size() != xp.size()) {
            throw InvalidInput("scalar kernel: dimension mismatch");
        }
        if (!x.allFinite() || !xp.allFinite()) {
            throw InvalidInput("scalar kernel: non-finite input");
        }
        const Scalar ell = static_cast<Scalar>(lengthscale);
        const Scalar r2 = (x - xp).squaredNorm();
        if (family == KernelFamily::SquaredExponential) {
            return std::exp(-r2 / (Scalar(2) * ell * ell));
        }
        const Scalar s = std::sqrt(Scalar(5) * r2) / ell;
        return (Scalar(1) + s + Scalar(5) * r2 / (Scalar(3) * ell * ell)) * std::exp(-s);
    }

    bool operator==(const ScalarKernel&) const = default;
};

double scalar_eval(const ScalarKernel& k, const Point& x, const Point& xp);

/// Scalar Gram matrix [k(x_i, x_j)].
Eigen::MatrixXd gram(const ScalarKernel& k, const PointList& xs);

/// |xs| x |ys| matrix [k(x_i, y_j)].
Eigen::MatrixXd cross_gram(const ScalarKernel& k, const PointList& xs, const PointList& ys);

/// Symmetric PSD n x n task-coupling matrix B.
class CouplingMatrix {
public:
    explicit CouplingMatrix(Eigen::MatrixXd entries);

    static CouplingMatrix identity(Index n);
    /// omega * I + (1 - omega) * 1 1^T / n
    static CouplingMatrix omega(double omega, Index n);
    /// A^T A, symmetrised.
    static CouplingMatrix gram_of(const Eigen::MatrixXd& a);
    /// A^T A with A_ij ~ Uniform[0, 1].
    static CouplingMatrix random_gram(Index n, Rng& rng);
    static CouplingMatrix from_row_major(std::span<const double> entries, Index n);

    const Eigen::MatrixXd& matrix() const { return b_; }
    Index size() const { return b_.rows(); }

    bool operator==(const CouplingMatrix& other) const { return b_ == other.b_; }

private:
    Eigen::MatrixXd b_;
};

/// Eigen-system of a coupling matrix: eigenvalues descending, eigenvectors as columns.
struct CouplingSpectrum {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;

    Eigen::MatrixXd reconstruct() const;
};

/// Throws ValidationError (naming the offending eigenvalue) for asymmetric or indefinite input.
CouplingSpectrum coupling_spectrum(const Eigen::MatrixXd& b);
CouplingSpectrum coupling_spectrum(const CouplingMatrix& b);

/// Matrix-valued kernel Gamma(x, x') with n tasks.
class MultiTaskKernel {
public:
    struct Icm {
        ScalarKernel scalar;
        CouplingMatrix coupling;
    };
    struct SumSeparable {
        std::vector<std::pair<ScalarKernel, CouplingMatrix>> terms;
    };
    struct Diagonal {
        std::vector<ScalarKernel> scalars;
    };
    using Variant = std::variant<Icm, SumSeparable, Diagonal>;

    static MultiTaskKernel icm(ScalarKernel scalar, CouplingMatrix coupling);
    static MultiTaskKernel sum_separable(std::vector<std::pair<ScalarKernel, CouplingMatrix>> terms);
    static MultiTaskKernel diagonal(std::vector<ScalarKernel> scalars);

    Index tasks() const { return tasks_; }
    /// sup_x ||Gamma(x, x)||, the largest eigenvalue of Gamma(x, x) for unit-variance kernels.
    double kappa() const { return kappa_; }

    bool is_icm() const { return std::holds_alternative<Icm>(variant_); }
    const Icm& as_icm() const;
    const Variant& variant() const { return variant_; }

    /// The kernel as a list of separable terms k_j(x, x') B_j.
    const std::vector<std::pair<ScalarKernel, Eigen::MatrixXd>>& terms() const { return terms_; }

    Eigen::MatrixXd operator()(const Point& x, const Point& xp) const;

    std::string describe() const;

private:
    explicit MultiTaskKernel(Variant v);

    Variant variant_;
    std::vector<std::pair<ScalarKernel, Eigen::MatrixXd>> terms_;
    Index tasks_ = 0;
    double kappa_ = 0.0;
};

Eigen::MatrixXd mt_eval(const MultiTaskKernel& kernel, const Point& x, const Point& xp);

/// G_t = [Gamma(x_i, x_j)], point-major: rows i*n .. i*n+n-1 belong to x_i.
Eigen::MatrixXd block_kernel_matrix(const MultiTaskKernel& kernel, const PointList& xs);

/// G_t(x): nt x n stack of Gamma(x_i, x).
Eigen::MatrixXd cross_block(const MultiTaskKernel& kernel, const PointList& xs, const Point& x);

/// nt x (n * |queries|); column block j equals cross_block(kernel, xs, queries[j]).
Eigen::MatrixXd cross_block(const MultiTaskKernel& kernel, const PointList& xs, const PointList& queries);

/// Kronecker product K (x) B, written without the unsupported module.
template <typename DerivedK, typename DerivedB>
Matrix<typename DerivedK::Scalar> kron(const Eigen::MatrixBase<DerivedK>& k, const Eigen::MatrixBase<DerivedB>& b) {
    Matrix<typename DerivedK::Scalar> out(k.rows() * b.rows(), k.cols() * b.cols());
    for (Index i = 0; i < k.rows(); ++i) {
        for (Index j = 0; j < k.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = k(i, j) * b;
        }
    }
    return out;
}

}  // namespace mtbandit
