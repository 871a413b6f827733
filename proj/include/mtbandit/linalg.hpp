#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "mtbandit/errors.hpp"
#include "mtbandit/types.hpp"

namespace mtbandit {

/// Cholesky factor of a growing SPD matrix, extended one block at a time.
///
/// Appending [[A, C], [C^T, D]] costs one triangular solve with the block C,
/// and the Schur complement D - C^T A^{-1} C falls out of the update. The
/// original matrix is kept so the factor can be recomputed from scratch.
class BlockCholesky {
public:
    BlockCholesky() = default;

    Index dim() const { return dim_; }

    /// Returns the Schur complement S = diag - cross^T A^{-1} cross of the new block.
    Eigen::MatrixXd append(const Eigen::MatrixXd& cross, const Eigen::MatrixXd& diag);

    /// Recomputes the factor from the stored matrix.
    void refactor();

    auto matrix() const { return a_.topLeftCorner(dim_, dim_); }
    auto factor() const { return l_.topLeftCorner(dim_, dim_).template triangularView<Eigen::Lower>(); }

    /// L^{-1} rhs
    template <typename Derived>
    Eigen::MatrixXd solve_lower(const Eigen::MatrixBase<Derived>& rhs) const {
        Eigen::MatrixXd out = rhs;
        if (dim_ > 0) factor().solveInPlace(out);
        return out;
    }

    /// A^{-1} rhs
    template <typename Derived>
    Eigen::MatrixXd solve(const Eigen::MatrixBase<Derived>& rhs) const {
        Eigen::MatrixXd out = solve_lower(rhs);
        if (dim_ > 0) l_.topLeftCorner(dim_, dim_).transpose().template triangularView<Eigen::Upper>().solveInPlace(out);
        return out;
    }

    double logdet() const;

private:
    void reserve(Index capacity);

    Eigen::MatrixXd a_;
    Eigen::MatrixXd l_;
    Index dim_ = 0;
};

template <typename Derived>
Matrix<typename Derived::Scalar> symmetrized(const Eigen::MatrixBase<Derived>& m) {
    return (typename Derived::Scalar(0.5) * (m + m.transpose())).eval();
}

template <typename Derived>
typename Derived::Scalar min_eigenvalue(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() == 0) return 0;
    Eigen::SelfAdjointEigenSolver<Matrix<typename Derived::Scalar>> es(symmetrized(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

template <typename Derived>
typename Derived::Scalar max_eigenvalue(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() == 0) return 0;
    Eigen::SelfAdjointEigenSolver<Matrix<typename Derived::Scalar>> es(symmetrized(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

/// Symmetrises and clamps the spectrum into [lo, hi].
template <typename Derived>
Matrix<typename Derived::Scalar> clamp_eigenvalues(const Eigen::MatrixBase<Derived>& m, typename Derived::Scalar lo,
                                                   typename Derived::Scalar hi) {
    using Scalar = typename Derived::Scalar;
    Matrix<Scalar> s = symmetrized(m);
    if (s.rows() == 0) return s;
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(s);
    const Vector<Scalar>& ev = es.eigenvalues();
    if (ev.minCoeff() >= lo && ev.maxCoeff() <= hi) return s;
    const Vector<Scalar> clamped = ev.cwiseMax(lo).cwiseMin(hi);
    return es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose();
}

/// log det of an SPD matrix; throws InternalError if the factorisation fails.
double logdet_spd(const Eigen::MatrixXd& m);

/// (M^{1/2})^+ for symmetric PSD M; eigenvalues below rel_tol * max are treated as zero.
Eigen::MatrixXd pinv_sqrt_psd(const Eigen::MatrixXd& m, double rel_tol);

}  // namespace mtbandit
