#include "mtbandit/linalg.hpp"

#include <algorithm>

namespace mtbandit {

void BlockCholesky::reserve(Index capacity) {
    if (capacity <= a_.rows()) return;
    const Index grown = std::max<Index>(capacity, 2 * a_.rows());
    a_.conservativeResize(grown, grown);
    l_.conservativeResize(grown, grown);
}

Eigen::MatrixXd BlockCholesky::append(const Eigen::MatrixXd& cross, const Eigen::MatrixXd& diag) {
    const Index b = diag.rows();
    if (diag.cols() != b || cross.rows() != dim_ || cross.cols() != b) {
        throw InvalidInput("BlockCholesky::append: block shapes do not match");
    }
    const Eigen::MatrixXd c = solve_lower(cross);
    Eigen::MatrixXd schur = diag;
    if (dim_ > 0) schur.noalias() -= c.transpose() * c;
    schur = symmetrized(schur);

    Eigen::LLT<Eigen::MatrixXd> llt(schur);
    if (llt.info() != Eigen::Success) {
        throw InternalError("BlockCholesky::append: Schur complement is not positive definite");
    }

    reserve(dim_ + b);
    a_.block(0, dim_, dim_, b) = cross;
    a_.block(dim_, 0, b, dim_) = cross.transpose();
    a_.block(dim_, dim_, b, b) = diag;

    l_.block(0, dim_, dim_, b).setZero();
    l_.block(dim_, 0, b, dim_) = c.transpose();
    l_.block(dim_, dim_, b, b) = llt.matrixL();
    dim_ += b;
    return schur;
}

void BlockCholesky::refactor() {
    if (dim_ == 0) return;
    Eigen::LLT<Eigen::MatrixXd> llt(symmetrized(Eigen::MatrixXd(matrix())));
    if (llt.info() != Eigen::Success) {
        throw InternalError("BlockCholesky::refactor: matrix is not positive definite");
    }
    l_.topLeftCorner(dim_, dim_) = llt.matrixL();
}

double BlockCholesky::logdet() const {
    if (dim_ == 0) return 0.0;
    return 2.0 * l_.topLeftCorner(dim_, dim_).diagonal().array().log().sum();
}

double logdet_spd(const Eigen::MatrixXd& m) {
    if (m.rows() == 0) return 0.0;
    Eigen::LLT<Eigen::MatrixXd> llt(symmetrized(m));
    if (llt.info() != Eigen::Success) {
        throw InternalError("logdet_spd: matrix is not positive definite");
    }
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

Eigen::MatrixXd pinv_sqrt_psd(const Eigen::MatrixXd& m, double rel_tol) {
    if (m.rows() == 0) return Eigen::MatrixXd(0, 0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(m));
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double cutoff = rel_tol * std::max(ev.maxCoeff(), 0.0);
    Eigen::VectorXd inv_sqrt(ev.size());
    for (Index i = 0; i < ev.size(); ++i) {
        inv_sqrt(i) = (ev(i) > cutoff && ev(i) > 0.0) ? 1.0 / std::sqrt(ev(i)) : 0.0;
    }
    return es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace mtbandit
