#include <random>

#include "helpers.hpp"
#include "mtbandit/linalg.hpp"

using namespace mtbandit;

namespace {

Eigen::MatrixXd random_spd(Index n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Eigen::MatrixXd a(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) a(i, j) = g(rng);
    return a * a.transpose() + Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

TEST(BlockCholesky, BlockwiseMatchesDirect) {
    const Eigen::MatrixXd m = random_spd(9, 1);
    BlockCholesky chol;
    for (Index s = 0; s < 9; s += 3) chol.append(m.block(0, s, s, 3), m.block(s, s, 3, 3));
    EXPECT_EQ(chol.dim(), 9);
    const Eigen::MatrixXd l = Eigen::MatrixXd(chol.factor());
    EXPECT_TRUE((l * l.transpose()).isApprox(m, 1e-12));
    EXPECT_NEAR(chol.logdet(), std::log(m.determinant()), 1e-10);
}

TEST(BlockCholesky, SchurComplementReturned) {
    const Eigen::MatrixXd m = random_spd(5, 2);
    BlockCholesky chol;
    chol.append(Eigen::MatrixXd(0, 3), m.topLeftCorner(3, 3));
    const Eigen::MatrixXd s = chol.append(m.topRightCorner(3, 2), m.bottomRightCorner(2, 2));
    const Eigen::MatrixXd want =
        m.bottomRightCorner(2, 2) - m.bottomLeftCorner(2, 3) * m.topLeftCorner(3, 3).inverse() * m.topRightCorner(3, 2);
    EXPECT_TRUE(s.isApprox(want, 1e-12));
}

TEST(BlockCholesky, SolveAndRefactor) {
    const Eigen::MatrixXd m = random_spd(6, 3);
    BlockCholesky chol;
    chol.append(Eigen::MatrixXd(0, 6), m);
    const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(6, -1, 1);
    EXPECT_TRUE((m * chol.solve(b)).isApprox(b, 1e-12));
    chol.refactor();
    EXPECT_TRUE((m * chol.solve(b)).isApprox(b, 1e-12));
}

TEST(BlockCholesky, RejectsIndefiniteBlock) {
    BlockCholesky chol;
    chol.append(Eigen::MatrixXd(0, 1), Eigen::MatrixXd::Identity(1, 1));
    Eigen::MatrixXd cross(1, 1);
    cross << 2.0;
    EXPECT_THROW(chol.append(cross, Eigen::MatrixXd::Identity(1, 1)), Error);
}

TEST(Spectral, ClampAndPinvSqrt) {
    Eigen::MatrixXd m(2, 2);
    m << 2, 0, 0, -1;
    const Eigen::MatrixXd c = clamp_eigenvalues(m, 0.0, 1.5);
    EXPECT_NEAR(c(0, 0), 1.5, 1e-14);
    EXPECT_NEAR(c(1, 1), 0.0, 1e-14);

    Eigen::MatrixXd p(2, 2);
    p << 4, 0, 0, 1e-20;
    const Eigen::MatrixXd r = pinv_sqrt_psd(p, 1e-12);
    EXPECT_NEAR(r(0, 0), 0.5, 1e-14);
    EXPECT_EQ(r(1, 1), 0.0);
}

TEST(Spectral, LogdetSpd) {
    const Eigen::MatrixXd m = random_spd(4, 5);
    EXPECT_NEAR(logdet_spd(m), std::log(m.determinant()), 1e-10);
    EXPECT_THROW(logdet_spd(-Eigen::MatrixXd::Identity(2, 2)), InternalError);
}
