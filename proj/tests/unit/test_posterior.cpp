#include <random>

#include "helpers.hpp"
#include "mtbandit/linalg.hpp"
#include "mtbandit/posterior.hpp"
#include "mtbandit/theory.hpp"

using namespace mtbandit;
using namespace mtbandit::testing;

namespace {

ExactPosterior fitted(const MultiTaskKernel& k, bool fast) {
    ExactPosterior s(k, 0.1, fast);
    const auto xs = small_points();
    const auto ys = small_outputs();
    for (std::size_t i = 0; i < xs.size(); ++i) s.update(xs[i], ys[i]);
    return s;
}

}  // namespace

TEST(ExactPosterior, PriorIsKernel) {
    const ExactPosterior s(small_icm(), 0.1);
    EXPECT_TRUE(s.mean(pt(0.3)).isZero());
    EXPECT_TRUE(s.cov(pt(0.3)).isApprox(mat2(1, 0.5, 0.5, 1)));
    EXPECT_NEAR(s.cov_norm(pt(0.3)), 1.5, 1e-12);
    EXPECT_EQ(s.logdet_sum(), 0.0);
}

// Values from a dense numpy solve of (G + eta I)^{-1}.
TEST(ExactPosterior, IcmMatchesDenseOracle) {
    for (bool fast : {false, true}) {
        const ExactPosterior s = fitted(small_icm(), fast);
        const Eigen::VectorXd mu = s.mean(pt(0.25));
        EXPECT_NEAR(mu(0), 0.7148863345221246, 1e-12);
        EXPECT_NEAR(mu(1), 0.14767688087443387, 1e-12);
        const Eigen::MatrixXd c = s.cov(pt(0.25));
        EXPECT_NEAR(c(0, 0), 0.1936542185079716, 1e-12);
        EXPECT_NEAR(c(0, 1), 0.06922776342328646, 1e-12);
        EXPECT_NEAR(c(1, 1), 0.1936542185079716, 1e-12);
        EXPECT_NEAR(s.logdet_sum(), 13.438881366411286, 1e-10);
    }
}

TEST(ExactPosterior, SumSeparableMatchesDenseOracle) {
    const ExactPosterior s = fitted(small_sum(), true);
    EXPECT_FALSE(s.has_fastpath());
    const Eigen::VectorXd mu = s.mean(pt(0.6));
    EXPECT_NEAR(mu(0), 0.21638537263534924, 1e-12);
    EXPECT_NEAR(mu(1), 0.7535097053717159, 1e-12);
    const Eigen::MatrixXd c = s.cov(pt(0.6));
    EXPECT_NEAR(c(0, 0), 0.3428709096484208, 1e-12);
    EXPECT_NEAR(c(0, 1), 0.10632447156164276, 1e-12);
    EXPECT_NEAR(c(1, 1), 0.5488606771618763, 1e-12);
    EXPECT_NEAR(s.logdet_sum(), 17.862379124503995, 1e-10);
}

TEST(ExactPosterior, FastPathAgreesWithBlockRoute) {
    const ExactPosterior s = fitted(small_icm(), true);
    ASSERT_TRUE(s.has_fastpath());
    const PointList q = pts({0.0, 0.33, 0.5, 0.99});
    const Prediction a = s.predict(q), b = s.predict_general(q);
    EXPECT_TRUE(a.mean.isApprox(b.mean, 1e-10));
    EXPECT_TRUE(a.cov_norm.isApprox(b.cov_norm, 1e-10));
    for (const auto& x : q) EXPECT_TRUE(s.icm_cov(x).isApprox(s.cov(x), 1e-10));
}

TEST(ExactPosterior, ObservedPointVarianceShrinks) {
    const ExactPosterior s = fitted(small_icm(), true);
    EXPECT_LT(s.cov_norm(pt(0.4)), 0.1);
    EXPECT_GE(s.cov_norm(pt(0.4)), 0.0);
}

TEST(ExactPosterior, LogdetIncrementPredictsNextUpdate) {
    ExactPosterior s = fitted(small_sum(), false);
    const double before = s.logdet_sum();
    const double inc = s.logdet_increment(pt(0.9));
    s.update(pt(0.9), vec({0.0, 0.0}));
    EXPECT_NEAR(s.logdet_sum() - before, inc, 1e-12);
}

TEST(ExactPosterior, RefactorKeepsAnswers) {
    // More than one refactor interval of repeated points.
    ExactPosterior s(small_icm(), 0.1, false);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0, 1);
    PointList xs;
    for (int i = 0; i < 150; ++i) {
        xs.push_back(pt(std::round(u(rng) * 20) / 20));
        s.update(xs.back(), vec({u(rng), u(rng)}));
    }
    EXPECT_NEAR(s.logdet_sum(), 2.0 * dense_gain(small_icm(), xs, 0.1), 1e-7 * (1 + s.logdet_sum()));
}

TEST(ExactPosterior, RejectsBadUpdates) {
    ExactPosterior s(small_icm(), 0.1);
    EXPECT_THROW(s.update(pt(0.1), vec({1.0})), InvalidInput);
    EXPECT_THROW(s.update(pt(NAN), vec({1.0, 2.0})), InvalidInput);
    EXPECT_THROW(ExactPosterior(small_icm(), 0.0), InvalidInput);
}
