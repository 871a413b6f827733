#include "helpers.hpp"
#include "mtbandit/scalarize.hpp"

using namespace mtbandit;
using namespace mtbandit::testing;

TEST(Scalarize, Linear) {
    EXPECT_DOUBLE_EQ(scalarize(Scalarization::linear(), vec({0.25, 0.75}), vec({2, 4})), 3.5);
    EXPECT_NEAR(lipschitz_constant(Scalarization::linear(), vec({0.6, 0.8})), 1.0, 1e-15);
}

TEST(Scalarize, Chebyshev) {
    EXPECT_DOUBLE_EQ(scalarize(Scalarization::chebyshev(), vec({0.25, 0.75}), vec({2, 4})), 0.5);
    EXPECT_DOUBLE_EQ(scalarize(Scalarization::chebyshev(vec({1, 1})), vec({0.25, 0.75}), vec({2, 4})), 0.25);
    EXPECT_DOUBLE_EQ(lipschitz_constant(Scalarization::chebyshev(), vec({0.3, 0.7})), 0.7);
    EXPECT_EQ(Scalarization::global_lipschitz(), 1.0);
}

TEST(Scalarize, ColumnsMatchesSingle) {
    Eigen::MatrixXd ys(2, 3);
    ys << 1, -2, 0.5, 3, 0, -1;
    const Eigen::VectorXd lam = vec({0.4, 0.6});
    for (const auto& spec : {Scalarization::linear(), Scalarization::chebyshev(vec({-1, 0.5}))}) {
        const Eigen::VectorXd cols = scalarize_columns(spec, lam, ys);
        for (Index j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(cols(j), scalarize(spec, lam, ys.col(j)));
    }
}

TEST(Scalarize, Monotone) {
    const Eigen::VectorXd lam = vec({0.2, 0.3, 0.5});
    for (const auto& spec : {Scalarization::linear(), Scalarization::chebyshev()}) {
        EXPECT_LE(scalarize(spec, lam, vec({1, 1, 1})), scalarize(spec, lam, vec({1, 2, 1})));
    }
}

TEST(Scalarize, DimensionChecks) {
    EXPECT_THROW(scalarize(Scalarization::linear(), vec({1}), vec({1, 2})), InvalidInput);
    EXPECT_THROW(scalarize(Scalarization::chebyshev(vec({0})), vec({0.5, 0.5}), vec({1, 2})), InvalidInput);
}

TEST(Weights, InverseWeightedMap) {
    const Eigen::VectorXd w = weight_from_uniform(WeightDistributionKind::InverseWeighted, vec({0.2, 0.8}));
    EXPECT_NEAR(w(0), 0.8, 1e-15);
    EXPECT_NEAR(w(1), 0.2, 1e-15);
    const Eigen::VectorXd s = weight_from_uniform(WeightDistributionKind::UniformSimplex, vec({0.2, 0.8}));
    EXPECT_NEAR(s(0), 0.2, 1e-15);
}

TEST(Weights, SamplesLieOnSimplex) {
    Rng rng(12);
    for (auto kind : {WeightDistributionKind::UniformSimplex, WeightDistributionKind::InverseWeighted}) {
        for (int i = 0; i < 200; ++i) {
            const Eigen::VectorXd w = sample_weight({kind, 3}, rng);
            EXPECT_NEAR(w.sum(), 1.0, 1e-12);
            EXPECT_GT(w.minCoeff(), 0.0);
        }
    }
    EXPECT_THROW(sample_weight({WeightDistributionKind::UniformSimplex, 0}, rng), InvalidInput);
}

TEST(Weights, Names) {
    EXPECT_EQ(weight_distribution_from_string("uniform"), WeightDistributionKind::UniformSimplex);
    EXPECT_EQ(weight_distribution_from_string(to_string(WeightDistributionKind::InverseWeighted)),
              WeightDistributionKind::InverseWeighted);
    EXPECT_EQ(scalarization_from_string(to_string(ScalarizationKind::Linear)), ScalarizationKind::Linear);
    EXPECT_THROW(scalarization_from_string("hypervolume"), InvalidInput);
}
