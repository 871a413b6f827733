#include <cmath>

#include "helpers.hpp"
#include "mtbandit/bandit.hpp"
#include "mtbandit/benchmarks.hpp"

using namespace mtbandit;
using namespace mtbandit::testing;

TEST(Radius, ExactModel) {
    EXPECT_NEAR(beta_t(1.0, 0.1, 0.1, 0.1, 3.0), 1.8720762687969494, 1e-15);
    EXPECT_NEAR(beta_t(1.0, 0.1, 0.1, 0.1, 0.0), 1.6786140424415112, 1e-15);
    EXPECT_THROW(beta_t(1.0, 0.1, 0.1, 0.1, -1.0), InvalidInput);
}

TEST(Radius, BudgetedModel) {
    EXPECT_NEAR(beta_tilde_t(1.0, 0.1, 0.1, 0.1, 0.5, 3.0), 3.6386099257745865, 1e-15);
    EXPECT_NEAR(nystrom_rho(0.5), 3.0, 1e-15);
    EXPECT_NEAR(nystrom_c(0.5), 1.0 + std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(nystrom_q(0.5, 100, 0.1), 6 * 3 * std::log(4000.0) / 0.25, 1e-12);
}

TEST(Config, Validation) {
    BanditConfig c;
    EXPECT_NO_THROW(c.validate());
    c.eta = 0;
    EXPECT_THROW(c.validate(), InvalidInput);
    c = {};
    c.algorithm = Algorithm::MTBKB;
    c.epsilon = 1.0;
    EXPECT_THROW(c.validate(), InvalidInput);
    c = {};
    c.horizon = 0;
    EXPECT_THROW(c.validate(), InvalidInput);
    EXPECT_EQ(algorithm_from_string("mt-bkb"), Algorithm::MTBKB);
    EXPECT_THROW(algorithm_from_string("thompson"), InvalidInput);
}

TEST(Acquisition, ValueAndTies) {
    // Linear, lambda = (0.6, 0.8): L = 1.
    EXPECT_NEAR(acquisition_value(Scalarization::linear(), vec({0.6, 0.8}), 2.0, vec({1, 1}), 0.25), 1.4 + 1.0, 1e-15);
    EXPECT_EQ(argmax_lowest(vec({1, 3, 3, 2})), 1u);
    const ExactPosterior prior(small_icm(), 0.1);
    // Flat prior: every candidate ties, the first one wins.
    const auto [i, x] = select_point(prior, Scalarization::linear(), vec({0.5, 0.5}), 1.0, pts({0.2, 0.5, 0.8}));
    EXPECT_EQ(i, 0u);
    EXPECT_EQ(x(0), 0.2);
    EXPECT_THROW(select_point(prior, Scalarization::linear(), vec({0.5, 0.5}), -1.0, pts({0.2})), InvalidInput);
    EXPECT_THROW(select_point(prior, Scalarization::linear(), vec({0.5, 0.5}), 1.0, PointList{}), InvalidInput);
}

namespace {

struct Fixture {
    MultiTaskKernel kernel = small_icm();
    Environment env;
    Fixture() {
        Rng rng(2);
        env = make_rkhs_objective(kernel, rng).env;
    }
    BanditConfig config(Algorithm a, std::size_t horizon = 30) const {
        BanditConfig c;
        c.algorithm = a;
        c.horizon = horizon;
        c.b = env.values.colwise().norm().maxCoeff() / kernel.kappa();
        c.kappa = kernel.kappa();
        c.seed = 17;
        return c;
    }
};

}  // namespace

TEST(Run, ExactRecordsEveryRound) {
    Fixture f;
    const RunTrace tr = run(f.config(Algorithm::MTKB), f.env, f.kernel, Scalarization::chebyshev(),
                            {WeightDistributionKind::InverseWeighted, 2});
    ASSERT_FALSE(tr.error);
    ASSERT_EQ(tr.rounds.size(), 30u);
    double prev_sum = 0.0;
    for (std::size_t k = 0; k < tr.rounds.size(); ++k) {
        const auto& r = tr.rounds[k];
        EXPECT_EQ(r.t, k + 1);
        EXPECT_GE(r.inst_regret, -1e-9);
        EXPECT_NEAR(r.beta, beta_t(f.config(Algorithm::MTKB), prev_sum), 1e-12);
        EXPECT_EQ(r.dictionary_size, k + 1);
        EXPECT_EQ(r.micros, 0);
        prev_sum = r.logdet_sum;
    }
    EXPECT_EQ(tr.logdet_sum, prev_sum);
}

TEST(Run, SeedDeterminesTrace) {
    Fixture f;
    const WeightDistribution w{WeightDistributionKind::InverseWeighted, 2};
    const auto a = run(f.config(Algorithm::MTBKB), f.env, f.kernel, Scalarization::chebyshev(), w);
    const auto b = run(f.config(Algorithm::MTBKB), f.env, f.kernel, Scalarization::chebyshev(), w);
    ASSERT_EQ(a.played(), b.played());
    EXPECT_EQ(a.logdet_sum, b.logdet_sum);
    EXPECT_NEAR(a.q, nystrom_q(0.5, 30, 0.1), 1e-12);
}

TEST(Run, FullDictionaryFollowsExactModel) {
    // With every point kept and the same radius formula, the budgeted run replays the exact one.
    Fixture f;
    const WeightDistribution w{WeightDistributionKind::InverseWeighted, 2};
    RunOptions opts;
    opts.force_full_dictionary = true;
    opts.budgeted_uses_exact_beta = true;
    const auto exact = run(f.config(Algorithm::MTKB), f.env, f.kernel, Scalarization::chebyshev(), w);
    const auto approx = run(f.config(Algorithm::MTBKB), f.env, f.kernel, Scalarization::chebyshev(), w, opts);
    EXPECT_EQ(exact.played(), approx.played());
    EXPECT_NEAR(exact.logdet_sum, approx.logdet_sum, 1e-6);
}

TEST(Run, ObserverSeesModel) {
    Fixture f;
    RunOptions opts;
    std::size_t calls = 0;
    opts.observer = [&](const RoundRecord& r, const ExactPosterior* e, const NystromPosterior* n) {
        ++calls;
        EXPECT_EQ(n, nullptr);
        ASSERT_NE(e, nullptr);
        EXPECT_EQ(e->size(), r.t);
    };
    run(f.config(Algorithm::MTKB, 4), f.env, f.kernel, Scalarization::linear(),
        {WeightDistributionKind::UniformSimplex, 2}, opts);
    EXPECT_EQ(calls, 4u);
}

TEST(Run, RejectsMismatchedShapes) {
    Fixture f;
    EXPECT_THROW(run(f.config(Algorithm::MTKB), f.env, f.kernel, Scalarization::linear(),
                     {WeightDistributionKind::UniformSimplex, 3}),
                 InvalidInput);
}
