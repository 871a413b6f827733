#include "helpers.hpp"
#include "mtbandit/nystrom.hpp"

using namespace mtbandit;
using namespace mtbandit::testing;

namespace {

Dictionary dict(std::vector<std::size_t> idx, std::vector<double> p) { return {std::move(idx), std::move(p)}; }

NystromPosterior fitted_with_partial_dictionary(NystromMode mode) {
    NystromPosterior m(small_icm(), 0.1, 1.0, 1, mode);
    const auto xs = small_points();
    const auto ys = small_outputs();
    m.update(xs[0], ys[0], Dictionary::full(1));
    m.update(xs[1], ys[1], Dictionary::full(2));
    m.update(xs[2], ys[2], dict({0, 2}, {0.5, 1.0}));
    return m;
}

}  // namespace

TEST(Dictionary, InclusionUsesCappedProbabilities) {
    Rng rng(4);
    const Dictionary d = resample_dictionary(vec({1.0, 0.5, 2.0}), 2.0, rng);
    // q * norm >= 1 for every point, so all are kept with p = 1.
    ASSERT_EQ(d.size(), 3u);
    for (double p : d.probs) EXPECT_EQ(p, 1.0);
}

TEST(Dictionary, EmptyDrawKeepsLastPoint) {
    Rng rng(4);
    const Dictionary d = resample_dictionary(vec({0.0, 0.0, 0.0}), 5.0, rng);
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d.indices[0], 2u);
    EXPECT_EQ(d.probs[0], 1.0);
}

TEST(Dictionary, StreamAdvancesOncePerPoint) {
    Rng a(8), b(8);
    resample_dictionary(vec({0.001, 0.9, 0.0, 0.3}), 1.0, a);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 4; ++i) u(b);
    EXPECT_EQ(a(), b());
}

TEST(Dictionary, RejectsBadInput) {
    Rng rng(1);
    EXPECT_THROW(resample_dictionary(vec({0.1}), 0.5, rng), InvalidInput);
    EXPECT_THROW(resample_dictionary(vec({-0.1}), 2.0, rng), InvalidInput);
}

// Oracle: numpy evaluation of the reweighted projection with dictionary {0, 2}, p = {0.5, 1}.
TEST(NystromPosterior, PartialDictionaryMatchesOracle) {
    for (auto mode : {NystromMode::General, NystromMode::IcmFast}) {
        const NystromPosterior m = fitted_with_partial_dictionary(mode);
        const Eigen::VectorXd mu = m.mean(pt(0.25));
        EXPECT_NEAR(mu(0), 0.3783294315535429, 1e-10);
        EXPECT_NEAR(mu(1), -0.003970502854521, 1e-10);
        const Eigen::MatrixXd c = m.cov(pt(0.25));
        EXPECT_NEAR(c(0, 0), 0.4747425101349591, 1e-10);
        EXPECT_NEAR(c(0, 1), 0.2167897676635534, 1e-10);
        EXPECT_NEAR(c(1, 1), 0.4747425101349589, 1e-10);
        EXPECT_EQ(m.dictionary_size(), 2u);
    }
}

TEST(NystromPosterior, FullDictionaryIsExact) {
    NystromPosterior m(small_sum(), 0.1, 1.0, 1);
    EXPECT_EQ(m.mode(), NystromMode::General);
    ExactPosterior e(small_sum(), 0.1);
    const auto xs = small_points();
    const auto ys = small_outputs();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        m.update(xs[i], ys[i], Dictionary::full(i + 1));
        e.update(xs[i], ys[i]);
    }
    for (double q : {0.0, 0.25, 0.6, 1.0}) {
        EXPECT_LT((m.mean(pt(q)) - e.mean(pt(q))).norm(), 1e-9);
        EXPECT_LT((m.cov(pt(q)) - e.cov(pt(q))).norm(), 1e-9);
    }
    // With the full dictionary every earlier step was exact, so the sums agree too.
    EXPECT_NEAR(m.approx_logdet_sum(), e.logdet_sum(), 1e-9);
}

TEST(NystromPosterior, EmbeddingReproducesKernelOnDictionary) {
    NystromPosterior m(small_icm(), 0.1, 1.0, 1, NystromMode::General);
    const auto xs = small_points();
    const auto ys = small_outputs();
    for (std::size_t i = 0; i < xs.size(); ++i) m.update(xs[i], ys[i], Dictionary::full(i + 1));
    const Eigen::MatrixXd a = m.embedding(xs[0]), b = m.embedding(xs[2]);
    EXPECT_TRUE((a.transpose() * b).isApprox(small_icm()(xs[0], xs[2]), 1e-9));
}

TEST(NystromPosterior, SeededDrawsAreReproducible) {
    auto run = [] {
        NystromPosterior m(small_icm(), 0.1, 3.0, 42);
        const auto xs = small_points();
        const auto ys = small_outputs();
        for (int rep = 0; rep < 4; ++rep)
            for (std::size_t i = 0; i < xs.size(); ++i) m.update(xs[i], ys[i]);
        return m.dictionary().indices;
    };
    EXPECT_EQ(run(), run());
}

TEST(NystromPosterior, RejectsBadArguments) {
    EXPECT_THROW(NystromPosterior(small_sum(), 0.1, 1.0, 1, NystromMode::IcmFast), UnsupportedVariant);
    EXPECT_THROW(NystromPosterior(small_icm(), 0.1, 0.5, 1), InvalidInput);
    NystromPosterior m(small_icm(), 0.1, 2.0, 1);
    EXPECT_THROW(m.update(pt(0.1), vec({1, 2}), dict({1}, {1.0})), InvalidInput);
    EXPECT_THROW(m.update(pt(0.1), vec({1, 2}), dict({0}, {0.0})), InvalidInput);
    EXPECT_THROW(m.embedding(pt(0.1)), UnsupportedVariant);
}
