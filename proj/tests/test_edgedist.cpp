#include "graphvar/edgedist.hpp"
#include "graphvar/sampler.hpp"

#include <gtest/gtest.h>

using namespace graphvar;

namespace {

// Two-node-pair example: edge sets over k = 2 pairs with stated probabilities.
BernoulliSummary example_b(double p00, double p01, double p10, double p11) {
    // n = 3 gives k = 3; only pairs 0 and 1 are used, pair 2 is never present.
    const std::vector<std::vector<VertexPair>> sets{{}, {{0, 2}}, {{0, 1}}, {{0, 1}, {0, 2}}};
    const std::vector<double> w{p00, p01, p10, p11};
    return fit_bernoulli_distribution(3, sets, w);
}

std::vector<Graph> random_dags(int n, int count, std::uint64_t seed) {
    auto cfg = McmcConfig::defaults(n, static_cast<std::uint64_t>(count), seed);
    std::vector<Graph> out;
    sample_uniform_dags(cfg, [&](const Graph& g) { out.push_back(g); });
    return out;
}

} // namespace

TEST(Bernoulli, SmallExample) {
    const auto b = example_b(0.2, 0.3, 0.4, 0.1);
    EXPECT_NEAR(b.p[0], 0.5, 1e-15);
    EXPECT_NEAR(b.p[1], 0.4, 1e-15);
    EXPECT_NEAR(b.sigma(0, 0), 0.25, 1e-15);
    EXPECT_NEAR(b.sigma(1, 1), 0.24, 1e-15);
    EXPECT_NEAR(b.sigma(0, 1), 0.1 - 0.2, 1e-15);
    EXPECT_NEAR(correlation(b.sigma, 0, 1), -0.1 / std::sqrt(0.25 * 0.24), 1e-12);
}

TEST(Bernoulli, WeightsMustBeValid) {
    const std::vector<std::vector<VertexPair>> sets{{}};
    const std::vector<double> bad{-1.0};
    EXPECT_THROW(fit_bernoulli_distribution(3, sets, bad), InputError);
    EXPECT_THROW(fit_bernoulli(std::span<const Graph>{}), InputError);
    const std::vector<Graph> dag{Graph(3, true, {{0, 1}})};
    EXPECT_THROW(fit_bernoulli(dag), InputError);
}

TEST(Trinomial, CovarianceMatchesTwoPassOracle) {
    for (int n : {3, 5, 8}) {
        const auto graphs = random_dags(n, 1500, static_cast<std::uint64_t>(n));
        const auto t = fit_trinomial(graphs);
        const EdgeIndexMap m(n);
        std::vector<std::vector<double>> x;
        for (const auto& g : graphs) {
            std::vector<double> row;
            for (auto s : arc_state_vector(g, m)) row.push_back(to_int(s));
            x.push_back(row);
        }
        std::vector<double> mean(m.k(), 0.0);
        for (const auto& r : x)
            for (std::size_t i = 0; i < m.k(); ++i) mean[i] += r[i] / static_cast<double>(x.size());
        for (std::size_t i = 0; i < m.k(); ++i)
            for (std::size_t j = 0; j < m.k(); ++j) {
                double c = 0.0;
                for (const auto& r : x) c += (r[i] - mean[i]) * (r[j] - mean[j]);
                EXPECT_NEAR(t.sigma(i, j), c / static_cast<double>(x.size()), 1e-12);
            }
    }
}

TEST(Trinomial, MomentsPathMatchesJointPath) {
    const auto graphs = random_dags(6, 800, 4);
    EdgeStateAccumulator dense(6, true, true), sparse(6, true, false);
    for (const auto& g : graphs) {
        dense.add(g);
        sparse.add(g);
    }
    const auto a = dense.trinomial(), b = sparse.trinomial();
    EXPECT_FALSE(b.has_joints());
    for (std::size_t i = 0; i < a.k; ++i)
        for (std::size_t j = 0; j < a.k; ++j) EXPECT_NEAR(a.sigma(i, j), b.sigma(i, j), 1e-12);
}

TEST(Trinomial, AbsTransformEqualsSkeletonRefit) {
    const auto graphs = random_dags(5, 1000, 8);
    std::vector<Graph> skel;
    for (const auto& g : graphs) skel.push_back(skeleton(g));
    const auto via_transform = abs_transform(fit_trinomial(graphs));
    const auto refit = fit_bernoulli(skel);
    EXPECT_EQ(via_transform.p, refit.p);
    EXPECT_EQ(via_transform.sigma, refit.sigma);
    // Without the raw sums the result agrees to rounding.
    auto t = fit_trinomial(graphs);
    t.marginal_sums.clear();
    const auto approx = abs_transform(t);
    for (std::size_t i = 0; i < refit.k; ++i)
        for (std::size_t j = 0; j < refit.k; ++j) EXPECT_NEAR(approx.sigma(i, j), refit.sigma(i, j), 1e-15);
}

TEST(Trinomial, VarianceDecomposes) {
    const auto t = fit_trinomial(random_dags(6, 700, 12));
    for (std::size_t i = 0; i < t.k; ++i) {
        const auto parts = variance_decomposition(t, i);
        EXPECT_NEAR(t.sigma(i, i) - parts.skeleton - parts.direction, 0.0, 1e-12);
    }
}

TEST(Trinomial, WeightedEqualsReplicated) {
    const std::vector<Graph> g{Graph(3, true, {{0, 1}}), Graph(3, true, {{2, 1}, {0, 2}})};
    const std::vector<Graph> rep{g[0], g[1], g[1], g[1]};
    const std::vector<double> w{1.0, 3.0};
    const auto a = fit_trinomial(g, w), b = fit_trinomial(rep);
    for (std::size_t i = 0; i < a.k; ++i)
        for (std::size_t j = 0; j < a.k; ++j) EXPECT_NEAR(a.sigma(i, j), b.sigma(i, j), 1e-15);
}

TEST(Trinomial, RejectsBadInput) {
    const std::vector<Graph> cyclic{Graph(3, true, {{0, 1}, {1, 2}, {2, 0}})};
    EXPECT_THROW(fit_trinomial(cyclic), InputError);
    const std::vector<Graph> ug{Graph(3, false, {{0, 1}})};
    EXPECT_THROW(fit_trinomial(ug), InputError);
    const std::vector<Graph> mixed{Graph(3, true), Graph(4, true)};
    EXPECT_THROW(fit_trinomial(mixed), InputError);
}

TEST(Shrinkage, KeepsTraceAndMovesTowardIdentity) {
    const auto b = example_b(0.2, 0.3, 0.4, 0.1);
    const Matrix s = shrink_covariance(b.sigma, 0.5);
    EXPECT_NEAR(s.trace(), b.sigma.trace(), 1e-15);
    EXPECT_NEAR(s(0, 1), 0.5 * b.sigma(0, 1), 1e-15);
    EXPECT_THROW(shrink_covariance(b.sigma, 1.5), InputError);
}
