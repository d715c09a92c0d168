#include "graphvar/census.hpp"
#include "graphvar/sampler.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace graphvar;

TEST(Kernel, ProposalExamples) {
    const Graph empty(3, true);
    EXPECT_EQ(mcmc_step(empty, 0, 1), Graph(3, true, {{0, 1}}));
    EXPECT_EQ(mcmc_step(Graph(3, true, {{0, 1}}), 0, 1), empty);
    // 0->1->2: adding 2->0 would close a cycle, so the chain stays put.
    const Graph path(3, true, {{0, 1}, {1, 2}});
    EXPECT_EQ(mcmc_step(path, 2, 0), path);
    // Proposing the reverse of a present arc is rejected too.
    EXPECT_EQ(mcmc_step(path, 1, 0), path);
    EXPECT_THROW(mcmc_step(empty, 1, 1), InputError);
}

TEST(Kernel, TransitionMatrixIsSymmetric) {
    // Uniform stationarity follows from P(g, h) = P(h, g); check it on all 25 DAGs.
    std::vector<Graph> dags;
    enumerate_dags(3, [&](const Graph& g) { dags.push_back(g); });
    std::map<std::pair<std::size_t, std::size_t>, int> moves;
    for (std::size_t a = 0; a < dags.size(); ++a)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                if (i == j) continue;
                const Graph h = mcmc_step(dags[a], i, j);
                const auto b = static_cast<std::size_t>(std::find(dags.begin(), dags.end(), h) - dags.begin());
                ASSERT_LT(b, dags.size());
                ++moves[{a, b}];
            }
    for (const auto& [ab, c] : moves) EXPECT_EQ(c, (moves[{ab.second, ab.first}]));
}

TEST(Sampler, UniformOverSmallDags) {
    auto cfg = McmcConfig::defaults(3, 200000, 5);
    cfg.thin = 3;
    std::map<std::vector<VertexPair>, int> freq;
    sample_uniform_dags(cfg, [&](const Graph& g) { ++freq[g.edges()]; });
    ASSERT_EQ(freq.size(), 25u);
    for (const auto& [e, c] : freq) EXPECT_NEAR(c / 200000.0, 0.04, 0.003);
}

TEST(Sampler, SeedDeterminism) {
    auto run = [](std::uint64_t seed, unsigned threads) {
        auto cfg = McmcConfig::defaults(6, 300, seed);
        cfg.chains = 3;
        std::vector<Graph> out;
        sample_uniform_dags(cfg, [&](const Graph& g) { out.push_back(g); }, threads);
        return out;
    };
    const auto a = run(9, 1);
    EXPECT_EQ(a.size(), 300u);
    EXPECT_EQ(a, run(9, 1));
    EXPECT_EQ(a, run(9, 3));
    EXPECT_NE(a, run(10, 1));
    for (const auto& g : a) EXPECT_TRUE(is_acyclic(g));
}

TEST(Sampler, LargeGraphsStayAcyclic) {
    DagChain chain(70);
    Rng rng(3);
    for (int s = 0; s < 20000; ++s) chain.step(rng);
    EXPECT_TRUE(is_acyclic(chain.to_graph()));
}

TEST(Sampler, UndirectedIsUniform) {
    std::map<std::vector<VertexPair>, int> freq;
    sample_uniform_ugs(3, 80000, 2, [&](const Graph& g) { ++freq[g.edges()]; });
    ASSERT_EQ(freq.size(), 8u);
    for (const auto& [e, c] : freq) EXPECT_NEAR(c / 80000.0, 0.125, 0.006);
}

TEST(Sampler, ConfigValidation) {
    McmcConfig cfg = McmcConfig::defaults(3, 10, 0);
    cfg.thin = 0;
    EXPECT_THROW(cfg.validate(), InputError);
    EXPECT_EQ(McmcConfig::default_thin(4), 16u);
}
