#include "graphvar/learn.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace graphvar;

namespace {

BootstrapRun fake_run(double vt, const std::string& digest = "d") {
    BootstrapRun r;
    r.family = Family::Bernoulli;
    r.dataset_digest = digest;
    r.report.normalized.var_t = vt;
    r.report.normalized.var_g = 1.0 - vt;
    return r;
}

} // namespace

TEST(Csv, ParsesQuotedCellsAndCodesLevels) {
    std::istringstream in("a,b\nx,\"y,1\"\nz,\"y,1\"\nx,w\n");
    const auto d = read_csv(in);
    EXPECT_EQ(d.rows(), 3u);
    EXPECT_EQ(d.columns(), 2u);
    EXPECT_EQ(d.levels(0), 2);
    EXPECT_EQ(d.level_names()[1][0], "y,1");
    EXPECT_EQ(d.value(2, 0), d.value(0, 0));
}

TEST(Csv, RejectsMalformed) {
    std::istringstream ragged("a,b\nx\n");
    EXPECT_THROW(read_csv(ragged), InputError);
    std::istringstream empty_cell("a,b\nx,\n");
    EXPECT_THROW(read_csv(empty_cell), InputError);
    std::istringstream header_only("a,b\n");
    EXPECT_THROW(read_csv(header_only), InputError);
    EXPECT_THROW(read_csv_file("/nonexistent.csv"), InputError);
}

TEST(MutualInformation, KnownValues) {
    std::istringstream same("a,b\n0,0\n1,1\n0,0\n1,1\n");
    EXPECT_NEAR(mutual_information(read_csv(same), 0, 1), std::log(2.0), 1e-12);
    std::istringstream indep("a,b\n0,0\n0,1\n1,0\n1,1\n");
    EXPECT_NEAR(mutual_information(read_csv(indep), 0, 1), 0.0, 1e-12);
}

TEST(Learners, MiSkeletonRecoversChain) {
    const auto d = simulate_chain_dataset(4, 3000, 0.9, 1);
    // Adjacent pairs carry about 0.37 nats, pairs two apart about 0.22.
    const Graph g = mi_skeleton(d, 0.3);
    EXPECT_EQ(g, Graph(4, false, {{0, 1}, {1, 2}, {2, 3}}));
}

TEST(Learners, HillClimbingIsMonotoneAndAcyclic) {
    const auto d = simulate_chain_dataset(5, 2000, 0.85, 2);
    HcOptions opt;
    opt.restarts = 3;
    opt.seed = 7;
    const auto r = hc_bic_detailed(d, opt);
    EXPECT_TRUE(is_acyclic(r.graph));
    EXPECT_EQ(skeleton(r.graph), Graph(5, false, {{0, 1}, {1, 2}, {2, 3}, {3, 4}}));
    for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_GT(r.trace[i], r.trace[i - 1]);
    EXPECT_EQ(hc_bic(d, opt), r.graph);
}

TEST(Learners, ParseSpecs) {
    EXPECT_EQ(parse_learner("mi:0.02").threshold, 0.02);
    EXPECT_EQ(parse_learner("hc").kind, LearnerSpec::Kind::HcBic);
    EXPECT_EQ(parse_learner("coin:0.3").coin_p, 0.3);
    EXPECT_EQ(parse_learner("hc").produces(), Family::Trinomial);
    EXPECT_THROW(parse_learner("pc"), InputError);
    EXPECT_THROW(parse_learner("coin:2"), InputError);
}

TEST(Bootstrap, DeterministicAndThreadInvariant) {
    const auto d = simulate_chain_dataset(4, 300, 0.8, 3);
    const auto a = bootstrap(d, LearnerSpec::mi(0.02), 40, 11, 1);
    const auto b = bootstrap(d, LearnerSpec::mi(0.02), 40, 11, 4);
    EXPECT_EQ(a.graphs, b.graphs);
    EXPECT_EQ(a.sigma, b.sigma);
    EXPECT_EQ(a.family, Family::Bernoulli);
    const auto h = bootstrap(d, LearnerSpec::hill_climbing(), 10, 11, 1);
    EXPECT_EQ(h.family, Family::Trinomial);
    for (const auto& g : h.graphs) EXPECT_TRUE(is_acyclic(g));
}

TEST(Bootstrap, CoinFlipIsNearMaximal) {
    const auto d = simulate_chain_dataset(4, 50, 0.8, 3);
    const auto r = bootstrap(d, LearnerSpec::coin(), 4000, 5);
    EXPECT_GT(r.report.normalized.var_t, 0.95);
}

TEST(Select, ArgminWithTies) {
    const std::vector<BootstrapRun> runs{fake_run(0.4), fake_run(0.2), fake_run(0.3)};
    const auto s = select_algorithm(runs, Criterion::TotalVariance);
    EXPECT_EQ(s.index, 1u);
    EXPECT_FALSE(s.tie);
    EXPECT_EQ(select_algorithm(runs, Criterion::GeneralisedVariance).index, 0u);

    const std::vector<BootstrapRun> tied{fake_run(0.5), fake_run(0.2), fake_run(0.2)};
    const auto t = select_algorithm(tied, Criterion::TotalVariance);
    EXPECT_EQ(t.index, 1u);
    EXPECT_TRUE(t.tie);
}

TEST(Select, RejectsIncompatibleRuns) {
    std::vector<BootstrapRun> runs{fake_run(0.1), fake_run(0.2)};
    runs[1].family = Family::Trinomial;
    EXPECT_THROW(select_algorithm(runs, Criterion::TotalVariance), InputError);
    const std::vector<BootstrapRun> other{fake_run(0.1), fake_run(0.2, "e")};
    EXPECT_THROW(select_algorithm(other, Criterion::TotalVariance), InputError);
    EXPECT_THROW(select_algorithm(std::span<const BootstrapRun>{}, Criterion::TotalVariance), InputError);
}

TEST(Tuning, CurveCoversGrid) {
    const auto d = simulate_chain_dataset(4, 400, 0.8, 9);
    const std::vector<double> grid{0.0, 0.02, 0.5};
    const auto r = select_tuning(d, LearnerSpec::mi(0.0), grid, 30, 2, Criterion::TotalVariance);
    ASSERT_EQ(r.curve.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(r.curve[i].first, grid[i]);
    EXPECT_EQ(r.best, grid[r.best_index]);
}
