#include "graphvar/measures.hpp"
#include "graphvar/random.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <random>

using namespace graphvar;

TEST(Measures, BernoulliExtremes) {
    for (int n = 2; n <= 10; ++n) {
        const std::size_t k = EdgeIndexMap::pair_count(n);
        const auto hi = variability_report(Matrix::identity(k, 0.25), Family::Bernoulli, n);
        EXPECT_EQ(hi.normalized.var_t, 1.0);
        EXPECT_EQ(hi.normalized.var_g, 1.0);
        EXPECT_EQ(hi.normalized.var_f, 1.0);
        const auto lo = variability_report(Matrix(k, k), Family::Bernoulli, n);
        EXPECT_EQ(lo.normalized.var_t, 0.0);
        EXPECT_EQ(lo.normalized.var_g, 0.0);
        EXPECT_EQ(lo.normalized.var_f, 0.0);
    }
}

TEST(Measures, FrobeniusClosedForms) {
    for (std::size_t k = 2; k <= 50; ++k) {
        const double kd = static_cast<double>(k);
        const auto b = frobenius_bounds(k, kd / 4.0, kd / 4.0);
        EXPECT_NEAR(b.min / (kd * (kd - 1) * (kd - 1) / 16.0), 1.0, 1e-10);
        EXPECT_NEAR(b.max / (kd * kd * kd / 16.0), 1.0, 1e-10);
        EXPECT_NEAR(frobenius_variability(Matrix::identity(k, 0.25), kd / 4.0), b.min, 1e-10 * b.min);
        EXPECT_NEAR(frobenius_variability(Matrix(k, k), kd / 4.0), b.max, 1e-10 * b.max);
    }
}

TEST(Measures, FrobeniusBoundsHoldOverFeasibleSpectra) {
    Rng rng(4);
    std::uniform_real_distribution<double> u;
    for (int t = 0; t < 300; ++t) {
        const std::size_t k = 1 + rng() % 12;
        const double cap = u(rng) * 5.0 + 0.1;
        const double level = u(rng) * 2.0;
        const auto b = frobenius_bounds(k, cap, level);
        for (int s = 0; s < 200; ++s) {
            std::vector<double> lam(k);
            double total = 0.0;
            for (auto& l : lam) total += (l = -std::log(u(rng) + 1e-300));
            const double scale = cap * u(rng) / total;
            Matrix d(k, k);
            for (std::size_t i = 0; i < k; ++i) d(i, i) = lam[i] * scale;
            const double f = frobenius_variability(d, level);
            EXPECT_GE(f, b.min - 1e-9);
            EXPECT_LE(f, b.max + 1e-9);
        }
    }
}

TEST(Measures, GeneralisedVarianceMatchesLu) {
    Rng rng(5);
    std::normal_distribution<double> z;
    for (std::size_t k : {1u, 3u, 6u, 10u}) {
        Eigen::MatrixXd a(k + 3, k);
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = z(rng) * 0.3;
        const Eigen::MatrixXd s = a.transpose() * a / static_cast<double>(a.rows());
        Matrix m(k, k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) m(i, j) = s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        const double det = s.partialPivLu().determinant();
        const auto gv = generalised_variance(m, Reduction::none());
        EXPECT_NEAR(gv.value / det, 1.0, 1e-9);
        EXPECT_EQ(gv.dimension, k);
    }
}

TEST(Measures, Reductions) {
    Matrix s = Matrix::identity(3, 0.25);
    s(2, 2) = 0.0;
    EXPECT_EQ(generalised_variance(s, Reduction::none()).value, 0.0);
    const auto dropped = generalised_variance(s);
    EXPECT_EQ(dropped.dimension, 2u);
    EXPECT_NEAR(dropped.value, 0.0625, 1e-15);
    EXPECT_GT(generalised_variance(s, Reduction::shrink(0.5)).value, 0.0);
    EXPECT_EQ(generalised_variance(Matrix(3, 3)).dimension, 0u);
}

TEST(Measures, TwoEdgeExamplesDeterminants) {
    Matrix s2(2, 2), s3(2, 2);
    s2(0, 0) = s3(0, 0) = 0.1056;
    s2(1, 1) = s3(1, 1) = 0.2016;
    s2(0, 1) = s2(1, 0) = -0.0336;
    s3(0, 1) = s3(1, 0) = 0.1456;
    EXPECT_NEAR(generalised_variance(s2).value, 0.1056 * 0.2016 - 0.0336 * 0.0336, 1e-15);
    EXPECT_NEAR(generalised_variance(s3).value, 0.1056 * 0.2016 - 0.1456 * 0.1456, 1e-15);
    EXPECT_NEAR(total_variance(s2), 0.3072, 1e-15);
}

TEST(Measures, NormalizeRejectsOutOfRange) {
    NormalizationBounds b{1.0, 1.0, {0.0, 1.0}};
    EXPECT_THROW(normalize(1.5, 0.5, 0.5, b), InputError);
    EXPECT_NO_THROW(normalize(1.0 + 1e-13, 0.5, 0.5, b));
    EXPECT_THROW(normalize(0.5, 0.5, 0.5, NormalizationBounds{}), InputError);
}

TEST(Measures, ReportValidatesDimension) {
    EXPECT_THROW(variability_report(Matrix::identity(4, 0.25), Family::Bernoulli, 4), InputError);
    EXPECT_THROW(variability_report(Matrix(), Family::Bernoulli, 4), InputError);
}

TEST(Fmg, ClosedFormMatchesDoubleSum) {
    for (int n = 2; n <= 1000; ++n) {
        const auto b = fmg_covariance_bound(n);
        EXPECT_NEAR(b.cov_bound, b.cov_bound_double_sum, 1e-12);
        EXPECT_NEAR(b.cor_bound, b.cor_bound_double_sum, 1e-12);
    }
    const auto lim = fmg_covariance_bound(0);
    EXPECT_NEAR(lim.cov_bound, 0.140625, 1e-12);
    EXPECT_NEAR(lim.cor_bound, 0.28125, 1e-12);
    EXPECT_THROW(fmg_covariance_bound(1), InputError);
}

TEST(Fmg, CensusCovariancesStayBelow) {
    for (int n = 3; n <= 5; ++n) {
        const auto ref = maxent_reference(n, Family::Trinomial, MaxEntSource::Exact);
        const auto b = fmg_covariance_bound(n);
        EXPECT_LT(ref.cov_bound, b.cov_bound);
        EXPECT_LT(ref.cor_bound, b.cor_bound);
    }
}

TEST(MaxEnt, ApproximateMarginals) {
    const auto m = approximate_maxent_marginals(5);
    EXPECT_DOUBLE_EQ(m[2], 0.3125);
    EXPECT_DOUBLE_EQ(m[1], 0.375);
    EXPECT_DOUBLE_EQ(approximate_maxent_variance(5), 0.625);
    EXPECT_DOUBLE_EQ(approximate_maxent_marginals(0)[1], 0.5);
    EXPECT_THROW(approximate_maxent_marginals(1), InputError);
}

TEST(MaxEnt, References) {
    const auto b = maxent_reference(5, Family::Bernoulli, MaxEntSource::Exact);
    EXPECT_EQ(b.sigma_ref, Matrix::identity(10, 0.25));
    const auto t = maxent_reference(4, Family::Trinomial, MaxEntSource::Exact);
    EXPECT_NEAR(t.marginals[2], 0.309392, 1e-6);
    EXPECT_THROW(maxent_reference(7, Family::Trinomial, MaxEntSource::Exact), InfeasibleError);
    const auto a = maxent_reference(20, Family::Trinomial, MaxEntSource::Approximate);
    EXPECT_DOUBLE_EQ(a.arc_variance, 0.5 + 1.0 / 38.0);
}

TEST(MaxEnt, CensusArcIsNotMaximal) {
    // The uniform DAG distribution does not reach the trace bound k.
    const auto t = maxent_reference(4, Family::Trinomial, MaxEntSource::Exact);
    const auto r = variability_report(t.sigma_ref, Family::Trinomial, 4, {MaxEntSource::Exact, {}});
    EXPECT_LT(r.normalized.var_t, 1.0);
    EXPECT_NEAR(r.normalized.var_t, t.arc_variance, 1e-12);
}

TEST(Buntine, ClosedForms) {
    const auto m = buntine_prior_analytics(4, 0.3);
    EXPECT_NEAR(m.arc_variance, 0.21, 1e-15);
    EXPECT_NEAR(m.var_t, 1.26, 1e-14);
    EXPECT_NEAR(m.var_g, std::pow(0.21, 6), 1e-18);
    EXPECT_THROW(buntine_prior_analytics(4, 1.2), InputError);
}

TEST(Conjectures, DisjointPairsUncorrelatedInCensus) {
    const auto ev = conjecture_evidence(3, 5, 1000, 1);
    ASSERT_EQ(ev.rows.size(), 3u);
    for (const auto& r : ev.rows) {
        EXPECT_EQ(r.source, "census");
        EXPECT_LT(r.disjoint_max_abs_cov, 1e-15);
    }
    EXPECT_TRUE(ev.shared_cov_increasing);
    EXPECT_DOUBLE_EQ(disjoint_pair_fraction(3), 0.0);
}
