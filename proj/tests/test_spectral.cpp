#include "graphvar/edgedist.hpp"
#include "graphvar/random.hpp"
#include "graphvar/spectral.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <random>

using namespace graphvar;

namespace {

Matrix mat2(double a, double b, double d) {
    Matrix m(2, 2);
    m(0, 0) = a;
    m(0, 1) = m(1, 0) = b;
    m(1, 1) = d;
    return m;
}

Matrix random_symmetric(std::size_t k, Rng& rng) {
    std::normal_distribution<double> z;
    Matrix m(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j) m(i, j) = m(j, i) = z(rng);
    return m;
}

// Covariance of a random Bernoulli or Trinomial sample.
Matrix random_summary(std::size_t k, bool trinomial, Rng& rng) {
    const int rows = 3 + static_cast<int>(rng() % 40);
    std::uniform_real_distribution<double> u;
    std::vector<double> bias(k);
    for (auto& b : bias) b = u(rng);
    std::vector<std::vector<double>> x(static_cast<std::size_t>(rows), std::vector<double>(k));
    for (auto& r : x)
        for (std::size_t i = 0; i < k; ++i) {
            if (trinomial) r[i] = u(rng) < bias[i] ? (u(rng) < 0.5 ? 1.0 : -1.0) : 0.0;
            else r[i] = u(rng) < bias[i] ? 1.0 : 0.0;
        }
    Matrix s(k, k);
    std::vector<double> mean(k, 0.0);
    for (const auto& r : x)
        for (std::size_t i = 0; i < k; ++i) mean[i] += r[i] / rows;
    for (const auto& r : x)
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) s(i, j) += (r[i] - mean[i]) * (r[j] - mean[j]) / rows;
    return s;
}

} // namespace

TEST(Jacobi, TwoEdgeExamples) {
    const auto e1 = jacobi_eigen(mat2(0.24, 0.04, 0.24)).values;
    EXPECT_NEAR(e1[0], 0.28, 1e-12);
    EXPECT_NEAR(e1[1], 0.20, 1e-12);
    const auto e2 = jacobi_eigen(mat2(0.1056, -0.0336, 0.2016)).values;
    EXPECT_NEAR(e2[0], 0.2121, 1e-4);
    EXPECT_NEAR(e2[1], 0.0950, 1e-4);
    const auto e3 = jacobi_eigen(mat2(0.1056, 0.1456, 0.2016)).values;
    EXPECT_NEAR(e3[0], 0.3069, 1e-4);
    EXPECT_NEAR(e3[1], 0.0003, 1e-4);
}

TEST(Jacobi, MatchesEigenOracle) {
    Rng rng(1);
    for (std::size_t k : {1u, 2u, 3u, 6u, 10u, 21u, 45u}) {
        const Matrix m = random_symmetric(k, rng);
        Eigen::MatrixXd e(k, k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(e, Eigen::EigenvaluesOnly);
        const auto& oracle = solver.eigenvalues(); // ascending
        const auto ours = jacobi_eigen(m).values;
        for (std::size_t i = 0; i < k; ++i)
            EXPECT_NEAR(ours[i], oracle(static_cast<Eigen::Index>(k - 1 - i)), 1e-10) << "k=" << k;
    }
}

TEST(Jacobi, ReconstructsInput) {
    Rng rng(2);
    const Matrix m = random_symmetric(12, rng);
    JacobiOptions opt;
    opt.want_vectors = true;
    const auto d = jacobi_eigen(m, opt);
    for (std::size_t i = 0; i < 12; ++i)
        for (std::size_t j = 0; j < 12; ++j) {
            double r = 0.0, q = 0.0;
            for (std::size_t c = 0; c < 12; ++c) {
                r += d.vectors(i, c) * d.values[c] * d.vectors(j, c);
                q += d.vectors(i, c) * d.vectors(j, c);
            }
            EXPECT_NEAR(r, m(i, j), 1e-10);
            EXPECT_NEAR(q, i == j ? 1.0 : 0.0, 1e-10);
        }
}

TEST(Jacobi, SortedWithStableTies) {
    Matrix m = Matrix::identity(4, 0.25);
    const auto v = jacobi_eigen(m).values;
    EXPECT_EQ(v, std::vector<double>(4, 0.25));
    m(0, 0) = 0.1;
    m(3, 3) = 0.5;
    const auto w = jacobi_eigen(m).values;
    EXPECT_EQ(w, (std::vector<double>{0.5, 0.25, 0.25, 0.1}));
}

TEST(Jacobi, RejectsNonSymmetric) {
    Matrix m = mat2(1.0, 0.5, 1.0);
    m(0, 1) = 0.6;
    EXPECT_THROW(jacobi_eigen(m), InputError);
    EXPECT_THROW(jacobi_eigen(Matrix(2, 3)), InputError);
}

TEST(Spectral, FamilyBoundsHoldOnRandomSummaries) {
    Rng rng(3);
    for (int t = 0; t < 1000; ++t) {
        const bool tri = t % 2 == 1;
        const std::size_t k = 1 + rng() % 10;
        const auto s = eigenvalues_symmetric(random_summary(k, tri, rng), tri ? Family::Trinomial : Family::Bernoulli);
        const double cap = tri ? 1.0 : 0.25;
        EXPECT_NEAR(s.trace, s.simplex_coordinate, 1e-12);
        EXPECT_LE(s.trace, s.family_bound + 1e-12);
        for (double l : s.eigenvalues) {
            EXPECT_GE(l, -1e-12);
            EXPECT_LE(l, static_cast<double>(k) * cap + 1e-12);
        }
    }
}

TEST(Spectral, SimplexPosition) {
    const auto s = eigenvalues_symmetric(mat2(0.24, 0.04, 0.24));
    const auto p = simplex_position(s);
    EXPECT_NEAR(p.c, 0.48, 1e-12);
    EXPECT_NEAR(p.distance_to_origin, std::hypot(0.28, 0.20), 1e-12);
    EXPECT_NEAR(p.distance_to_maxent, std::hypot(0.03, 0.05), 1e-12);
    EXPECT_THROW(simplex_position(eigenvalues_symmetric(mat2(0.24, 0.04, 0.24), Family::Trinomial)), InputError);
}
