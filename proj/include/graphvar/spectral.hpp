#pragma once

// Eigenvalues of covariance matrices and their position in the convex set of
// feasible eigenvalue vectors (a family of non-standard simplices).

#include "graphvar/edgedist.hpp"
#include "graphvar/error.hpp"
#include "graphvar/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace graphvar {

struct JacobiOptions {
    double off_diagonal_tolerance = 1e-12; ///< absolute, on every |a_pq|
    int max_sweeps = 100;
    bool want_vectors = false;
};

struct EigenDecomposition {
    std::vector<double> values; ///< descending, ties in original diagonal order
    Matrix vectors;             ///< column c pairs with values[c]; empty unless requested
    int sweeps = 0;
};

inline constexpr double kSymmetryTolerance = 1e-10;

/// Cyclic Jacobi eigenvalue iteration for a symmetric matrix.
inline EigenDecomposition jacobi_eigen(const Matrix& input, JacobiOptions opt = {}) {
    if (input.rows() != input.cols()) throw InputError("eigen decomposition needs a square matrix");
    if (input.max_asymmetry() > kSymmetryTolerance) throw InputError("matrix is not symmetric");
    const std::size_t k = input.rows();
    Matrix a = input;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) a(j, i) = a(i, j);
    Matrix v = opt.want_vectors ? Matrix::identity(k) : Matrix();

    auto max_off = [&] {
        double m = 0.0;
        for (std::size_t p = 0; p < k; ++p)
            for (std::size_t q = p + 1; q < k; ++q) m = std::max(m, std::abs(a(p, q)));
        return m;
    };

    EigenDecomposition out;
    while (max_off() > opt.off_diagonal_tolerance) {
        if (out.sweeps == opt.max_sweeps) throw std::runtime_error("Jacobi iteration did not converge");
        ++out.sweeps;
        for (std::size_t p = 0; p + 1 < k; ++p)
            for (std::size_t q = p + 1; q < k; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= opt.off_diagonal_tolerance) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);
                a(p, p) -= t * apq;
                a(q, q) += t * apq;
                a(p, q) = a(q, p) = 0.0;
                for (std::size_t r = 0; r < k; ++r) {
                    if (r == p || r == q) continue;
                    const double g = a(r, p);
                    const double h = a(r, q);
                    a(r, p) = a(p, r) = g - s * (h + g * tau);
                    a(r, q) = a(q, r) = h + s * (g - h * tau);
                }
                if (opt.want_vectors)
                    for (std::size_t r = 0; r < k; ++r) {
                        const double g = v(r, p);
                        const double h = v(r, q);
                        v(r, p) = g - s * (h + g * tau);
                        v(r, q) = h + s * (g - h * tau);
                    }
            }
    }

    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
    out.values.reserve(k);
    for (auto i : order) out.values.push_back(a(i, i));
    if (opt.want_vectors) {
        out.vectors = Matrix(k, k);
        for (std::size_t c = 0; c < k; ++c)
            for (std::size_t r = 0; r < k; ++r) out.vectors(r, c) = v(r, order[c]);
    }
    return out;
}

struct SpectralSummary {
    Family family = Family::Bernoulli;
    std::size_t k = 0;
    std::vector<double> eigenvalues; ///< descending
    double trace = 0.0;
    double family_bound = 0.0;       ///< k/4 (Bernoulli) or k (Trinomial)
    double simplex_coordinate = 0.0; ///< sum of eigenvalues

    double min_eigenvalue() const { return eigenvalues.empty() ? 0.0 : eigenvalues.back(); }
    double max_eigenvalue() const { return eigenvalues.empty() ? 0.0 : eigenvalues.front(); }
};

/// Upper bound on the trace (and every eigenvalue) of a k-dimensional covariance.
inline double family_trace_bound(Family f, std::size_t k) {
    return f == Family::Bernoulli ? static_cast<double>(k) / 4.0 : static_cast<double>(k);
}

inline SpectralSummary eigenvalues_symmetric(const Matrix& sigma, Family family = Family::Bernoulli) {
    SpectralSummary s;
    s.family = family;
    s.k = sigma.rows();
    s.eigenvalues = jacobi_eigen(sigma).values;
    s.trace = sigma.trace();
    s.family_bound = family_trace_bound(family, s.k);
    s.simplex_coordinate = std::accumulate(s.eigenvalues.begin(), s.eigenvalues.end(), 0.0);
    return s;
}

struct SimplexPosition {
    double c = 0.0;                   ///< which simplex: sum of eigenvalues
    double distance_to_origin = 0.0;  ///< minimum-entropy point
    double distance_to_maxent = 0.0;  ///< (level, ..., level)
    double maxent_level = 0.0;
};

/// Euclidean distances from the eigenvalue vector to the origin and to the
/// point with every coordinate equal to `maxent_level` (1/4 for undirected
/// graphs; the per-arc maximum-entropy variance for DAGs).
inline SimplexPosition simplex_position(const SpectralSummary& s, double maxent_level) {
    SimplexPosition pos;
    pos.maxent_level = maxent_level;
    double d0 = 0.0;
    double d1 = 0.0;
    for (double l : s.eigenvalues) {
        pos.c += l;
        d0 += l * l;
        d1 += (l - maxent_level) * (l - maxent_level);
    }
    pos.distance_to_origin = std::sqrt(d0);
    pos.distance_to_maxent = std::sqrt(d1);
    return pos;
}

inline SimplexPosition simplex_position(const SpectralSummary& s) {
    if (s.family != Family::Bernoulli)
        throw InputError("Trinomial simplex position needs the maximum-entropy variance; pass it explicitly");
    return simplex_position(s, 0.25);
}

} // namespace graphvar
