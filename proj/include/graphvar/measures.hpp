#pragma once

// Structural-variability measures of an edge covariance matrix, their
// normalisation, and the maximum-entropy reference values they are measured
// against.

#include "graphvar/census.hpp"
#include "graphvar/edgedist.hpp"
#include "graphvar/error.hpp"
#include "graphvar/matrix.hpp"
#include "graphvar/sampler.hpp"
#include "graphvar/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace graphvar {

enum class Criterion { TotalVariance, GeneralisedVariance, Frobenius };

inline const char* to_string(Criterion c) noexcept {
    switch (c) {
    case Criterion::TotalVariance: return "vt";
    case Criterion::GeneralisedVariance: return "vg";
    case Criterion::Frobenius: return "vf";
    }
    return "?";
}

inline Criterion criterion_from_string(const std::string& s) {
    if (s == "vt") return Criterion::TotalVariance;
    if (s == "vg") return Criterion::GeneralisedVariance;
    if (s == "vf") return Criterion::Frobenius;
    throw InputError("unknown criterion '" + s + "' (expected vt, vg or vf)");
}

enum class MaxEntSource { Exact, Approximate };

inline const char* to_string(MaxEntSource s) noexcept { return s == MaxEntSource::Exact ? "exact" : "approx"; }

// ---------------------------------------------------------------------------
// Total and generalised variance

inline double total_variance(const Matrix& sigma) { return sigma.trace(); }

inline double total_variance(const SpectralSummary& s) {
    return std::accumulate(s.eigenvalues.begin(), s.eigenvalues.end(), 0.0);
}

/// How Sigma is made full rank before taking its determinant.
struct Reduction {
    enum class Kind { None, DropBelow, Shrink };
    Kind kind = Kind::DropBelow;
    double value = 1e-12;

    static Reduction none() { return {Kind::None, 0.0}; }
    /// Remove pairs whose variance is <= threshold (edges that never vary).
    static Reduction drop_below(double threshold) { return {Kind::DropBelow, threshold}; }
    /// Fixed-intensity shrinkage toward (tr/k) I.
    static Reduction shrink(double intensity) { return {Kind::Shrink, intensity}; }

    std::string describe() const {
        switch (kind) {
        case Kind::None: return "none";
        case Kind::DropBelow: return "drop_below(" + std::to_string(value) + ")";
        case Kind::Shrink: return "shrink(" + std::to_string(value) + ")";
        }
        return "?";
    }
};

struct GeneralisedVariance {
    double value = 0.0;
    std::size_t dimension = 0; ///< size of the matrix the determinant was taken of
};

/// Eigenvalues at or below this are treated as exact zeros (Jacobi resolution).
inline constexpr double kZeroEigenvalue = 1e-12;

inline Matrix reduce_covariance(const Matrix& sigma, Reduction r) {
    switch (r.kind) {
    case Reduction::Kind::None: return sigma;
    case Reduction::Kind::Shrink: return shrink_covariance(sigma, r.value);
    case Reduction::Kind::DropBelow: {
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < sigma.rows(); ++i)
            if (sigma(i, i) > r.value) keep.push_back(i);
        Matrix out(keep.size(), keep.size());
        for (std::size_t a = 0; a < keep.size(); ++a)
            for (std::size_t b = 0; b < keep.size(); ++b) out(a, b) = sigma(keep[a], keep[b]);
        return out;
    }
    }
    return sigma;
}

/// det(Sigma*) as the product of eigenvalues of the reduced matrix. An empty
/// reduced matrix (nothing varies) has generalised variance 0.
inline GeneralisedVariance generalised_variance(const Matrix& sigma, Reduction r = {}) {
    const Matrix reduced = reduce_covariance(sigma, r);
    GeneralisedVariance gv;
    gv.dimension = reduced.rows();
    if (gv.dimension == 0) return gv;
    const auto values = jacobi_eigen(reduced).values;
    if (values.back() <= kZeroEigenvalue) return gv;
    gv.value = std::accumulate(values.begin(), values.end(), 1.0, std::multiplies<>());
    return gv;
}

// ---------------------------------------------------------------------------
// Frobenius variability

/// |||Sigma - level I|||_F^2.
inline double frobenius_variability(const Matrix& sigma, double psi_level) {
    double total = 0.0;
    for (std::size_t i = 0; i < sigma.rows(); ++i)
        for (std::size_t j = 0; j < sigma.cols(); ++j) {
            const double d = sigma(i, j) - (i == j ? psi_level : 0.0);
            total += d * d;
        }
    return total;
}

/// |||Sigma - Psi|||_F^2 for an arbitrary target (no normalisation bounds exist for it).
inline double frobenius_variability(const Matrix& sigma, const Matrix& psi) {
    if (psi.rows() != sigma.rows() || psi.cols() != sigma.cols()) throw InputError("target matrix has the wrong shape");
    double total = 0.0;
    for (std::size_t i = 0; i < sigma.data().size(); ++i) {
        const double d = sigma.data()[i] - psi.data()[i];
        total += d * d;
    }
    return total;
}

struct FrobeniusBounds {
    double min = 0.0;
    double max = 0.0;
};

/// Extremes of sum_i (lambda_i - level)^2 over {lambda >= 0, sum lambda <= cap}.
/// The function is convex, so the maximum sits at a vertex (origin or cap e_1)
/// and the minimum at (level, ..., level) when feasible, otherwise at the
/// centre of the face sum lambda = cap.
inline FrobeniusBounds frobenius_bounds(std::size_t k, double cap, double level) {
    const double kd = static_cast<double>(k);
    FrobeniusBounds b;
    b.min = kd * level <= cap ? 0.0 : kd * (cap / kd - level) * (cap / kd - level);
    const double at_origin = kd * level * level;
    const double at_vertex = (cap - level) * (cap - level) + (kd - 1.0) * level * level;
    b.max = std::max(at_origin, at_vertex);
    return b;
}

// ---------------------------------------------------------------------------
// Maximum-entropy references

/// Approximate maximum-entropy DAG marginals (p(-1), p(0), p(+1)) from the
/// n^2/4 average arc count; n = 0 gives the limit (1/4, 1/2, 1/4).
inline TrinomialSummary::Triple approximate_maxent_marginals(int n) {
    if (n == 0) return {0.25, 0.5, 0.25};
    if (n < 2) throw InputError("approximate maximum-entropy marginals need n >= 2");
    const double arrow = 0.25 + 1.0 / (4.0 * (n - 1));
    return {arrow, 0.5 - 1.0 / (2.0 * (n - 1)), arrow};
}

/// Approximate maximum-entropy arc variance 2 p(+1) = 1/2 + 1/(2(n-1)).
inline double approximate_maxent_variance(int n) {
    const auto m = approximate_maxent_marginals(n);
    return m[0] + m[2];
}

namespace detail {

/// Census results are cached per n; census_dags(6) is the expensive one.
inline const TrinomialSummary& cached_dag_census(int n) {
    static std::mutex mutex;
    static std::map<int, TrinomialSummary> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, trinomial_from_census(census_dags(n))).first;
    return it->second;
}

} // namespace detail

inline constexpr int kMaxExactReferenceNodes = 6;

struct MaxEntReference {
    int n = 0;
    std::size_t k = 0;
    Family family = Family::Trinomial;
    MaxEntSource source = MaxEntSource::Approximate;
    TrinomialSummary::Triple marginals{}; ///< (p(-1), p(0), p(+1)); Bernoulli uses p(-1) = 0
    double arc_variance = 0.0;            ///< common diagonal of sigma_ref
    Matrix sigma_ref;
    double cov_bound = 0.0; ///< |COV| between arcs sharing a node (exact value or FMG bound)
    double cor_bound = 0.0;
};

struct FmgBound {
    int n = 0;
    double epsilon_magnitude = 1.0;
    std::array<double, 2> cdf_steps{}; ///< P(A <= -1), P(A <= 0)
    double cov_bound = 0.0;            ///< closed form
    double cor_bound = 0.0;
    double cov_bound_double_sum = 0.0; ///< Hoeffding integral of the FMG joint
    double cor_bound_double_sum = 0.0;
};

/// Step CDF of a maximum-entropy arc, P(A <= x), with the approximate
/// marginals for n nodes (n = 0 for the limit).
inline double fmg_marginal_cdf(int n, double x) {
    const auto m = approximate_maxent_marginals(n);
    if (x < -1.0) return 0.0;
    if (x < 0.0) return m[0];
    if (x < 1.0) return m[0] + m[1];
    return 1.0;
}

/// Closed-form FMG bounds on |COV| and |COR| of two arcs; n = 0 gives the limit.
///
/// The double-sum route integrates |eps| F(x)(1-F(x)) F(y)(1-F(y)) over the
/// two unit cells [-1,0) and [0,1) per axis (Hoeffding's identity applied to
/// the FMG joint with |eps| = 1); the closed form must agree with it.
inline FmgBound fmg_covariance_bound(int n) {
    if (n == 1 || n < 0) throw InputError("covariance bound needs n >= 2");
    FmgBound b;
    b.n = n;
    const double tail = n == 0 ? 0.25 : 0.25 + 1.0 / (4.0 * (n - 1));
    const double head = n == 0 ? 0.75 : 0.75 - 1.0 / (4.0 * (n - 1));
    b.cov_bound = 4.0 * head * head * tail * tail;
    b.cor_bound = 2.0 * head * head * tail;

    b.cdf_steps = {fmg_marginal_cdf(n, -1.0), fmg_marginal_cdf(n, 0.0)};
    double sum = 0.0;
    for (double x : {-1.0, 0.0})
        for (double y : {-1.0, 0.0}) {
            const double fx = fmg_marginal_cdf(n, x);
            const double fy = fmg_marginal_cdf(n, y);
            sum += b.epsilon_magnitude * fx * (1.0 - fx) * fy * (1.0 - fy);
        }
    b.cov_bound_double_sum = sum;
    b.cor_bound_double_sum = sum / approximate_maxent_variance(n);
    return b;
}

/// Reference distribution of the maximum-entropy (uniform) case.
///
/// Undirected graphs: independent Ber(1/2) edges, Sigma = I/4 (exact for every n).
/// DAGs: census values for n <= 6 (source Exact), otherwise the approximate
/// marginals with a diagonal Sigma and the FMG bounds.
inline MaxEntReference maxent_reference(int n, Family family, MaxEntSource source) {
    if (n < 2) throw InputError("maximum-entropy reference needs n >= 2");
    MaxEntReference r;
    r.n = n;
    r.k = EdgeIndexMap::pair_count(n);
    r.family = family;
    r.source = source;
    if (family == Family::Bernoulli) {
        r.marginals = {0.0, 0.5, 0.5};
        r.arc_variance = 0.25;
        r.sigma_ref = Matrix::identity(r.k, 0.25);
        return r;
    }
    if (source == MaxEntSource::Exact) {
        if (n > kMaxExactReferenceNodes) throw InfeasibleError("exact reference requires n <= 6 (census)");
        const auto& t = detail::cached_dag_census(n);
        r.marginals = t.marginals.front();
        r.arc_variance = t.sigma(0, 0);
        r.sigma_ref = t.sigma;
        for (std::size_t a = 0; a < t.k; ++a)
            for (std::size_t b = a + 1; b < t.k; ++b) {
                r.cov_bound = std::max(r.cov_bound, std::abs(t.sigma(a, b)));
                r.cor_bound = std::max(r.cor_bound, std::abs(correlation(t.sigma, a, b)));
            }
        return r;
    }
    r.marginals = approximate_maxent_marginals(n);
    r.arc_variance = approximate_maxent_variance(n);
    r.sigma_ref = Matrix::identity(r.k, r.arc_variance);
    const auto fmg = fmg_covariance_bound(n);
    r.cov_bound = fmg.cov_bound;
    r.cor_bound = fmg.cor_bound;
    return r;
}

// ---------------------------------------------------------------------------
// Reports

struct NormalizationBounds {
    double max_var_t = 0.0;
    double max_var_g = 0.0;
    FrobeniusBounds var_f;
};

struct NormalizedMeasures {
    double var_t = 0.0;
    double var_g = 0.0;
    double var_f = 0.0;

    double get(Criterion c) const {
        switch (c) {
        case Criterion::TotalVariance: return var_t;
        case Criterion::GeneralisedVariance: return var_g;
        case Criterion::Frobenius: return var_f;
        }
        return var_t;
    }
};

struct VariabilityReport {
    Family family = Family::Bernoulli;
    int n = 0;
    std::size_t k = 0;
    double var_t = 0.0;
    double var_g = 0.0;
    std::size_t var_g_dimension = 0;
    double var_f = 0.0;
    double psi_level = 0.0; ///< Psi = psi_level * I
    std::string target_description;
    std::string reduction;
    NormalizedMeasures normalized;
    NormalizationBounds bounds_used;
    std::vector<double> eigenvalues;
    SimplexPosition position;
};

inline constexpr double kNormalizationSlack = 1e-12;

namespace detail {

// Rounding can push a ratio just outside [0, 1]; anything further out means
// the bounds do not fit the input.
inline double clamp_unit(double x) {
    if (x < -kNormalizationSlack || x > 1.0 + kNormalizationSlack)
        throw InputError("normalised measure " + std::to_string(x) + " outside [0, 1]; bounds do not fit this Sigma");
    return std::clamp(x, 0.0, 1.0);
}

} // namespace detail

/// Maps the three measures onto [0, 1]; high values mean unstable structure.
inline NormalizedMeasures normalize(double var_t, double var_g, double var_f, const NormalizationBounds& b) {
    if (!(b.max_var_t > 0.0) || !(b.max_var_g > 0.0) || !(b.var_f.max > b.var_f.min))
        throw InputError("normalisation bounds are missing or degenerate");
    NormalizedMeasures out;
    out.var_t = detail::clamp_unit(var_t / b.max_var_t);
    out.var_g = detail::clamp_unit(var_g / b.max_var_g);
    out.var_f = detail::clamp_unit((b.var_f.max - var_f) / (b.var_f.max - b.var_f.min));
    return out;
}

struct ReportOptions {
    MaxEntSource target = MaxEntSource::Approximate;
    Reduction reduction = {};
};

/// Per-arc maximum-entropy variance the Frobenius target is built from.
inline double maxent_arc_variance(Family family, int n, MaxEntSource target) {
    if (family == Family::Bernoulli) return 0.25;
    if (target == MaxEntSource::Exact) return maxent_reference(n, family, target).arc_variance;
    return approximate_maxent_variance(n);
}

/// All three measures of Sigma, normalised against the family bounds:
///   VAR_T / k/4 or k, VAR_G / (1/4)^k* or 1, VAR_F against Psi = k v I.
inline VariabilityReport variability_report(const Matrix& sigma, Family family, int n, ReportOptions opt = {}) {
    const std::size_t k = sigma.rows();
    if (k == 0) throw InputError("empty covariance matrix");
    if (EdgeIndexMap::pair_count(n) != k) throw InputError("covariance dimension does not match n(n-1)/2");
    VariabilityReport r;
    r.family = family;
    r.n = n;
    r.k = k;
    const auto spectral = eigenvalues_symmetric(sigma, family);
    r.eigenvalues = spectral.eigenvalues;
    r.var_t = total_variance(sigma);
    const auto gv = generalised_variance(sigma, opt.reduction);
    r.var_g = gv.value;
    r.var_g_dimension = gv.dimension;
    r.reduction = opt.reduction.describe();

    const double v = maxent_arc_variance(family, n, opt.target);
    const double kd = static_cast<double>(k);
    r.psi_level = kd * v;
    r.var_f = frobenius_variability(sigma, r.psi_level);

    const double cap = family_trace_bound(family, k);
    r.bounds_used.max_var_t = cap;
    const double per_dim = family == Family::Bernoulli ? 0.25 : 1.0;
    r.bounds_used.max_var_g = std::pow(per_dim, static_cast<double>(std::max<std::size_t>(gv.dimension, 1)));
    r.bounds_used.var_f = frobenius_bounds(k, cap, r.psi_level);
    r.normalized = normalize(r.var_t, r.var_g, r.var_f, r.bounds_used);
    r.position = simplex_position(spectral, v);
    r.target_description = std::string("Psi = k * ") + (family == Family::Bernoulli ? "1/4" : std::to_string(v)) +
                           " * I (" + (family == Family::Bernoulli ? "exact" : to_string(opt.target)) + ")";
    return r;
}

/// Simplex position with the family's maximum-entropy reference point.
inline SimplexPosition simplex_position(const SpectralSummary& s, Family family, int n,
                                        MaxEntSource target = MaxEntSource::Approximate) {
    return simplex_position(s, maxent_arc_variance(family, n, target));
}

// ---------------------------------------------------------------------------
// Independent-arc prior

struct BuntineMoments {
    double arc_variance = 0.0;
    double var_t = 0.0;
    double var_g = 0.0;
};

/// Moments of the prior that includes each arc i->j (i < j) independently with probability beta.
inline BuntineMoments buntine_prior_analytics(int n, double beta) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw InputError("beta must lie in [0, 1]");
    if (n < 2) throw InputError("need n >= 2");
    const double k = static_cast<double>(EdgeIndexMap::pair_count(n));
    BuntineMoments m;
    m.arc_variance = beta - beta * beta;
    m.var_t = k * m.arc_variance;
    m.var_g = std::pow(m.arc_variance, k);
    return m;
}

// ---------------------------------------------------------------------------
// Conjecture evidence (uncorrelated disjoint arcs, sparsity, monotone growth)

struct ConjectureRow {
    int n = 0;
    std::string source;          ///< "census" or "mcmc"
    std::uint64_t graphs = 0;
    double arc_present = 0.0;    ///< p(+1) + p(-1), averaged over pairs
    double disjoint_max_abs_cov = 0.0;
    double shared_mean_abs_cov = 0.0;
    double shared_max_abs_cov = 0.0;
    double shared_mean_abs_cor = 0.0;
    double zero_fraction = 0.0;           ///< off-diagonal entries with |cov| <= zero_tolerance
    double zero_tolerance = 0.0;
    double predicted_zero_fraction = 0.0; ///< disjoint-pair share of off-diagonal entries
};

struct ConjectureEvidence {
    std::vector<ConjectureRow> rows;
    bool shared_cov_increasing = true;
    bool shared_cor_increasing = true;
};

/// Share of off-diagonal Sigma entries that belong to vertex-disjoint pairs.
inline double disjoint_pair_fraction(int n) {
    if (n < 3) return 0.0;
    const double k = static_cast<double>(EdgeIndexMap::pair_count(n));
    const double disjoint = static_cast<double>(EdgeIndexMap::pair_count(n - 2));
    return disjoint / (k - 1.0);
}

inline ConjectureRow conjecture_row(const TrinomialSummary& t, std::string source, double zero_tolerance) {
    ConjectureRow row;
    row.n = t.n;
    row.source = std::move(source);
    row.graphs = t.sample_count;
    row.zero_tolerance = zero_tolerance;
    row.predicted_zero_fraction = disjoint_pair_fraction(t.n);
    const EdgeIndexMap m(t.n);
    double present = 0.0;
    for (const auto& mg : t.marginals) present += mg[0] + mg[2];
    row.arc_present = t.k ? present / static_cast<double>(t.k) : 0.0;
    std::size_t shared = 0;
    std::size_t zeros = 0;
    for (std::size_t a = 0; a < t.k; ++a)
        for (std::size_t b = a + 1; b < t.k; ++b) {
            const double c = std::abs(t.sigma(a, b));
            if (c <= zero_tolerance) ++zeros;
            if (m.incident(a, b)) {
                ++shared;
                row.shared_mean_abs_cov += c;
                row.shared_max_abs_cov = std::max(row.shared_max_abs_cov, c);
                row.shared_mean_abs_cor += std::abs(correlation(t.sigma, a, b));
            } else {
                row.disjoint_max_abs_cov = std::max(row.disjoint_max_abs_cov, c);
            }
        }
    if (shared) {
        row.shared_mean_abs_cov /= static_cast<double>(shared);
        row.shared_mean_abs_cor /= static_cast<double>(shared);
    }
    const std::size_t off = t.k < 2 ? 0 : t.k * (t.k - 1) / 2;
    row.zero_fraction = off ? static_cast<double>(zeros) / static_cast<double>(off) : 0.0;
    return row;
}

/// Census for n <= 6, MCMC with default chain settings beyond that.
inline ConjectureEvidence conjecture_evidence(int n_first, int n_last, std::uint64_t samples, std::uint64_t seed) {
    if (n_first < 3 || n_last < n_first) throw InputError("conjecture evidence needs 3 <= n_first <= n_last");
    ConjectureEvidence ev;
    for (int n = n_first; n <= n_last; ++n) {
        if (n <= kMaxExactReferenceNodes) {
            ev.rows.push_back(conjecture_row(detail::cached_dag_census(n), "census", 1e-12));
        } else {
            EdgeStateAccumulator acc(n, true);
            sample_dag_chains(McmcConfig::defaults(n, samples, derive_seed(seed, static_cast<std::uint64_t>(n))),
                              [&](std::span<const ArcState> s) { acc.add_states(s); });
            ev.rows.push_back(conjecture_row(acc.trinomial(), "mcmc", 4.0 / std::sqrt(static_cast<double>(samples))));
        }
    }
    for (std::size_t i = 1; i < ev.rows.size(); ++i) {
        ev.shared_cov_increasing &= ev.rows[i].shared_mean_abs_cov > ev.rows[i - 1].shared_mean_abs_cov;
        ev.shared_cor_increasing &= ev.rows[i].shared_mean_abs_cor > ev.rows[i - 1].shared_mean_abs_cor;
    }
    return ev;
}

} // namespace graphvar
