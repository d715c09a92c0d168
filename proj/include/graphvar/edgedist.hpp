#pragma once

// Multivariate Bernoulli (undirected) and Trinomial (DAG) distributions
// induced on the pair set by a weighted collection of graphs.

#include "graphvar/census.hpp"
#include "graphvar/error.hpp"
#include "graphvar/graph.hpp"
#include "graphvar/matrix.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace graphvar {

enum class Family { Bernoulli, Trinomial };

inline const char* to_string(Family f) noexcept { return f == Family::Bernoulli ? "bernoulli" : "trinomial"; }

inline Family family_from_string(const std::string& s) {
    if (s == "bernoulli") return Family::Bernoulli;
    if (s == "trinomial") return Family::Trinomial;
    throw InputError("unknown family '" + s + "'");
}

/// Largest pair count for which full 3x3 pair-joint tables are stored (n = 64).
inline constexpr std::size_t kDenseJointLimit = 2016;

struct BernoulliSummary {
    int n = 0;
    std::size_t k = 0;
    std::vector<double> p;  ///< marginal success probabilities
    Matrix joint;           ///< p_ij, diagonal p_i
    std::vector<double> mean;
    Matrix sigma;
    std::uint64_t sample_count = 0;
};

struct TrinomialSummary {
    using Triple = std::array<double, 3>; ///< p(-1), p(0), p(+1)
    using Table = std::array<double, 9>;  ///< row-major over (state a + 1, state b + 1)

    int n = 0;
    std::size_t k = 0;
    std::vector<Triple> marginals;
    std::vector<Table> pair_joints; ///< upper triangle a < b; empty when not kept
    std::vector<double> mean;
    Matrix sigma;
    std::uint64_t sample_count = 0;
    // Weighted counts behind the frequencies, kept alongside the pair joints so
    // derived summaries can be formed before dividing by the total.
    double total_weight = 0.0;
    std::vector<Triple> marginal_sums;
    std::vector<Table> joint_sums;

    bool has_sums() const noexcept { return total_weight > 0.0 && !marginal_sums.empty() && (k < 2 || !joint_sums.empty()); }

    bool has_joints() const noexcept { return k < 2 || !pair_joints.empty(); }

    double p(std::size_t i, ArcState s) const { return marginals.at(i)[static_cast<std::size_t>(to_int(s) + 1)]; }

    double joint(std::size_t a, std::size_t b, ArcState sa, ArcState sb) const {
        if (a == b) return sa == sb ? p(a, sa) : 0.0;
        if (a > b) return joint(b, a, sb, sa);
        if (pair_joints.empty()) throw std::logic_error("summary was built without pair joints");
        const auto t = a * (2 * k - a - 1) / 2 + (b - a - 1);
        return pair_joints.at(t)[static_cast<std::size_t>(to_int(sa) + 1) * 3 + static_cast<std::size_t>(to_int(sb) + 1)];
    }
};

inline double correlation(const Matrix& sigma, std::size_t i, std::size_t j) {
    const double d = std::sqrt(sigma(i, i) * sigma(j, j));
    return d > 0.0 ? sigma(i, j) / d : 0.0;
}

namespace detail {

inline constexpr std::array<ArcState, 3> kStates{ArcState::Backward, ArcState::Absent, ArcState::Forward};

inline double trinomial_variance(const TrinomialSummary::Triple& t) {
    const double d = t[2] - t[0];
    return t[2] + t[0] - d * d;
}

} // namespace detail

/// Streaming weighted accumulator of pair states; finishes into either summary.
class EdgeStateAccumulator {
public:
    EdgeStateAccumulator(int n, bool directed, bool keep_joints = true)
        : map_(n), directed_(directed), marg_(map_.k(), std::array<double, 3>{}) {
        const auto k = map_.k();
        if (keep_joints && k <= kDenseJointLimit) joints_.assign(k < 2 ? 0 : k * (k - 1) / 2, {});
        else moments_ = Matrix(k, k);
    }

    const EdgeIndexMap& map() const noexcept { return map_; }
    bool directed() const noexcept { return directed_; }
    std::uint64_t count() const noexcept { return count_; }
    double total_weight() const noexcept { return weight_; }

    void add(const Graph& g, double weight = 1.0) {
        if (g.n() != map_.n())
            throw InputError("graph has " + std::to_string(g.n()) + " nodes, expected " + std::to_string(map_.n()));
        if (g.directed() != directed_)
            throw InputError(directed_ ? "expected a DAG, got an undirected graph" : "expected an undirected graph, got a directed one");
        if (directed_ && !is_acyclic(g)) throw InputError("graph contains a directed cycle");
        const auto s = arc_state_vector(g, map_);
        add_states(s, weight);
    }

    void add_states(std::span<const ArcState> s, double weight = 1.0) {
        if (!(weight >= 0.0) || !std::isfinite(weight)) throw InputError("weights must be finite and non-negative");
        if (s.size() != map_.k()) throw InputError("state vector length does not match pair count");
        ++count_;
        weight_ += weight;
        const auto k = map_.k();
        for (std::size_t a = 0; a < k; ++a) {
            const int sa = to_int(s[a]);
            marg_[a][static_cast<std::size_t>(sa + 1)] += weight;
            if (!joints_.empty()) {
                auto* row = &joints_[a * (2 * k - a - 1) / 2];
                for (std::size_t b = a + 1; b < k; ++b)
                    row[b - a - 1][static_cast<std::size_t>(sa + 1) * 3 + static_cast<std::size_t>(to_int(s[b]) + 1)] += weight;
            } else if (sa != 0) {
                for (std::size_t b = a; b < k; ++b) moments_(a, b) += weight * sa * to_int(s[b]);
            }
        }
    }

    TrinomialSummary trinomial() const {
        require_data();
        TrinomialSummary t;
        t.n = map_.n();
        t.k = map_.k();
        t.sample_count = count_;
        t.marginals.resize(t.k);
        for (std::size_t a = 0; a < t.k; ++a)
            for (std::size_t s = 0; s < 3; ++s) t.marginals[a][s] = marg_[a][s] / weight_;
        if (!joints_.empty() || t.k < 2) {
            t.total_weight = weight_;
            t.marginal_sums = marg_;
            t.joint_sums = joints_;
        }
        if (!joints_.empty()) {
            t.pair_joints.resize(joints_.size());
            for (std::size_t i = 0; i < joints_.size(); ++i)
                for (std::size_t c = 0; c < 9; ++c) t.pair_joints[i][c] = joints_[i][c] / weight_;
        }
        finish_trinomial_moments(t);
        return t;
    }

    BernoulliSummary bernoulli() const {
        require_data();
        if (directed_) throw InputError("Bernoulli summary requires undirected graphs");
        const auto k = map_.k();
        BernoulliSummary b;
        b.n = map_.n();
        b.k = k;
        b.sample_count = count_;
        b.p.resize(k);
        b.joint = Matrix(k, k);
        for (std::size_t a = 0; a < k; ++a) {
            b.p[a] = marg_[a][2] / weight_;
            b.joint(a, a) = b.p[a];
        }
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t c = a + 1; c < k; ++c) {
                const double pac = joints_.empty() ? moments_(a, c) / weight_
                                                   : joints_[a * (2 * k - a - 1) / 2 + (c - a - 1)][8] / weight_;
                b.joint(a, c) = b.joint(c, a) = pac;
            }
        finish_bernoulli_moments(b);
        return b;
    }

    /// sigma from p and joint: sigma_ij = p_ij - p_i p_j.
    static void finish_bernoulli_moments(BernoulliSummary& b) {
        b.mean = b.p;
        b.sigma = Matrix(b.k, b.k);
        for (std::size_t i = 0; i < b.k; ++i)
            for (std::size_t j = i; j < b.k; ++j)
                b.sigma(i, j) = b.sigma(j, i) = b.joint(i, j) - b.p[i] * b.p[j];
    }

    /// Mean, variances and four-bracket covariances from marginals and pair joints.
    static void finish_trinomial_from_joints(TrinomialSummary& t) {
        fill_trinomial_diagonal(t);
        fill_trinomial_covariances(t);
    }

    /// Mean and sigma from marginals and either pair joints or raw moments.
    void finish_trinomial_moments(TrinomialSummary& t) const {
        if (!t.pair_joints.empty() || t.k < 2) {
            finish_trinomial_from_joints(t);
            return;
        }
        fill_trinomial_diagonal(t);
        for (std::size_t i = 0; i < t.k; ++i)
            for (std::size_t j = i + 1; j < t.k; ++j)
                t.sigma(i, j) = t.sigma(j, i) = moments_(i, j) / weight_ - t.mean[i] * t.mean[j];
    }

    static void fill_trinomial_diagonal(TrinomialSummary& t) {
        t.mean.resize(t.k);
        t.sigma = Matrix(t.k, t.k);
        for (std::size_t i = 0; i < t.k; ++i) {
            t.mean[i] = t.marginals[i][2] - t.marginals[i][0];
            t.sigma(i, i) = detail::trinomial_variance(t.marginals[i]);
        }
    }

    /// Four-bracket covariance from pair joints and marginals.
    static void fill_trinomial_covariances(TrinomialSummary& t) {
        using enum ArcState;
        for (std::size_t i = 0; i < t.k; ++i)
            for (std::size_t j = i + 1; j < t.k; ++j) {
                const double c = (t.joint(i, j, Forward, Forward) - t.p(i, Forward) * t.p(j, Forward)) +
                                 (t.joint(i, j, Backward, Backward) - t.p(i, Backward) * t.p(j, Backward)) -
                                 (t.joint(i, j, Backward, Forward) - t.p(i, Backward) * t.p(j, Forward)) -
                                 (t.joint(i, j, Forward, Backward) - t.p(i, Forward) * t.p(j, Backward));
                t.sigma(i, j) = t.sigma(j, i) = c;
            }
    }

private:
    void require_data() const {
        if (count_ == 0) throw InputError("no graphs to summarise");
        if (!(weight_ > 0.0)) throw InputError("total weight is zero");
    }

    EdgeIndexMap map_;
    bool directed_;
    std::uint64_t count_ = 0;
    double weight_ = 0.0;
    std::vector<std::array<double, 3>> marg_;
    std::vector<std::array<double, 9>> joints_;
    Matrix moments_;
};

namespace detail {

inline int common_size(std::span<const Graph> graphs) {
    if (graphs.empty()) throw InputError("no graphs to summarise");
    const int n = graphs.front().n();
    for (const auto& g : graphs)
        if (g.n() != n) throw InputError("graphs of mixed sizes");
    return n;
}

inline double weight_at(std::span<const double> weights, std::size_t i, std::size_t count) {
    if (weights.empty()) return 1.0;
    if (weights.size() != count) throw InputError("weight count does not match graph count");
    return weights[i];
}

} // namespace detail

/// Empirical (optionally weighted) multivariate Bernoulli over undirected graphs.
inline BernoulliSummary fit_bernoulli(std::span<const Graph> graphs, std::span<const double> weights = {}) {
    EdgeStateAccumulator acc(detail::common_size(graphs), false);
    for (std::size_t i = 0; i < graphs.size(); ++i) acc.add(graphs[i], detail::weight_at(weights, i, graphs.size()));
    return acc.bernoulli();
}

/// Bernoulli summary from explicit edge-set probabilities, e.g. a posterior
/// over a handful of structures.
inline BernoulliSummary fit_bernoulli_distribution(int n, std::span<const std::vector<VertexPair>> edge_sets,
                                                    std::span<const double> probabilities) {
    std::vector<Graph> graphs;
    graphs.reserve(edge_sets.size());
    for (const auto& e : edge_sets) graphs.emplace_back(n, false, e);
    return fit_bernoulli(graphs, probabilities);
}

/// Empirical (optionally weighted) multivariate Trinomial over DAGs.
inline TrinomialSummary fit_trinomial(std::span<const Graph> graphs, std::span<const double> weights = {}) {
    EdgeStateAccumulator acc(detail::common_size(graphs), true);
    for (std::size_t i = 0; i < graphs.size(); ++i) acc.add(graphs[i], detail::weight_at(weights, i, graphs.size()));
    return acc.trinomial();
}

/// Exact Trinomial distribution of a DAG census (frequencies = counts / graph_count).
inline TrinomialSummary trinomial_from_census(const CensusAccumulator& c) {
    if (c.graph_count() == 0) throw InputError("empty census");
    const double total = static_cast<double>(c.graph_count());
    TrinomialSummary t;
    t.n = c.n();
    t.k = c.k();
    t.sample_count = c.graph_count();
    t.total_weight = total;
    t.marginals.resize(t.k);
    t.marginal_sums.resize(t.k);
    for (std::size_t a = 0; a < t.k; ++a)
        for (std::size_t s = 0; s < 3; ++s) {
            t.marginal_sums[a][s] = static_cast<double>(c.marginal_counts(a)[s]);
            t.marginals[a][s] = t.marginal_sums[a][s] / total;
        }
    if (t.k >= 2) {
        t.pair_joints.resize(t.k * (t.k - 1) / 2);
        t.joint_sums.resize(t.pair_joints.size());
        std::size_t idx = 0;
        for (std::size_t a = 0; a < t.k; ++a)
            for (std::size_t b = a + 1; b < t.k; ++b, ++idx)
                for (auto sa : detail::kStates)
                    for (auto sb : detail::kStates) {
                        const auto cell = CensusAccumulator::slot(sa) * 3 + CensusAccumulator::slot(sb);
                        t.joint_sums[idx][cell] = static_cast<double>(c.joint(a, b, sa, sb));
                        t.pair_joints[idx][cell] = t.joint_sums[idx][cell] / total;
                    }
    }
    EdgeStateAccumulator::finish_trinomial_from_joints(t);
    return t;
}

/// Exact Bernoulli distribution of an undirected census.
inline BernoulliSummary bernoulli_from_census(const CensusAccumulator& c) {
    if (c.graph_count() == 0) throw InputError("empty census");
    const double total = static_cast<double>(c.graph_count());
    BernoulliSummary b;
    b.n = c.n();
    b.k = c.k();
    b.sample_count = c.graph_count();
    b.p.resize(b.k);
    b.joint = Matrix(b.k, b.k);
    for (std::size_t a = 0; a < b.k; ++a) {
        if (c.marginal(a, ArcState::Backward) != 0) throw InputError("census contains directed states");
        b.p[a] = b.joint(a, a) = static_cast<double>(c.marginal(a, ArcState::Forward)) / total;
    }
    for (std::size_t a = 0; a < b.k; ++a)
        for (std::size_t d = a + 1; d < b.k; ++d)
            b.joint(a, d) = b.joint(d, a) =
                static_cast<double>(c.joint(a, d, ArcState::Forward, ArcState::Forward)) / total;
    EdgeStateAccumulator::finish_bernoulli_moments(b);
    return b;
}

/// |T| ~ Ber(p*): drops arc directions. Pair joints are required.
inline BernoulliSummary abs_transform(const TrinomialSummary& t) {
    if (!t.has_joints()) throw std::logic_error("abs_transform needs pair joints");
    BernoulliSummary b;
    b.n = t.n;
    b.k = t.k;
    b.sample_count = t.sample_count;
    b.p.resize(t.k);
    b.joint = Matrix(t.k, t.k);
    // Both-directions cells of the pair table: (-1,-1), (-1,+1), (+1,-1), (+1,+1).
    constexpr std::array<std::size_t, 4> present{0, 2, 6, 8};
    if (t.has_sums()) {
        // Summing counts before dividing matches a refit on the skeletons bit for bit.
        for (std::size_t i = 0; i < t.k; ++i)
            b.p[i] = b.joint(i, i) = (t.marginal_sums[i][0] + t.marginal_sums[i][2]) / t.total_weight;
        std::size_t idx = 0;
        for (std::size_t i = 0; i < t.k; ++i)
            for (std::size_t j = i + 1; j < t.k; ++j, ++idx) {
                double both = 0.0;
                for (auto c : present) both += t.joint_sums[idx][c];
                b.joint(i, j) = b.joint(j, i) = both / t.total_weight;
            }
    } else {
        for (std::size_t i = 0; i < t.k; ++i) b.p[i] = b.joint(i, i) = t.marginals[i][0] + t.marginals[i][2];
        for (std::size_t i = 0; i < t.k; ++i)
            for (std::size_t j = i + 1; j < t.k; ++j) {
                double both = 0.0;
                for (auto si : {ArcState::Backward, ArcState::Forward})
                    for (auto sj : {ArcState::Backward, ArcState::Forward}) both += t.joint(i, j, si, sj);
                b.joint(i, j) = b.joint(j, i) = both;
            }
    }
    EdgeStateAccumulator::finish_bernoulli_moments(b);
    return b;
}

struct VarianceParts {
    double skeleton = 0.0;  ///< VAR(|T_i|), presence of the arc
    double direction = 0.0; ///< 4 p(+1) p(-1), orientation of the arc
};

/// VAR(T_i) = VAR(|T_i|) + 4 p(+1) p(-1).
inline VarianceParts variance_decomposition(const TrinomialSummary& t, std::size_t i) {
    const auto& m = t.marginals.at(i);
    const double present = m[0] + m[2];
    return {present * (1.0 - present), 4.0 * m[2] * m[0]};
}

/// Same decomposition for a bare marginal triple (p(-1), p(0), p(+1)).
inline VarianceParts variance_decomposition(const TrinomialSummary::Triple& m) {
    const double present = m[0] + m[2];
    return {present * (1.0 - present), 4.0 * m[2] * m[0]};
}

/// Fixed-intensity shrinkage toward the scaled identity (tr(S)/k) I.
inline Matrix shrink_covariance(const Matrix& sigma, double intensity) {
    if (!(intensity >= 0.0 && intensity <= 1.0)) throw InputError("shrinkage intensity must lie in [0, 1]");
    const std::size_t k = sigma.rows();
    if (k == 0) return sigma;
    const double target = sigma.trace() / static_cast<double>(k);
    Matrix out(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            out(i, j) = (1.0 - intensity) * sigma(i, j) + (i == j ? intensity * target : 0.0);
    return out;
}

} // namespace graphvar
