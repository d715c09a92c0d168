#pragma once

// Exhaustive enumeration of labeled DAGs / undirected graphs with exact
// integer moment accumulators.

#include "graphvar/error.hpp"
#include "graphvar/graph.hpp"

#include <array>
#include <atomic>
#include <cstdint>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace graphvar {

/// Exact counts of per-pair states and pairwise joint states over a graph population.
///
/// State s in {-1, 0, +1} is stored at offset s + 1; joint tables are 3x3,
/// row = state of the lower pair index, column = state of the higher one.
class CensusAccumulator {
public:
    using Table = std::array<std::uint64_t, 9>;

    CensusAccumulator() = default;
    explicit CensusAccumulator(int n)
        : n_(n), k_(EdgeIndexMap::pair_count(n)), marginals_(k_, std::array<std::uint64_t, 3>{}),
          joints_(k_ < 2 ? 0 : k_ * (k_ - 1) / 2, Table{}) {}

    int n() const noexcept { return n_; }
    std::size_t k() const noexcept { return k_; }
    std::uint64_t graph_count() const noexcept { return graph_count_; }

    std::uint64_t marginal(std::size_t pair, ArcState s) const { return marginals_.at(pair)[slot(s)]; }
    const std::array<std::uint64_t, 3>& marginal_counts(std::size_t pair) const { return marginals_.at(pair); }

    /// Count of (state of a, state of b); symmetric in argument order.
    std::uint64_t joint(std::size_t a, std::size_t b, ArcState sa, ArcState sb) const {
        if (a == b) return sa == sb ? marginal(a, sa) : 0;
        if (a > b) return joint(b, a, sb, sa);
        return joints_.at(tri(a, b))[slot(sa) * 3 + slot(sb)];
    }

    void add(std::span<const ArcState> states, std::uint64_t multiplicity = 1) {
        if (states.size() != k_) throw InputError("state vector length does not match census size");
        graph_count_ += multiplicity;
        for (std::size_t a = 0; a < k_; ++a) {
            const auto sa = slot(states[a]);
            marginals_[a][sa] += multiplicity;
            auto* row = &joints_[a * (2 * k_ - a - 1) / 2];
            for (std::size_t b = a + 1; b < k_; ++b) row[b - a - 1][sa * 3 + slot(states[b])] += multiplicity;
        }
    }

    void merge(const CensusAccumulator& other) {
        if (other.n_ != n_) throw InputError("cannot merge census accumulators of different n");
        graph_count_ += other.graph_count_;
        for (std::size_t a = 0; a < k_; ++a)
            for (std::size_t s = 0; s < 3; ++s) marginals_[a][s] += other.marginals_[a][s];
        for (std::size_t t = 0; t < joints_.size(); ++t)
            for (std::size_t c = 0; c < 9; ++c) joints_[t][c] += other.joints_[t][c];
    }

    friend bool operator==(const CensusAccumulator&, const CensusAccumulator&) = default;

    // Raw access for the enumerator's subtree-count updates.
    std::array<std::uint64_t, 3>& marginal_slot(std::size_t a) { return marginals_[a]; }
    Table& joint_slot(std::size_t a, std::size_t b) { return joints_[tri(a, b)]; }
    void add_graphs(std::uint64_t count) { graph_count_ += count; }

    static std::size_t slot(ArcState s) noexcept { return static_cast<std::size_t>(to_int(s) + 1); }

private:
    std::size_t tri(std::size_t a, std::size_t b) const noexcept { return a * (2 * k_ - a - 1) / 2 + (b - a - 1); }

    int n_ = 0;
    std::size_t k_ = 0;
    std::uint64_t graph_count_ = 0;
    std::vector<std::array<std::uint64_t, 3>> marginals_;
    std::vector<Table> joints_;
};

struct EnumerationLimits {
    bool allow_huge = false; ///< permit n = 7 (about 1.1e9 DAGs)
};

inline constexpr int kMaxCensusNodes = 7;

namespace detail {

inline void check_census_size(int n, EnumerationLimits limits) {
    if (n < 1) throw InputError("census needs n >= 1");
    if (n > kMaxCensusNodes)
        throw InfeasibleError("census over n = " + std::to_string(n) + " nodes is infeasible (max 7)");
    if (n == kMaxCensusNodes && !limits.allow_huge)
        throw InfeasibleError("census over 7 nodes requires allow_huge (about 1.1e9 DAGs)");
}

// Reachability bitmasks: reach[w] holds every vertex reachable from w by a
// non-empty directed path. n <= 7, so one word per vertex is plenty.
using ReachSet = std::array<std::uint32_t, kMaxCensusNodes>;

inline bool can_add_arc(const ReachSet& reach, int tail, int head) noexcept {
    return (reach[static_cast<std::size_t>(head)] & (1u << tail)) == 0;
}

inline void add_arc(ReachSet& reach, int n, int tail, int head) noexcept {
    const std::uint32_t gained = reach[static_cast<std::size_t>(head)] | (1u << head);
    for (int w = 0; w < n; ++w)
        if (w == tail || (reach[static_cast<std::size_t>(w)] & (1u << tail)))
            reach[static_cast<std::size_t>(w)] |= gained;
}

/// Depth-first extension over pair slots; only acyclic prefixes are expanded.
template <class Leaf>
void extend_dag_states(const EdgeIndexMap& m, std::vector<ArcState>& states, std::size_t depth,
                       const ReachSet& reach, Leaf& leaf) {
    if (depth == m.k()) {
        leaf(std::span<const ArcState>(states));
        return;
    }
    const auto [i, j] = m.pair(depth);
    states[depth] = ArcState::Absent;
    extend_dag_states(m, states, depth + 1, reach, leaf);
    if (can_add_arc(reach, i, j)) {
        ReachSet next = reach;
        add_arc(next, m.n(), i, j);
        states[depth] = ArcState::Forward;
        extend_dag_states(m, states, depth + 1, next, leaf);
    }
    if (can_add_arc(reach, j, i)) {
        ReachSet next = reach;
        add_arc(next, m.n(), j, i);
        states[depth] = ArcState::Backward;
        extend_dag_states(m, states, depth + 1, next, leaf);
    }
    states[depth] = ArcState::Absent;
}

// Census recursion. Counts are credited when a slot is fixed, weighted by the
// number of DAGs in the subtree below it, so each joint (a, b) is updated once
// per tree node at depth b instead of once per leaf.
class CensusWalker {
public:
    CensusWalker(const EdgeIndexMap& m, CensusAccumulator& acc) : m_(m), acc_(acc), states_(m.k(), ArcState::Absent) {}

    std::uint64_t walk(std::size_t depth, const ReachSet& reach) {
        if (depth == m_.k()) return 1;
        const auto [i, j] = m_.pair(depth);
        std::uint64_t total = 0;
        total += visit(depth, ArcState::Absent, reach);
        if (can_add_arc(reach, i, j)) {
            ReachSet next = reach;
            add_arc(next, m_.n(), i, j);
            total += visit(depth, ArcState::Forward, next);
        }
        if (can_add_arc(reach, j, i)) {
            ReachSet next = reach;
            add_arc(next, m_.n(), j, i);
            total += visit(depth, ArcState::Backward, next);
        }
        return total;
    }

    /// Credit a fixed prefix (slots < depth) with `leaves` completions.
    void credit_prefix(std::size_t depth, std::uint64_t leaves) {
        for (std::size_t b = 0; b < depth; ++b) credit_slot(b, leaves);
    }

    std::vector<ArcState>& states() { return states_; }

private:
    std::uint64_t visit(std::size_t depth, ArcState s, const ReachSet& reach) {
        states_[depth] = s;
        const std::uint64_t leaves = walk(depth + 1, reach);
        credit_slot(depth, leaves);
        return leaves;
    }

    void credit_slot(std::size_t b, std::uint64_t leaves) {
        const auto sb = CensusAccumulator::slot(states_[b]);
        acc_.marginal_slot(b)[sb] += leaves;
        for (std::size_t a = 0; a < b; ++a)
            acc_.joint_slot(a, b)[CensusAccumulator::slot(states_[a]) * 3 + sb] += leaves;
    }

    const EdgeIndexMap& m_;
    CensusAccumulator& acc_;
    std::vector<ArcState> states_;
};

struct CensusPrefix {
    std::vector<ArcState> states;
    ReachSet reach{};
};

inline void collect_prefixes(const EdgeIndexMap& m, std::size_t depth, std::size_t target, CensusPrefix& cur,
                             std::vector<CensusPrefix>& out) {
    if (depth == target) {
        out.push_back(cur);
        return;
    }
    const auto [i, j] = m.pair(depth);
    const ReachSet saved = cur.reach;
    cur.states[depth] = ArcState::Absent;
    collect_prefixes(m, depth + 1, target, cur, out);
    if (can_add_arc(saved, i, j)) {
        add_arc(cur.reach, m.n(), i, j);
        cur.states[depth] = ArcState::Forward;
        collect_prefixes(m, depth + 1, target, cur, out);
        cur.reach = saved;
    }
    if (can_add_arc(saved, j, i)) {
        add_arc(cur.reach, m.n(), j, i);
        cur.states[depth] = ArcState::Backward;
        collect_prefixes(m, depth + 1, target, cur, out);
        cur.reach = saved;
    }
    cur.states[depth] = ArcState::Absent;
}

inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

} // namespace detail

/// Calls `leaf(std::span<const ArcState>)` once per labeled DAG on n nodes,
/// in a fixed depth-first order.
template <class Leaf>
void enumerate_dag_states(int n, Leaf&& leaf, EnumerationLimits limits = {}) {
    detail::check_census_size(n, limits);
    const EdgeIndexMap m(n);
    std::vector<ArcState> states(m.k(), ArcState::Absent);
    detail::extend_dag_states(m, states, 0, detail::ReachSet{}, leaf);
}

/// Streams every labeled DAG on n nodes as a Graph.
template <class Sink>
void enumerate_dags(int n, Sink&& sink, EnumerationLimits limits = {}) {
    const EdgeIndexMap m(n < 1 ? 1 : n);
    enumerate_dag_states(
        n, [&](std::span<const ArcState> s) { sink(graph_from_states(m, s, true)); }, limits);
}

/// Independent oracle: walks all 3^k state vectors and keeps the acyclic ones.
/// Only meant for small n.
template <class Sink>
void enumerate_dags_bruteforce(int n, Sink&& sink) {
    if (n < 1) throw InputError("enumeration needs n >= 1");
    if (n > 5) throw InfeasibleError("brute-force enumeration is limited to n <= 5");
    const EdgeIndexMap m(n);
    std::vector<ArcState> states(m.k(), ArcState::Backward);
    std::size_t total = 1;
    for (std::size_t i = 0; i < m.k(); ++i) total *= 3;
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t c = code;
        for (auto& s : states) {
            s = static_cast<ArcState>(static_cast<int>(c % 3) - 1);
            c /= 3;
        }
        Graph g = graph_from_states(m, states, true);
        if (is_acyclic(g)) sink(g);
    }
}

/// Exact census of all labeled DAGs on n nodes.
///
/// The search space is split on the first few pair slots; partitions are
/// processed by `threads` workers (0 = hardware concurrency) and merged by
/// integer addition, so the result does not depend on the schedule.
inline CensusAccumulator census_dags(int n, EnumerationLimits limits = {}, unsigned threads = 0) {
    detail::check_census_size(n, limits);
    const EdgeIndexMap m(n);
    CensusAccumulator total(n);
    if (m.k() == 0) {
        total.add_graphs(1);
        return total;
    }

    threads = detail::resolve_threads(threads);
    const std::size_t split = std::min<std::size_t>(m.k(), threads == 1 ? 0 : 4);
    std::vector<detail::CensusPrefix> prefixes;
    detail::CensusPrefix root{std::vector<ArcState>(m.k(), ArcState::Absent), {}};
    detail::collect_prefixes(m, 0, split, root, prefixes);

    std::vector<CensusAccumulator> partial(threads, CensusAccumulator(n));
    std::atomic<std::size_t> next{0};
    auto work = [&](unsigned w) {
        detail::CensusWalker walker(m, partial[w]);
        for (std::size_t t = next++; t < prefixes.size(); t = next++) {
            walker.states() = prefixes[t].states;
            const std::uint64_t leaves = walker.walk(split, prefixes[t].reach);
            walker.credit_prefix(split, leaves);
            partial[w].add_graphs(leaves);
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    }
    for (const auto& p : partial) total.merge(p);
    return total;
}

/// Exact census of all 2^k labeled undirected graphs on n nodes (n <= 7).
inline CensusAccumulator census_ugs(int n) {
    if (n < 1) throw InputError("census needs n >= 1");
    if (n > kMaxCensusNodes) throw InfeasibleError("undirected census is limited to n <= 7");
    const EdgeIndexMap m(n);
    CensusAccumulator acc(n);
    std::vector<ArcState> states(m.k());
    const std::uint64_t total = std::uint64_t{1} << m.k();
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        for (std::size_t i = 0; i < m.k(); ++i)
            states[i] = (mask >> i) & 1u ? ArcState::Forward : ArcState::Absent;
        acc.add(states);
    }
    return acc;
}

} // namespace graphvar
