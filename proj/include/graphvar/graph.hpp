#pragma once

// Graph values, canonical pair indexing and the arc-state encoding shared by
// every other header.
//
// Pairs {i, j} with i < j are indexed lexicographically:
//   {0,1}, {0,2}, ..., {0,n-1}, {1,2}, ..., {n-2,n-1}
// and a directed graph is encoded per pair as
//   +1  i -> j
//   -1  j -> i
//    0  no arc
// This fixes the sign of every covariance the library reports.

#include "graphvar/error.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace graphvar {

using Vertex = int;
using VertexPair = std::pair<Vertex, Vertex>;

enum class ArcState : std::int8_t { Backward = -1, Absent = 0, Forward = 1 };

inline int to_int(ArcState s) noexcept { return static_cast<int>(s); }

inline ArcState arc_state_from_int(int v) {
    if (v < -1 || v > 1) throw InputError("arc state must be -1, 0 or +1, got " + std::to_string(v));
    return static_cast<ArcState>(v);
}

/// Simple graph on vertices 0..n-1. Immutable once built.
///
/// Undirected edges are stored as (i, j) with i < j; directed arcs as (tail, head).
/// Pairs are kept sorted, so two graphs with the same edge set compare equal.
class Graph {
public:
    Graph() = default;

    Graph(int n, bool directed, std::vector<VertexPair> edges = {})
        : n_(n), directed_(directed), edges_(std::move(edges)) {
        if (n_ < 1) throw InputError("graph needs at least one vertex");
        for (auto& [i, j] : edges_) {
            if (i < 0 || j < 0 || i >= n_ || j >= n_)
                throw InputError("edge (" + std::to_string(i) + ", " + std::to_string(j) +
                                 ") out of range for n = " + std::to_string(n_));
            if (i == j) throw InputError("self-loop on vertex " + std::to_string(i));
            if (!directed_ && i > j) std::swap(i, j);
        }
        std::sort(edges_.begin(), edges_.end());
        if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
            throw InputError("duplicate edge");
        if (directed_) {
            for (const auto& [i, j] : edges_)
                if (i < j && std::binary_search(edges_.begin(), edges_.end(), VertexPair{j, i}))
                    throw InputError("both directions present for pair {" + std::to_string(i) + ", " +
                                     std::to_string(j) + "}");
        }
    }

    int n() const noexcept { return n_; }
    bool directed() const noexcept { return directed_; }
    const std::vector<VertexPair>& edges() const noexcept { return edges_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    /// Arc i->j for directed graphs, edge {i,j} otherwise.
    bool has_edge(Vertex i, Vertex j) const {
        if (!directed_ && i > j) std::swap(i, j);
        return std::binary_search(edges_.begin(), edges_.end(), VertexPair{i, j});
    }

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    int n_ = 1;
    bool directed_ = false;
    std::vector<VertexPair> edges_;
};

/// Bijection between unordered pairs {i, j} (i < j) and 0..k-1.
class EdgeIndexMap {
public:
    explicit EdgeIndexMap(int n) : n_(n) {
        if (n < 1) throw InputError("EdgeIndexMap needs n >= 1");
        pairs_.reserve(pair_count(n));
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) pairs_.emplace_back(i, j);
    }

    static std::size_t pair_count(int n) noexcept {
        return n < 2 ? 0 : static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
    }

    /// Inverse of pair_count for k = n(n-1)/2; throws if k is not triangular.
    static int vertices_for(std::size_t k) {
        int n = 1;
        while (pair_count(n) < k) ++n;
        if (pair_count(n) != k) throw InputError("dimension " + std::to_string(k) + " is not n(n-1)/2");
        return n;
    }

    int n() const noexcept { return n_; }
    std::size_t k() const noexcept { return pairs_.size(); }

    std::size_t index(Vertex i, Vertex j) const {
        if (i == j || i < 0 || j < 0 || i >= n_ || j >= n_) throw InputError("invalid vertex pair");
        if (i > j) std::swap(i, j);
        const auto ui = static_cast<std::size_t>(i);
        const auto un = static_cast<std::size_t>(n_);
        return ui * (2 * un - ui - 1) / 2 + static_cast<std::size_t>(j - i - 1);
    }

    VertexPair pair(std::size_t idx) const { return pairs_.at(idx); }
    const std::vector<VertexPair>& pairs() const noexcept { return pairs_; }

    /// True when the two pairs share a vertex.
    bool incident(std::size_t a, std::size_t b) const {
        const auto [i, j] = pairs_[a];
        const auto [u, v] = pairs_[b];
        return i == u || i == v || j == u || j == v;
    }

private:
    int n_;
    std::vector<VertexPair> pairs_;
};

/// Kahn's algorithm.
inline bool is_acyclic(const Graph& g) {
    if (!g.directed()) throw InputError("is_acyclic requires a directed graph");
    const auto n = static_cast<std::size_t>(g.n());
    std::vector<int> indegree(n, 0);
    std::vector<std::vector<Vertex>> out(n);
    for (const auto& [i, j] : g.edges()) {
        out[static_cast<std::size_t>(i)].push_back(j);
        ++indegree[static_cast<std::size_t>(j)];
    }
    std::queue<Vertex> ready;
    for (std::size_t v = 0; v < n; ++v)
        if (indegree[v] == 0) ready.push(static_cast<Vertex>(v));
    std::size_t visited = 0;
    while (!ready.empty()) {
        const auto v = static_cast<std::size_t>(ready.front());
        ready.pop();
        ++visited;
        for (Vertex w : out[v])
            if (--indegree[static_cast<std::size_t>(w)] == 0) ready.push(w);
    }
    return visited == n;
}

inline Graph reverse_all(const Graph& g) {
    if (!g.directed()) throw InputError("reverse_all requires a directed graph");
    std::vector<VertexPair> flipped;
    flipped.reserve(g.edge_count());
    for (const auto& [i, j] : g.edges()) flipped.emplace_back(j, i);
    return Graph(g.n(), true, std::move(flipped));
}

inline Graph skeleton(const Graph& g) {
    if (!g.directed()) throw InputError("skeleton requires a directed graph");
    return Graph(g.n(), false, g.edges());
}

inline std::vector<ArcState> arc_state_vector(const Graph& g, const EdgeIndexMap& m) {
    if (m.n() != g.n()) throw InputError("EdgeIndexMap size does not match graph");
    std::vector<ArcState> states(m.k(), ArcState::Absent);
    for (const auto& [i, j] : g.edges()) {
        const auto idx = m.index(i, j);
        states[idx] = (!g.directed() || i < j) ? ArcState::Forward : ArcState::Backward;
    }
    return states;
}

/// Inverse of arc_state_vector. Undirected graphs accept only {0, +1}.
inline Graph graph_from_states(const EdgeIndexMap& m, std::span<const ArcState> states, bool directed) {
    if (states.size() != m.k()) throw InputError("state vector length does not match pair count");
    std::vector<VertexPair> edges;
    for (std::size_t idx = 0; idx < states.size(); ++idx) {
        const auto [i, j] = m.pair(idx);
        switch (states[idx]) {
        case ArcState::Absent: break;
        case ArcState::Forward: edges.emplace_back(i, j); break;
        case ArcState::Backward:
            if (!directed) throw InputError("undirected state vector contains -1");
            edges.emplace_back(j, i);
            break;
        }
    }
    return Graph(m.n(), directed, std::move(edges));
}

} // namespace graphvar
