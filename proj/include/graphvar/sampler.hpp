#pragma once

// Uniform random graphs: an add/delete Markov chain over labeled DAGs and
// i.i.d. edge sampling for undirected graphs.

#include "graphvar/error.hpp"
#include "graphvar/graph.hpp"
#include "graphvar/random.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <span>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

namespace graphvar {

struct McmcConfig {
    int n = 0;
    std::uint64_t burn_in = 0;
    std::uint64_t thin = 1;
    std::uint64_t seed = 0;
    std::uint64_t sample_count = 1;
    unsigned chains = 1; ///< independent chains, sample_count is split across them

    static std::uint64_t default_burn_in(int n) {
        const double nn = static_cast<double>(n);
        return static_cast<std::uint64_t>(std::ceil(10.0 * nn * nn * std::log(nn + 1.0)));
    }
    static std::uint64_t default_thin(int n) { return static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n); }

    /// Config with the default burn-in and thinning for n.
    static McmcConfig defaults(int n, std::uint64_t samples, std::uint64_t seed) {
        return McmcConfig{n, default_burn_in(n), default_thin(n), seed, samples, 1};
    }

    void validate() const {
        if (n < 1) throw InputError("sampler needs n >= 1");
        if (thin < 1) throw InputError("thin must be >= 1");
        if (sample_count < 1) throw InputError("sample_count must be >= 1");
        if (chains < 1) throw InputError("chains must be >= 1");
    }
};

/// State of one add/delete chain over DAGs on n nodes.
///
/// Adjacency is a bit matrix (row = tail), so the "would this arc close a
/// cycle" test is a word-parallel reachability search.
class DagChain {
public:
    explicit DagChain(int n) : n_(n), words_((static_cast<std::size_t>(n) + 63) / 64),
                               adj_(static_cast<std::size_t>(n) * words_, 0), seen_(words_), stack_() {
        if (n < 1) throw InputError("DagChain needs n >= 1");
        stack_.reserve(static_cast<std::size_t>(n));
    }

    explicit DagChain(const Graph& g) : DagChain(g.n()) {
        if (!g.directed() || !is_acyclic(g)) throw InputError("DagChain must start from a DAG");
        for (const auto& [i, j] : g.edges()) set(i, j, true);
    }

    int n() const noexcept { return n_; }

    bool has_arc(Vertex i, Vertex j) const noexcept {
        return (row(i)[static_cast<std::size_t>(j) / 64] >> (j % 64)) & 1u;
    }

    /// Whether `to` is reachable from `from` along arcs (from itself counts).
    bool reachable(Vertex from, Vertex to) {
        if (from == to) return true;
        std::fill(seen_.begin(), seen_.end(), 0);
        mark(from);
        stack_.clear();
        stack_.push_back(from);
        while (!stack_.empty()) {
            const Vertex v = stack_.back();
            stack_.pop_back();
            const auto* r = row(v);
            for (std::size_t w = 0; w < words_; ++w) {
                std::uint64_t fresh = r[w] & ~seen_[w];
                if (fresh == 0) continue;
                if (to / 64 == static_cast<int>(w) && ((fresh >> (to % 64)) & 1u)) return true;
                seen_[w] |= fresh;
                while (fresh) {
                    stack_.push_back(static_cast<Vertex>(w * 64) + std::countr_zero(fresh));
                    fresh &= fresh - 1;
                }
            }
        }
        return false;
    }

    /// One kernel step for proposal (i, j): delete i->j if present, otherwise
    /// add it unless that creates a cycle. Returns true if the state changed.
    bool apply(Vertex i, Vertex j) {
        if (has_arc(i, j)) {
            set(i, j, false);
            return true;
        }
        if (reachable(j, i)) return false; // covers j->i present too
        set(i, j, true);
        return true;
    }

    /// Uniform proposal over ordered pairs i != j.
    bool step(Rng& rng) {
        if (n_ < 2) return false;
        std::uniform_int_distribution<int> first(0, n_ - 1);
        std::uniform_int_distribution<int> second(0, n_ - 2);
        const Vertex i = first(rng);
        Vertex j = second(rng);
        if (j >= i) ++j;
        return apply(i, j);
    }

    void arc_states(const EdgeIndexMap& m, std::vector<ArcState>& out) const {
        out.assign(m.k(), ArcState::Absent);
        for (std::size_t idx = 0; idx < m.k(); ++idx) {
            const auto [i, j] = m.pair(idx);
            if (has_arc(i, j)) out[idx] = ArcState::Forward;
            else if (has_arc(j, i)) out[idx] = ArcState::Backward;
        }
    }

    Graph to_graph() const {
        std::vector<VertexPair> arcs;
        for (Vertex i = 0; i < n_; ++i)
            for (Vertex j = 0; j < n_; ++j)
                if (i != j && has_arc(i, j)) arcs.emplace_back(i, j);
        return Graph(n_, true, std::move(arcs));
    }

private:
    const std::uint64_t* row(Vertex v) const noexcept { return &adj_[static_cast<std::size_t>(v) * words_]; }
    void mark(Vertex v) noexcept { seen_[static_cast<std::size_t>(v) / 64] |= std::uint64_t{1} << (v % 64); }
    void set(Vertex i, Vertex j, bool on) noexcept {
        auto& word = adj_[static_cast<std::size_t>(i) * words_ + static_cast<std::size_t>(j) / 64];
        const std::uint64_t bit = std::uint64_t{1} << (j % 64);
        word = on ? (word | bit) : (word & ~bit);
    }

    int n_;
    std::size_t words_;
    std::vector<std::uint64_t> adj_;
    std::vector<std::uint64_t> seen_;
    std::vector<Vertex> stack_;
};

/// Single kernel step on a Graph value.
inline Graph mcmc_step(const Graph& g, Rng& rng) {
    DagChain chain(g);
    chain.step(rng);
    return chain.to_graph();
}

/// Kernel step with a fixed proposal (i, j).
inline Graph mcmc_step(const Graph& g, Vertex i, Vertex j) {
    DagChain chain(g);
    if (i == j) throw InputError("proposal needs i != j");
    chain.apply(i, j);
    return chain.to_graph();
}

/// Runs cfg.chains independent chains (chain c seeded by derive_seed(seed, c))
/// and calls `sink(std::span<const ArcState>)` with the arc-state vector of
/// every retained state. Chain c retains its share of sample_count and the
/// chains are emitted in index order, so the stream is a deterministic
/// function of cfg whatever `threads` is. With threads > 1 the chains run
/// concurrently and their states are buffered until emitted.
template <class Sink>
void sample_dag_chains(const McmcConfig& cfg, Sink&& sink, unsigned threads = 1) {
    cfg.validate();
    const EdgeIndexMap m(cfg.n);
    const std::uint64_t per = cfg.sample_count / cfg.chains;
    const std::uint64_t extra = cfg.sample_count % cfg.chains;
    auto run_chain = [&](unsigned c, auto&& emit) {
        const std::uint64_t quota = per + (c < extra ? 1 : 0);
        Rng rng(derive_seed(cfg.seed, c));
        DagChain chain(cfg.n);
        std::vector<ArcState> states;
        for (std::uint64_t s = 0; s < cfg.burn_in; ++s) chain.step(rng);
        for (std::uint64_t taken = 0; taken < quota; ++taken) {
            for (std::uint64_t s = 0; s < cfg.thin; ++s) chain.step(rng);
            chain.arc_states(m, states);
            emit(std::span<const ArcState>(states));
        }
    };

    if (threads <= 1 || cfg.chains == 1) {
        for (unsigned c = 0; c < cfg.chains; ++c) run_chain(c, sink);
        return;
    }
    std::vector<std::vector<ArcState>> buffers(cfg.chains);
    std::atomic<unsigned> next{0};
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < std::min(threads, cfg.chains); ++w)
            pool.emplace_back([&] {
                for (unsigned c = next++; c < cfg.chains; c = next++)
                    run_chain(c, [&](std::span<const ArcState> s) { buffers[c].insert(buffers[c].end(), s.begin(), s.end()); });
            });
    }
    for (const auto& buf : buffers)
        for (std::size_t off = 0; off + m.k() <= buf.size() && m.k() > 0; off += m.k())
            sink(std::span<const ArcState>(buf.data() + off, m.k()));
    if (m.k() == 0)
        for (unsigned c = 0; c < cfg.chains; ++c)
            for (std::uint64_t t = 0; t < per + (c < extra ? 1 : 0); ++t) sink(std::span<const ArcState>());
}

/// Stream of approximately uniform DAGs as Graph values.
template <class Sink>
void sample_uniform_dags(const McmcConfig& cfg, Sink&& sink, unsigned threads = 1) {
    const EdgeIndexMap m(cfg.n < 1 ? 1 : cfg.n);
    sample_dag_chains(cfg, [&](std::span<const ArcState> s) { sink(graph_from_states(m, s, true)); }, threads);
}

/// Exactly uniform undirected graphs: every edge independently with probability 1/2.
template <class Sink>
void sample_uniform_ugs(int n, std::uint64_t count, std::uint64_t seed, Sink&& sink) {
    if (n < 1) throw InputError("sampler needs n >= 1");
    if (count < 1) throw InputError("count must be >= 1");
    const EdgeIndexMap m(n);
    Rng rng(derive_seed(seed, 0));
    std::vector<VertexPair> edges;
    for (std::uint64_t s = 0; s < count; ++s) {
        edges.clear();
        std::uint64_t bits = 0;
        int left = 0;
        for (const auto& p : m.pairs()) {
            if (left == 0) {
                bits = rng();
                left = 64;
            }
            if (bits & 1u) edges.push_back(p);
            bits >>= 1;
            --left;
        }
        sink(Graph(n, false, edges));
    }
}

/// Independent-arc prior with inclusion probability beta under the natural
/// topological order: arc i->j (i < j) present with probability beta.
template <class Sink>
void sample_ordered_independent_dags(int n, double beta, std::uint64_t count, std::uint64_t seed, Sink&& sink) {
    if (n < 1) throw InputError("sampler needs n >= 1");
    if (!(beta >= 0.0 && beta <= 1.0)) throw InputError("beta must lie in [0, 1]");
    const EdgeIndexMap m(n);
    Rng rng(derive_seed(seed, 0));
    std::bernoulli_distribution coin(beta);
    std::vector<VertexPair> arcs;
    for (std::uint64_t s = 0; s < count; ++s) {
        arcs.clear();
        for (const auto& p : m.pairs())
            if (coin(rng)) arcs.push_back(p);
        sink(Graph(n, true, arcs));
    }
}

} // namespace graphvar
