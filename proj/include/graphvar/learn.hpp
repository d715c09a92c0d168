#pragma once

// Bootstrap of learned structures from categorical data and selection of the
// learner / tuning value whose structure distribution varies least.

#include "graphvar/digest.hpp"
#include "graphvar/edgedist.hpp"
#include "graphvar/error.hpp"
#include "graphvar/graph.hpp"
#include "graphvar/measures.hpp"
#include "graphvar/random.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

namespace graphvar {

/// Rectangular table of categorical values, stored as per-column level codes.
class Dataset {
public:
    Dataset() = default;

    /// Codes are row-major, codes[r * columns + c] in 0..levels[c].size()-1.
    Dataset(std::vector<std::string> names, std::vector<std::vector<std::string>> levels, std::vector<int> codes)
        : names_(std::move(names)), levels_(std::move(levels)), codes_(std::move(codes)) {
        if (names_.size() < 2) throw InputError("dataset needs at least two columns");
        if (levels_.size() != names_.size()) throw InputError("one level set per column required");
        if (codes_.size() % names_.size() != 0) throw InputError("dataset is not rectangular");
        if (codes_.empty()) throw InputError("dataset has no rows");
        for (std::size_t i = 0; i < codes_.size(); ++i) {
            const auto c = i % names_.size();
            if (codes_[i] < 0 || static_cast<std::size_t>(codes_[i]) >= levels_[c].size())
                throw InputError("level code out of range in column '" + names_[c] + "'");
        }
    }

    std::size_t rows() const noexcept { return codes_.size() / names_.size(); }
    std::size_t columns() const noexcept { return names_.size(); }
    int value(std::size_t row, std::size_t col) const { return codes_[row * names_.size() + col]; }
    int levels(std::size_t col) const { return static_cast<int>(levels_.at(col).size()); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    const std::vector<std::vector<std::string>>& level_names() const noexcept { return levels_; }

    /// Same columns and level sets; rows picked by index (with repetition).
    Dataset resample(const std::vector<std::size_t>& rows) const {
        Dataset out;
        out.names_ = names_;
        out.levels_ = levels_;
        out.codes_.reserve(rows.size() * names_.size());
        for (auto r : rows)
            for (std::size_t c = 0; c < names_.size(); ++c) out.codes_.push_back(value(r, c));
        return out;
    }

    std::string digest() const {
        Fnv1a h;
        for (const auto& n : names_) h.update(n + '\x1f');
        for (const auto& ls : levels_)
            for (const auto& l : ls) h.update(l + '\x1e');
        for (int c : codes_) h.update(std::to_string(c) + ',');
        return h.hex();
    }

private:
    std::vector<std::string> names_;
    std::vector<std::vector<std::string>> levels_;
    std::vector<int> codes_;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cell += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            cells.push_back(std::move(cell));
            cell.clear();
        } else {
            cell += ch;
        }
    }
    if (quoted) throw InputError("unterminated quote in CSV line");
    cells.push_back(std::move(cell));
    return cells;
}

} // namespace detail

/// Header row of column names, then one categorical value per cell.
/// Levels are coded in order of first appearance. Empty cells are rejected.
inline Dataset read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InputError("CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto names = detail::split_csv_line(line);
    std::vector<std::vector<std::string>> levels(names.size());
    std::vector<std::unordered_map<std::string, int>> lookup(names.size());
    std::vector<int> codes;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = detail::split_csv_line(line);
        if (cells.size() != names.size())
            throw InputError("CSV row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                             " cells, expected " + std::to_string(names.size()));
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (cells[c].empty()) throw InputError("missing value in CSV row " + std::to_string(row));
            auto [it, fresh] = lookup[c].try_emplace(cells[c], static_cast<int>(levels[c].size()));
            if (fresh) levels[c].push_back(cells[c]);
            codes.push_back(it->second);
        }
    }
    return Dataset(std::move(names), std::move(levels), std::move(codes));
}

inline Dataset read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open dataset '" + path + "'");
    return read_csv(in);
}

/// Binary Markov chain X0 -> X1 -> ... : X0 fair coin, each next variable
/// copies its predecessor with probability `fidelity`, otherwise flips it.
inline Dataset simulate_chain_dataset(std::size_t variables, std::size_t rows, double fidelity, std::uint64_t seed) {
    if (variables < 2) throw InputError("chain needs at least two variables");
    Rng rng(derive_seed(seed, 0));
    std::bernoulli_distribution coin(0.5);
    std::bernoulli_distribution keep(fidelity);
    std::vector<std::string> names;
    for (std::size_t v = 0; v < variables; ++v) names.push_back("X" + std::to_string(v + 1));
    std::vector<int> codes;
    codes.reserve(variables * rows);
    for (std::size_t r = 0; r < rows; ++r) {
        int x = coin(rng) ? 1 : 0;
        codes.push_back(x);
        for (std::size_t v = 1; v < variables; ++v) {
            if (!keep(rng)) x = 1 - x;
            codes.push_back(x);
        }
    }
    return Dataset(std::move(names), std::vector<std::vector<std::string>>(variables, {"0", "1"}), std::move(codes));
}

// ---------------------------------------------------------------------------
// Learners

/// Empirical mutual information I(X_i; X_j) in nats. Constant columns give 0.
inline double mutual_information(const Dataset& d, std::size_t i, std::size_t j) {
    const int ri = d.levels(i);
    const int rj = d.levels(j);
    std::vector<double> joint(static_cast<std::size_t>(ri * rj), 0.0);
    std::vector<double> mi(static_cast<std::size_t>(ri), 0.0);
    std::vector<double> mj(static_cast<std::size_t>(rj), 0.0);
    for (std::size_t r = 0; r < d.rows(); ++r) {
        const int a = d.value(r, i);
        const int b = d.value(r, j);
        joint[static_cast<std::size_t>(a * rj + b)] += 1.0;
        mi[static_cast<std::size_t>(a)] += 1.0;
        mj[static_cast<std::size_t>(b)] += 1.0;
    }
    const double n = static_cast<double>(d.rows());
    double total = 0.0;
    for (int a = 0; a < ri; ++a)
        for (int b = 0; b < rj; ++b) {
            const double nab = joint[static_cast<std::size_t>(a * rj + b)];
            if (nab > 0.0) total += nab / n * std::log(nab * n / (mi[static_cast<std::size_t>(a)] * mj[static_cast<std::size_t>(b)]));
        }
    return std::max(total, 0.0);
}

/// Undirected graph with an edge wherever the empirical MI exceeds `threshold`.
inline Graph mi_skeleton(const Dataset& d, double threshold) {
    if (!(threshold >= 0.0)) throw InputError("MI threshold must be >= 0");
    std::vector<VertexPair> edges;
    for (std::size_t i = 0; i < d.columns(); ++i)
        for (std::size_t j = i + 1; j < d.columns(); ++j)
            if (mutual_information(d, i, j) > threshold) edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
    return Graph(static_cast<int>(d.columns()), false, std::move(edges));
}

struct HcOptions {
    int max_iter = 1000;          ///< accepted moves per restart
    int restarts = 1;             ///< restart 0 starts empty, later ones from random DAGs
    std::uint64_t seed = 0;
    double penalty_scale = 1.0;   ///< multiplies the (log N)/2 per-parameter BIC penalty
};

struct HcResult {
    Graph graph;
    double score = 0.0;
    std::vector<double> trace; ///< score after each accepted move of the winning restart
};

/// Decomposable BIC score of discrete multinomial DAGs:
///   sum_v [ sum_{j,k} N_vjk log(N_vjk / N_vj) - scale (log N)/2 q_v (r_v - 1) ].
class BicScore {
public:
    BicScore(const Dataset& d, double penalty_scale) : data_(d), scale_(penalty_scale) {
        if (d.columns() > 64) throw InputError("hill climbing supports at most 64 variables");
    }

    double local(std::size_t v, std::uint64_t parents) {
        const auto key = std::make_pair(v, parents);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        const int r = data_.levels(v);
        std::vector<std::size_t> pa;
        double q = 1.0;
        for (std::uint64_t m = parents; m; m &= m - 1) {
            pa.push_back(static_cast<std::size_t>(std::countr_zero(m)));
            q *= data_.levels(pa.back());
        }
        std::unordered_map<std::uint64_t, std::vector<double>> counts;
        for (std::size_t row = 0; row < data_.rows(); ++row) {
            std::uint64_t cfg = 0;
            for (auto p : pa) cfg = cfg * static_cast<std::uint64_t>(data_.levels(p)) + static_cast<std::uint64_t>(data_.value(row, p));
            auto& c = counts[cfg];
            if (c.empty()) c.assign(static_cast<std::size_t>(r), 0.0);
            c[static_cast<std::size_t>(data_.value(row, v))] += 1.0;
        }
        double ll = 0.0;
        for (const auto& [cfg, c] : counts) {
            double nj = 0.0;
            for (double x : c) nj += x;
            for (double x : c)
                if (x > 0.0) ll += x * std::log(x / nj);
        }
        const double penalty = scale_ * 0.5 * std::log(static_cast<double>(data_.rows())) * q * (r - 1);
        return cache_[key] = ll - penalty;
    }

private:
    const Dataset& data_;
    double scale_;
    std::map<std::pair<std::size_t, std::uint64_t>, double> cache_;
};

namespace detail {

struct MaskDag {
    std::vector<std::uint64_t> parents;
    std::vector<std::uint64_t> children;

    explicit MaskDag(std::size_t n) : parents(n, 0), children(n, 0) {}

    bool reaches(std::size_t from, std::size_t to) const {
        std::uint64_t seen = std::uint64_t{1} << from;
        std::uint64_t frontier = seen;
        while (frontier) {
            const auto v = static_cast<std::size_t>(std::countr_zero(frontier));
            frontier &= frontier - 1;
            const std::uint64_t fresh = children[v] & ~seen;
            if (fresh >> to & 1u) return true;
            seen |= fresh;
            frontier |= fresh;
        }
        return from == to;
    }
    bool has(std::size_t i, std::size_t j) const { return parents[j] >> i & 1u; }
    void add(std::size_t i, std::size_t j) {
        parents[j] |= std::uint64_t{1} << i;
        children[i] |= std::uint64_t{1} << j;
    }
    void remove(std::size_t i, std::size_t j) {
        parents[j] &= ~(std::uint64_t{1} << i);
        children[i] &= ~(std::uint64_t{1} << j);
    }
    Graph graph() const {
        std::vector<VertexPair> arcs;
        for (std::size_t j = 0; j < parents.size(); ++j)
            for (std::uint64_t m = parents[j]; m; m &= m - 1)
                arcs.emplace_back(std::countr_zero(m), static_cast<int>(j));
        return Graph(static_cast<int>(parents.size()), true, std::move(arcs));
    }
};

inline constexpr double kScoreImprovement = 1e-9;

inline HcResult climb(MaskDag dag, BicScore& score, int max_iter) {
    const std::size_t n = dag.parents.size();
    double total = 0.0;
    for (std::size_t v = 0; v < n; ++v) total += score.local(v, dag.parents[v]);
    HcResult res;
    for (int iter = 0; iter < max_iter; ++iter) {
        enum class Move { Add, Delete, Reverse } best_move{};
        double best = kScoreImprovement;
        std::size_t bi = 0, bj = 0;
        bool found = false;
        auto consider = [&](double delta, Move mv, std::size_t i, std::size_t j) {
            // Earlier candidates win unless beaten by more than float noise.
            if (delta > best + (found ? kScoreImprovement : 0.0)) {
                best = delta;
                best_move = mv;
                bi = i;
                bj = j;
                found = true;
            }
        };
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const std::uint64_t bit_i = std::uint64_t{1} << i;
                const std::uint64_t bit_j = std::uint64_t{1} << j;
                if (dag.has(i, j)) {
                    const double dj = score.local(j, dag.parents[j] & ~bit_i) - score.local(j, dag.parents[j]);
                    consider(dj, Move::Delete, i, j);
                    dag.remove(i, j);
                    const bool ok = !dag.reaches(i, j);
                    dag.add(i, j);
                    if (ok) consider(dj + score.local(i, dag.parents[i] | bit_j) - score.local(i, dag.parents[i]), Move::Reverse, i, j);
                } else if (!dag.has(j, i) && !dag.reaches(j, i)) {
                    consider(score.local(j, dag.parents[j] | bit_i) - score.local(j, dag.parents[j]), Move::Add, i, j);
                }
            }
        if (!found) break;
        switch (best_move) {
        case Move::Add: dag.add(bi, bj); break;
        case Move::Delete: dag.remove(bi, bj); break;
        case Move::Reverse:
            dag.remove(bi, bj);
            dag.add(bj, bi);
            break;
        }
        total += best;
        res.trace.push_back(total);
    }
    res.score = 0.0;
    for (std::size_t v = 0; v < n; ++v) res.score += score.local(v, dag.parents[v]);
    res.graph = dag.graph();
    return res;
}

} // namespace detail

/// Greedy hill climbing over single-arc additions, deletions and reversals.
inline HcResult hc_bic_detailed(const Dataset& d, const HcOptions& opt = {}) {
    if (opt.max_iter < 1) throw InputError("max_iter must be >= 1");
    if (opt.restarts < 1) throw InputError("restarts must be >= 1");
    BicScore score(d, opt.penalty_scale);
    const std::size_t n = d.columns();
    HcResult best;
    bool have = false;
    for (int r = 0; r < opt.restarts; ++r) {
        detail::MaskDag start(n);
        if (r > 0) {
            Rng rng(derive_seed(opt.seed, static_cast<std::uint64_t>(r)));
            std::uniform_int_distribution<std::size_t> pick(0, n - 1);
            for (std::size_t tries = 0; tries < n; ++tries) {
                const auto i = pick(rng);
                const auto j = pick(rng);
                if (i != j && !start.has(j, i) && !start.reaches(j, i)) start.add(i, j);
            }
        }
        auto res = detail::climb(start, score, opt.max_iter);
        if (!have || res.score > best.score + detail::kScoreImprovement) {
            best = std::move(res);
            have = true;
        }
    }
    return best;
}

inline Graph hc_bic(const Dataset& d, const HcOptions& opt = {}) { return hc_bic_detailed(d, opt).graph; }

/// Which structure learner a bootstrap uses. `CoinFlip` ignores the data and
/// draws every edge independently with probability `coin_p` (a calibrated
/// noise learner).
struct LearnerSpec {
    enum class Kind { MiSkeleton, HcBic, CoinFlip };
    Kind kind = Kind::MiSkeleton;
    double threshold = 0.01; ///< MI threshold for MiSkeleton
    HcOptions hc;
    double coin_p = 0.5;

    static LearnerSpec mi(double threshold) { return {Kind::MiSkeleton, threshold, {}, 0.5}; }
    static LearnerSpec hill_climbing(HcOptions o = {}) { return {Kind::HcBic, 0.0, o, 0.5}; }
    static LearnerSpec coin(double p = 0.5) { return {Kind::CoinFlip, 0.0, {}, p}; }

    Family produces() const { return kind == Kind::HcBic ? Family::Trinomial : Family::Bernoulli; }

    void validate() const {
        if (kind == Kind::MiSkeleton && !(threshold >= 0.0)) throw InputError("MI threshold must be >= 0");
        if (kind == Kind::HcBic && (hc.max_iter < 1 || hc.restarts < 1)) throw InputError("invalid hill-climbing options");
        if (kind == Kind::CoinFlip && !(coin_p >= 0.0 && coin_p <= 1.0)) throw InputError("coin probability must lie in [0, 1]");
    }

    /// The tuning parameter this learner exposes to select_tuning.
    double tuning_value() const {
        switch (kind) {
        case Kind::MiSkeleton: return threshold;
        case Kind::HcBic: return hc.penalty_scale;
        case Kind::CoinFlip: return coin_p;
        }
        return 0.0;
    }
    LearnerSpec with_tuning(double tau) const {
        LearnerSpec s = *this;
        switch (kind) {
        case Kind::MiSkeleton: s.threshold = tau; break;
        case Kind::HcBic: s.hc.penalty_scale = tau; break;
        case Kind::CoinFlip: s.coin_p = tau; break;
        }
        return s;
    }

    std::string describe() const {
        std::ostringstream os;
        os.precision(17);
        switch (kind) {
        case Kind::MiSkeleton: os << "mi:" << threshold; break;
        case Kind::HcBic:
            os << "hc:" << hc.penalty_scale << ":max_iter=" << hc.max_iter << ":restarts=" << hc.restarts;
            break;
        case Kind::CoinFlip: os << "coin:" << coin_p; break;
        }
        return os.str();
    }
};

/// Parses "mi:<threshold>", "hc", "hc:<penalty_scale>", "coin" or "coin:<p>".
inline LearnerSpec parse_learner(const std::string& text) {
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    std::optional<double> arg;
    if (colon != std::string::npos) {
        const std::string rest = text.substr(colon + 1);
        std::size_t used = 0;
        try {
            arg = std::stod(rest, &used);
        } catch (const std::exception&) {
            throw InputError("bad learner argument in '" + text + "'");
        }
        if (used != rest.size()) throw InputError("bad learner argument in '" + text + "'");
    }
    LearnerSpec spec;
    if (head == "mi") spec = LearnerSpec::mi(arg.value_or(0.01));
    else if (head == "hc") {
        spec = LearnerSpec::hill_climbing();
        if (arg) spec.hc.penalty_scale = *arg;
    } else if (head == "coin") spec = LearnerSpec::coin(arg.value_or(0.5));
    else throw InputError("unknown learner '" + text + "' (expected mi:<t>, hc or coin)");
    spec.validate();
    return spec;
}

/// Applies the learner once; `seed` drives any learner-internal randomness.
inline Graph learn_structure(const Dataset& d, const LearnerSpec& spec, std::uint64_t seed) {
    switch (spec.kind) {
    case LearnerSpec::Kind::MiSkeleton: return mi_skeleton(d, spec.threshold);
    case LearnerSpec::Kind::HcBic: {
        HcOptions o = spec.hc;
        o.seed = derive_seed(spec.hc.seed, seed);
        return hc_bic(d, o);
    }
    case LearnerSpec::Kind::CoinFlip: {
        Rng rng(seed);
        std::bernoulli_distribution coin(spec.coin_p);
        std::vector<VertexPair> edges;
        const EdgeIndexMap m(static_cast<int>(d.columns()));
        for (const auto& p : m.pairs())
            if (coin(rng)) edges.push_back(p);
        return Graph(static_cast<int>(d.columns()), false, std::move(edges));
    }
    }
    throw std::logic_error("unhandled learner kind");
}

// ---------------------------------------------------------------------------
// Bootstrap and selection

struct BootstrapRun {
    std::size_t replicates = 0;
    std::uint64_t seed = 0;
    LearnerSpec learner;
    Family family = Family::Bernoulli;
    int n = 0;
    std::string dataset_digest;
    std::vector<Graph> graphs;
    Matrix sigma;
    std::vector<TrinomialSummary::Triple> marginals; ///< Bernoulli: (0, 1-p, p)
    VariabilityReport report;
};

/// Nonparametric bootstrap: R row resamples (replicate r uses derive_seed(seed, r)),
/// one learned structure each, summarised into Sigma and a variability report.
inline BootstrapRun bootstrap(const Dataset& d, const LearnerSpec& spec, std::size_t replicates, std::uint64_t seed,
                              unsigned threads = 1) {
    if (replicates < 1) throw InputError("replicates must be >= 1");
    spec.validate();
    BootstrapRun run;
    run.replicates = replicates;
    run.seed = seed;
    run.learner = spec;
    run.family = spec.produces();
    run.n = static_cast<int>(d.columns());
    run.dataset_digest = d.digest();
    run.graphs.resize(replicates);

    auto one = [&](std::size_t r) {
        Rng rng(derive_seed(seed, r));
        std::uniform_int_distribution<std::size_t> pick(0, d.rows() - 1);
        std::vector<std::size_t> rows(d.rows());
        for (auto& x : rows) x = pick(rng);
        run.graphs[r] = learn_structure(d.resample(rows), spec, derive_seed(seed ^ 0x5bd1e995ULL, r));
    };
    if (threads <= 1) {
        for (std::size_t r = 0; r < replicates; ++r) one(r);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (std::size_t r = next++; r < replicates; r = next++) one(r);
            });
    }

    if (run.family == Family::Trinomial) {
        const auto t = fit_trinomial(run.graphs);
        run.sigma = t.sigma;
        run.marginals = t.marginals;
    } else {
        const auto b = fit_bernoulli(run.graphs);
        run.sigma = b.sigma;
        for (double p : b.p) run.marginals.push_back({0.0, 1.0 - p, p});
    }
    if (run.n >= 2) run.report = variability_report(run.sigma, run.family, run.n);
    return run;
}

struct Selection {
    std::size_t index = 0;
    LearnerSpec learner;
    Criterion criterion = Criterion::TotalVariance;
    std::vector<double> values; ///< criterion per run, in input order
    bool tie = false;           ///< another run matched the minimum exactly
};

/// argmin of the normalised criterion; ties go to the earliest run and are flagged.
inline Selection select_algorithm(std::span<const BootstrapRun> runs, Criterion criterion) {
    if (runs.empty()) throw InputError("no runs to compare");
    Selection s;
    s.criterion = criterion;
    for (const auto& r : runs) {
        if (r.family != runs.front().family)
            throw InputError("cannot compare undirected and directed learners under one criterion");
        if (r.dataset_digest != runs.front().dataset_digest) throw InputError("runs were fitted on different datasets");
        s.values.push_back(r.report.normalized.get(criterion));
    }
    for (std::size_t i = 1; i < s.values.size(); ++i)
        if (s.values[i] < s.values[s.index]) s.index = i;
    for (std::size_t i = 0; i < s.values.size(); ++i)
        if (i != s.index && s.values[i] == s.values[s.index]) s.tie = true;
    s.learner = runs[s.index].learner;
    return s;
}

struct TuningResult {
    double best = 0.0;
    std::size_t best_index = 0;
    bool tie = false;
    Criterion criterion = Criterion::TotalVariance;
    std::vector<std::pair<double, double>> curve; ///< (tau, normalised criterion)
};

/// Bootstraps `base` at each grid value of its tuning parameter and returns the argmin.
inline TuningResult select_tuning(const Dataset& d, const LearnerSpec& base, std::span<const double> grid,
                                  std::size_t replicates, std::uint64_t seed, Criterion criterion, unsigned threads = 1) {
    if (grid.empty()) throw InputError("tuning grid is empty");
    std::vector<BootstrapRun> runs;
    for (double tau : grid) runs.push_back(bootstrap(d, base.with_tuning(tau), replicates, seed, threads));
    const auto sel = select_algorithm(runs, criterion);
    TuningResult t;
    t.criterion = criterion;
    t.best_index = sel.index;
    t.best = grid[sel.index];
    t.tie = sel.tie;
    for (std::size_t i = 0; i < grid.size(); ++i) t.curve.emplace_back(grid[i], sel.values[i]);
    return t;
}

} // namespace graphvar
