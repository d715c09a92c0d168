#pragma once

// File formats: graph JSONL records, summary / report / run JSON documents and
// the run manifest every output embeds.

#include "graphvar/census.hpp"
#include "graphvar/digest.hpp"
#include "graphvar/edgedist.hpp"
#include "graphvar/error.hpp"
#include "graphvar/graph.hpp"
#include "graphvar/learn.hpp"
#include "graphvar/measures.hpp"
#include "graphvar/spectral.hpp"

#include "json.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace graphvar {

using Json = nlohmann::json;

inline constexpr const char* kToolVersion = "1.0.0";

// ---------------------------------------------------------------------------
// Graph records: {"n": int, "directed": bool, "edges": [[i, j], ...]}

inline Json to_json(const Graph& g) {
    Json edges = Json::array();
    for (const auto& [i, j] : g.edges()) edges.push_back({i, j});
    return Json{{"n", g.n()}, {"directed", g.directed()}, {"edges", std::move(edges)}};
}

inline Graph graph_from_json(const Json& j) {
    try {
        if (!j.is_object()) throw InputError("graph record must be an object");
        const int n = j.at("n").get<int>();
        const bool directed = j.at("directed").get<bool>();
        std::vector<VertexPair> edges;
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) throw InputError("edge must be a pair [i, j]");
            edges.emplace_back(e[0].get<int>(), e[1].get<int>());
        }
        return Graph(n, directed, std::move(edges));
    } catch (const Json::exception& e) {
        throw InputError(std::string("malformed graph record: ") + e.what());
    }
}

inline void write_graph_jsonl(std::ostream& out, const Graph& g) { out << to_json(g).dump() << '\n'; }

/// Calls sink(Graph) per non-blank line; returns the record count.
template <class Sink>
std::size_t read_graphs_jsonl(std::istream& in, Sink&& sink) {
    std::string line;
    std::size_t lineno = 0;
    std::size_t records = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const Json::parse_error& e) {
            throw InputError("line " + std::to_string(lineno) + ": " + e.what());
        }
        try {
            sink(graph_from_json(j));
        } catch (const InputError& e) {
            throw InputError("line " + std::to_string(lineno) + ": " + e.what());
        }
        ++records;
    }
    return records;
}

// ---------------------------------------------------------------------------
// Manifest

struct RunManifest {
    std::string command;
    std::map<std::string, std::string> flags;
    std::optional<std::uint64_t> seed;
    std::string version = kToolVersion;
    std::map<std::string, std::string> input_digests;
    std::string timestamp;

    /// UTC time of the run, or SOURCE_DATE_EPOCH when set (reproducible builds).
    static std::string now() {
        std::time_t t = std::time(nullptr);
        if (const char* e = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::strtoll(e, nullptr, 10));
        char buf[32];
        std::tm tm{};
        gmtime_r(&t, &tm);
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        return buf;
    }
};

inline Json to_json(const RunManifest& m) {
    Json j{{"command", m.command}, {"flags", m.flags}, {"version", m.version},
           {"input_digests", m.input_digests}, {"timestamp", m.timestamp}};
    j["seed"] = m.seed ? Json(*m.seed) : Json(nullptr);
    return j;
}

inline std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    Fnv1a h;
    h.update(ss.str());
    return h.hex();
}

// ---------------------------------------------------------------------------
// Matrices and summaries

inline Json matrix_to_json(const Matrix& m) { return Json(m.data()); }

inline Matrix matrix_from_json(const Json& j, std::size_t k) {
    const auto flat = j.get<std::vector<double>>();
    if (flat.size() != k * k) throw InputError("sigma has " + std::to_string(flat.size()) + " entries, expected k*k");
    Matrix m(k, k);
    m.data() = flat;
    return m;
}

inline Json to_json(const BernoulliSummary& b) {
    Json marg = Json::array();
    for (double p : b.p) marg.push_back({0.0, 1.0 - p, p});
    return Json{{"schema", "graphvar.summary/1"}, {"family", "bernoulli"}, {"n", b.n}, {"k", b.k},
                {"sample_count", b.sample_count}, {"marginals", std::move(marg)}, {"mean", b.mean},
                {"sigma", matrix_to_json(b.sigma)}};
}

inline Json to_json(const TrinomialSummary& t, bool with_joints = false) {
    Json marg = Json::array();
    for (const auto& m : t.marginals) marg.push_back(m);
    Json j{{"schema", "graphvar.summary/1"}, {"family", "trinomial"}, {"n", t.n}, {"k", t.k},
           {"sample_count", t.sample_count}, {"marginals", std::move(marg)}, {"mean", t.mean},
           {"sigma", matrix_to_json(t.sigma)}};
    if (with_joints && !t.pair_joints.empty()) {
        Json pj = Json::array();
        for (const auto& tab : t.pair_joints) pj.push_back(tab);
        j["pair_joints"] = std::move(pj);
    }
    return j;
}

/// What measures needs from a summary file.
struct SummaryDocument {
    Family family = Family::Bernoulli;
    int n = 0;
    std::size_t k = 0;
    std::uint64_t sample_count = 0;
    std::vector<TrinomialSummary::Triple> marginals;
    Matrix sigma;
};

inline SummaryDocument summary_from_json(const Json& j) {
    try {
        SummaryDocument d;
        d.family = family_from_string(j.at("family").get<std::string>());
        d.n = j.at("n").get<int>();
        d.k = j.at("k").get<std::size_t>();
        if (EdgeIndexMap::pair_count(d.n) != d.k) throw InputError("k does not equal n(n-1)/2");
        d.sample_count = j.value("sample_count", std::uint64_t{0});
        for (const auto& m : j.at("marginals")) d.marginals.push_back(m.get<TrinomialSummary::Triple>());
        d.sigma = matrix_from_json(j.at("sigma"), d.k);
        if (d.sigma.max_asymmetry() > kSymmetryTolerance) throw InputError("sigma is not symmetric");
        return d;
    } catch (const Json::exception& e) {
        throw InputError(std::string("malformed summary: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Reports

inline Json to_json(const SimplexPosition& p) {
    return Json{{"c", p.c}, {"distance_to_origin", p.distance_to_origin},
                {"distance_to_maxent", p.distance_to_maxent}, {"maxent_level", p.maxent_level}};
}

inline Json to_json(const VariabilityReport& r) {
    return Json{{"family", to_string(r.family)},
                {"n", r.n},
                {"k", r.k},
                {"var_t", r.var_t},
                {"var_g", r.var_g},
                {"var_g_dimension", r.var_g_dimension},
                {"var_g_reduction", r.reduction},
                {"var_f", r.var_f},
                {"psi_level", r.psi_level},
                {"target", r.target_description},
                {"normalized", {{"var_t", r.normalized.var_t}, {"var_g", r.normalized.var_g}, {"var_f", r.normalized.var_f}}},
                {"bounds_used",
                 {{"max_var_t", r.bounds_used.max_var_t},
                  {"max_var_g", r.bounds_used.max_var_g},
                  {"min_var_f", r.bounds_used.var_f.min},
                  {"max_var_f", r.bounds_used.var_f.max}}},
                {"eigenvalues", r.eigenvalues},
                {"simplex", to_json(r.position)}};
}

inline Json to_json(const MaxEntReference& r) {
    return Json{{"schema", "graphvar.maxent/1"}, {"n", r.n}, {"k", r.k}, {"family", to_string(r.family)},
                {"source", to_string(r.source)}, {"marginals", r.marginals}, {"arc_variance", r.arc_variance},
                {"sigma_ref", matrix_to_json(r.sigma_ref)}, {"cov_bound", r.cov_bound}, {"cor_bound", r.cor_bound}};
}

inline Json census_to_json(const CensusAccumulator& c, bool directed) {
    Json marg = Json::array();
    for (std::size_t a = 0; a < c.k(); ++a) marg.push_back(c.marginal_counts(a));
    Json joints = Json::array();
    for (std::size_t a = 0; a < c.k(); ++a)
        for (std::size_t b = a + 1; b < c.k(); ++b) {
            std::array<std::uint64_t, 9> t{};
            for (int sa = -1; sa <= 1; ++sa)
                for (int sb = -1; sb <= 1; ++sb)
                    t[static_cast<std::size_t>((sa + 1) * 3 + sb + 1)] =
                        c.joint(a, b, static_cast<ArcState>(sa), static_cast<ArcState>(sb));
            joints.push_back({{"a", a}, {"b", b}, {"counts", t}});
        }
    Json j{{"schema", "graphvar.census/1"}, {"n", c.n()}, {"k", c.k()}, {"directed", directed},
           {"graph_count", c.graph_count()}, {"marginal_counts", std::move(marg)}, {"joint_counts", std::move(joints)}};
    if (c.k() > 0) {
        Matrix sigma;
        Json freq = Json::array();
        if (directed) {
            const auto t = trinomial_from_census(c);
            sigma = t.sigma;
            for (const auto& m : t.marginals) freq.push_back(m);
        } else {
            const auto b = bernoulli_from_census(c);
            sigma = b.sigma;
            for (double p : b.p) freq.push_back({0.0, 1.0 - p, p});
        }
        j["marginals"] = std::move(freq);
        j["sigma"] = matrix_to_json(sigma);
        j["eigenvalues"] = eigenvalues_symmetric(sigma, directed ? Family::Trinomial : Family::Bernoulli).eigenvalues;
    } else {
        j["marginals"] = Json::array();
        j["sigma"] = Json::array();
        j["eigenvalues"] = Json::array();
    }
    return j;
}

inline Json to_json(const LearnerSpec& s) {
    const char* kind = s.kind == LearnerSpec::Kind::MiSkeleton ? "mi" : s.kind == LearnerSpec::Kind::HcBic ? "hc" : "coin";
    return Json{{"kind", kind},           {"threshold", s.threshold},     {"penalty_scale", s.hc.penalty_scale},
                {"max_iter", s.hc.max_iter}, {"restarts", s.hc.restarts}, {"hc_seed", s.hc.seed},
                {"coin_p", s.coin_p},     {"describe", s.describe()}};
}

inline LearnerSpec learner_from_json(const Json& j) {
    LearnerSpec s;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "mi") s.kind = LearnerSpec::Kind::MiSkeleton;
    else if (kind == "hc") s.kind = LearnerSpec::Kind::HcBic;
    else if (kind == "coin") s.kind = LearnerSpec::Kind::CoinFlip;
    else throw InputError("unknown learner kind '" + kind + "'");
    s.threshold = j.at("threshold").get<double>();
    s.hc.penalty_scale = j.at("penalty_scale").get<double>();
    s.hc.max_iter = j.at("max_iter").get<int>();
    s.hc.restarts = j.at("restarts").get<int>();
    s.hc.seed = j.at("hc_seed").get<std::uint64_t>();
    s.coin_p = j.at("coin_p").get<double>();
    return s;
}

inline Json to_json(const BootstrapRun& r) {
    Json graphs = Json::array();
    for (const auto& g : r.graphs) graphs.push_back(to_json(g));
    Json marg = Json::array();
    for (const auto& m : r.marginals) marg.push_back(m);
    return Json{{"schema", "graphvar.run/1"}, {"replicates", r.replicates}, {"seed", r.seed},
                {"learner", to_json(r.learner)}, {"family", to_string(r.family)}, {"n", r.n},
                {"dataset_digest", r.dataset_digest}, {"marginals", std::move(marg)},
                {"sigma", matrix_to_json(r.sigma)}, {"report", to_json(r.report)}, {"graphs", std::move(graphs)}};
}

/// Enough of a run document to re-run selection on it.
inline BootstrapRun run_from_json(const Json& j) {
    try {
        BootstrapRun r;
        r.replicates = j.at("replicates").get<std::size_t>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.learner = learner_from_json(j.at("learner"));
        r.family = family_from_string(j.at("family").get<std::string>());
        r.n = j.at("n").get<int>();
        r.dataset_digest = j.at("dataset_digest").get<std::string>();
        const auto& norm = j.at("report").at("normalized");
        r.report.family = r.family;
        r.report.normalized.var_t = norm.at("var_t").get<double>();
        r.report.normalized.var_g = norm.at("var_g").get<double>();
        r.report.normalized.var_f = norm.at("var_f").get<double>();
        return r;
    } catch (const Json::exception& e) {
        throw InputError(std::string("malformed run document: ") + e.what());
    }
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InputError("'" + path + "' is not valid JSON: " + e.what());
    }
}

} // namespace graphvar
