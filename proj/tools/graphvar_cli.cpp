// graphvar: command-line front end for census, sampling, summaries, measures,
// maximum-entropy references, covariance bounds and bootstrap selection.
//
// Exit codes: 0 ok, 1 internal error, 2 usage error, 3 input-format error,
// 4 infeasible request.

#include "graphvar/reference_table.hpp"
#include "graphvar/census.hpp"
#include "graphvar/edgedist.hpp"
#include "graphvar/io.hpp"
#include "graphvar/learn.hpp"
#include "graphvar/measures.hpp"
#include "graphvar/sampler.hpp"
#include "graphvar/spectral.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace gv = graphvar;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitInfeasible = 4;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string one_line(std::string s) {
    for (auto& c : s)
        if (c == '\n' || c == '\r') c = ' ';
    return s;
}

int report_error(const char* kind, int code, const std::string& what) {
    std::cerr << "graphvar: error code=" << code << " kind=" << kind << " message=" << one_line(what) << '\n';
    return code;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("GE_SEED")) {
        char* end = nullptr;
        const auto v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0') throw UsageError("GE_SEED must be an unsigned integer");
        return v;
    }
    return 0;
}

/// Writes to `path`, or stdout when the path is empty or "-".
void write_output(const std::string& path, const std::function<void(std::ostream&)>& body) {
    if (path.empty() || path == "-") {
        body(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path);
    if (!out) throw gv::InputError("cannot open '" + path + "' for writing");
    body(out);
    if (!out) throw gv::InputError("failed writing '" + path + "'");
}

void write_json(const std::string& path, const gv::Json& j) {
    write_output(path, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

gv::RunManifest manifest(const std::string& command, std::map<std::string, std::string> flags,
                         std::optional<std::uint64_t> seed = std::nullopt) {
    gv::RunManifest m;
    m.command = command;
    m.flags = std::move(flags);
    m.seed = seed;
    m.timestamp = gv::RunManifest::now();
    return m;
}

template <class T>
std::string str(const T& v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::vector<double> read_weights(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw gv::InputError("cannot open weights '" + path + "'");
    std::vector<double> w;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        try {
            std::size_t used = 0;
            const double v = std::stod(line, &used);
            if (used != line.size()) throw std::invalid_argument("trailing characters");
            w.push_back(v);
        } catch (const std::exception&) {
            if (lineno == 1) continue; // header row
            throw gv::InputError("weights line " + std::to_string(lineno) + " is not a number");
        }
    }
    return w;
}

std::pair<int, int> parse_range(const std::string& text) {
    const auto dots = text.find("..");
    try {
        if (dots == std::string::npos) {
            const int n = std::stoi(text);
            return {n, n};
        }
        return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
    } catch (const std::exception&) {
        throw UsageError("node range must look like N or N..M, got '" + text + "'");
    }
}

gv::Reduction parse_reduction(const std::string& text) {
    if (text == "none") return gv::Reduction::none();
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    double value = head == "drop" ? 1e-12 : 0.0;
    if (colon != std::string::npos) value = std::stod(text.substr(colon + 1));
    if (head == "drop") return gv::Reduction::drop_below(value);
    if (head == "shrink") return gv::Reduction::shrink(value);
    throw UsageError("reduction must be none, drop[:threshold] or shrink:<intensity>");
}

// --- subcommands -----------------------------------------------------------

struct CensusArgs {
    int nodes = 0;
    bool undirected = false;
    bool allow_huge = false;
    unsigned threads = 0;
    std::string out;
};

int run_census(const CensusArgs& a) {
    const gv::CensusAccumulator c =
        a.undirected ? gv::census_ugs(a.nodes) : gv::census_dags(a.nodes, {a.allow_huge}, a.threads);
    gv::Json j = gv::census_to_json(c, !a.undirected);
    j["manifest"] = gv::to_json(manifest("census", {{"nodes", str(a.nodes)},
                                                    {"undirected", str(a.undirected)},
                                                    {"allow_huge", str(a.allow_huge)}}));
    write_json(a.out, j);
    return kExitOk;
}

struct SampleArgs {
    int nodes = 0;
    std::uint64_t samples = 0;
    bool undirected = false;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> burn_in;
    std::optional<std::uint64_t> thin;
    unsigned chains = 1;
    unsigned threads = 0;
    std::string out;
};

int run_sample(const SampleArgs& a) {
    const std::uint64_t seed = resolve_seed(a.seed);
    write_output(a.out, [&](std::ostream& os) {
        auto emit = [&](const gv::Graph& g) { gv::write_graph_jsonl(os, g); };
        if (a.undirected) {
            gv::sample_uniform_ugs(a.nodes, a.samples, seed, emit);
            return;
        }
        gv::McmcConfig cfg = gv::McmcConfig::defaults(a.nodes, a.samples, seed);
        if (a.burn_in) cfg.burn_in = *a.burn_in;
        if (a.thin) cfg.thin = *a.thin;
        cfg.chains = a.chains;
        gv::sample_uniform_dags(cfg, emit, gv::detail::resolve_threads(a.threads));
    });
    return kExitOk;
}

struct SummarizeArgs {
    std::string in;
    std::string weights;
    bool with_joints = false;
    std::optional<std::uint64_t> seed;
    std::string out;
};

int run_summarize(const SummarizeArgs& a) {
    std::ifstream in(a.in);
    if (!in) throw gv::InputError("cannot open '" + a.in + "'");
    std::vector<double> weights;
    if (!a.weights.empty()) weights = read_weights(a.weights);

    std::optional<gv::EdgeStateAccumulator> acc;
    std::size_t idx = 0;
    const std::size_t records = gv::read_graphs_jsonl(in, [&](const gv::Graph& g) {
        if (!acc) acc.emplace(g.n(), g.directed());
        if (!weights.empty() && idx >= weights.size()) throw gv::InputError("more graphs than weights");
        acc->add(g, weights.empty() ? 1.0 : weights[idx]);
        ++idx;
    });
    if (!acc) throw gv::InputError("'" + a.in + "' contains no graphs");
    if (!weights.empty() && weights.size() != records) throw gv::InputError("weight count does not match graph count");

    gv::Json j;
    gv::Matrix sigma;
    gv::Family family = gv::Family::Trinomial;
    if (acc->directed()) {
        const auto t = acc->trinomial();
        j = gv::to_json(t, a.with_joints);
        sigma = t.sigma;
    } else {
        const auto b = acc->bernoulli();
        j = gv::to_json(b);
        sigma = b.sigma;
        family = gv::Family::Bernoulli;
    }
    if (sigma.rows() > 0) j["eigenvalues"] = gv::eigenvalues_symmetric(sigma, family).eigenvalues;
    else j["eigenvalues"] = gv::Json::array();
    j["provenance"] = {{"records", records},
                       {"input", a.in},
                       {"weighted", !weights.empty()},
                       {"seed", a.seed ? gv::Json(*a.seed) : gv::Json(nullptr)}};
    auto m = manifest("summarize", {{"in", a.in}, {"weights", a.weights}, {"with_joints", str(a.with_joints)}}, a.seed);
    m.input_digests["in"] = gv::file_digest(a.in);
    if (!a.weights.empty()) m.input_digests["weights"] = gv::file_digest(a.weights);
    j["manifest"] = gv::to_json(m);
    write_json(a.out, j);
    return kExitOk;
}

struct MeasuresArgs {
    std::string summary;
    std::string family = "auto";
    std::string target = "approx";
    std::string reduction = "drop";
    std::string out;
};

int run_measures(const MeasuresArgs& a) {
    const auto doc = gv::summary_from_json(gv::read_json_file(a.summary));
    const gv::Family family = a.family == "auto" ? doc.family : gv::family_from_string(a.family);
    if (doc.n < 2) throw gv::InputError("measures need at least two nodes");
    gv::ReportOptions opt;
    if (a.target == "exact") opt.target = gv::MaxEntSource::Exact;
    else if (a.target == "approx") opt.target = gv::MaxEntSource::Approximate;
    else throw UsageError("target must be exact or approx");
    opt.reduction = parse_reduction(a.reduction);
    const auto report = gv::variability_report(doc.sigma, family, doc.n, opt);

    gv::Json j = gv::to_json(report);
    j["schema"] = "graphvar.report/1";
    j["sample_count"] = doc.sample_count;
    const auto ref = gv::maxent_reference(doc.n, family, family == gv::Family::Bernoulli ? gv::MaxEntSource::Approximate : opt.target);
    j["maxent_reference"] = {{"source", gv::to_string(ref.source)},
                             {"marginals", ref.marginals},
                             {"arc_variance", ref.arc_variance},
                             {"cov_bound", ref.cov_bound},
                             {"cor_bound", ref.cor_bound}};
    if (family == gv::Family::Trinomial) {
        // The uniform-DAG distribution does not reach the theoretical maxima; report where it sits.
        const double k = static_cast<double>(report.k);
        j["maxent_uniform_dag"] = {{"var_t", k * ref.arc_variance}, {"normalized_var_t", ref.arc_variance}};
    }
    auto m = manifest("measures", {{"summary", a.summary}, {"family", a.family}, {"target", a.target}, {"reduction", a.reduction}});
    m.input_digests["summary"] = gv::file_digest(a.summary);
    j["manifest"] = gv::to_json(m);
    write_json(a.out, j);
    return kExitOk;
}

struct MaxentArgs {
    int nodes = 0;
    std::string family = "trinomial";
    std::string source = "approx";
    std::string out;
};

int run_maxent(const MaxentArgs& a) {
    if (a.source != "exact" && a.source != "approx") throw UsageError("source must be exact or approx");
    const auto ref = gv::maxent_reference(a.nodes, gv::family_from_string(a.family),
                                          a.source == "exact" ? gv::MaxEntSource::Exact : gv::MaxEntSource::Approximate);
    gv::Json j = gv::to_json(ref);
    j["manifest"] = gv::to_json(manifest("maxent", {{"nodes", str(a.nodes)}, {"family", a.family}, {"source", a.source}}));
    write_json(a.out, j);
    return kExitOk;
}

struct BoundsArgs {
    std::string nodes;
    std::string out;
};

int run_bounds(const BoundsArgs& a) {
    const auto [lo, hi] = parse_range(a.nodes);
    if (lo < 2 || hi < lo) throw gv::InputError("node range must satisfy 2 <= N <= M");
    write_output(a.out, [&](std::ostream& os) {
        os << "n,cov_bound,cor_bound,p_arrow,p_zero\n" << std::setprecision(17);
        for (int n = lo; n <= hi; ++n) {
            const auto b = gv::fmg_covariance_bound(n);
            const auto m = gv::approximate_maxent_marginals(n);
            os << n << ',' << b.cov_bound << ',' << b.cor_bound << ',' << m[2] << ',' << m[1] << '\n';
        }
    });
    return kExitOk;
}

struct BootstrapArgs {
    std::string data;
    std::string learner = "mi:0.01";
    std::size_t replicates = 100;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    std::string out;
};

int run_learn_bootstrap(const BootstrapArgs& a) {
    const auto d = gv::read_csv_file(a.data);
    const std::uint64_t seed = resolve_seed(a.seed);
    const auto run = gv::bootstrap(d, gv::parse_learner(a.learner), a.replicates, seed, gv::detail::resolve_threads(a.threads));
    gv::Json j = gv::to_json(run);
    auto m = manifest("learn-bootstrap", {{"data", a.data}, {"learner", a.learner}, {"replicates", str(a.replicates)}}, seed);
    m.input_digests["data"] = gv::file_digest(a.data);
    j["manifest"] = gv::to_json(m);
    write_json(a.out, j);
    return kExitOk;
}

struct CompareArgs {
    std::vector<std::string> runs;
    std::string criterion = "vt";
    std::string out;
};

int run_compare(const CompareArgs& a) {
    std::vector<gv::BootstrapRun> runs;
    for (const auto& path : a.runs) runs.push_back(gv::run_from_json(gv::read_json_file(path)));
    const auto crit = gv::criterion_from_string(a.criterion);
    const auto sel = gv::select_algorithm(runs, crit);
    gv::Json table = gv::Json::array();
    for (std::size_t i = 0; i < runs.size(); ++i)
        table.push_back({{"run", a.runs[i]},
                         {"learner", runs[i].learner.describe()},
                         {"var_t", runs[i].report.normalized.var_t},
                         {"var_g", runs[i].report.normalized.var_g},
                         {"var_f", runs[i].report.normalized.var_f}});
    gv::Json j{{"schema", "graphvar.selection/1"},
               {"criterion", gv::to_string(crit)},
               {"selected_index", sel.index},
               {"selected_run", a.runs[sel.index]},
               {"selected_learner", gv::to_json(sel.learner)},
               {"tie", sel.tie},
               {"values", sel.values},
               {"runs", std::move(table)}};
    auto m = manifest("compare", {{"criterion", a.criterion}});
    for (std::size_t i = 0; i < a.runs.size(); ++i) m.input_digests["run" + std::to_string(i)] = gv::file_digest(a.runs[i]);
    j["manifest"] = gv::to_json(m);
    write_json(a.out, j);
    return kExitOk;
}

struct TuneArgs {
    std::string data;
    std::string learner = "mi";
    std::vector<double> grid;
    std::size_t replicates = 100;
    std::optional<std::uint64_t> seed;
    std::string criterion = "vt";
    unsigned threads = 0;
    std::string out;
};

int run_tune(const TuneArgs& a) {
    const auto d = gv::read_csv_file(a.data);
    const auto result = gv::select_tuning(d, gv::parse_learner(a.learner), a.grid, a.replicates, resolve_seed(a.seed),
                                          gv::criterion_from_string(a.criterion), gv::detail::resolve_threads(a.threads));
    write_output(a.out, [&](std::ostream& os) {
        os << "tau," << a.criterion << ",selected\n" << std::setprecision(17);
        for (std::size_t i = 0; i < result.curve.size(); ++i)
            os << result.curve[i].first << ',' << result.curve[i].second << ',' << (i == result.best_index ? 1 : 0) << '\n';
    });
    return kExitOk;
}

struct ConjectureArgs {
    int from = 3;
    int to = 6;
    std::uint64_t samples = 100000;
    std::optional<std::uint64_t> seed;
    std::string out;
};

int run_conjectures(const ConjectureArgs& a) {
    const auto seed = resolve_seed(a.seed);
    const auto ev = gv::conjecture_evidence(a.from, a.to, a.samples, seed);
    gv::Json rows = gv::Json::array();
    for (const auto& r : ev.rows)
        rows.push_back({{"n", r.n},
                        {"source", r.source},
                        {"graphs", r.graphs},
                        {"arc_present", r.arc_present},
                        {"disjoint_max_abs_cov", r.disjoint_max_abs_cov},
                        {"shared_mean_abs_cov", r.shared_mean_abs_cov},
                        {"shared_max_abs_cov", r.shared_max_abs_cov},
                        {"shared_mean_abs_cor", r.shared_mean_abs_cor},
                        {"zero_fraction", r.zero_fraction},
                        {"zero_tolerance", r.zero_tolerance},
                        {"predicted_zero_fraction", r.predicted_zero_fraction}});
    gv::Json j{{"schema", "graphvar.conjectures/1"},
               {"label", "conjecture evidence (empirical, not a proof)"},
               {"rows", std::move(rows)},
               {"shared_cov_increasing", ev.shared_cov_increasing},
               {"shared_cor_increasing", ev.shared_cor_increasing}};
    j["manifest"] = gv::to_json(manifest("conjectures", {{"from", str(a.from)}, {"to", str(a.to)}, {"samples", str(a.samples)}}, seed));
    write_json(a.out, j);
    return kExitOk;
}

int run_verify_reference(bool include_six) {
    bool all = true;
    std::cout << std::left << std::setw(4) << "n" << std::setw(20) << "quantity" << std::setw(12) << "printed"
              << std::setw(14) << "computed" << "result\n";
    for (const auto& row : gv::kReferenceTable) {
        if (row.n > (include_six ? 6 : 5)) break;
        const auto t = gv::trinomial_from_census(gv::census_dags(row.n));
        for (const auto& c : gv::check_reference_row(t, row)) {
            all &= c.pass;
            std::cout << std::setw(4) << c.n << std::setw(20) << c.quantity << std::setw(12) << c.printed
                      << std::setw(14) << std::setprecision(8) << c.computed << (c.pass ? "PASS" : "FAIL") << '\n';
        }
    }
    std::cout << (all ? "all reference values reproduced\n" : "MISMATCH against reference values\n");
    return all ? kExitOk : kExitInternal;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"graphvar: moments and variability of distributions over graph structures"};
    app.set_version_flag("--version", std::string(gv::kToolVersion));
    bool verify_flag = false;
    bool verify_six = false;
    app.add_flag("--verify-appendix-b", verify_flag, "Run the n = 3..5 census and diff against the embedded reference values");
    app.require_subcommand(0, 1);

    CensusArgs census;
    auto* c = app.add_subcommand("census", "Exhaustive enumeration with exact moments");
    c->add_option("--nodes", census.nodes, "Number of nodes")->required();
    c->add_flag("--undirected", census.undirected, "Enumerate undirected graphs instead of DAGs");
    c->add_flag("--allow-huge", census.allow_huge, "Permit n = 7 (about 1.1e9 DAGs)");
    c->add_option("--threads", census.threads, "Worker threads (0 = all cores)");
    c->add_option("--out", census.out, "Output JSON (default stdout)");

    SampleArgs sample;
    auto* s = app.add_subcommand("sample", "Uniform random graphs as JSONL");
    s->add_option("--nodes", sample.nodes)->required();
    s->add_option("--samples", sample.samples)->required();
    s->add_flag("--undirected", sample.undirected);
    s->add_option("--seed", sample.seed);
    s->add_option("--burn-in", sample.burn_in);
    s->add_option("--thin", sample.thin);
    s->add_option("--chains", sample.chains, "Independent chains (seeds derived from --seed)");
    s->add_option("--threads", sample.threads);
    s->add_option("--out", sample.out);

    SummarizeArgs summarize;
    auto* sm = app.add_subcommand("summarize", "Fit the edge distribution of a graph stream");
    sm->add_option("--in", summarize.in)->required();
    sm->add_option("--weights", summarize.weights, "One non-negative weight per graph");
    sm->add_flag("--with-joints", summarize.with_joints, "Include 3x3 pair joint tables (DAG input)");
    sm->add_option("--seed", summarize.seed, "Seed that produced the input, recorded as provenance");
    sm->add_option("--out", summarize.out);

    MeasuresArgs measures;
    auto* me = app.add_subcommand("measures", "Variability measures of a summary");
    me->add_option("--summary", measures.summary)->required();
    me->add_option("--family", measures.family)->check(CLI::IsMember({"auto", "bernoulli", "trinomial"}));
    me->add_option("--target", measures.target)->check(CLI::IsMember({"exact", "approx"}));
    me->add_option("--reduction", measures.reduction, "none | drop[:threshold] | shrink:<intensity>");
    me->add_option("--out", measures.out);

    MaxentArgs maxent;
    auto* mx = app.add_subcommand("maxent", "Maximum-entropy reference distribution");
    mx->add_option("--nodes", maxent.nodes)->required();
    mx->add_option("--family", maxent.family)->check(CLI::IsMember({"bernoulli", "trinomial"}));
    mx->add_option("--source", maxent.source)->check(CLI::IsMember({"exact", "approx"}));
    mx->add_option("--out", maxent.out);

    BoundsArgs bounds;
    auto* b = app.add_subcommand("bounds", "Covariance / correlation bounds table (CSV)");
    b->add_option("--nodes", bounds.nodes, "N or N..M")->required();
    b->add_option("--out", bounds.out);

    BootstrapArgs boot;
    auto* lb = app.add_subcommand("learn-bootstrap", "Bootstrap a structure learner on a CSV dataset");
    lb->add_option("--data", boot.data)->required();
    lb->add_option("--learner", boot.learner, "mi:<threshold> | hc[:<penalty scale>] | coin[:<p>]");
    lb->add_option("--replicates", boot.replicates)->check(CLI::PositiveNumber);
    lb->add_option("--seed", boot.seed);
    lb->add_option("--threads", boot.threads);
    lb->add_option("--out", boot.out);

    CompareArgs compare;
    auto* cp = app.add_subcommand("compare", "Select the run with the least structural variability");
    cp->add_option("--runs", compare.runs)->required()->expected(1, -1);
    cp->add_option("--criterion", compare.criterion)->check(CLI::IsMember({"vt", "vg", "vf"}));
    cp->add_option("--out", compare.out);

    TuneArgs tune;
    auto* tu = app.add_subcommand("tune", "Tuning-parameter curve and argmin (CSV)");
    tu->add_option("--data", tune.data)->required();
    tu->add_option("--learner", tune.learner, "mi | hc | coin (base learner)");
    tu->add_option("--grid", tune.grid)->required()->delimiter(',');
    tu->add_option("--replicates", tune.replicates)->check(CLI::PositiveNumber);
    tu->add_option("--seed", tune.seed);
    tu->add_option("--criterion", tune.criterion)->check(CLI::IsMember({"vt", "vg", "vf"}));
    tu->add_option("--threads", tune.threads);
    tu->add_option("--out", tune.out);

    ConjectureArgs conj;
    auto* cj = app.add_subcommand("conjectures", "Evidence table for the arc-covariance conjectures");
    cj->add_option("--from", conj.from);
    cj->add_option("--to", conj.to);
    cj->add_option("--samples", conj.samples, "MCMC samples per n beyond the census range");
    cj->add_option("--seed", conj.seed);
    cj->add_option("--out", conj.out);

    auto* vb = app.add_subcommand("verify-appendix-b", "Same as --verify-appendix-b");
    vb->add_flag("--include-6", verify_six, "Also check n = 6 (3.8 million DAGs)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return report_error("usage", kExitUsage, e.what());
    }

    try {
        if (verify_flag || vb->parsed()) return run_verify_reference(verify_six);
        if (c->parsed()) return run_census(census);
        if (s->parsed()) return run_sample(sample);
        if (sm->parsed()) return run_summarize(summarize);
        if (me->parsed()) return run_measures(measures);
        if (mx->parsed()) return run_maxent(maxent);
        if (b->parsed()) return run_bounds(bounds);
        if (lb->parsed()) return run_learn_bootstrap(boot);
        if (cp->parsed()) return run_compare(compare);
        if (tu->parsed()) return run_tune(tune);
        if (cj->parsed()) return run_conjectures(conj);
        std::cerr << app.help();
        return kExitUsage;
    } catch (const UsageError& e) {
        return report_error("usage", kExitUsage, e.what());
    } catch (const gv::InfeasibleError& e) {
        return report_error("infeasible", kExitInfeasible, e.what());
    } catch (const gv::InputError& e) {
        return report_error("input", kExitInput, e.what());
    } catch (const std::exception& e) {
        return report_error("internal", kExitInternal, e.what());
    }
}
