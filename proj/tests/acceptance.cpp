// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qdag/compiler.hpp"
#include "qdag/evaluator.hpp"
#include "qdag/oracle.hpp"
#include "qdag/qdag_io.hpp"
#include "test_support.hpp"

using namespace qdag;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::size_t kCorpusSize = 200;
constexpr std::uint64_t kCorpusSeed = 20260101;
constexpr std::size_t kMaxEvidence = 3;
constexpr double kAbsTol = 1e-9;
constexpr double kRelTol = 1e-12;
constexpr int kIncrementalSteps = 100;

struct Result {
    bool pass = true;
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, x);
    return buf;
}

std::vector<BeliefNetwork> make_corpus() {
    std::mt19937_64 rng(kCorpusSeed);
    std::vector<BeliefNetwork> out;
    for (std::size_t i = 0; i < kCorpusSize; ++i) out.push_back(testing::random_network(rng));
    return out;
}

std::vector<std::string> all_names(const BeliefNetwork& bn) {
    std::vector<std::string> out;
    for (const auto& v : bn.variables) out.push_back(v.name);
    return out;
}

/// Brute-force tables for one network: joint[w] over every full instantiation.
struct Joint {
    std::vector<std::size_t> domains;
    std::vector<std::vector<ValueIndex>> states;
    std::vector<double> p;

    explicit Joint(const BeliefNetwork& bn) : domains(bn.domain_sizes()) {
        std::vector<ValueIndex> w(bn.size(), 0);
        while (true) {
            states.push_back(w);
            p.push_back(oracle::joint(bn, w));
            std::size_t i = w.size();
            while (i-- > 0) {
                if (++w[i] < domains[i]) break;
                w[i] = 0;
            }
            if (i == static_cast<std::size_t>(-1)) break;
        }
    }

    /// table[s][x][v] = Pr(S = s, X_x = v), s indexing instantiations of `scope`.
    std::vector<std::vector<std::vector<double>>> marginals(const std::vector<VarIndex>& scope) const {
        std::vector<std::vector<std::vector<double>>> table(scope_size(scope, domains));
        for (auto& row : table) {
            row.resize(domains.size());
            for (std::size_t x = 0; x < domains.size(); ++x) row[x].assign(domains[x], 0.0);
        }
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (p[k] == 0.0) continue;
            const auto& w = states[k];
            std::size_t s = 0;
            for (VarIndex v : scope) s = s * domains[v] + w[v];
            for (std::size_t x = 0; x < domains.size(); ++x) table[s][x][w[x]] += p[k];
        }
        return table;
    }
};

/// Pr(X_x = v, e) where e fixes some of `scope` and leaves the rest unknown.
double oracle_value(const Joint& joint, const std::vector<VarIndex>& scope,
                    const std::vector<std::vector<std::vector<double>>>& table,
                    const std::vector<std::optional<std::size_t>>& e, std::size_t x, std::size_t v) {
    double sum = 0.0;
    std::vector<ValueIndex> assignment(joint.domains.size(), 0);
    for (std::size_t s = 0; s < table.size(); ++s) {
        decode(s, scope, joint.domains, assignment);
        bool ok = true;
        for (std::size_t i = 0; i < scope.size() && ok; ++i) ok = !e[i] || *e[i] == assignment[scope[i]];
        if (ok) sum += table[s][x][v];
    }
    return sum;
}

Result example_evidence(const char* value, double on, double off, bool timed) {
    const auto t0 = Clock::now();
    const auto bn = testing::example_network();
    const QDag q = compile(bn, {{"C"}, {"B"}, {}});
    std::map<std::string, std::string> ev;
    if (value) ev["C"] = value;
    const auto v = evaluate(q, ev);
    const double elapsed = seconds_since(t0);
    const double b_on = v.at(q, "B", "ON"), b_off = v.at(q, "B", "OFF");
    Result r;
    r.pass = std::abs(b_on - on) <= kAbsTol && std::abs(b_off - off) <= kAbsTol;
    r.detail = "B=ON " + fmt("%.10g", b_on) + ", B=OFF " + fmt("%.10g", b_off);
    if (value && std::string(value) == "ON") {
        const double c_on = b_on + b_off;
        r.pass = r.pass && std::abs(c_on - .62) <= kAbsTol;
        r.detail += ", Pr(C=ON) " + fmt("%.10g", c_on);
    }
    if (timed) {
        r.pass = r.pass && elapsed < 1.0;
        r.detail += ", " + fmt("%.4f", elapsed) + " s";
    }
    return r;
}

Result message_structure() {
    const auto bn = testing::example_network();
    const std::vector<VarIndex> evidence{bn.index_of("C")};
    const ClusterTree tree = make_cluster_tree(bn, evidence);
    QDagBuilder store(evidence_domains(bn, evidence), BuilderOptions{false});
    SymbolicAlgebra algebra(store, bn);
    SymbolicClustering clustering(bn, tree, algebra);
    clustering.run({bn.index_of("B")}, QueryCluster::Lowest);

    Result r;
    const auto ab = tree.lowest_cluster_with(bn.index_of("B"));
    const auto ac = tree.lowest_cluster_with(bn.index_of("C"));
    if (!ab || !ac || !clustering.has_message(*ac, *ab)) return {false, "no message from {A,C} to {A,B}"};
    const auto& msg = clustering.message(*ac, *ab);
    const auto& nodes = store.nodes();
    const Node& top = nodes[msg.table[0]];  // A = ON
    r.pass = top.kind == NodeKind::Add && top.inputs.size() == 2;
    const double constants[] = {.9, .1};
    for (std::size_t t = 0; r.pass && t < 2; ++t) {
        const Node& prod = nodes[top.inputs[t]];
        r.pass = prod.kind == NodeKind::Mul && prod.inputs.size() == 2;
        if (!r.pass) break;
        const Node& a = nodes[prod.inputs[0]];
        const Node& b = nodes[prod.inputs[1]];
        r.pass = a.kind == NodeKind::Num && a.value == constants[t] && b.kind == NodeKind::Esn && b.var == 0 &&
                 b.val == t;
    }
    r.detail = r.pass ? "M(A=ON) = ADD(MUL(.9, ESN C=ON), MUL(.1, ESN C=OFF))" : "unexpected message shape";
    return r;
}

struct CorpusResults {
    Result oracle, accounting, reduction, roundtrip;
    std::size_t compilations = 0, evidence_functions = 0;
};

CorpusResults run_corpus(const std::vector<BeliefNetwork>& corpus) {
    CorpusResults out;
    double max_dev = 0.0, max_reduce_dev = 0.0;
    std::size_t ops_violations = 0, esn_violations = 0, empty_e_failures = 0, rt_failures = 0;
    const auto t0 = Clock::now();
    double oracle_seconds = 0.0, equivalence_seconds = 0.0;

    for (const BeliefNetwork& bn : corpus) {
        const auto names = all_names(bn);
        const Joint joint(bn);

        // network round trip
        {
            const auto again = parse_network(serialize_network(bn));
            bool same = again.variables.size() == bn.variables.size() && again.edges == bn.edges &&
                        again.cpts.size() == bn.cpts.size();
            for (std::size_t i = 0; same && i < bn.variables.size(); ++i)
                same = again.variables[i].name == bn.variables[i].name &&
                       again.variables[i].values == bn.variables[i].values && again.cpts[i].child == bn.cpts[i].child &&
                       again.cpts[i].parents == bn.cpts[i].parents && again.cpts[i].table == bn.cpts[i].table;
            if (!same) ++rt_failures;
        }

        // E = {}: every query node is one number
        {
            const QDag q = compile(bn, {{}, names, {}});
            for (const auto& qv : q.queries())
                for (NodeId id : qv.nodes)
                    if (q.node(id).kind != NodeKind::Num) ++empty_e_failures;
        }

        for (const auto& subset : testing::subsets_up_to(bn.size(), kMaxEvidence)) {
            const auto ev_names = testing::names(bn, subset);
            const auto tc = Clock::now();
            const auto table = joint.marginals(subset);
            oracle_seconds += seconds_since(tc);

            const auto tq = Clock::now();
            const QDag raw = compile(bn, {ev_names, names, {.reduce = false}});
            const QDag red = reduce(raw);
            ++out.compilations;

            // reduced Q-DAG against the oracle, and against the unreduced one
            for_each_evidence(raw, [&](const Evidence& e) {
                ++out.evidence_functions;
                Evidence re(red);
                for (std::size_t v = 0; v < e.size(); ++v) re.set(v, e.get(v));
                const auto a = evaluate(raw, e);
                const auto b = evaluate(red, re);
                for (std::size_t x = 0; x < bn.size(); ++x)
                    for (std::size_t v = 0; v < bn.variables[x].domain_size(); ++v) {
                        const double expected = oracle_value(joint, subset, table, e.values(), x, v);
                        max_dev = std::max(max_dev, std::abs(b.values[x][v] - expected));
                        max_reduce_dev = std::max(max_reduce_dev, std::abs(b.values[x][v] - a.values[x][v]));
                    }
            });
            equivalence_seconds += seconds_since(tq);

            // Q-DAG round trip
            {
                const std::string text = serialize_qdag(red);
                const QDag back = parse_qdag(text);
                bool same = serialize_qdag(back) == text && back.size() == red.size();
                for (std::size_t i = 0; same && i < red.size(); ++i) {
                    const Node &x = red.node(static_cast<NodeId>(i)), &y = back.node(static_cast<NodeId>(i));
                    same = x.kind == y.kind && x.value == y.value && x.var == y.var && x.val == y.val &&
                           x.inputs == y.inputs;
                }
                if (same)
                    for_each_evidence(red, [&](const Evidence& e) {
                        Evidence f(back);
                        for (std::size_t v = 0; v < e.size(); ++v) f.set(v, e.get(v));
                        if (evaluate(red, e).values != evaluate(back, f).values) same = false;
                    });
                if (!same) ++rt_failures;
            }

            // operation accounting with folding off
            {
                const CompilationRequest req{ev_names, names, {.fold_constants = false, .reduce = false}};
                CompileReport report;
                const QDag plain = compile(bn, req, &report);
                if (report.operations_created > clustering_operation_count(bn, req).total()) ++ops_violations;
                std::vector<std::size_t> esn(plain.evidence_variables().size(), 0);
                for (const Node& n : plain.nodes())
                    if (n.kind == NodeKind::Esn) ++esn[n.var];
                for (std::size_t v = 0; v < esn.size(); ++v)
                    if (esn[v] != plain.evidence_variables()[v].values.size()) ++esn_violations;
            }
        }
    }
    const double elapsed = seconds_since(t0);

    const std::string scope = std::to_string(corpus.size()) + " networks, " + std::to_string(out.compilations) +
                              " compilations, " + std::to_string(out.evidence_functions) + " evidence functions";
    // the equivalence check itself: oracle tables, compilation, evaluation and comparison
    const double check_seconds = oracle_seconds + equivalence_seconds;
    out.oracle.pass = max_dev <= kAbsTol && check_seconds < 120.0;
    out.oracle.detail = scope + ", max |qdag - oracle| " + fmt("%.3e", max_dev) + ", " + fmt("%.1f", check_seconds) +
                        " s (whole corpus pass " + fmt("%.1f", elapsed) + " s)";
    out.accounting.pass = ops_violations == 0 && esn_violations == 0;
    out.accounting.detail = std::to_string(ops_violations) + " operation-count violations, " +
                            std::to_string(esn_violations) + " ESN-count violations";
    out.reduction.pass = max_reduce_dev <= kAbsTol && empty_e_failures == 0;
    out.reduction.detail = "max |reduced - unreduced| " + fmt("%.3e", max_reduce_dev) + ", " +
                           std::to_string(empty_e_failures) + " non-NUM query nodes with E={}";
    out.roundtrip.pass = rt_failures == 0;
    out.roundtrip.detail = std::to_string(rt_failures) + " round-trip mismatches";
    return out;
}

Result example_reduction(Result corpus) {
    const auto bn = testing::example_network();
    const QDag q = compile(bn, {{}, {"B"}, {}});
    const Node& on = q.node(q.query_node("B", "ON"));
    const Node& off = q.node(q.query_node("B", "OFF"));
    const bool ok = on.kind == NodeKind::Num && off.kind == NodeKind::Num && std::abs(on.value - .635) <= kAbsTol &&
                    std::abs(off.value - .365) <= kAbsTol;
    corpus.pass = corpus.pass && ok;
    corpus.detail += ", example E={} gives NUM " + fmt("%.10g", on.value) + " / NUM " + fmt("%.10g", off.value);
    return corpus;
}

Result incremental(const std::vector<BeliefNetwork>& corpus) {
    std::mt19937_64 rng(kCorpusSeed + 1);
    double max_rel = 0.0;
    std::size_t over_budget = 0, sequences = 0;
    for (const BeliefNetwork& bn : corpus) {
        const auto names = all_names(bn);
        const QDag q = compile(bn, {names, names, {}});
        EvaluationState state(q);
        Evidence shadow(q);
        ++sequences;
        for (int step = 0; step < kIncrementalSteps; ++step) {
            const std::size_t var = rng() % q.evidence_variables().size();
            const std::size_t k = q.evidence_variables()[var].values.size();
            const std::size_t pick = rng() % (k + 1);
            const std::optional<std::size_t> value = pick == k ? std::nullopt : std::optional<std::size_t>(pick);
            state.set_evidence(var, value);
            shadow.set(var, value);
            if (state.last_recomputed() > state.reachable_count()) ++over_budget;
            const auto full = evaluate(q, shadow);
            const auto cached = state.query_values();
            for (std::size_t qi = 0; qi < full.values.size(); ++qi)
                for (std::size_t i = 0; i < full.values[qi].size(); ++i) {
                    const double f = full.values[qi][i], c = cached.values[qi][i];
                    const double rel = f == c ? 0.0 : std::abs(f - c) / std::max(std::abs(f), std::abs(c));
                    max_rel = std::max(max_rel, rel);
                }
        }
    }
    return {max_rel <= kRelTol && over_budget == 0,
            std::to_string(sequences) + " sequences of " + std::to_string(kIncrementalSteps) +
                " steps, max relative deviation " + fmt("%.3e", max_rel) + ", " + std::to_string(over_budget) +
                " steps recomputing more than the reachable nodes"};
}

}  // namespace

int main() {
    struct Line {
        int id;
        const char* name;
        std::function<Result()> run;
    };

    const auto corpus = make_corpus();
    CorpusResults corpus_results;
    bool corpus_done = false;
    auto corpus_result = [&](Result CorpusResults::*field) {
        if (!corpus_done) {
            corpus_results = run_corpus(corpus);
            corpus_done = true;
        }
        return corpus_results.*field;
    };

    const std::vector<Line> criteria = {
        {1, "example, C=ON", [] { return example_evidence("ON", .3475, .2725, true); }},
        {2, "example, C=OFF", [] { return example_evidence("OFF", .2875, .0925, false); }},
        {3, "example, C unknown", [] { return example_evidence(nullptr, .635, .365, false); }},
        {4, "message structure without folding", message_structure},
        {5, "oracle equivalence on random networks", [&] { return corpus_result(&CorpusResults::oracle); }},
        {6, "node creations within clustering operations", [&] { return corpus_result(&CorpusResults::accounting); }},
        {7, "incremental propagation", [&] { return incremental(corpus); }},
        {8, "reduction", [&] { return example_reduction(corpus_result(&CorpusResults::reduction)); }},
        {9, "round trips", [&] { return corpus_result(&CorpusResults::roundtrip); }},
    };

    int failures = 0;
    for (const Line& c : criteria) {
        Result r;
        try {
            r = c.run();
        } catch (const std::exception& e) {
            r = {false, std::string("exception: ") + e.what()};
        }
        if (!r.pass) ++failures;
        std::printf("%s  %d. %s: %s\n", r.pass ? "PASS" : "FAIL", c.id, c.name, r.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
