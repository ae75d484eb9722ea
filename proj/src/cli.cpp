#include "qdag/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>

#include "qdag/compiler.hpp"
#include "qdag/error.hpp"
#include "qdag/evaluator.hpp"
#include "qdag/oracle.hpp"
#include "qdag/qdag_io.hpp"

namespace qdag {

std::string format_probability(double p) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", p);
    return buf;
}

namespace {

constexpr double kVerifyTolerance = 1e-9;

std::pair<std::string, std::string> split_assignment(const std::string& text) {
    auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == text.size())
        throw Error("expected Var=value, got '" + text + "'");
    return {text.substr(0, eq), text.substr(eq + 1)};
}

void print_values(std::ostream& out, const QDag& qdag, const QueryValues& values) {
    for (std::size_t q = 0; q < qdag.queries().size(); ++q) {
        const auto& qv = qdag.queries()[q];
        for (std::size_t i = 0; i < qv.values.size(); ++i)
            out << qv.name << ' ' << qv.values[i] << ' ' << format_probability(values.values[q][i]) << "\n";
    }
}

void print_posteriors(std::ostream& out, const QDag& qdag, const QueryValues& values) {
    if (qdag.queries().empty()) return;
    out << "Pr(e) " << format_probability(marginal_from(qdag, values, 0).evidence_probability) << "\n";
    for (std::size_t q = 0; q < qdag.queries().size(); ++q) {
        const auto& qv = qdag.queries()[q];
        const Marginal m = marginal_from(qdag, values, q);
        for (std::size_t i = 0; i < qv.values.size(); ++i)
            out << qv.name << ' ' << qv.values[i] << ' ' << format_probability(m.posterior[i]) << "\n";
    }
}

struct Stats {
    std::size_t by_kind[4] = {0, 0, 0, 0};
    std::size_t edges = 0;
    std::size_t max_depth = 0;
    std::vector<std::size_t> esn_per_var;
};

Stats collect_stats(const QDag& qdag) {
    Stats s;
    s.esn_per_var.assign(qdag.evidence_variables().size(), 0);
    std::vector<std::size_t> depth(qdag.size(), 0);
    for (std::size_t id = 0; id < qdag.size(); ++id) {
        const Node& n = qdag.nodes()[id];
        ++s.by_kind[static_cast<int>(n.kind)];
        s.edges += n.inputs.size();
        for (NodeId in : n.inputs) depth[id] = std::max(depth[id], depth[in] + 1);
        s.max_depth = std::max(s.max_depth, depth[id]);
        if (n.kind == NodeKind::Esn) ++s.esn_per_var[n.var];
    }
    return s;
}

void print_stats(std::ostream& out, const QDag& qdag) {
    const Stats s = collect_stats(qdag);
    out << "nodes " << qdag.size() << "\n";
    for (NodeKind k : {NodeKind::Num, NodeKind::Esn, NodeKind::Mul, NodeKind::Add})
        out << "  " << to_string(k) << ' ' << s.by_kind[static_cast<int>(k)] << "\n";
    out << "edges " << s.edges << "\n";
    out << "max_depth " << s.max_depth << "\n";
    for (std::size_t v = 0; v < s.esn_per_var.size(); ++v)
        out << "esn " << qdag.evidence_variables()[v].name << ' ' << s.esn_per_var[v] << "\n";
    std::size_t entries = 0;
    for (const auto& q : qdag.queries()) entries += q.nodes.size();
    out << "queries " << qdag.queries().size() << " variables, " << entries << " nodes\n";
}

struct CompileArgs {
    std::string network;
    std::vector<std::string> evidence;
    std::vector<std::string> query;
    bool no_fold = false;
    bool no_reduce = false;

    void add_to(CLI::App* cmd, bool query_required) {
        cmd->add_option("--network,-n", network, "belief network file")->required()->check(CLI::ExistingFile);
        cmd->add_option("--evidence,-e", evidence, "evidence variables (repeatable or comma separated)")
            ->delimiter(',');
        auto* q = cmd->add_option("--query,-q", query, "query variables (repeatable or comma separated)")
                      ->delimiter(',');
        if (query_required) q->required();
        cmd->add_flag("--no-fold", no_fold, "disable constant folding in node constructors");
        cmd->add_flag("--no-reduce", no_reduce, "skip numeric reduction");
    }

    CompilationRequest request() const {
        CompilationRequest r;
        r.evidence = evidence;
        r.query = query;
        r.options.fold_constants = !no_fold;
        r.options.reduce = !no_reduce;
        return r;
    }
};

int run_verify(const CompileArgs& args, std::ostream& out) {
    const BeliefNetwork bn = load_network(args.network);
    CompilationRequest request = args.request();
    if (request.query.empty())
        for (const Variable& v : bn.variables) request.query.push_back(v.name);
    const QDag qdag = compile(bn, request);

    std::vector<VarIndex> ev_index;
    for (const auto& ev : qdag.evidence_variables()) ev_index.push_back(bn.index_of(ev.name));
    std::vector<VarIndex> q_index;
    for (const auto& q : qdag.queries()) q_index.push_back(bn.index_of(q.name));

    double worst = 0.0;
    std::size_t functions = 0;
    for_each_evidence(qdag, [&](const Evidence& e) {
        ++functions;
        oracle::PartialInstantiation partial(bn.size());
        for (std::size_t i = 0; i < ev_index.size(); ++i) partial[ev_index[i]] = e.get(i);
        const QueryValues got = evaluate(qdag, e);
        for (std::size_t q = 0; q < q_index.size(); ++q) {
            const auto expected = oracle::query(bn, partial, q_index[q]);
            for (std::size_t i = 0; i < expected.size(); ++i)
                worst = std::max(worst, std::abs(got.values[q][i] - expected[i]));
        }
    });
    const bool ok = worst <= kVerifyTolerance;
    out << "evidence functions " << functions << "\n";
    out << "query nodes " << [&] {
        std::size_t n = 0;
        for (const auto& q : qdag.queries()) n += q.nodes.size();
        return n;
    }() << "\n";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", worst);
    out << "max abs deviation " << buf << "\n";
    out << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? 0 : 1;
}

int run_stats_network(const CompileArgs& args, std::ostream& out) {
    const BeliefNetwork bn = load_network(args.network);
    CompilationRequest request = args.request();
    CompileReport report;
    const QDag qdag = compile(bn, request, &report);
    out << "clusters " << report.tree.size() << "\n";
    for (std::size_t i = 0; i < report.tree.size(); ++i) {
        out << "  cluster " << i << " {";
        for (VarIndex v : report.tree.clusters[i]) out << ' ' << bn.variables[v].name;
        out << " }\n";
    }
    const OperationCount ops = clustering_operation_count(bn, request);
    out << "clustering_ops " << ops.total() << " (" << ops.multiplications << " mul, " << ops.additions << " add)\n";
    out << "operations_created " << report.operations_created << "\n";
    print_stats(out, qdag);
    return 0;
}

int run_repl(const QDag& qdag, std::istream& in, std::ostream& out, std::ostream& err) {
    EvaluationState state(qdag);
    auto show_posteriors = [&](const std::vector<std::size_t>& which) {
        const QueryValues values = state.query_values();
        for (std::size_t q : which) {
            const auto& qv = qdag.queries()[q];
            try {
                const Marginal m = marginal_from(qdag, values, q);
                for (std::size_t i = 0; i < qv.values.size(); ++i)
                    out << qv.name << ' ' << qv.values[i] << ' ' << format_probability(m.posterior[i]) << "\n";
            } catch (const InconsistentEvidence&) {
                out << qv.name << " inconsistent evidence\n";
            }
        }
    };
    auto changed_queries = [](const std::vector<EvaluationState::QueryRef>& refs) {
        std::vector<std::size_t> qs;
        for (const auto& r : refs)
            if (qs.empty() || qs.back() != r.query) qs.push_back(r.query);
        return qs;
    };

    std::string line;
    while (std::getline(in, line)) {
        std::istringstream words(line);
        std::string cmd, arg;
        words >> cmd >> arg;
        if (cmd.empty() || cmd[0] == '#') continue;
        try {
            if (cmd == "quit" || cmd == "exit") {
                break;
            } else if (cmd == "set") {
                auto [var, value] = split_assignment(arg);
                show_posteriors(changed_queries(state.set_evidence(var, value)));
            } else if (cmd == "unset") {
                show_posteriors(changed_queries(state.set_unknown(arg)));
            } else if (cmd == "show") {
                for (std::size_t v = 0; v < qdag.evidence_variables().size(); ++v) {
                    const auto& ev = qdag.evidence_variables()[v];
                    auto value = state.evidence().get(v);
                    out << "evidence " << ev.name << ' ' << (value ? ev.values[*value] : std::string(kUnknownMarker))
                        << "\n";
                }
                std::vector<std::size_t> all(qdag.queries().size());
                for (std::size_t q = 0; q < all.size(); ++q) all[q] = q;
                show_posteriors(all);
            } else {
                err << "unknown command '" << cmd << "' (set V=v, unset V, show, quit)\n";
            }
        } catch (const Error& e) {
            err << "error: " << e.what() << "\n";
        }
    }
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Compile belief networks into query DAGs and evaluate them", "qdag"};
    app.require_subcommand(1);

    CompileArgs compile_args;
    std::string output;
    auto* compile_cmd = app.add_subcommand("compile", "compile a network into a Q-DAG file");
    compile_args.add_to(compile_cmd, true);
    compile_cmd->add_option("-o,--output", output, "Q-DAG output file")->required();

    std::string qdag_file;
    std::vector<std::string> sets, unknowns;
    bool normalize = false;
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a Q-DAG file under evidence");
    eval_cmd->add_option("qdag", qdag_file, "Q-DAG file")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--set", sets, "evidence Var=value (repeatable)");
    eval_cmd->add_option("--unknown", unknowns, "evidence variable with unknown value (repeatable)");
    eval_cmd->add_flag("--normalize", normalize, "print Pr(e) and posteriors instead of joint values");

    CompileArgs verify_args;
    auto* verify_cmd = app.add_subcommand("verify", "compare compiled answers with brute-force enumeration");
    verify_args.add_to(verify_cmd, false);

    CompileArgs stats_args;
    std::string stats_file;
    auto* stats_cmd = app.add_subcommand("stats", "print node counts of a Q-DAG file, or of a fresh compilation");
    stats_cmd->add_option("qdag", stats_file, "Q-DAG file")->check(CLI::ExistingFile);
    stats_cmd->add_option("--network,-n", stats_args.network, "belief network file")->check(CLI::ExistingFile);
    stats_cmd->add_option("--evidence,-e", stats_args.evidence, "evidence variables")->delimiter(',');
    stats_cmd->add_option("--query,-q", stats_args.query, "query variables")->delimiter(',');
    stats_cmd->add_flag("--no-fold", stats_args.no_fold, "disable constant folding");
    stats_cmd->add_flag("--no-reduce", stats_args.no_reduce, "skip numeric reduction");

    std::string repl_file;
    auto* repl_cmd = app.add_subcommand("repl", "interactive evidence updates with incremental propagation");
    repl_cmd->add_option("qdag", repl_file, "Q-DAG file")->required()->check(CLI::ExistingFile);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*compile_cmd) {
            const BeliefNetwork bn = load_network(compile_args.network);
            save_qdag(compile(bn, compile_args.request()), output);
            return 0;
        }
        if (*eval_cmd) {
            const QDag qdag = load_qdag(qdag_file);
            Evidence e(qdag);
            for (const auto& s : sets) {
                auto [var, value] = split_assignment(s);
                e.set(var, value);
            }
            for (const auto& u : unknowns) e.set_unknown(u);
            const QueryValues values = evaluate(qdag, e);
            if (normalize)
                print_posteriors(out, qdag, values);
            else
                print_values(out, qdag, values);
            return 0;
        }
        if (*verify_cmd) return run_verify(verify_args, out);
        if (*stats_cmd) {
            if (!stats_args.network.empty()) return run_stats_network(stats_args, out);
            if (stats_file.empty()) throw Error("stats needs a Q-DAG file or --network");
            print_stats(out, load_qdag(stats_file));
            return 0;
        }
        if (*repl_cmd) {
            const QDag qdag = load_qdag(repl_file);
            return run_repl(qdag, in, out, err);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace qdag
