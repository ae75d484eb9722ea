#include "qdag/compiler.hpp"

#include <algorithm>

#include "qdag/error.hpp"

namespace qdag {

std::size_t scope_size(std::span<const VarIndex> scope, std::span<const std::size_t> domains) {
    std::size_t size = 1;
    for (VarIndex v : scope) size *= domains[v];
    return size;
}

std::vector<std::size_t> projection(std::span<const VarIndex> scope, std::span<const VarIndex> subscope,
                                    std::span<const std::size_t> domains) {
    // stride of each scope variable inside the subscope's index (0 if absent)
    std::vector<std::size_t> stride(scope.size(), 0);
    std::size_t s = 1;
    for (std::size_t j = subscope.size(); j-- > 0;) {
        auto it = std::find(scope.begin(), scope.end(), subscope[j]);
        if (it == scope.end()) throw std::logic_error("projection onto a variable outside the scope");
        stride[static_cast<std::size_t>(it - scope.begin())] = s;
        s *= domains[subscope[j]];
    }
    const std::size_t size = scope_size(scope, domains);
    std::vector<std::size_t> out(size, 0);
    std::vector<std::size_t> digits(scope.size(), 0);
    std::size_t target = 0;
    for (std::size_t c = 0; c < size; ++c) {
        out[c] = target;
        for (std::size_t i = scope.size(); i-- > 0;) {
            target += stride[i];
            if (++digits[i] < domains[scope[i]]) break;
            target -= stride[i] * digits[i];
            digits[i] = 0;
        }
    }
    return out;
}

void decode(std::size_t index, std::span<const VarIndex> scope, std::span<const std::size_t> domains,
            std::span<ValueIndex> assignment) {
    for (std::size_t i = scope.size(); i-- > 0;) {
        const std::size_t d = domains[scope[i]];
        assignment[scope[i]] = index % d;
        index /= d;
    }
}

SymbolicAlgebra::SymbolicAlgebra(QDagBuilder& store, const BeliefNetwork& bn) : store_(store), bn_(bn) {}

NodeId SymbolicAlgebra::indicator(VarIndex var, ValueIndex val) {
    const Variable& v = bn_.variables.at(var);
    return store_.mk_esn(v.name, v.values.at(val));
}

std::vector<EvidenceVariable> evidence_domains(const BeliefNetwork& bn, const std::vector<VarIndex>& vars) {
    std::vector<EvidenceVariable> out;
    for (VarIndex v : vars) out.push_back({bn.variables.at(v).name, bn.variables.at(v).values});
    return out;
}

namespace {

struct Resolved {
    std::vector<VarIndex> evidence;
    std::vector<VarIndex> query;
};

Resolved resolve(const BeliefNetwork& bn, const CompilationRequest& request) {
    if (auto violations = validate(bn); !violations.empty()) {
        std::string msg = "invalid network:";
        for (const Violation& v : violations) msg += "\n  " + v.detail;
        throw ValidationError(msg);
    }
    Resolved r;
    for (const std::string& name : request.evidence) r.evidence.push_back(bn.index_of(name));
    std::sort(r.evidence.begin(), r.evidence.end());
    r.evidence.erase(std::unique(r.evidence.begin(), r.evidence.end()), r.evidence.end());
    for (const std::string& name : request.query) {
        VarIndex v = bn.index_of(name);
        if (std::find(r.query.begin(), r.query.end(), v) == r.query.end()) r.query.push_back(v);
    }
    return r;
}

}  // namespace

QDag compile(const BeliefNetwork& bn, const CompilationRequest& request, CompileReport* report) {
    auto [evidence, query] = resolve(bn, request);
    ClusterTree tree = make_cluster_tree(bn, evidence);

    QDagBuilder store(evidence_domains(bn, evidence), BuilderOptions{request.options.fold_constants});
    SymbolicAlgebra algebra(store, bn);
    SymbolicClustering clustering(bn, tree, algebra);
    auto qnodes = clustering.run(query, request.options.query_cluster);

    std::vector<QueryVariable> queries;
    for (std::size_t i = 0; i < query.size(); ++i) {
        const Variable& v = bn.variables[query[i]];
        queries.push_back({v.name, v.values, std::move(qnodes[i])});
    }
    if (report) {
        report->operations_created = store.operations_created();
        report->nodes_created = store.nodes().size();
    }
    QDag sealed = std::move(store).seal(std::move(queries));
    if (report) {
        report->tree = std::move(tree);
        report->evidence = std::move(evidence);
        report->query = std::move(query);
    }
    return request.options.reduce ? reduce(sealed) : sealed;
}

OperationCount clustering_operation_count(const BeliefNetwork& bn, const CompilationRequest& request) {
    auto [evidence, query] = resolve(bn, request);
    ClusterTree tree = make_cluster_tree(bn, evidence);
    NumericAlgebra algebra;
    algebra.evidence.assign(bn.size(), std::nullopt);
    Clustering<NumericAlgebra> clustering(bn, tree, algebra);
    clustering.run(query, request.options.query_cluster);
    return {algebra.multiplications, algebra.additions};
}

}  // namespace qdag
