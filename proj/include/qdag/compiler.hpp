#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qdag/clustering.hpp"
#include "qdag/jointree.hpp"
#include "qdag/network.hpp"
#include "qdag/qdag.hpp"

namespace qdag {

using SymbolicPotential = Potential<NodeId>;

/// Clustering algebra whose values are Q-DAG nodes: products and sums become
/// Mul/Add constructors, CPT entries become numbers and evidence indicators
/// become evidence-specific nodes.
class SymbolicAlgebra {
public:
    using Value = NodeId;

    SymbolicAlgebra(QDagBuilder& store, const BeliefNetwork& bn);

    NodeId one() { return store_.mk_num(1.0); }
    NodeId constant(double p) { return store_.mk_num(p); }
    NodeId indicator(VarIndex var, ValueIndex val);
    NodeId multiply(std::span<const NodeId> xs) { return store_.mk_mul(xs); }
    NodeId add(std::span<const NodeId> xs) { return store_.mk_add(xs); }

    QDagBuilder& store() noexcept { return store_; }

private:
    QDagBuilder& store_;
    const BeliefNetwork& bn_;
};

using SymbolicClustering = Clustering<SymbolicAlgebra>;

struct CompileOptions {
    bool fold_constants = true;
    bool reduce = true;
    QueryCluster query_cluster = QueryCluster::Lowest;
};

/// Which variables are observed on-line and which are queried. A variable
/// may be both.
struct CompilationRequest {
    std::vector<std::string> evidence;
    std::vector<std::string> query;
    CompileOptions options;
};

struct CompileReport {
    ClusterTree tree;
    /// Evidence variable indices in network order.
    std::vector<VarIndex> evidence;
    std::vector<VarIndex> query;
    /// Mul/Add nodes created while compiling, before sealing or reduction.
    std::size_t operations_created = 0;
    std::size_t nodes_created = 0;
};

/// Evidence domains for a Q-DAG over `vars` of `bn`.
std::vector<EvidenceVariable> evidence_domains(const BeliefNetwork& bn, const std::vector<VarIndex>& vars);

/// Throws ValidationError for an invalid network and DomainError for
/// evidence or query names not in the network.
QDag compile(const BeliefNetwork& bn, const CompilationRequest& request, CompileReport* report = nullptr);

/// Replaces every maximal evidence-free subexpression with one number and
/// drops nodes no query depends on.
QDag reduce(const QDag& qdag);

struct OperationCount {
    std::size_t multiplications = 0;
    std::size_t additions = 0;
    std::size_t total() const noexcept { return multiplications + additions; }
};

/// Binary * and + operations a numeric clustering run performs on the same
/// tree with the same schedule as `compile` would use for `request`.
OperationCount clustering_operation_count(const BeliefNetwork& bn, const CompilationRequest& request);

}  // namespace qdag
