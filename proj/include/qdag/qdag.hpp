#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qdag/network.hpp"

namespace qdag {

using NodeId = std::uint32_t;

enum class NodeKind : std::uint8_t { Num, Esn, Mul, Add };

std::string_view to_string(NodeKind kind);

/// One Q-DAG node. Num nodes carry `value`; Esn nodes carry the evidence
/// variable and value indices; Mul/Add nodes carry their operand ids, which
/// always precede the node's own id.
struct Node {
    NodeKind kind = NodeKind::Num;
    double value = 0.0;
    std::uint32_t var = 0;
    std::uint32_t val = 0;
    std::vector<NodeId> inputs;
};

struct EvidenceVariable {
    std::string name;
    std::vector<std::string> values;
};

/// Query nodes for one variable: nodes[i] evaluates to Pr(values[i], e).
struct QueryVariable {
    std::string name;
    std::vector<std::string> values;
    std::vector<NodeId> nodes;
};

/// A sealed Q-DAG: evidence-variable domains, a topologically ordered node
/// store, and the query index. Immutable; safe to share across evaluators.
class QDag {
public:
    QDag() = default;

    /// Checks every structural invariant; throws Error on violation.
    QDag(std::vector<EvidenceVariable> evidence, std::vector<Node> nodes, std::vector<QueryVariable> queries);

    const std::vector<EvidenceVariable>& evidence_variables() const noexcept { return evidence_; }
    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const Node& node(NodeId id) const { return nodes_.at(id); }
    std::size_t size() const noexcept { return nodes_.size(); }
    const std::vector<QueryVariable>& queries() const noexcept { return queries_; }

    std::optional<std::size_t> find_evidence(std::string_view name) const;
    std::optional<std::size_t> find_query(std::string_view name) const;
    /// Throws DomainError for an unknown (variable, value) query pair.
    NodeId query_node(std::string_view var, std::string_view value) const;

    /// Nodes reachable (through inputs) from some query node.
    std::vector<bool> reachable() const;

private:
    std::vector<EvidenceVariable> evidence_;
    std::vector<Node> nodes_;
    std::vector<QueryVariable> queries_;
};

struct BuilderOptions {
    /// Local simplifications in mk_mul/mk_add: identity and annihilator
    /// elimination and merging of constant operands.
    bool fold_constants = true;
};

/// Single-writer node store with hash-consing constructors.
class QDagBuilder {
public:
    explicit QDagBuilder(std::vector<EvidenceVariable> evidence, BuilderOptions options = {});

    const std::vector<EvidenceVariable>& evidence_variables() const noexcept { return evidence_; }
    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const Node& node(NodeId id) const { return nodes_.at(id); }
    const BuilderOptions& options() const noexcept { return options_; }

    /// Throws DomainError unless 0 <= p <= 1.
    NodeId mk_num(double p);
    /// Throws DomainError for an unknown evidence variable or value.
    NodeId mk_esn(std::string_view var, std::string_view value);
    NodeId mk_esn(std::size_t var, std::size_t value);
    /// Throws Error on an empty operand list or an invalid id.
    NodeId mk_mul(std::span<const NodeId> inputs);
    NodeId mk_add(std::span<const NodeId> inputs);

    /// Mul and Add nodes created so far (hash-cons hits excluded).
    std::size_t operations_created() const noexcept { return operations_created_; }

    /// Seals the store into a QDag holding only nodes reachable from the
    /// queries, renumbered in order. Consumes the builder.
    QDag seal(std::vector<QueryVariable> queries) &&;

private:
    struct Key {
        NodeKind kind;
        std::uint64_t payload;
        std::vector<NodeId> inputs;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept;
    };

    NodeId intern(Node node);
    NodeId combine(NodeKind kind, std::span<const NodeId> inputs);
    void check_ids(std::span<const NodeId> inputs) const;

    std::vector<EvidenceVariable> evidence_;
    BuilderOptions options_;
    std::vector<Node> nodes_;
    std::unordered_map<Key, NodeId, KeyHash> index_;
    std::size_t operations_created_ = 0;
};

/// Tolerance for folded sums slightly above 1 from rounding; they are clamped.
inline constexpr double kProbabilitySlack = 1e-9;

}  // namespace qdag
