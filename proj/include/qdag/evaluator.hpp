#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qdag/qdag.hpp"

namespace qdag {

/// An evidence function over a Q-DAG's evidence variables: each one is set to
/// a value index or left unknown (nullopt). Starts all unknown.
class Evidence {
public:
    explicit Evidence(const QDag& qdag);

    /// Throws DomainError for names outside the Q-DAG's evidence domains.
    /// `value == kUnknownMarker` is the same as `set_unknown`.
    void set(std::string_view var, std::string_view value);
    void set_unknown(std::string_view var);
    void set(std::size_t var, std::optional<std::size_t> value);

    std::optional<std::size_t> get(std::size_t var) const { return values_.at(var); }
    std::size_t size() const noexcept { return values_.size(); }
    const std::vector<std::optional<std::size_t>>& values() const noexcept { return values_; }

    bool operator==(const Evidence&) const = default;

private:
    const std::vector<EvidenceVariable>* domains_;
    std::vector<std::optional<std::size_t>> values_;
};

/// Calls `visit(e)` for every evidence function over the Q-DAG's evidence
/// variables: each variable set to each of its values or left unknown.
template <class Visit>
void for_each_evidence(const QDag& qdag, Visit&& visit) {
    Evidence e(qdag);
    const auto& domains = qdag.evidence_variables();
    while (true) {
        visit(static_cast<const Evidence&>(e));
        std::size_t v = domains.size();
        while (v-- > 0) {
            // per variable: unknown first, then each value
            auto cur = e.get(v);
            const std::size_t next = cur ? *cur + 1 : 0;
            if (next < domains[v].values.size()) {
                e.set(v, next);
                break;
            }
            e.set(v, std::nullopt);
        }
        if (v == static_cast<std::size_t>(-1)) return;
    }
}

/// Value of an evidence-specific node under `e`: 1 when e sets the variable
/// to that value or leaves it unknown, else 0.
double esn_value(const Node& node, const Evidence& e);

/// Query values indexed like QDag::queries(): values[q][i] = Pr(x_i, e).
struct QueryValues {
    std::vector<std::vector<double>> values;

    double at(const QDag& qdag, std::string_view var, std::string_view value) const;
};

struct EvaluationCounters {
    std::size_t nodes_visited = 0;
};

/// Memoized evaluation of every node reachable from a query node.
QueryValues evaluate(const QDag& qdag, const Evidence& e, EvaluationCounters* counters = nullptr);

/// Convenience overload: (variable -> value) pairs; unlisted variables are unknown.
QueryValues evaluate(const QDag& qdag, const std::map<std::string, std::string>& evidence);

/// Values of all nodes (unreachable ones included) in store order.
std::vector<double> evaluate_all(const QDag& qdag, const Evidence& e);

struct Marginal {
    double evidence_probability = 0.0;
    std::vector<double> posterior;
};

/// Pr(e) and Pr(x | e) for one query variable. Throws InconsistentEvidence
/// when Pr(e) is zero.
Marginal marginal(const QDag& qdag, const Evidence& e, std::string_view query_var);
Marginal marginal_from(const QDag& qdag, const QueryValues& values, std::size_t query);

/// Incrementally maintained evaluation. Changing one evidence variable
/// re-evaluates only the nodes downstream of the evidence nodes that flipped.
///
/// Holds a reference to the Q-DAG, which must outlive the state.
class EvaluationState {
public:
    /// Evaluates every reachable node under all-unknown evidence.
    explicit EvaluationState(const QDag& qdag);

    struct QueryRef {
        std::size_t query = 0;
        std::size_t value = 0;
        bool operator==(const QueryRef&) const = default;
    };

    /// Returns the query entries whose value changed.
    std::vector<QueryRef> set_evidence(std::string_view var, std::string_view value);
    std::vector<QueryRef> set_unknown(std::string_view var);
    std::vector<QueryRef> set_evidence(std::size_t var, std::optional<std::size_t> value);

    const QDag& qdag() const noexcept { return *qdag_; }
    const Evidence& evidence() const noexcept { return evidence_; }
    double value(NodeId id) const { return values_.at(id); }
    const std::vector<double>& node_values() const noexcept { return values_; }
    double query_value(std::size_t query, std::size_t value) const;
    QueryValues query_values() const;
    Marginal marginal(std::string_view query_var) const;

    /// Nodes recomputed by the most recent set_evidence call.
    std::size_t last_recomputed() const noexcept { return last_recomputed_; }
    std::size_t reachable_count() const noexcept { return reachable_count_; }

private:
    double recompute(NodeId id) const;

    const QDag* qdag_;
    Evidence evidence_;
    std::vector<double> values_;
    std::vector<bool> reachable_;
    std::size_t reachable_count_ = 0;
    // consumers in CSR form, restricted to reachable nodes
    std::vector<std::size_t> consumer_offsets_;
    std::vector<NodeId> consumers_;
    // esn_nodes_[var][val] -> reachable node id, if any
    std::vector<std::vector<std::optional<NodeId>>> esn_nodes_;
    std::vector<std::vector<QueryRef>> queries_of_node_;
    std::size_t last_recomputed_ = 0;
};

}  // namespace qdag
