#include "qdag/evaluator.hpp"

#include <algorithm>
#include <queue>

#include "qdag/error.hpp"

namespace qdag {

Evidence::Evidence(const QDag& qdag)
    : domains_(&qdag.evidence_variables()), values_(qdag.evidence_variables().size()) {}

void Evidence::set(std::string_view var, std::string_view value) {
    for (std::size_t i = 0; i < domains_->size(); ++i) {
        const EvidenceVariable& ev = (*domains_)[i];
        if (ev.name != var) continue;
        if (value == kUnknownMarker) {
            values_[i].reset();
            return;
        }
        auto it = std::find(ev.values.begin(), ev.values.end(), value);
        if (it == ev.values.end())
            throw DomainError("evidence variable '" + ev.name + "' has no value '" + std::string(value) + "'");
        values_[i] = static_cast<std::size_t>(it - ev.values.begin());
        return;
    }
    throw DomainError("'" + std::string(var) + "' is not an evidence variable");
}

void Evidence::set_unknown(std::string_view var) { set(var, kUnknownMarker); }

void Evidence::set(std::size_t var, std::optional<std::size_t> value) {
    if (var >= values_.size()) throw DomainError("evidence index out of range");
    if (value && *value >= (*domains_)[var].values.size())
        throw DomainError("value index out of range for '" + (*domains_)[var].name + "'");
    values_[var] = value;
}

double esn_value(const Node& node, const Evidence& e) {
    auto v = e.get(node.var);
    return (!v || *v == node.val) ? 1.0 : 0.0;
}

double QueryValues::at(const QDag& qdag, std::string_view var, std::string_view value) const {
    auto q = qdag.find_query(var);
    if (!q) throw DomainError("'" + std::string(var) + "' is not a query variable");
    const auto& names = qdag.queries()[*q].values;
    auto it = std::find(names.begin(), names.end(), value);
    if (it == names.end()) throw DomainError("query '" + std::string(var) + "' has no value '" + std::string(value) + "'");
    return values[*q][static_cast<std::size_t>(it - names.begin())];
}

namespace {

double apply(const Node& n, const std::vector<double>& values, const Evidence& e) {
    switch (n.kind) {
        case NodeKind::Num: return n.value;
        case NodeKind::Esn: return esn_value(n, e);
        case NodeKind::Mul: {
            double acc = 1.0;
            for (NodeId in : n.inputs) acc *= values[in];
            return acc;
        }
        case NodeKind::Add: {
            double acc = 0.0;
            for (NodeId in : n.inputs) acc += values[in];
            return acc;
        }
    }
    return 0.0;
}

void check_evidence(const QDag& qdag, const Evidence& e) {
    if (e.size() != qdag.evidence_variables().size()) throw DomainError("evidence does not match the Q-DAG");
}

QueryValues collect(const QDag& qdag, const std::vector<double>& values) {
    QueryValues out;
    for (const auto& q : qdag.queries()) {
        auto& row = out.values.emplace_back();
        for (NodeId id : q.nodes) row.push_back(values[id]);
    }
    return out;
}

}  // namespace

QueryValues evaluate(const QDag& qdag, const Evidence& e, EvaluationCounters* counters) {
    check_evidence(qdag, e);
    const auto live = qdag.reachable();
    std::vector<double> values(qdag.size(), 0.0);
    std::size_t visited = 0;
    for (std::size_t id = 0; id < qdag.size(); ++id) {
        if (!live[id]) continue;
        values[id] = apply(qdag.nodes()[id], values, e);
        ++visited;
    }
    if (counters) counters->nodes_visited = visited;
    return collect(qdag, values);
}

QueryValues evaluate(const QDag& qdag, const std::map<std::string, std::string>& evidence) {
    Evidence e(qdag);
    for (const auto& [var, value] : evidence) e.set(var, value);
    return evaluate(qdag, e);
}

std::vector<double> evaluate_all(const QDag& qdag, const Evidence& e) {
    check_evidence(qdag, e);
    std::vector<double> values(qdag.size(), 0.0);
    for (std::size_t id = 0; id < qdag.size(); ++id) values[id] = apply(qdag.nodes()[id], values, e);
    return values;
}

Marginal marginal_from(const QDag& qdag, const QueryValues& values, std::size_t query) {
    const auto& row = values.values.at(query);
    Marginal m;
    for (double p : row) m.evidence_probability += p;
    if (!(m.evidence_probability > 0.0))
        throw InconsistentEvidence("evidence has probability zero; no posterior for '" + qdag.queries()[query].name +
                                   "'");
    for (double p : row) m.posterior.push_back(p / m.evidence_probability);
    return m;
}

Marginal marginal(const QDag& qdag, const Evidence& e, std::string_view query_var) {
    auto q = qdag.find_query(query_var);
    if (!q) throw DomainError("'" + std::string(query_var) + "' is not a query variable");
    return marginal_from(qdag, evaluate(qdag, e), *q);
}

// ---------------------------------------------------------------------------

EvaluationState::EvaluationState(const QDag& qdag)
    : qdag_(&qdag), evidence_(qdag), values_(qdag.size(), 0.0), reachable_(qdag.reachable()) {
    const auto& nodes = qdag.nodes();
    const std::size_t n = nodes.size();

    std::vector<std::size_t> fan_out(n, 0);
    for (std::size_t id = 0; id < n; ++id) {
        if (!reachable_[id]) continue;
        ++reachable_count_;
        for (NodeId in : nodes[id].inputs) ++fan_out[in];
    }
    consumer_offsets_.assign(n + 1, 0);
    for (std::size_t id = 0; id < n; ++id) consumer_offsets_[id + 1] = consumer_offsets_[id] + fan_out[id];
    consumers_.resize(consumer_offsets_[n]);
    std::vector<std::size_t> cursor(consumer_offsets_.begin(), consumer_offsets_.end() - 1);
    for (std::size_t id = 0; id < n; ++id) {
        if (!reachable_[id]) continue;
        for (NodeId in : nodes[id].inputs) consumers_[cursor[in]++] = static_cast<NodeId>(id);
    }

    esn_nodes_.resize(qdag.evidence_variables().size());
    for (std::size_t v = 0; v < esn_nodes_.size(); ++v)
        esn_nodes_[v].resize(qdag.evidence_variables()[v].values.size());
    for (std::size_t id = 0; id < n; ++id)
        if (reachable_[id] && nodes[id].kind == NodeKind::Esn)
            esn_nodes_[nodes[id].var][nodes[id].val] = static_cast<NodeId>(id);

    queries_of_node_.resize(n);
    for (std::size_t q = 0; q < qdag.queries().size(); ++q)
        for (std::size_t i = 0; i < qdag.queries()[q].nodes.size(); ++i)
            queries_of_node_[qdag.queries()[q].nodes[i]].push_back({q, i});

    for (std::size_t id = 0; id < n; ++id)
        if (reachable_[id]) values_[id] = recompute(static_cast<NodeId>(id));
}

double EvaluationState::recompute(NodeId id) const { return apply(qdag_->nodes()[id], values_, evidence_); }

std::vector<EvaluationState::QueryRef> EvaluationState::set_evidence(std::string_view var, std::string_view value) {
    Evidence next = evidence_;
    next.set(var, value);
    auto index = qdag_->find_evidence(var);
    return set_evidence(*index, next.get(*index));
}

std::vector<EvaluationState::QueryRef> EvaluationState::set_unknown(std::string_view var) {
    return set_evidence(var, kUnknownMarker);
}

std::vector<EvaluationState::QueryRef> EvaluationState::set_evidence(std::size_t var,
                                                                     std::optional<std::size_t> value) {
    last_recomputed_ = 0;
    if (evidence_.get(var) == value) return {};
    evidence_.set(var, value);

    // min-heap on node id: ids are a topological order, so a node is popped
    // only after every dirty input has settled
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> dirty;
    std::vector<bool> queued(values_.size(), false);
    auto schedule_consumers = [&](NodeId id) {
        for (std::size_t k = consumer_offsets_[id]; k < consumer_offsets_[id + 1]; ++k) {
            NodeId c = consumers_[k];
            if (!queued[c]) {
                queued[c] = true;
                dirty.push(c);
            }
        }
    };

    std::vector<QueryRef> changed;
    auto note_change = [&](NodeId id) {
        for (const QueryRef& ref : queries_of_node_[id]) changed.push_back(ref);
    };

    for (const auto& esn : esn_nodes_[var]) {
        if (!esn) continue;
        double v = esn_value(qdag_->nodes()[*esn], evidence_);
        if (v == values_[*esn]) continue;
        values_[*esn] = v;
        note_change(*esn);
        schedule_consumers(*esn);
    }
    while (!dirty.empty()) {
        NodeId id = dirty.top();
        dirty.pop();
        ++last_recomputed_;
        double v = recompute(id);
        if (v == values_[id]) continue;
        values_[id] = v;
        note_change(id);
        schedule_consumers(id);
    }
    std::sort(changed.begin(), changed.end(), [](const QueryRef& a, const QueryRef& b) {
        return a.query != b.query ? a.query < b.query : a.value < b.value;
    });
    return changed;
}

double EvaluationState::query_value(std::size_t query, std::size_t value) const {
    return values_[qdag_->queries().at(query).nodes.at(value)];
}

QueryValues EvaluationState::query_values() const { return collect(*qdag_, values_); }

Marginal EvaluationState::marginal(std::string_view query_var) const {
    auto q = qdag_->find_query(query_var);
    if (!q) throw DomainError("'" + std::string(query_var) + "' is not a query variable");
    return marginal_from(*qdag_, query_values(), *q);
}

}  // namespace qdag
