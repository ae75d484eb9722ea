#include "qdag/qdag.hpp"

#include <algorithm>
#include <bit>
#include <unordered_set>

#include "qdag/error.hpp"

namespace qdag {

std::string_view to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::Num: return "NUM";
        case NodeKind::Esn: return "ESN";
        case NodeKind::Mul: return "MUL";
        case NodeKind::Add: return "ADD";
    }
    return "?";
}

namespace {

void check_domains(const std::vector<EvidenceVariable>& evidence) {
    std::unordered_set<std::string> names;
    for (const auto& ev : evidence) {
        if (!names.insert(ev.name).second) throw Error("evidence variable '" + ev.name + "' declared twice");
        if (ev.values.empty()) throw Error("evidence variable '" + ev.name + "' has no values");
        std::unordered_set<std::string> seen;
        for (const auto& v : ev.values) {
            if (v == kUnknownMarker) throw Error("value name '" + v + "' is reserved");
            if (!seen.insert(v).second) throw Error("evidence variable '" + ev.name + "' repeats '" + v + "'");
        }
    }
}

bool in_unit_interval(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

QDag::QDag(std::vector<EvidenceVariable> evidence, std::vector<Node> nodes, std::vector<QueryVariable> queries)
    : evidence_(std::move(evidence)), nodes_(std::move(nodes)), queries_(std::move(queries)) {
    check_domains(evidence_);
    for (std::size_t id = 0; id < nodes_.size(); ++id) {
        const Node& n = nodes_[id];
        const std::string where = "node " + std::to_string(id);
        switch (n.kind) {
            case NodeKind::Num:
                if (!in_unit_interval(n.value)) throw Error(where + ": number outside [0,1]");
                if (!n.inputs.empty()) throw Error(where + ": number with inputs");
                break;
            case NodeKind::Esn:
                if (n.var >= evidence_.size() || n.val >= evidence_[n.var].values.size())
                    throw Error(where + ": evidence node outside the declared domains");
                if (!n.inputs.empty()) throw Error(where + ": evidence node with inputs");
                break;
            case NodeKind::Mul:
            case NodeKind::Add:
                if (n.inputs.size() < 2) throw Error(where + ": operation needs at least two inputs");
                for (NodeId in : n.inputs)
                    if (in >= id) throw Error(where + ": input " + std::to_string(in) + " does not precede it");
                break;
        }
    }
    std::unordered_set<std::string> names;
    for (const auto& q : queries_) {
        if (!names.insert(q.name).second) throw Error("query variable '" + q.name + "' declared twice");
        if (q.values.empty() || q.values.size() != q.nodes.size())
            throw Error("query variable '" + q.name + "' needs one node per value");
        std::unordered_set<std::string> seen;
        for (const auto& v : q.values)
            if (!seen.insert(v).second) throw Error("query '" + q.name + "' repeats value '" + v + "'");
        for (NodeId id : q.nodes)
            if (id >= nodes_.size()) throw Error("query '" + q.name + "' refers to missing node " + std::to_string(id));
    }
}

std::optional<std::size_t> QDag::find_evidence(std::string_view name) const {
    for (std::size_t i = 0; i < evidence_.size(); ++i)
        if (evidence_[i].name == name) return i;
    return std::nullopt;
}

std::optional<std::size_t> QDag::find_query(std::string_view name) const {
    for (std::size_t i = 0; i < queries_.size(); ++i)
        if (queries_[i].name == name) return i;
    return std::nullopt;
}

NodeId QDag::query_node(std::string_view var, std::string_view value) const {
    auto q = find_query(var);
    if (!q) throw DomainError("'" + std::string(var) + "' is not a query variable");
    const QueryVariable& qv = queries_[*q];
    for (std::size_t i = 0; i < qv.values.size(); ++i)
        if (qv.values[i] == value) return qv.nodes[i];
    throw DomainError("query variable '" + qv.name + "' has no value '" + std::string(value) + "'");
}

std::vector<bool> QDag::reachable() const {
    std::vector<bool> live(nodes_.size(), false);
    for (const auto& q : queries_)
        for (NodeId id : q.nodes) live[id] = true;
    for (std::size_t id = nodes_.size(); id-- > 0;)
        if (live[id])
            for (NodeId in : nodes_[id].inputs) live[in] = true;
    return live;
}

// ---------------------------------------------------------------------------

std::size_t QDagBuilder::KeyHash::operator()(const Key& k) const noexcept {
    std::size_t h = std::hash<std::uint64_t>{}(k.payload) ^ (static_cast<std::size_t>(k.kind) << 1);
    for (NodeId id : k.inputs) h ^= std::hash<NodeId>{}(id) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

QDagBuilder::QDagBuilder(std::vector<EvidenceVariable> evidence, BuilderOptions options)
    : evidence_(std::move(evidence)), options_(options) {
    check_domains(evidence_);
}

NodeId QDagBuilder::intern(Node node) {
    std::uint64_t payload = 0;
    if (node.kind == NodeKind::Num) {
        if (node.value == 0.0) node.value = 0.0;  // -0 and +0 share a node
        payload = std::bit_cast<std::uint64_t>(node.value);
    } else if (node.kind == NodeKind::Esn) {
        payload = (std::uint64_t{node.var} << 32) | node.val;
    }
    Key key{node.kind, payload, node.inputs};
    if (auto it = index_.find(key); it != index_.end()) return it->second;
    const auto id = static_cast<NodeId>(nodes_.size());
    if (node.kind == NodeKind::Mul || node.kind == NodeKind::Add) ++operations_created_;
    nodes_.push_back(std::move(node));
    index_.emplace(std::move(key), id);
    return id;
}

NodeId QDagBuilder::mk_num(double p) {
    if (!in_unit_interval(p)) throw DomainError("number " + format_exact(p) + " outside [0,1]");
    Node n;
    n.kind = NodeKind::Num;
    n.value = p;
    return intern(std::move(n));
}

NodeId QDagBuilder::mk_esn(std::string_view var, std::string_view value) {
    for (std::size_t i = 0; i < evidence_.size(); ++i) {
        if (evidence_[i].name != var) continue;
        const auto& vals = evidence_[i].values;
        auto it = std::find(vals.begin(), vals.end(), value);
        if (it == vals.end())
            throw DomainError("evidence variable '" + std::string(var) + "' has no value '" + std::string(value) + "'");
        return mk_esn(i, static_cast<std::size_t>(it - vals.begin()));
    }
    throw DomainError("'" + std::string(var) + "' is not an evidence variable");
}

NodeId QDagBuilder::mk_esn(std::size_t var, std::size_t value) {
    if (var >= evidence_.size() || value >= evidence_[var].values.size())
        throw DomainError("evidence index out of range");
    Node n;
    n.kind = NodeKind::Esn;
    n.var = static_cast<std::uint32_t>(var);
    n.val = static_cast<std::uint32_t>(value);
    return intern(std::move(n));
}

void QDagBuilder::check_ids(std::span<const NodeId> inputs) const {
    if (inputs.empty()) throw Error("operation with no inputs");
    for (NodeId id : inputs)
        if (id >= nodes_.size()) throw Error("unknown node id " + std::to_string(id));
}

NodeId QDagBuilder::mk_mul(std::span<const NodeId> inputs) { return combine(NodeKind::Mul, inputs); }

NodeId QDagBuilder::mk_add(std::span<const NodeId> inputs) { return combine(NodeKind::Add, inputs); }

NodeId QDagBuilder::combine(NodeKind kind, std::span<const NodeId> inputs) {
    check_ids(inputs);
    const bool is_mul = kind == NodeKind::Mul;
    std::vector<NodeId> operands;
    operands.reserve(inputs.size());

    if (options_.fold_constants) {
        const double identity = is_mul ? 1.0 : 0.0;
        double constant = identity;
        std::size_t constants = 0;
        for (NodeId id : inputs) {
            const Node& n = nodes_[id];
            if (n.kind != NodeKind::Num) {
                operands.push_back(id);
                continue;
            }
            if (is_mul && n.value == 0.0) return mk_num(0.0);
            ++constants;
            constant = is_mul ? constant * n.value : constant + n.value;
        }
        if (!is_mul && constant > 1.0) {
            if (constant > 1.0 + kProbabilitySlack)
                throw DomainError("folded sum " + format_exact(constant) + " exceeds 1");
            constant = 1.0;
        }
        if (operands.empty()) return mk_num(constant);
        if (constants > 0 && constant != identity) operands.insert(operands.begin(), mk_num(constant));
    } else {
        operands.assign(inputs.begin(), inputs.end());
    }

    if (operands.size() == 1) return operands.front();
    Node n;
    n.kind = kind;
    n.inputs = std::move(operands);
    return intern(std::move(n));
}

QDag QDagBuilder::seal(std::vector<QueryVariable> queries) && {
    for (const auto& q : queries)
        for (NodeId id : q.nodes)
            if (id >= nodes_.size()) throw Error("query refers to unknown node " + std::to_string(id));

    std::vector<bool> live(nodes_.size(), false);
    for (const auto& q : queries)
        for (NodeId id : q.nodes) live[id] = true;
    for (std::size_t id = nodes_.size(); id-- > 0;)
        if (live[id])
            for (NodeId in : nodes_[id].inputs) live[in] = true;

    constexpr NodeId kDead = ~NodeId{0};
    std::vector<NodeId> remap(nodes_.size(), kDead);
    std::vector<Node> kept;
    for (std::size_t id = 0; id < nodes_.size(); ++id) {
        if (!live[id]) continue;
        remap[id] = static_cast<NodeId>(kept.size());
        Node n = std::move(nodes_[id]);
        for (NodeId& in : n.inputs) in = remap[in];
        kept.push_back(std::move(n));
    }
    for (auto& q : queries)
        for (NodeId& id : q.nodes) id = remap[id];
    index_.clear();
    nodes_.clear();
    return QDag(std::move(evidence_), std::move(kept), std::move(queries));
}

}  // namespace qdag
