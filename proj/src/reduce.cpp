#include <algorithm>

#include "qdag/compiler.hpp"
#include "qdag/error.hpp"

namespace qdag {

QDag reduce(const QDag& qdag) {
    const auto& nodes = qdag.nodes();
    const auto live = qdag.reachable();

    // value of every evidence-free node; with no ESN below, evaluation does
    // not depend on evidence
    std::vector<bool> has_esn(nodes.size(), false);
    std::vector<double> value(nodes.size(), 0.0);
    for (std::size_t id = 0; id < nodes.size(); ++id) {
        if (!live[id]) continue;
        const Node& n = nodes[id];
        switch (n.kind) {
            case NodeKind::Num: value[id] = n.value; break;
            case NodeKind::Esn: has_esn[id] = true; break;
            case NodeKind::Mul:
            case NodeKind::Add: {
                const bool mul = n.kind == NodeKind::Mul;
                double acc = mul ? 1.0 : 0.0;
                for (NodeId in : n.inputs) {
                    has_esn[id] = has_esn[id] || has_esn[in];
                    acc = mul ? acc * value[in] : acc + value[in];
                }
                if (acc > 1.0) {
                    if (acc > 1.0 + kProbabilitySlack) throw Error("evidence-free subexpression evaluates above 1");
                    acc = 1.0;
                }
                value[id] = acc;
                break;
            }
        }
    }

    QDagBuilder out(qdag.evidence_variables(), BuilderOptions{true});
    std::vector<NodeId> remap(nodes.size(), 0);
    std::vector<NodeId> operands;
    for (std::size_t id = 0; id < nodes.size(); ++id) {
        if (!live[id]) continue;
        const Node& n = nodes[id];
        if (!has_esn[id]) {
            remap[id] = out.mk_num(value[id]);
            continue;
        }
        switch (n.kind) {
            case NodeKind::Esn: remap[id] = out.mk_esn(n.var, n.val); break;
            case NodeKind::Mul:
            case NodeKind::Add:
                operands.clear();
                for (NodeId in : n.inputs) operands.push_back(remap[in]);
                remap[id] = n.kind == NodeKind::Mul ? out.mk_mul(operands) : out.mk_add(operands);
                break;
            case NodeKind::Num: break;
        }
    }

    auto queries = qdag.queries();
    for (auto& q : queries)
        for (NodeId& id : q.nodes) id = remap[id];
    return std::move(out).seal(std::move(queries));
}

}  // namespace qdag
