#include "qdag/oracle.hpp"

#include "qdag/error.hpp"

namespace qdag::oracle {

double joint(const BeliefNetwork& bn, std::span<const ValueIndex> w) {
    double p = 1.0;
    for (VarIndex v = 0; v < bn.size(); ++v) p *= bn.probability(v, w);
    return p;
}

namespace {

void check_cap(const BeliefNetwork& bn, std::size_t cap) {
    std::size_t states = 1;
    for (const Variable& v : bn.variables) {
        if (v.domain_size() != 0 && states > cap / v.domain_size())
            throw StateSpaceTooLarge("joint state space exceeds the oracle cap of " + std::to_string(cap));
        states *= v.domain_size();
    }
    if (states > cap) throw StateSpaceTooLarge("joint state space exceeds the oracle cap of " + std::to_string(cap));
}

// Calls visit(w) for every full instantiation consistent with e.
template <class Visit>
void enumerate(const BeliefNetwork& bn, const PartialInstantiation& e, Visit&& visit) {
    const std::size_t n = bn.size();
    std::vector<ValueIndex> w(n, 0);
    for (VarIndex v = 0; v < n; ++v)
        if (e[v]) w[v] = *e[v];
    while (true) {
        visit(w);
        std::size_t v = n;
        while (v-- > 0) {
            if (e[v]) continue;
            if (++w[v] < bn.variables[v].domain_size()) break;
            w[v] = 0;
        }
        if (v == static_cast<std::size_t>(-1)) return;
    }
}

void check_partial(const BeliefNetwork& bn, const PartialInstantiation& e) {
    if (e.size() != bn.size()) throw DomainError("partial instantiation has the wrong length");
    for (VarIndex v = 0; v < bn.size(); ++v)
        if (e[v] && *e[v] >= bn.variables[v].domain_size()) throw DomainError("value index out of range");
}

}  // namespace

std::vector<double> query(const BeliefNetwork& bn, const PartialInstantiation& e, VarIndex x, std::size_t cap) {
    check_partial(bn, e);
    if (x >= bn.size()) throw DomainError("query variable index out of range");
    check_cap(bn, cap);
    std::vector<double> out(bn.variables[x].domain_size(), 0.0);
    enumerate(bn, e, [&](const std::vector<ValueIndex>& w) { out[w[x]] += joint(bn, w); });
    return out;
}

double evidence_probability(const BeliefNetwork& bn, const PartialInstantiation& e, std::size_t cap) {
    check_partial(bn, e);
    check_cap(bn, cap);
    double total = 0.0;
    enumerate(bn, e, [&](const std::vector<ValueIndex>& w) { total += joint(bn, w); });
    return total;
}

}  // namespace qdag::oracle
