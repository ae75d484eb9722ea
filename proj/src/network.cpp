#include "qdag/network.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <unordered_set>

#include "qdag/error.hpp"

namespace qdag {

std::optional<ValueIndex> Variable::find_value(std::string_view value) const {
    auto it = std::find(values.begin(), values.end(), value);
    if (it == values.end()) return std::nullopt;
    return static_cast<ValueIndex>(it - values.begin());
}

std::size_t Cpt::row_count(std::span<const Variable> variables) const {
    std::size_t rows = 1;
    for (VarIndex p : parents) rows *= variables[p].domain_size();
    return rows;
}

std::optional<VarIndex> BeliefNetwork::find(std::string_view n) const {
    for (VarIndex i = 0; i < variables.size(); ++i)
        if (variables[i].name == n) return i;
    return std::nullopt;
}

VarIndex BeliefNetwork::index_of(std::string_view n) const {
    if (auto i = find(n)) return *i;
    throw DomainError("unknown variable '" + std::string(n) + "'");
}

ValueIndex BeliefNetwork::value_index(VarIndex var, std::string_view value) const {
    if (auto v = variables.at(var).find_value(value)) return *v;
    throw DomainError("variable '" + variables[var].name + "' has no value '" + std::string(value) + "'");
}

const Cpt& BeliefNetwork::cpt_of(VarIndex var) const {
    for (const Cpt& c : cpts)
        if (c.child == var) return c;
    throw DomainError("variable '" + variables.at(var).name + "' has no CPT");
}

std::vector<VarIndex> BeliefNetwork::parents_of(VarIndex var) const {
    std::vector<VarIndex> out;
    for (auto [from, to] : edges)
        if (to == var) out.push_back(from);
    return out;
}

std::vector<std::size_t> BeliefNetwork::domain_sizes() const {
    std::vector<std::size_t> out;
    out.reserve(variables.size());
    for (const Variable& v : variables) out.push_back(v.domain_size());
    return out;
}

double BeliefNetwork::probability(VarIndex var, std::span<const ValueIndex> instantiation) const {
    const Cpt& cpt = cpt_of(var);
    std::size_t row = 0;
    for (VarIndex p : cpt.parents) row = row * variables[p].domain_size() + instantiation[p];
    return cpt.table[row * variables[var].domain_size() + instantiation[var]];
}

std::optional<std::vector<VarIndex>> topological_order(const BeliefNetwork& bn) {
    const std::size_t n = bn.size();
    std::vector<std::size_t> indegree(n, 0);
    std::vector<std::vector<VarIndex>> children(n);
    for (auto [from, to] : bn.edges) {
        if (from >= n || to >= n) return std::nullopt;
        children[from].push_back(to);
        ++indegree[to];
    }
    // min-heap keeps the order deterministic: declaration order among ready nodes
    std::priority_queue<VarIndex, std::vector<VarIndex>, std::greater<>> ready;
    for (VarIndex v = 0; v < n; ++v)
        if (indegree[v] == 0) ready.push(v);
    std::vector<VarIndex> order;
    order.reserve(n);
    while (!ready.empty()) {
        VarIndex v = ready.top();
        ready.pop();
        order.push_back(v);
        for (VarIndex c : children[v])
            if (--indegree[c] == 0) ready.push(c);
    }
    if (order.size() != n) return std::nullopt;
    return order;
}

std::vector<Violation> validate(const BeliefNetwork& bn) {
    using K = Violation::Kind;
    std::vector<Violation> out;
    auto report = [&](K kind, std::string detail) { out.push_back({kind, std::move(detail)}); };
    const std::size_t n = bn.size();

    std::unordered_set<std::string> names;
    for (const Variable& v : bn.variables) {
        if (v.name.empty()) report(K::EmptyName, "variable with empty name");
        if (!names.insert(v.name).second) report(K::DuplicateVariable, "duplicate variable '" + v.name + "'");
        if (v.values.empty()) report(K::EmptyDomain, "variable '" + v.name + "' has no values");
        std::unordered_set<std::string> seen;
        for (const std::string& value : v.values) {
            if (value == kUnknownMarker)
                report(K::ReservedValue, "variable '" + v.name + "' uses the reserved value name");
            if (!seen.insert(value).second)
                report(K::DuplicateValue, "variable '" + v.name + "' repeats value '" + value + "'");
        }
    }

    bool edges_ok = true;
    for (auto [from, to] : bn.edges) {
        if (from >= n || to >= n) {
            report(K::BadReference, "edge refers to a variable index out of range");
            edges_ok = false;
        } else if (from == to) {
            report(K::Cycle, "self-loop on '" + bn.variables[from].name + "'");
            edges_ok = false;
        }
    }
    if (edges_ok && !topological_order(bn)) report(K::Cycle, "edge relation contains a directed cycle");

    std::vector<std::size_t> cpt_count(n, 0);
    for (const Cpt& cpt : bn.cpts) {
        if (cpt.child >= n) {
            report(K::BadReference, "CPT for a variable index out of range");
            continue;
        }
        const std::string& child = bn.variables[cpt.child].name;
        if (++cpt_count[cpt.child] == 2) report(K::DuplicateCpt, "variable '" + child + "' has several CPTs");

        bool parents_ok = true;
        for (VarIndex p : cpt.parents) {
            if (p >= n) {
                report(K::BadReference, "CPT of '" + child + "' names a parent index out of range");
                parents_ok = false;
            }
        }
        if (!parents_ok) continue;

        if (edges_ok) {
            std::multiset<VarIndex> declared(cpt.parents.begin(), cpt.parents.end());
            auto actual_vec = bn.parents_of(cpt.child);
            std::multiset<VarIndex> actual(actual_vec.begin(), actual_vec.end());
            if (declared != actual)
                report(K::ParentMismatch, "CPT parents of '" + child + "' differ from its incoming edges");
        }

        const std::size_t k = bn.variables[cpt.child].domain_size();
        const std::size_t rows = cpt.row_count(bn.variables);
        if (k == 0) continue;
        if (cpt.table.size() != rows * k) {
            report(K::TableShape, "CPT of '" + child + "' has " + std::to_string(cpt.table.size()) +
                                      " entries, expected " + std::to_string(rows * k));
            continue;
        }
        for (std::size_t r = 0; r < rows; ++r) {
            double sum = 0;
            bool in_range = true;
            for (std::size_t c = 0; c < k; ++c) {
                double p = cpt.table[r * k + c];
                if (!(p >= 0.0 && p <= 1.0)) in_range = false;
                sum += p;
            }
            if (!in_range)
                report(K::OutOfRange, "CPT of '" + child + "' row " + std::to_string(r) + " has an entry outside [0,1]");
            if (!(std::abs(sum - 1.0) <= kNormalizationTolerance))
                report(K::Normalization,
                       "CPT of '" + child + "' row " + std::to_string(r) + " sums to " + std::to_string(sum));
        }
    }
    for (VarIndex v = 0; v < n; ++v)
        if (cpt_count[v] == 0) report(K::MissingCpt, "variable '" + bn.variables[v].name + "' has no CPT");

    return out;
}

}  // namespace qdag
