#pragma once

// Join-tree clustering over an abstract algebra.
//
// The same pass runs numerically (doubles, instrumented) or symbolically
// (Q-DAG node ids), so both see the identical tree, schedule and operand
// lists. An Algebra provides:
//
//   using Value = ...;
//   Value one();
//   Value constant(double p);                       // CPT entry
//   Value indicator(VarIndex var, ValueIndex val);   // evidence likelihood entry
//   Value multiply(std::span<const Value> operands); // operands non-empty
//   Value add(std::span<const Value> operands);      // operands non-empty

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qdag/jointree.hpp"
#include "qdag/network.hpp"

namespace qdag {

/// Table over an ordered scope; entries enumerate instantiations with the
/// first scope variable varying slowest.
template <class Value>
struct Potential {
    std::vector<VarIndex> scope;
    std::vector<Value> table;
};

/// Number of instantiations of `scope`.
std::size_t scope_size(std::span<const VarIndex> scope, std::span<const std::size_t> domains);

/// For every instantiation of `scope`, the index of its restriction to
/// `subscope` (which must be a subset of `scope`, both sorted).
std::vector<std::size_t> projection(std::span<const VarIndex> scope, std::span<const VarIndex> subscope,
                                    std::span<const std::size_t> domains);

/// Writes the values of `scope` for instantiation `index` into `assignment`.
void decode(std::size_t index, std::span<const VarIndex> scope, std::span<const std::size_t> domains,
            std::span<ValueIndex> assignment);

enum class QueryCluster {
    Lowest,   ///< lowest-indexed cluster containing the query variable
    Highest,  ///< highest-indexed one; used to cross-check the choice
};

template <class Algebra>
class Clustering {
public:
    using Value = typename Algebra::Value;

    Clustering(const BeliefNetwork& bn, const ClusterTree& tree, Algebra& algebra)
        : bn_(bn), tree_(tree), algebra_(algebra), domains_(bn.domain_sizes()) {}

    /// Psi_i = product of assigned CPT entries and attached evidence indicators.
    void init_potentials() {
        potentials_.clear();
        std::vector<ValueIndex> assignment(bn_.size(), 0);
        std::vector<Value> factors;
        for (std::size_t i = 0; i < tree_.size(); ++i) {
            const auto& scope = tree_.clusters[i];
            Potential<Value> psi{scope, {}};
            const std::size_t size = scope_size(scope, domains_);
            psi.table.reserve(size);
            for (std::size_t c = 0; c < size; ++c) {
                decode(c, scope, domains_, assignment);
                factors.clear();
                for (VarIndex x : scope)
                    if (tree_.assignment.at(x) == i) factors.push_back(algebra_.constant(bn_.probability(x, assignment)));
                for (VarIndex x : scope)
                    if (tree_.evidence_attachment.at(x) == i) factors.push_back(algebra_.indicator(x, assignment[x]));
                psi.table.push_back(factors.empty() ? algebra_.one() : algebra_.multiply(factors));
            }
            potentials_.push_back(std::move(psi));
        }
    }

    const Potential<Value>& potential(std::size_t i) const { return potentials_.at(i); }

    /// M_ij = sum over S_i \ S_j of Psi_i times every M_ki with k != j.
    /// Every such M_ki must already exist.
    const Potential<Value>& compute_message(std::size_t i, std::size_t j) {
        std::vector<std::size_t> sources;
        for (std::size_t k : tree_.neighbors(i))
            if (k != j) sources.push_back(k);
        const auto& scope = tree_.clusters[i];
        const auto& sep = tree_.separator(i, j);

        auto terms = products(i, sources);
        const auto to_sep = projection(scope, sep, domains_);
        std::vector<std::vector<Value>> grouped(scope_size(sep, domains_));
        for (std::size_t c = 0; c < terms.size(); ++c) grouped[to_sep[c]].push_back(terms[c]);

        Potential<Value> msg{sep, {}};
        msg.table.reserve(grouped.size());
        for (auto& g : grouped) msg.table.push_back(algebra_.add(g));
        return messages_[{i, j}] = std::move(msg);
    }

    const Potential<Value>& message(std::size_t i, std::size_t j) const {
        auto it = messages_.find({i, j});
        if (it == messages_.end())
            throw std::logic_error("message " + std::to_string(i) + "->" + std::to_string(j) + " not computed");
        return it->second;
    }
    bool has_message(std::size_t i, std::size_t j) const { return messages_.count({i, j}) != 0; }

    /// P_i = Psi_i times every inbound message.
    const Potential<Value>& compute_posterior(std::size_t i) {
        if (auto it = posteriors_.find(i); it != posteriors_.end()) return it->second;
        auto table = products(i, tree_.neighbors(i));
        return posteriors_[i] = Potential<Value>{tree_.clusters[i], std::move(table)};
    }

    /// Inward messages toward `root`, then outward ones: every edge twice.
    std::vector<std::pair<std::size_t, std::size_t>> schedule(std::size_t root) const {
        std::vector<std::pair<std::size_t, std::size_t>> order;  // (parent, child) in preorder
        std::vector<std::size_t> stack{root};
        std::vector<std::optional<std::size_t>> parent(tree_.size());
        std::vector<bool> seen(tree_.size(), false);
        seen[root] = true;
        while (!stack.empty()) {
            std::size_t u = stack.back();
            stack.pop_back();
            auto nbrs = tree_.neighbors(u);
            for (auto it = nbrs.rbegin(); it != nbrs.rend(); ++it) {
                if (seen[*it]) continue;
                seen[*it] = true;
                order.emplace_back(u, *it);
                stack.push_back(*it);
            }
        }
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (auto it = order.rbegin(); it != order.rend(); ++it) out.emplace_back(it->second, it->first);
        for (auto [p, c] : order) out.emplace_back(p, c);
        return out;
    }

    void propagate(std::size_t root) {
        for (auto [from, to] : schedule(root)) compute_message(from, to);
    }

    static std::size_t query_cluster(const ClusterTree& tree, VarIndex x, QueryCluster rule) {
        auto c = rule == QueryCluster::Lowest ? tree.lowest_cluster_with(x) : tree.highest_cluster_with(x);
        if (!c) throw std::logic_error("variable in no cluster");
        return *c;
    }

    /// Qnode(x) = sum of P_i over S_i \ {X}, one entry per value of X.
    std::vector<Value> query(VarIndex x, std::size_t cluster) {
        const auto& post = compute_posterior(cluster);
        const VarIndex single[] = {x};
        const auto to_x = projection(post.scope, single, domains_);
        std::vector<std::vector<Value>> grouped(domains_[x]);
        for (std::size_t c = 0; c < post.table.size(); ++c) grouped[to_x[c]].push_back(post.table[c]);
        std::vector<Value> out;
        for (auto& g : grouped) out.push_back(algebra_.add(g));
        return out;
    }

    /// Full pass used by compilation: potentials, two-phase propagation rooted
    /// at the first query's cluster, then one query per variable.
    std::vector<std::vector<Value>> run(const std::vector<VarIndex>& queries, QueryCluster rule) {
        init_potentials();
        if (tree_.size() == 0) return {};
        const std::size_t root = queries.empty() ? 0 : query_cluster(tree_, queries.front(), rule);
        propagate(root);
        std::vector<std::vector<Value>> out;
        for (VarIndex x : queries) out.push_back(query(x, query_cluster(tree_, x, rule)));
        return out;
    }

private:
    /// Entry-wise product of Psi_i with the inbound messages from `sources`.
    std::vector<Value> products(std::size_t i, const std::vector<std::size_t>& sources) {
        const auto& scope = tree_.clusters[i];
        std::vector<const Potential<Value>*> inbound;
        std::vector<std::vector<std::size_t>> maps;
        for (std::size_t k : sources) {
            inbound.push_back(&message(k, i));
            maps.push_back(projection(scope, inbound.back()->scope, domains_));
        }
        const auto& psi = potentials_.at(i);
        std::vector<Value> out;
        out.reserve(psi.table.size());
        std::vector<Value> factors;
        for (std::size_t c = 0; c < psi.table.size(); ++c) {
            factors.assign(1, psi.table[c]);
            for (std::size_t m = 0; m < inbound.size(); ++m) factors.push_back(inbound[m]->table[maps[m][c]]);
            out.push_back(algebra_.multiply(factors));
        }
        return out;
    }

    const BeliefNetwork& bn_;
    const ClusterTree& tree_;
    Algebra& algebra_;
    std::vector<std::size_t> domains_;
    std::vector<Potential<Value>> potentials_;
    std::map<std::pair<std::size_t, std::size_t>, Potential<Value>> messages_;
    std::map<std::size_t, Potential<Value>> posteriors_;
};

/// Plain numeric clustering with instrumented operation counts. Each k-ary
/// product or sum counts as k - 1 binary operations.
struct NumericAlgebra {
    using Value = double;

    /// Per network variable; only variables with attached evidence are read.
    std::vector<std::optional<ValueIndex>> evidence;
    std::size_t multiplications = 0;
    std::size_t additions = 0;

    double one() const { return 1.0; }
    double constant(double p) const { return p; }
    double indicator(VarIndex var, ValueIndex val) const {
        const auto& e = evidence.at(var);
        return (!e || *e == val) ? 1.0 : 0.0;
    }
    double multiply(std::span<const double> xs) {
        double acc = xs[0];
        for (std::size_t i = 1; i < xs.size(); ++i) acc *= xs[i];
        multiplications += xs.size() - 1;
        return acc;
    }
    double add(std::span<const double> xs) {
        double acc = xs[0];
        for (std::size_t i = 1; i < xs.size(); ++i) acc += xs[i];
        additions += xs.size() - 1;
        return acc;
    }
};

}  // namespace qdag
