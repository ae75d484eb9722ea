#include "qdag/jointree.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

#include "qdag/error.hpp"

namespace qdag {

bool UndirectedGraph::add_edge(VarIndex a, VarIndex b) {
    if (a == b) return false;
    if (!adjacency_.at(a).insert(b).second) return false;
    adjacency_.at(b).insert(a);
    ++edges_;
    return true;
}

bool UndirectedGraph::has_edge(VarIndex a, VarIndex b) const { return adjacency_.at(a).count(b) != 0; }

std::vector<std::pair<VarIndex, VarIndex>> UndirectedGraph::edges() const {
    std::vector<std::pair<VarIndex, VarIndex>> out;
    out.reserve(edges_);
    for (VarIndex a = 0; a < adjacency_.size(); ++a)
        for (VarIndex b : adjacency_[a])
            if (a < b) out.emplace_back(a, b);
    return out;
}

MoralGraph moralize(const BeliefNetwork& bn) {
    MoralGraph g(bn.size());
    for (auto [from, to] : bn.edges) g.add_edge(from, to);
    for (VarIndex v = 0; v < bn.size(); ++v) {
        auto parents = bn.parents_of(v);
        for (std::size_t i = 0; i < parents.size(); ++i)
            for (std::size_t j = i + 1; j < parents.size(); ++j) g.add_edge(parents[i], parents[j]);
    }
    return g;
}

Triangulation triangulate(const UndirectedGraph& g) {
    const std::size_t n = g.vertex_count();
    Triangulation out;
    out.chordal = g;

    // working copy that loses eliminated vertices
    std::vector<std::set<VarIndex>> live(n);
    for (VarIndex v = 0; v < n; ++v) live[v] = g.neighbors(v);
    std::vector<bool> eliminated(n, false);

    auto fill_in = [&](VarIndex v) {
        std::size_t missing = 0;
        for (auto a = live[v].begin(); a != live[v].end(); ++a)
            for (auto b = std::next(a); b != live[v].end(); ++b)
                if (!live[*a].count(*b)) ++missing;
        return missing;
    };

    std::vector<std::vector<VarIndex>> candidates;
    for (std::size_t step = 0; step < n; ++step) {
        VarIndex best = n;
        std::size_t best_fill = 0;
        for (VarIndex v = 0; v < n; ++v) {
            if (eliminated[v]) continue;
            std::size_t f = fill_in(v);
            if (best == n || f < best_fill) {
                best = v;
                best_fill = f;
            }
        }

        std::vector<VarIndex> clique(live[best].begin(), live[best].end());
        for (std::size_t i = 0; i < clique.size(); ++i) {
            for (std::size_t j = i + 1; j < clique.size(); ++j) {
                VarIndex a = clique[i], b = clique[j];
                if (live[a].insert(b).second) {
                    live[b].insert(a);
                    out.chordal.add_edge(a, b);
                    out.fill_edges.emplace_back(std::min(a, b), std::max(a, b));
                }
            }
        }
        clique.push_back(best);
        std::sort(clique.begin(), clique.end());
        candidates.push_back(std::move(clique));

        for (VarIndex u : live[best]) live[u].erase(best);
        live[best].clear();
        eliminated[best] = true;
        out.elimination_order.push_back(best);
    }

    // keep the maximal candidates; earlier wins among equal sets
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < candidates.size() && !dominated; ++j) {
            if (i == j) continue;
            const auto& a = candidates[i];
            const auto& b = candidates[j];
            if (!std::includes(b.begin(), b.end(), a.begin(), a.end())) continue;
            dominated = b.size() > a.size() || j < i;
        }
        if (!dominated) out.cliques.push_back(candidates[i]);
    }
    return out;
}

bool ClusterTree::contains(std::size_t cluster, VarIndex var) const {
    const auto& c = clusters.at(cluster);
    return std::binary_search(c.begin(), c.end(), var);
}

std::vector<std::size_t> ClusterTree::neighbors(std::size_t cluster) const {
    std::vector<std::size_t> out;
    for (const Edge& e : edges) {
        if (e.a == cluster) out.push_back(e.b);
        if (e.b == cluster) out.push_back(e.a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

const std::vector<VarIndex>& ClusterTree::separator(std::size_t a, std::size_t b) const {
    for (const Edge& e : edges)
        if ((e.a == a && e.b == b) || (e.a == b && e.b == a)) return e.separator;
    throw Error("clusters " + std::to_string(a) + " and " + std::to_string(b) + " are not adjacent");
}

std::optional<std::size_t> ClusterTree::lowest_cluster_with(VarIndex var) const {
    for (std::size_t i = 0; i < clusters.size(); ++i)
        if (contains(i, var)) return i;
    return std::nullopt;
}

std::optional<std::size_t> ClusterTree::highest_cluster_with(VarIndex var) const {
    for (std::size_t i = clusters.size(); i-- > 0;)
        if (contains(i, var)) return i;
    return std::nullopt;
}

ClusterTree build_join_tree(const std::vector<std::vector<VarIndex>>& cliques) {
    ClusterTree tree;
    tree.clusters = cliques;
    for (auto& c : tree.clusters) std::sort(c.begin(), c.end());
    const std::size_t m = tree.clusters.size();

    struct Candidate {
        std::size_t weight, a, b;
        std::vector<VarIndex> separator;
    };
    std::vector<Candidate> candidates;
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
            std::vector<VarIndex> sep;
            std::set_intersection(tree.clusters[a].begin(), tree.clusters[a].end(), tree.clusters[b].begin(),
                                  tree.clusters[b].end(), std::back_inserter(sep));
            candidates.push_back({sep.size(), a, b, std::move(sep)});
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
        return std::tie(y.weight, x.a, x.b) < std::tie(x.weight, y.a, y.b);
    });

    std::vector<std::size_t> root(m);
    std::iota(root.begin(), root.end(), 0);
    auto find = [&](std::size_t x) {
        while (root[x] != x) x = root[x] = root[root[x]];
        return x;
    };
    for (Candidate& c : candidates) {
        std::size_t ra = find(c.a), rb = find(c.b);
        if (ra == rb) continue;
        root[ra] = rb;
        tree.edges.push_back({c.a, c.b, std::move(c.separator)});
        if (tree.edges.size() + 1 == m) break;
    }
    return tree;
}

ClusterTree assign_cpts(ClusterTree tree, const BeliefNetwork& bn, const std::vector<VarIndex>& evidence_vars) {
    tree.assignment.assign(bn.size(), std::nullopt);
    tree.evidence_attachment.assign(bn.size(), std::nullopt);
    for (VarIndex v = 0; v < bn.size(); ++v) {
        auto family = bn.parents_of(v);
        family.push_back(v);
        for (std::size_t i = 0; i < tree.size(); ++i) {
            bool covers = std::all_of(family.begin(), family.end(), [&](VarIndex f) { return tree.contains(i, f); });
            if (covers) {
                tree.assignment[v] = i;
                break;
            }
        }
        if (!tree.assignment[v]) throw Error("no cluster covers the family of '" + bn.variables[v].name + "'");
    }
    for (VarIndex e : evidence_vars) {
        auto c = tree.lowest_cluster_with(e);
        if (!c) throw Error("no cluster contains evidence variable '" + bn.variables.at(e).name + "'");
        tree.evidence_attachment[e] = c;
    }
    return tree;
}

ClusterTree make_cluster_tree(const BeliefNetwork& bn, const std::vector<VarIndex>& evidence_vars) {
    auto tri = triangulate(moralize(bn));
    return assign_cpts(build_join_tree(tri.cliques), bn, evidence_vars);
}

}  // namespace qdag
