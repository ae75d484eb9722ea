#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "qdag/network.hpp"

namespace qdag {

/// Undirected simple graph over variable indices.
class UndirectedGraph {
public:
    explicit UndirectedGraph(std::size_t vertices = 0) : adjacency_(vertices) {}

    std::size_t vertex_count() const noexcept { return adjacency_.size(); }
    std::size_t edge_count() const noexcept { return edges_; }

    /// Returns false if the edge already existed. Self-loops are ignored.
    bool add_edge(VarIndex a, VarIndex b);
    bool has_edge(VarIndex a, VarIndex b) const;
    const std::set<VarIndex>& neighbors(VarIndex v) const { return adjacency_.at(v); }

    /// Sorted (smaller, larger) pairs.
    std::vector<std::pair<VarIndex, VarIndex>> edges() const;

private:
    std::vector<std::set<VarIndex>> adjacency_;
    std::size_t edges_ = 0;
};

using MoralGraph = UndirectedGraph;

/// Undirected skeleton plus an edge between every pair of co-parents.
MoralGraph moralize(const BeliefNetwork& bn);

struct Triangulation {
    std::vector<VarIndex> elimination_order;
    UndirectedGraph chordal;
    std::vector<std::pair<VarIndex, VarIndex>> fill_edges;
    /// Maximal cliques, each sorted, in the order elimination discovered them.
    std::vector<std::vector<VarIndex>> cliques;
};

/// Greedy min-fill elimination; ties go to the lowest variable index.
Triangulation triangulate(const UndirectedGraph& g);

struct ClusterTree {
    struct Edge {
        std::size_t a = 0;
        std::size_t b = 0;
        std::vector<VarIndex> separator;
    };

    std::vector<std::vector<VarIndex>> clusters;
    std::vector<Edge> edges;
    /// Per variable: cluster holding its CPT. Empty until assign_cpts.
    std::vector<std::optional<std::size_t>> assignment;
    /// Per variable: cluster holding its evidence indicators, for evidence variables only.
    std::vector<std::optional<std::size_t>> evidence_attachment;

    std::size_t size() const noexcept { return clusters.size(); }
    bool contains(std::size_t cluster, VarIndex var) const;
    /// Neighbouring cluster indices, ascending.
    std::vector<std::size_t> neighbors(std::size_t cluster) const;
    const std::vector<VarIndex>& separator(std::size_t a, std::size_t b) const;
    /// Lowest-indexed cluster containing `var`.
    std::optional<std::size_t> lowest_cluster_with(VarIndex var) const;
    std::optional<std::size_t> highest_cluster_with(VarIndex var) const;
};

/// Maximum-weight spanning tree over the clique graph (weight = separator size,
/// ties to lexicographically smaller cluster pairs). Disconnected components
/// are joined through empty separators so the result is always one tree.
ClusterTree build_join_tree(const std::vector<std::vector<VarIndex>>& cliques);

/// Places every CPT in the lowest-indexed cluster covering its family and every
/// evidence variable in the lowest-indexed cluster containing it.
ClusterTree assign_cpts(ClusterTree tree, const BeliefNetwork& bn, const std::vector<VarIndex>& evidence_vars);

/// moralize + triangulate + build_join_tree + assign_cpts.
ClusterTree make_cluster_tree(const BeliefNetwork& bn, const std::vector<VarIndex>& evidence_vars);

}  // namespace qdag
