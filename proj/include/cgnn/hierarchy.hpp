#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cgnn/document_graph.hpp"
#include "cgnn/matching.hpp"

namespace cgnn {

enum class PoolMethod { HybridMatching, ClauseMatching, Random, Identity };

std::string to_string(PoolMethod method);
/// Accepts "hm", "cm", "random", "identity"; throws on anything else.
PoolMethod pool_method_from_string(const std::string& name);

/// The coarsening ladder G_0..G_K: a weighted adjacency and a typed graph
/// per level, plus the matching that produced each step. Always carries
/// exactly K+1 levels; once a round merges nothing the remaining matchings
/// are identities and `saturated_level` records where that happened.
struct GraphHierarchy {
    PoolMethod method = PoolMethod::Identity;
    std::vector<AdjacencyMatrix> adjacency;   // per level, size K+1
    std::vector<LabeledGraph> typed_graphs;   // per level, size K+1
    std::vector<MatchingMatrix> matchings;    // size K, level l -> l+1
    std::optional<int> saturated_level;

    int level_count() const { return static_cast<int>(adjacency.size()); }
    int level_size(int level) const { return adjacency[level].size(); }
    std::vector<int> level_sizes() const;

    /// Supernode of `fine` (a level-0 node) at `level`.
    NodeId project(NodeId fine, int level) const;
};

/// Runs `steps` rounds of the chosen matcher. Clause matching rounds read
/// the merged typed graph of the previous level; hybrid and random matching
/// read the weighted coarsened adjacency. `seed` feeds the random method
/// only.
GraphHierarchy build_hierarchy(const DocumentGraph& doc_graph, PoolMethod method, int steps,
                               const ClauseMatchConfig& cfg = {}, uint64_t seed = 0);

/// DOT rendering of one level. Nodes are named "L{level}_N{index}";
/// dependency edges keep their label and direction, symmetric kinds are
/// drawn undirected, and coarsened multiplicities annotate the edges.
void write_level_dot(std::ostream& out, const GraphHierarchy& h, int level,
                     const std::vector<std::string>& level0_labels = {});

/// DOT rendering of the merge tree: supernode -> members, all levels.
void write_merge_tree_dot(std::ostream& out, const GraphHierarchy& h);

}  // namespace cgnn
