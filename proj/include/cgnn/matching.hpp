#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cgnn/graph.hpp"

namespace cgnn {

/// Partition of n_fine nodes into n_coarse supernodes: the dense form of the
/// 0/1 matching matrix whose rows are one-hot. Supernode indices are dense
/// in [0, n_coarse) and ordered by each group's smallest member.
struct MatchingMatrix {
    int n_fine = 0;
    int n_coarse = 0;
    std::vector<int> assignment;  // fine node -> supernode

    static MatchingMatrix identity(int n);
    /// Groups may omit singletons; every node must appear at most once.
    /// Supernode numbering is by ascending smallest member across all
    /// groups, singletons included.
    static MatchingMatrix from_groups(int n_fine, const std::vector<std::vector<NodeId>>& groups);

    bool is_identity() const { return n_fine == n_coarse; }
    std::vector<std::vector<NodeId>> members() const;
    /// Dense n_fine x n_coarse 0/1 matrix (m_ij = 1 iff node i maps to
    /// supernode j), for algebra against the adjacency products.
    Matrix to_matrix() const;
};

/// A_uv / sqrt(D(u) * D(v)) where D counts distinct neighbors. Requires
/// A_uv > 0 (degrees are then positive by construction).
double normalized_edge_weight(const AdjacencyMatrix& a, NodeId u, NodeId v);

/// Structural equivalence matching: equivalence classes (size >= 2) of
/// nodes with identical neighbor sets, self excluded, weights ignored.
/// Classes are listed by ascending smallest member.
std::vector<std::vector<NodeId>> sem_match(const AdjacencyMatrix& a);

/// Normalized heavy edge matching over nodes not frozen by SEM. Visits
/// unmatched nodes by ascending degree (ties by index) and pairs each with
/// its available neighbor of maximal normalized edge weight (ties by
/// index); matched nodes become unavailable.
std::vector<std::pair<NodeId, NodeId>> nhem_match(const AdjacencyMatrix& a,
                                                  const std::set<NodeId>& frozen);

/// SEM groups, then NHEM pairs over the remainder, then singletons.
MatchingMatrix hybrid_match(const AdjacencyMatrix& a);

struct ClauseMatchConfig {
    /// Dependency labels that anchor a clause and are never merged across.
    std::set<std::string> core_arguments = {"nsubj", "nsubj:pass", "dobj",  "iobj",
                                            "csubj", "csubj:pass", "ccomp", "xcomp"};

    /// Mergeable edge types: any dependency outside core_arguments, plus
    /// coreference.
    bool mergeable(const EdgeKind& kind) const {
        if (kind.category == EdgeCategory::Coreference) {
            return true;
        }
        return kind.category == EdgeCategory::Dependency &&
               core_arguments.count(kind.dep_label) == 0;
    }
};

struct ClauseMerge {
    NodeId child = 0;
    NodeId head = 0;
    EdgeKind via;
};

/// One round of clause matching over the typed graph: visit nodes by
/// ascending degree (ties by index); a node that has already absorbed a
/// child this round is skipped; otherwise it merges into the first of its
/// heads, scanned in document order, reachable over a mergeable edge type.
/// A head may absorb several children in one round; a merged node's
/// remaining edges transfer to its head as the round proceeds, dropping
/// merge-induced self-loops. `merges` (optional) records every merge event.
MatchingMatrix clause_match(const LabeledGraph& g, const ClauseMatchConfig& cfg,
                            std::vector<ClauseMerge>* merges = nullptr);

/// Visits edges (u < v, lexicographic) of the adjacency and merges each
/// endpoint pair with probability p when both are still unmatched.
MatchingMatrix random_match(const AdjacencyMatrix& a, uint64_t seed, double p = 0.5);

/// Exact integer triple product Mt * A * M. Keeps merge-internal weight on
/// the diagonal and accumulated multiplicities off-diagonal.
AdjacencyMatrix coarsen_adjacency(const AdjacencyMatrix& a, const MatchingMatrix& m);

/// Typed graph after a merge round: endpoints mapped through the matching,
/// self-loops dropped, parallel edges of distinct kinds retained, exact
/// duplicates collapsed. Edge kinds and labels survive, so clause matching
/// can run again on the result.
LabeledGraph merge_typed_graph(const LabeledGraph& g, const MatchingMatrix& m);

}  // namespace cgnn
