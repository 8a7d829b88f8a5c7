#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cgnn/matrix.hpp"

namespace cgnn {

using NodeId = int;

enum class EdgeCategory {
    Adjacency,    // consecutive tokens within a sentence
    Dependency,   // directed head -> dependent, labeled with the relation
    Coreference,  // mention-mention link, symmetric
    SentenceSeq,  // roots of consecutive sentences, symmetric
    Merged,       // provenance lost through coarsening
};

std::string to_string(EdgeCategory category);

struct EdgeKind {
    EdgeCategory category = EdgeCategory::Adjacency;
    std::string dep_label;  // nonempty exactly when category == Dependency

    bool mergeable_dependency() const { return category == EdgeCategory::Dependency; }
    bool operator==(const EdgeKind&) const = default;
};

inline EdgeKind adjacency_kind() { return {EdgeCategory::Adjacency, ""}; }
inline EdgeKind dependency_kind(std::string label) {
    return {EdgeCategory::Dependency, std::move(label)};
}
inline EdgeKind coreference_kind() { return {EdgeCategory::Coreference, ""}; }
inline EdgeKind sentence_seq_kind() { return {EdgeCategory::SentenceSeq, ""}; }

struct Edge {
    NodeId src = 0;
    NodeId dst = 0;
    EdgeKind kind;

    bool operator==(const Edge&) const = default;
};

/// Symmetric integer-weighted adjacency. Level-0 document graphs are 0/1
/// with a zero diagonal; coarsened levels carry multiplicities and
/// merge-internal diagonal weight.
class AdjacencyMatrix {
public:
    AdjacencyMatrix() = default;
    explicit AdjacencyMatrix(int n) : n_(n), weights_(static_cast<size_t>(n) * n, 0) {}

    int size() const { return n_; }
    long long& at(NodeId u, NodeId v) { return weights_[static_cast<size_t>(u) * n_ + v]; }
    long long at(NodeId u, NodeId v) const { return weights_[static_cast<size_t>(u) * n_ + v]; }

    /// Count of distinct neighbors: nonzero off-diagonal entries in row u.
    int degree(NodeId u) const;
    std::vector<NodeId> neighbors(NodeId u) const;

    long long total_weight() const;
    bool is_symmetric() const;

    Matrix to_matrix() const;

    bool operator==(const AdjacencyMatrix&) const = default;

private:
    int n_ = 0;
    std::vector<long long> weights_;
};

/// Typed labeled multigraph over token nodes. Immutable after construction;
/// dependency edges are directed head -> dependent, every other kind is
/// stored once and treated symmetric. No self-loops; duplicate (src, dst,
/// kind) triples collapse to one; edge order is insertion order.
class LabeledGraph {
public:
    LabeledGraph() = default;

    /// Validates endpoints and self-loops; throws std::invalid_argument
    /// naming the offending edge.
    static LabeledGraph build(int node_count, const std::vector<Edge>& edges);

    int node_count() const { return n_; }
    const std::vector<Edge>& edges() const { return edges_; }

    /// Distinct neighbors under the symmetric interpretation.
    int degree(NodeId v) const;
    std::vector<NodeId> neighbors(NodeId v) const;

    /// Level-0 view: symmetric 0/1, zero diagonal, direction and edge kinds
    /// dropped, parallel edges collapsed.
    AdjacencyMatrix adjacency() const;

private:
    int n_ = 0;
    std::vector<Edge> edges_;
};

/// BFS hop counts from `source` to every node; nullopt marks unreachable.
/// Any positive weight counts as a unit-length hop; diagonal entries are
/// ignored.
std::vector<std::optional<int>> bfs_distances(const AdjacencyMatrix& a, NodeId source);

/// Hop count between u and v, 0 when u == v, nullopt when disconnected.
std::optional<int> shortest_path_length(const AdjacencyMatrix& a, NodeId u, NodeId v);

}  // namespace cgnn
