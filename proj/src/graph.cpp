#include "cgnn/graph.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

namespace cgnn {

std::string to_string(EdgeCategory category) {
    switch (category) {
        case EdgeCategory::Adjacency: return "adjacency";
        case EdgeCategory::Dependency: return "dependency";
        case EdgeCategory::Coreference: return "coreference";
        case EdgeCategory::SentenceSeq: return "sentence_seq";
        case EdgeCategory::Merged: return "merged";
    }
    return "unknown";
}

int AdjacencyMatrix::degree(NodeId u) const {
    int d = 0;
    for (NodeId v = 0; v < n_; ++v) {
        if (v != u && at(u, v) != 0) {
            ++d;
        }
    }
    return d;
}

std::vector<NodeId> AdjacencyMatrix::neighbors(NodeId u) const {
    std::vector<NodeId> out;
    for (NodeId v = 0; v < n_; ++v) {
        if (v != u && at(u, v) != 0) {
            out.push_back(v);
        }
    }
    return out;
}

long long AdjacencyMatrix::total_weight() const {
    long long sum = 0;
    for (long long w : weights_) {
        sum += w;
    }
    return sum;
}

bool AdjacencyMatrix::is_symmetric() const {
    for (NodeId u = 0; u < n_; ++u) {
        for (NodeId v = u + 1; v < n_; ++v) {
            if (at(u, v) != at(v, u)) {
                return false;
            }
        }
    }
    return true;
}

Matrix AdjacencyMatrix::to_matrix() const {
    Matrix m(n_, n_);
    for (NodeId u = 0; u < n_; ++u) {
        for (NodeId v = 0; v < n_; ++v) {
            m.at(u, v) = static_cast<double>(at(u, v));
        }
    }
    return m;
}

LabeledGraph LabeledGraph::build(int node_count, const std::vector<Edge>& edges) {
    if (node_count < 0) {
        throw std::invalid_argument("LabeledGraph: negative node count");
    }
    LabeledGraph g;
    g.n_ = node_count;
    g.edges_.reserve(edges.size());
    for (const Edge& e : edges) {
        const std::string where = "edge (" + std::to_string(e.src) + ", " +
                                  std::to_string(e.dst) + ")";
        if (e.src < 0 || e.src >= node_count || e.dst < 0 || e.dst >= node_count) {
            throw std::invalid_argument(where + ": endpoint out of range for " +
                                        std::to_string(node_count) + " nodes");
        }
        if (e.src == e.dst) {
            throw std::invalid_argument(where + ": self-loop");
        }
        if ((e.kind.category == EdgeCategory::Dependency) == e.kind.dep_label.empty()) {
            throw std::invalid_argument(where + ": dep_label must be set exactly for "
                                        "dependency edges");
        }
        if (std::find(g.edges_.begin(), g.edges_.end(), e) == g.edges_.end()) {
            g.edges_.push_back(e);
        }
    }
    return g;
}

int LabeledGraph::degree(NodeId v) const { return static_cast<int>(neighbors(v).size()); }

std::vector<NodeId> LabeledGraph::neighbors(NodeId v) const {
    std::set<NodeId> out;
    for (const Edge& e : edges_) {
        if (e.src == v) {
            out.insert(e.dst);
        } else if (e.dst == v) {
            out.insert(e.src);
        }
    }
    return {out.begin(), out.end()};
}

AdjacencyMatrix LabeledGraph::adjacency() const {
    AdjacencyMatrix a(n_);
    for (const Edge& e : edges_) {
        a.at(e.src, e.dst) = 1;
        a.at(e.dst, e.src) = 1;
    }
    return a;
}

std::vector<std::optional<int>> bfs_distances(const AdjacencyMatrix& a, NodeId source) {
    std::vector<std::optional<int>> dist(a.size());
    if (source < 0 || source >= a.size()) {
        throw std::invalid_argument("bfs_distances: source out of range");
    }
    dist[source] = 0;
    std::deque<NodeId> queue{source};
    while (!queue.empty()) {
        const NodeId u = queue.front();
        queue.pop_front();
        for (NodeId v = 0; v < a.size(); ++v) {
            if (v != u && a.at(u, v) != 0 && !dist[v]) {
                dist[v] = *dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    return dist;
}

std::optional<int> shortest_path_length(const AdjacencyMatrix& a, NodeId u, NodeId v) {
    if (u < 0 || u >= a.size() || v < 0 || v >= a.size()) {
        throw std::invalid_argument("shortest_path_length: node out of range");
    }
    if (u == v) {
        return 0;
    }
    return bfs_distances(a, u)[v];
}

}  // namespace cgnn
