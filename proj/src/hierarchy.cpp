#include "cgnn/hierarchy.hpp"

#include <ostream>
#include <stdexcept>

namespace cgnn {

std::string to_string(PoolMethod method) {
    switch (method) {
        case PoolMethod::HybridMatching: return "hm";
        case PoolMethod::ClauseMatching: return "cm";
        case PoolMethod::Random: return "random";
        case PoolMethod::Identity: return "identity";
    }
    return "unknown";
}

PoolMethod pool_method_from_string(const std::string& name) {
    if (name == "hm") return PoolMethod::HybridMatching;
    if (name == "cm") return PoolMethod::ClauseMatching;
    if (name == "random") return PoolMethod::Random;
    if (name == "identity") return PoolMethod::Identity;
    throw std::invalid_argument("unknown pooling method '" + name + "'");
}

std::vector<int> GraphHierarchy::level_sizes() const {
    std::vector<int> sizes;
    sizes.reserve(adjacency.size());
    for (const auto& a : adjacency) {
        sizes.push_back(a.size());
    }
    return sizes;
}

NodeId GraphHierarchy::project(NodeId fine, int level) const {
    NodeId v = fine;
    for (int l = 0; l < level; ++l) {
        v = matchings[l].assignment[v];
    }
    return v;
}

GraphHierarchy build_hierarchy(const DocumentGraph& doc_graph, PoolMethod method, int steps,
                               const ClauseMatchConfig& cfg, uint64_t seed) {
    if (steps < 0) {
        throw std::invalid_argument("build_hierarchy: negative step count");
    }
    GraphHierarchy h;
    h.method = method;
    h.typed_graphs.push_back(doc_graph.graph);
    h.adjacency.push_back(doc_graph.graph.adjacency());

    for (int level = 0; level < steps; ++level) {
        MatchingMatrix m = MatchingMatrix::identity(h.adjacency.back().size());
        if (!h.saturated_level) {
            switch (method) {
                case PoolMethod::HybridMatching:
                    m = hybrid_match(h.adjacency.back());
                    break;
                case PoolMethod::ClauseMatching:
                    m = clause_match(h.typed_graphs.back(), cfg);
                    break;
                case PoolMethod::Random:
                    m = random_match(h.adjacency.back(), seed + static_cast<uint64_t>(level));
                    break;
                case PoolMethod::Identity:
                    break;
            }
            if (m.is_identity() && method != PoolMethod::Identity) {
                h.saturated_level = level;
            }
        }
        h.adjacency.push_back(coarsen_adjacency(h.adjacency.back(), m));
        h.typed_graphs.push_back(merge_typed_graph(h.typed_graphs.back(), m));
        h.matchings.push_back(std::move(m));
    }
    return h;
}

namespace {

std::string node_name(int level, NodeId v) {
    return "L" + std::to_string(level) + "_N" + std::to_string(v);
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out.push_back('\\');
        }
        out.push_back(c);
    }
    return out;
}

}  // namespace

void write_level_dot(std::ostream& out, const GraphHierarchy& h, int level,
                     const std::vector<std::string>& level0_labels) {
    const LabeledGraph& g = h.typed_graphs[level];
    const AdjacencyMatrix& a = h.adjacency[level];
    out << "digraph level" << level << " {\n";
    for (NodeId v = 0; v < g.node_count(); ++v) {
        out << "  " << node_name(level, v);
        if (level == 0 && v < static_cast<int>(level0_labels.size())) {
            out << " [label=\"" << escape(level0_labels[v]) << "\"]";
        }
        out << ";\n";
    }
    for (const Edge& e : g.edges()) {
        out << "  " << node_name(level, e.src) << " -> " << node_name(level, e.dst);
        out << " [label=\"" << escape(e.kind.category == EdgeCategory::Dependency
                                          ? e.kind.dep_label
                                          : to_string(e.kind.category)) << "\"";
        if (e.kind.category != EdgeCategory::Dependency) {
            out << " dir=none";
        }
        if (level > 0 && a.at(e.src, e.dst) > 1) {
            out << " weight=" << a.at(e.src, e.dst);
        }
        out << "];\n";
    }
    out << "}\n";
}

void write_merge_tree_dot(std::ostream& out, const GraphHierarchy& h) {
    out << "digraph merge_tree {\n";
    for (int level = 0; level < h.level_count(); ++level) {
        for (NodeId v = 0; v < h.level_size(level); ++v) {
            out << "  " << node_name(level, v) << ";\n";
        }
    }
    for (size_t l = 0; l < h.matchings.size(); ++l) {
        const MatchingMatrix& m = h.matchings[l];
        for (NodeId fine = 0; fine < m.n_fine; ++fine) {
            out << "  " << node_name(static_cast<int>(l) + 1, m.assignment[fine]) << " -> "
                << node_name(static_cast<int>(l), fine) << ";\n";
        }
    }
    out << "}\n";
}

}  // namespace cgnn
