#include "cgnn/matching.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <stdexcept>

#include "cgnn/rng.hpp"

namespace cgnn {

MatchingMatrix MatchingMatrix::identity(int n) {
    MatchingMatrix m;
    m.n_fine = n;
    m.n_coarse = n;
    m.assignment.resize(n);
    for (int i = 0; i < n; ++i) {
        m.assignment[i] = i;
    }
    return m;
}

MatchingMatrix MatchingMatrix::from_groups(int n_fine,
                                           const std::vector<std::vector<NodeId>>& groups) {
    std::vector<std::vector<NodeId>> all = groups;
    std::vector<bool> covered(n_fine, false);
    for (const auto& group : all) {
        if (group.empty()) {
            throw std::invalid_argument("MatchingMatrix: empty group");
        }
        for (NodeId v : group) {
            if (v < 0 || v >= n_fine) {
                throw std::invalid_argument("MatchingMatrix: node " + std::to_string(v) +
                                            " out of range");
            }
            if (covered[v]) {
                throw std::invalid_argument("MatchingMatrix: node " + std::to_string(v) +
                                            " assigned twice");
            }
            covered[v] = true;
        }
    }
    for (NodeId v = 0; v < n_fine; ++v) {
        if (!covered[v]) {
            all.push_back({v});
        }
    }
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        return *std::min_element(a.begin(), a.end()) < *std::min_element(b.begin(), b.end());
    });
    MatchingMatrix m;
    m.n_fine = n_fine;
    m.n_coarse = static_cast<int>(all.size());
    m.assignment.resize(n_fine);
    for (int j = 0; j < m.n_coarse; ++j) {
        for (NodeId v : all[j]) {
            m.assignment[v] = j;
        }
    }
    return m;
}

std::vector<std::vector<NodeId>> MatchingMatrix::members() const {
    std::vector<std::vector<NodeId>> out(n_coarse);
    for (NodeId v = 0; v < n_fine; ++v) {
        out[assignment[v]].push_back(v);
    }
    return out;
}

Matrix MatchingMatrix::to_matrix() const {
    Matrix m(n_fine, n_coarse);
    for (NodeId v = 0; v < n_fine; ++v) {
        m.at(v, assignment[v]) = 1.0;
    }
    return m;
}

double normalized_edge_weight(const AdjacencyMatrix& a, NodeId u, NodeId v) {
    assert(a.at(u, v) > 0);
    const int du = a.degree(u);
    const int dv = a.degree(v);
    assert(du > 0 && dv > 0);
    return static_cast<double>(a.at(u, v)) / std::sqrt(static_cast<double>(du) * dv);
}

std::vector<std::vector<NodeId>> sem_match(const AdjacencyMatrix& a) {
    std::map<std::vector<NodeId>, std::vector<NodeId>> classes;
    for (NodeId u = 0; u < a.size(); ++u) {
        classes[a.neighbors(u)].push_back(u);
    }
    std::vector<std::vector<NodeId>> groups;
    for (auto& [neighbors, nodes] : classes) {
        if (nodes.size() >= 2) {
            groups.push_back(nodes);  // already ascending
        }
    }
    std::sort(groups.begin(), groups.end(),
              [](const auto& x, const auto& y) { return x.front() < y.front(); });
    return groups;
}

std::vector<std::pair<NodeId, NodeId>> nhem_match(const AdjacencyMatrix& a,
                                                  const std::set<NodeId>& frozen) {
    std::vector<NodeId> order;
    for (NodeId u = 0; u < a.size(); ++u) {
        if (frozen.count(u) == 0) {
            order.push_back(u);
        }
    }
    std::stable_sort(order.begin(), order.end(),
                     [&a](NodeId x, NodeId y) { return a.degree(x) < a.degree(y); });

    std::vector<bool> matched(a.size(), false);
    std::vector<std::pair<NodeId, NodeId>> pairs;
    for (NodeId u : order) {
        if (matched[u]) {
            continue;
        }
        NodeId best = -1;
        double best_weight = 0.0;
        for (NodeId v : a.neighbors(u)) {
            if (matched[v] || frozen.count(v) != 0) {
                continue;
            }
            const double w = normalized_edge_weight(a, u, v);
            if (best == -1 || w > best_weight) {
                best = v;
                best_weight = w;
            }
        }
        if (best != -1) {
            matched[u] = matched[best] = true;
            pairs.emplace_back(u, best);
        }
    }
    return pairs;
}

MatchingMatrix hybrid_match(const AdjacencyMatrix& a) {
    std::vector<std::vector<NodeId>> groups = sem_match(a);
    std::set<NodeId> frozen;
    for (const auto& group : groups) {
        frozen.insert(group.begin(), group.end());
    }
    for (const auto& [u, v] : nhem_match(a, frozen)) {
        groups.push_back({u, v});
    }
    return MatchingMatrix::from_groups(a.size(), groups);
}

MatchingMatrix clause_match(const LabeledGraph& g, const ClauseMatchConfig& cfg,
                            std::vector<ClauseMerge>* merges) {
    const int n = g.node_count();
    std::vector<NodeId> order(n);
    for (NodeId v = 0; v < n; ++v) {
        order[v] = v;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&g](NodeId x, NodeId y) { return g.degree(x) < g.degree(y); });

    // Live simulation of the round: merged nodes disappear and their edges
    // transfer to the absorbing head as we go, so later visits see the
    // updated graph.
    std::vector<Edge> live = g.edges();
    std::vector<bool> absorbed_child(n, false);  // in C: has merged others
    std::vector<int> absorber(n, -1);            // set when a node is merged away

    for (NodeId v : order) {
        if (absorber[v] != -1 || absorbed_child[v]) {
            continue;
        }
        // Heads of v over a mergeable edge; coreference counts from either
        // side. Scanned in document order (ascending node index).
        NodeId head = -1;
        EdgeKind via;
        for (const Edge& e : live) {
            NodeId candidate = -1;
            if (e.kind.category == EdgeCategory::Dependency && e.dst == v) {
                candidate = e.src;
            } else if (e.kind.category == EdgeCategory::Coreference) {
                if (e.src == v) {
                    candidate = e.dst;
                } else if (e.dst == v) {
                    candidate = e.src;
                }
            }
            if (candidate == -1 || !cfg.mergeable(e.kind)) {
                continue;
            }
            if (head == -1 || candidate < head) {
                head = candidate;
                via = e.kind;
            }
        }
        if (head == -1) {
            continue;
        }
        // Merge v into head: move v's remaining edges, dropping self-loops.
        std::vector<Edge> next;
        next.reserve(live.size());
        for (Edge e : live) {
            if (e.src == v) {
                e.src = head;
            }
            if (e.dst == v) {
                e.dst = head;
            }
            if (e.src != e.dst) {
                next.push_back(e);
            }
        }
        live = std::move(next);
        absorber[v] = head;
        absorbed_child[head] = true;
        if (merges != nullptr) {
            merges->push_back({v, head, via});
        }
    }

    std::vector<std::vector<NodeId>> groups;
    for (NodeId h = 0; h < n; ++h) {
        if (absorber[h] != -1) {
            continue;
        }
        std::vector<NodeId> group{h};
        for (NodeId v = 0; v < n; ++v) {
            if (absorber[v] == h) {
                group.push_back(v);
            }
        }
        if (group.size() >= 2) {
            groups.push_back(std::move(group));
        }
    }
    return MatchingMatrix::from_groups(n, groups);
}

MatchingMatrix random_match(const AdjacencyMatrix& a, uint64_t seed, double p) {
    Rng rng(seed);
    std::vector<bool> matched(a.size(), false);
    std::vector<std::vector<NodeId>> groups;
    for (NodeId u = 0; u < a.size(); ++u) {
        for (NodeId v = u + 1; v < a.size(); ++v) {
            if (a.at(u, v) == 0) {
                continue;
            }
            const bool use_edge = rng.uniform() < p;
            if (use_edge && !matched[u] && !matched[v]) {
                matched[u] = matched[v] = true;
                groups.push_back({u, v});
            }
        }
    }
    return MatchingMatrix::from_groups(a.size(), groups);
}

AdjacencyMatrix coarsen_adjacency(const AdjacencyMatrix& a, const MatchingMatrix& m) {
    if (m.n_fine != a.size()) {
        throw std::invalid_argument("coarsen_adjacency: matching covers " +
                                    std::to_string(m.n_fine) + " nodes but adjacency has " +
                                    std::to_string(a.size()));
    }
    AdjacencyMatrix out(m.n_coarse);
    for (NodeId u = 0; u < a.size(); ++u) {
        for (NodeId v = 0; v < a.size(); ++v) {
            if (a.at(u, v) != 0) {
                out.at(m.assignment[u], m.assignment[v]) += a.at(u, v);
            }
        }
    }
    return out;
}

LabeledGraph merge_typed_graph(const LabeledGraph& g, const MatchingMatrix& m) {
    if (m.n_fine != g.node_count()) {
        throw std::invalid_argument("merge_typed_graph: matching covers " +
                                    std::to_string(m.n_fine) + " nodes but graph has " +
                                    std::to_string(g.node_count()));
    }
    std::vector<Edge> edges;
    for (Edge e : g.edges()) {
        e.src = m.assignment[e.src];
        e.dst = m.assignment[e.dst];
        if (e.src != e.dst) {
            edges.push_back(e);
        }
    }
    return LabeledGraph::build(m.n_coarse, edges);
}

}  // namespace cgnn
