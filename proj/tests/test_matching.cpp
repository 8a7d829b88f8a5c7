#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "cgnn/matching.hpp"
#include "graph_fixtures.hpp"

using namespace cgnn;
using namespace cgnn::testing;

namespace {

/// Oracle route for the coarsening product: dense Mt * A * M over doubles.
AdjacencyMatrix triple_product_oracle(const AdjacencyMatrix& a, const MatchingMatrix& m) {
    const Matrix product = matmul(transpose(m.to_matrix()), matmul(a.to_matrix(), m.to_matrix()));
    AdjacencyMatrix out(m.n_coarse);
    for (int u = 0; u < m.n_coarse; ++u) {
        for (int v = 0; v < m.n_coarse; ++v) {
            out.at(u, v) = static_cast<long long>(product.at(u, v));
        }
    }
    return out;
}

std::set<std::set<NodeId>> group_sets(const MatchingMatrix& m) {
    std::set<std::set<NodeId>> out;
    for (const auto& group : m.members()) {
        out.insert(std::set<NodeId>(group.begin(), group.end()));
    }
    return out;
}

}  // namespace

TEST_CASE("normalized edge weight evaluates the formula") {
    const AdjacencyMatrix p4 = path_adjacency(4);
    CHECK(normalized_edge_weight(p4, 0, 1) ==
          doctest::Approx(0.7071067811865475).epsilon(1e-15));

    // 4-cycle: every node has degree 2, every edge scores 1/2.
    AdjacencyMatrix c4(4);
    c4.at(0, 1) = c4.at(1, 0) = 1;
    c4.at(1, 2) = c4.at(2, 1) = 1;
    c4.at(2, 3) = c4.at(3, 2) = 1;
    c4.at(3, 0) = c4.at(0, 3) = 1;
    for (auto [u, v] : {std::pair{0, 1}, {1, 2}, {2, 3}, {3, 0}}) {
        CHECK(normalized_edge_weight(c4, u, v) == doctest::Approx(0.5).epsilon(1e-15));
    }

    // Coarsened weight 2 between degree-2 nodes scores 2/2 = 1.
    AdjacencyMatrix weighted(4);
    weighted.at(0, 1) = weighted.at(1, 0) = 2;
    weighted.at(0, 2) = weighted.at(2, 0) = 1;
    weighted.at(1, 3) = weighted.at(3, 1) = 1;
    CHECK(normalized_edge_weight(weighted, 0, 1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("sem groups identical neighbor sets") {
    // Star: the three leaves all neighbor exactly the hub.
    const auto star_groups = sem_match(star_adjacency(3));
    REQUIRE(star_groups.size() == 1);
    CHECK(star_groups[0] == std::vector<NodeId>{1, 2, 3});

    CHECK(sem_match(path_adjacency(4)).empty());

    // 4-cycle splits into two equivalence classes, ordered by smallest
    // member.
    AdjacencyMatrix c4(4);
    c4.at(0, 1) = c4.at(1, 0) = 1;
    c4.at(1, 2) = c4.at(2, 1) = 1;
    c4.at(2, 3) = c4.at(3, 2) = 1;
    c4.at(3, 0) = c4.at(0, 3) = 1;
    const auto c4_groups = sem_match(c4);
    REQUIRE(c4_groups.size() == 2);
    CHECK(c4_groups[0] == std::vector<NodeId>{0, 2});
    CHECK(c4_groups[1] == std::vector<NodeId>{1, 3});
}

TEST_CASE("nhem pairs the path ends first") {
    const auto pairs = nhem_match(path_adjacency(4), {});
    REQUIRE(pairs.size() == 2);
    CHECK(std::set<NodeId>{pairs[0].first, pairs[0].second} == std::set<NodeId>{0, 1});
    CHECK(std::set<NodeId>{pairs[1].first, pairs[1].second} == std::set<NodeId>{2, 3});

    CHECK(nhem_match(AdjacencyMatrix(1), {}).empty());
}

TEST_CASE("hybrid matching walkthrough on the two-sentence fixture") {
    const DocumentGraph dg = hybrid_matching_fixture();
    const AdjacencyMatrix a = dg.graph.adjacency();

    // n0 and n2 share exactly the neighbor n1.
    const auto sem = sem_match(a);
    REQUIRE(sem.size() == 1);
    CHECK(sem[0] == std::vector<NodeId>{0, 2});

    // n3 (degree 1) pairs with n4; n6 pairs with n7 by normalized weight;
    // n1 and n5 remain singletons.
    const auto pairs = nhem_match(a, {0, 2});
    REQUIRE(pairs.size() == 2);
    CHECK(std::set<NodeId>{pairs[0].first, pairs[0].second} == std::set<NodeId>{3, 4});
    CHECK(std::set<NodeId>{pairs[1].first, pairs[1].second} == std::set<NodeId>{6, 7});

    const MatchingMatrix m = hybrid_match(a);
    CHECK(m.n_coarse == 5);
    const auto groups = group_sets(m);
    CHECK(groups.count({0, 2}) == 1);
    CHECK(groups.count({3, 4}) == 1);
    CHECK(groups.count({6, 7}) == 1);
    CHECK(groups.count({1}) == 1);
    CHECK(groups.count({5}) == 1);

    // The fixture's targeted entities get closer: distances drop by one hop.
    const AdjacencyMatrix coarse = coarsen_adjacency(a, m);
    const auto fine_d = shortest_path_length(a, 3, 0);
    const auto coarse_d = shortest_path_length(coarse, m.assignment[3], m.assignment[0]);
    REQUIRE((fine_d && coarse_d));
    CHECK(*fine_d == 3);
    CHECK(*coarse_d == 2);
}

TEST_CASE("hybrid matching on the path and the star") {
    const MatchingMatrix p4 = hybrid_match(path_adjacency(4));
    CHECK(p4.n_coarse == 2);
    CHECK(p4.assignment == std::vector<int>{0, 0, 1, 1});

    const MatchingMatrix star = hybrid_match(star_adjacency(3));
    CHECK(star.n_coarse == 2);
    CHECK(star.assignment == std::vector<int>{0, 1, 1, 1});

    const MatchingMatrix edgeless = hybrid_match(AdjacencyMatrix(5));
    CHECK(edgeless.is_identity());
    CHECK(edgeless.n_coarse == 5);
}

TEST_CASE("clause matching collapses a noun phrase into one node") {
    std::vector<ClauseMerge> merges;
    const MatchingMatrix m = clause_match(noun_phrase_fixture().graph, {}, &merges);
    CHECK(m.n_coarse == 1);
    REQUIRE(merges.size() == 2);
    CHECK(merges[0].child == 0);
    CHECK(merges[0].head == 2);
    CHECK(merges[0].via.dep_label == "det");
    CHECK(merges[1].child == 1);
    CHECK(merges[1].head == 2);
    CHECK(merges[1].via.dep_label == "amod");
}

TEST_CASE("clause matching never merges core arguments") {
    Document doc;
    doc.sentences.push_back({
        {"She", "PRON", 2, "nsubj"},
        {"eats", "VERB", 0, "root"},
    });
    const MatchingMatrix m = clause_match(build_document_graph(doc, {}).graph, {});
    CHECK(m.is_identity());
    CHECK(m.n_coarse == 2);
}

TEST_CASE("clause matching walkthrough: supernodes are not reused in a round") {
    const DocumentGraph dg = clause_matching_fixture();
    std::vector<ClauseMerge> merges;
    const MatchingMatrix round1 = clause_match(dg.graph, {}, &merges);

    const auto groups = group_sets(round1);
    CHECK(groups.count({0, 1}) == 1);  // A + study
    CHECK(groups.count({2, 3}) == 1);  // was + performed
    CHECK(groups.count({4, 5}) == 1);  // in + patients
    CHECK(groups.count({6, 7, 8}) == 1);  // with + bladder + carcinoma
    CHECK(round1.n_coarse == 4);

    // patients absorbed "in" earlier in the round, so it is skipped when
    // visited and its supernode does not fold into the verb's this round.
    CHECK(round1.assignment[5] != round1.assignment[3]);
    // The subject stays out of the verb supernode: nsubj:pass is core.
    CHECK(round1.assignment[1] != round1.assignment[3]);
    for (const ClauseMerge& merge : merges) {
        CHECK(merge.via.dep_label != "nsubj:pass");
    }
}

TEST_CASE("clause matching second round merges the oblique into the verb") {
    const DocumentGraph dg = clause_matching_two_round_fixture();
    const MatchingMatrix round1 = clause_match(dg.graph, {});
    CHECK(round1.n_coarse == 3);
    const auto groups1 = group_sets(round1);
    CHECK(groups1.count({0, 1}) == 1);
    CHECK(groups1.count({2, 3}) == 1);
    CHECK(groups1.count({4, 5}) == 1);

    const LabeledGraph merged = merge_typed_graph(dg.graph, round1);
    std::vector<ClauseMerge> merges;
    const MatchingMatrix round2 = clause_match(merged, {}, &merges);
    CHECK(round2.n_coarse == 2);
    REQUIRE(merges.size() == 1);
    CHECK(merges[0].child == 2);  // {in, patients}
    CHECK(merges[0].head == 1);   // {was, performed}
    CHECK(merges[0].via.dep_label == "obl");
    // The subject supernode still resists merging across nsubj:pass.
    CHECK(round2.assignment[0] != round2.assignment[1]);
}

TEST_CASE("clause matching merges across coreference edges") {
    Document doc;
    doc.sentences.push_back({{"It", "PRON", 0, "root"}});
    doc.sentences.push_back({{"works", "VERB", 0, "root"}});
    const DocumentGraph dg = build_document_graph(doc, {{0, 1}});
    const MatchingMatrix m = clause_match(dg.graph, {});
    CHECK(m.n_coarse == 1);
}

TEST_CASE("fuzz: clause matching respects the core-argument set over rounds") {
    const std::vector<std::string> labels{"nsubj", "dobj",  "det",  "amod", "nmod",
                                          "case",  "advmod", "obl",  "ccomp", "conj"};
    const ClauseMatchConfig cfg;
    Rng rng(1234);
    for (int trial = 0; trial < 100; ++trial) {
        LabeledGraph g = random_typed_tree(rng, 14, labels).graph;
        for (int round = 0; round < 3; ++round) {
            std::vector<ClauseMerge> merges;
            const MatchingMatrix m = clause_match(g, cfg, &merges);
            std::set<NodeId> heads, children;
            for (const ClauseMerge& merge : merges) {
                CHECK(cfg.core_arguments.count(merge.via.dep_label) == 0);
                CHECK(cfg.mergeable(merge.via));
                heads.insert(merge.head);
                children.insert(merge.child);
            }
            // No chains inside a round: a node that absorbed children never
            // appears as a merged child itself.
            for (NodeId h : heads) {
                CHECK(children.count(h) == 0);
            }
            g = merge_typed_graph(g, m);
        }
    }
}

TEST_CASE("random matching is seed-deterministic and respects the probability") {
    const AdjacencyMatrix p4 = path_adjacency(4);
    const MatchingMatrix a = random_match(p4, 99);
    const MatchingMatrix b = random_match(p4, 99);
    CHECK(a.assignment == b.assignment);

    CHECK(random_match(p4, 7, 0.0).is_identity());

    const MatchingMatrix all = random_match(p4, 7, 1.0);
    CHECK(all.n_coarse == 2);
    CHECK(all.assignment == std::vector<int>{0, 0, 1, 1});
}

TEST_CASE("coarsen_adjacency on the path fixture") {
    const AdjacencyMatrix p4 = path_adjacency(4);
    MatchingMatrix m;
    m.n_fine = 4;
    m.n_coarse = 2;
    m.assignment = {0, 0, 1, 1};
    const AdjacencyMatrix coarse = coarsen_adjacency(p4, m);
    CHECK(coarse.at(0, 0) == 2);
    CHECK(coarse.at(0, 1) == 1);
    CHECK(coarse.at(1, 0) == 1);
    CHECK(coarse.at(1, 1) == 2);

    CHECK(coarsen_adjacency(p4, MatchingMatrix::identity(4)) == p4);

    MatchingMatrix all;
    all.n_fine = 4;
    all.n_coarse = 1;
    all.assignment = {0, 0, 0, 0};
    CHECK(coarsen_adjacency(p4, all).at(0, 0) == 6);

    CHECK_THROWS_AS(coarsen_adjacency(p4, MatchingMatrix::identity(3)),
                    std::invalid_argument);
}

TEST_CASE("merge_typed_graph transfers labels and drops self-loops") {
    const DocumentGraph dg = noun_phrase_fixture();
    MatchingMatrix m;
    m.n_fine = 3;
    m.n_coarse = 2;
    m.assignment = {0, 0, 1};  // merge "a" and "red"
    const LabeledGraph merged = merge_typed_graph(dg.graph, m);
    CHECK(merged.node_count() == 2);
    bool saw_det = false, saw_amod = false;
    for (const Edge& e : merged.edges()) {
        CHECK(e.src != e.dst);
        saw_det = saw_det || e.kind.dep_label == "det";
        saw_amod = saw_amod || e.kind.dep_label == "amod";
    }
    CHECK(saw_det);
    CHECK(saw_amod);
}

TEST_CASE("fuzz: partition and algebra properties over 200 graphs") {
    Rng rng(20240915);
    for (int trial = 0; trial < 200; ++trial) {
        const AdjacencyMatrix a = random_adjacency(rng, 40);
        MatchingMatrix m;
        switch (trial % 3) {
            case 0: m = hybrid_match(a); break;
            case 1: m = random_match(a, rng.next_u64()); break;
            default: m = MatchingMatrix::identity(a.size()); break;
        }

        // Partition: every fine node has exactly one supernode, every
        // supernode at least one member, indices dense.
        CHECK(static_cast<int>(m.assignment.size()) == a.size());
        CHECK(m.n_coarse <= m.n_fine);
        const auto members = m.members();
        CHECK(static_cast<int>(members.size()) == m.n_coarse);
        int total_members = 0;
        for (const auto& group : members) {
            CHECK(!group.empty());
            total_members += static_cast<int>(group.size());
        }
        CHECK(total_members == m.n_fine);
        // Rows of the dense matching matrix are one-hot.
        const Matrix dense = m.to_matrix();
        for (int i = 0; i < dense.rows(); ++i) {
            double row_sum = 0.0;
            for (int j = 0; j < dense.cols(); ++j) {
                row_sum += dense.at(i, j);
            }
            CHECK(row_sum == 1.0);
        }

        const AdjacencyMatrix coarse = coarsen_adjacency(a, m);
        CHECK(coarse == triple_product_oracle(a, m));
        CHECK(coarse.is_symmetric());
        CHECK(coarse.total_weight() == a.total_weight());
    }
}

TEST_CASE("fuzz: coarse distances never exceed fine distances") {
    Rng rng(555);
    for (int trial = 0; trial < 100; ++trial) {
        const AdjacencyMatrix a = random_adjacency(rng, 24);
        const MatchingMatrix m =
            trial % 2 == 0 ? hybrid_match(a) : random_match(a, rng.next_u64());
        const AdjacencyMatrix coarse = coarsen_adjacency(a, m);
        for (int u = 0; u < a.size(); ++u) {
            const auto fine = bfs_distances(a, u);
            const auto coarse_from = bfs_distances(coarse, m.assignment[u]);
            for (int v = 0; v < a.size(); ++v) {
                if (fine[v]) {
                    REQUIRE(coarse_from[m.assignment[v]].has_value());
                    CHECK(*coarse_from[m.assignment[v]] <= *fine[v]);
                }
            }
        }
    }
}

TEST_CASE("hybrid supernodes are pairs except SEM groups") {
    Rng rng(808);
    for (int trial = 0; trial < 60; ++trial) {
        const AdjacencyMatrix a = random_adjacency(rng, 30);
        std::set<std::set<NodeId>> sem_groups;
        for (const auto& g : sem_match(a)) {
            sem_groups.insert(std::set<NodeId>(g.begin(), g.end()));
        }
        for (const auto& group : hybrid_match(a).members()) {
            if (group.size() > 2) {
                CHECK(sem_groups.count(std::set<NodeId>(group.begin(), group.end())) == 1);
            }
        }
    }
}
