#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cgnn/relation.hpp"
#include "fd_check.hpp"

using namespace cgnn;
using namespace cgnn::testing;

TEST_CASE("mention embedding max-pools the span rows") {
    const Matrix h(3, 2, {1, 5, 4, 2, -1, 0});
    CHECK(mention_embed(h, MentionSpan{1, 2}) == Matrix(1, 2, {4, 2}));
    CHECK(mention_embed(h, MentionSpan{0, 2}) == Matrix(1, 2, {4, 5}));
    CHECK_THROWS_AS(mention_embed(h, MentionSpan{1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(mention_embed(h, MentionSpan{0, 4}), std::invalid_argument);
}

TEST_CASE("mention embedding is permutation-invariant over rows in the span") {
    Rng rng(3);
    Matrix h(4, 3);
    fill_random(h, rng);
    Matrix swapped = h;
    for (int j = 0; j < 3; ++j) {
        std::swap(swapped.at(1, j), swapped.at(2, j));
    }
    CHECK(mention_embed(h, MentionSpan{0, 4}) == mention_embed(swapped, MentionSpan{0, 4}));
}

TEST_CASE("zero-weight scorer outputs its final bias") {
    PairScorer scorer(2, 3, 4, 2);
    for (Parameter* p : scorer.parameters()) {
        p->value.fill(0.0);
    }
    scorer.parameters()[3]->value = Matrix(1, 2, {0.25, -1.5});  // b2
    const Matrix logits =
        scorer.tuple_score({Matrix(1, 3, {1, 2, 3}), Matrix(1, 3, {4, 5, 6})},
                           Matrix(1, 3, {7, 8, 9}));
    CHECK(logits == Matrix(1, 2, {0.25, -1.5}));
}

TEST_CASE("identity-wired single-class scorer reproduces a dot product") {
    // W1 = I, b1 = 0, W2 = ones, b2 = 0 on non-negative features turns the
    // score into <concat(features), ones>.
    const int d = 2, k = 2;
    const int width = (k + 1) * d;
    PairScorer scorer(k, d, width, 1);
    auto params = scorer.parameters();
    params[0]->value = Matrix::identity(width);
    params[1]->value.fill(0.0);
    params[2]->value = Matrix(width, 1, {1, 1, 1, 1, 1, 1});
    params[3]->value.fill(0.0);

    const Matrix m1(1, 2, {1, 2});
    const Matrix m2(1, 2, {3, 4});
    const Matrix sent(1, 2, {5, 6});
    const Matrix logits = scorer.tuple_score({m1, m2}, sent);
    CHECK(logits.at(0, 0) == doctest::Approx(21.0).epsilon(1e-12));
}

TEST_CASE("scorer is deterministic") {
    PairScorer scorer(2, 3, 4, 3);
    scorer.init_parameters(5);
    const std::vector<Matrix> mentions{Matrix(1, 3, {1, -2, 3}), Matrix(1, 3, {0, 1, 0})};
    const Matrix sent(1, 3, {2, 2, 2});
    CHECK(scorer.tuple_score(mentions, sent) == scorer.tuple_score(mentions, sent));
    CHECK_THROWS_AS(scorer.tuple_score({mentions[0]}, sent), std::invalid_argument);
}

TEST_CASE("entity score with single mentions equals the tuple score") {
    PairScorer scorer(2, 2, 4, 3);
    scorer.init_parameters(9);
    Rng rng(2);
    Matrix h(5, 2);
    fill_random(h, rng);
    const Matrix sent = row_max_pool(h, {0, 1, 2, 3, 4});

    std::vector<EntityCluster> clusters{{"a", {MentionSpan{0, 1}}}, {"b", {MentionSpan{3, 4}}}};
    const Matrix entity = scorer.entity_score(clusters, h, sent);
    const Matrix tuple = scorer.tuple_score(
        {mention_embed(h, clusters[0].mentions[0]), mention_embed(h, clusters[1].mentions[0])},
        sent);
    CHECK(entity == tuple);
}

TEST_CASE("two identical tuples shift every class logit by ln 2") {
    PairScorer scorer(2, 2, 4, 2);
    scorer.init_parameters(4);
    Rng rng(6);
    Matrix h(4, 2);
    fill_random(h, rng);
    // Duplicate rows make both mentions of entity a identical.
    for (int j = 0; j < 2; ++j) {
        h.at(1, j) = h.at(0, j);
    }
    const Matrix sent = row_max_pool(h, {0, 1, 2, 3});
    std::vector<EntityCluster> one{{"a", {MentionSpan{0, 1}}}, {"b", {MentionSpan{3, 4}}}};
    std::vector<EntityCluster> two{{"a", {MentionSpan{0, 1}, MentionSpan{1, 2}}},
                                   {"b", {MentionSpan{3, 4}}}};
    const Matrix single = scorer.entity_score(one, h, sent);
    const Matrix doubled = scorer.entity_score(two, h, sent);
    for (int c = 0; c < 2; ++c) {
        CHECK(doubled.at(0, c) ==
              doctest::Approx(single.at(0, c) + std::log(2.0)).epsilon(1e-12));
    }
}

TEST_CASE("entity score stays within the log-sum-exp bracket and never decreases") {
    PairScorer scorer(2, 3, 5, 2);
    Rng rng(123);
    for (int trial = 0; trial < 40; ++trial) {
        scorer.init_parameters(rng.next_u64());
        Matrix h(6, 3);
        fill_random(h, rng);
        const Matrix sent = row_max_pool(h, {0, 1, 2, 3, 4, 5});
        std::vector<EntityCluster> clusters{
            {"a", {MentionSpan{0, 1}, MentionSpan{1, 3}}},
            {"b", {MentionSpan{3, 4}, MentionSpan{4, 6}, MentionSpan{5, 6}}}};

        // Oracle: enumerate every tuple score directly.
        std::vector<Matrix> tuples;
        for (const MentionSpan& ma : clusters[0].mentions) {
            for (const MentionSpan& mb : clusters[1].mentions) {
                tuples.push_back(scorer.tuple_score(
                    {mention_embed(h, ma), mention_embed(h, mb)}, sent));
            }
        }
        const Matrix score = scorer.entity_score(clusters, h, sent);
        for (int c = 0; c < 2; ++c) {
            double best = tuples[0].at(0, c);
            for (const Matrix& t : tuples) {
                best = std::max(best, t.at(0, c));
            }
            CHECK(score.at(0, c) >= best - 1e-9);
            CHECK(score.at(0, c) <= best + std::log(static_cast<double>(tuples.size())) + 1e-9);
        }

        // Adding tuples (an extra mention) never lowers the score.
        std::vector<EntityCluster> more = clusters;
        more[0].mentions.push_back(MentionSpan{2, 3});
        const Matrix bigger = scorer.entity_score(more, h, sent);
        for (int c = 0; c < 2; ++c) {
            CHECK(bigger.at(0, c) >= score.at(0, c) - 1e-9);
        }
    }
}

TEST_CASE("entity score is invariant to mention and cluster-internal order") {
    PairScorer scorer(2, 3, 5, 3);
    Rng rng(321);
    for (int trial = 0; trial < 30; ++trial) {
        scorer.init_parameters(rng.next_u64());
        Matrix h(6, 3);
        fill_random(h, rng);
        const Matrix sent = row_max_pool(h, {0, 1, 2, 3, 4, 5});
        std::vector<EntityCluster> clusters{
            {"a", {MentionSpan{0, 1}, MentionSpan{1, 2}, MentionSpan{2, 3}}},
            {"b", {MentionSpan{3, 4}, MentionSpan{4, 5}}}};
        std::vector<EntityCluster> shuffled = clusters;
        std::swap(shuffled[0].mentions[0], shuffled[0].mentions[2]);
        std::swap(shuffled[1].mentions[0], shuffled[1].mentions[1]);
        const Matrix a = scorer.entity_score(clusters, h, sent);
        const Matrix b = scorer.entity_score(shuffled, h, sent);
        for (int c = 0; c < 3; ++c) {
            CHECK(a.at(0, c) == doctest::Approx(b.at(0, c)).epsilon(1e-12));
        }
    }
}

TEST_CASE("taped entity score matches the plain path and passes finite differences") {
    std::vector<EntityCluster> clusters{{"a", {MentionSpan{0, 1}, MentionSpan{1, 2}}},
                                        {"b", {MentionSpan{3, 5}}}};
    int checked = 0;
    for (uint64_t seed = 1; seed <= 10 && checked < 4; ++seed) {
        PairScorer scorer(2, 3, 4, 2);
        scorer.init_parameters(seed);
        Parameter h{Matrix(5, 3)};
        Rng rng(seed * 17);
        fill_random_away_from_zero(h.value, rng, 0.2, 1.0);

        {
            Tape tape;
            Var hv = tape.parameter(h);
            Var sent = tape.row_max_pool(hv, {0, 1, 2, 3, 4});
            Var logits = scorer.entity_score(tape, clusters, hv, sent);
            const Matrix plain = scorer.entity_score(
                clusters, h.value, row_max_pool(h.value, {0, 1, 2, 3, 4}));
            for (int c = 0; c < plain.cols(); ++c) {
                CHECK(logits.value().at(0, c) ==
                      doctest::Approx(plain.at(0, c)).epsilon(1e-12));
            }
        }

        std::vector<Parameter*> params = scorer.parameters();
        params.push_back(&h);
        const FdResult r = finite_difference_check(params, [&](Tape& tape) {
            Var hv = tape.parameter(h);
            Var sent = tape.row_max_pool(hv, {0, 1, 2, 3, 4});
            Var logits = scorer.entity_score(tape, clusters, hv, sent);
            return tape.cross_entropy(logits, 1);
        });
        if (!r.kink_safe) {
            continue;
        }
        ++checked;
        INFO("seed ", seed, " rel err ", r.max_rel_err);
        CHECK(r.max_rel_err < kFdTolerance);
    }
    CHECK(checked >= 4);
}

TEST_CASE("predict takes the argmax with ties to the lowest index") {
    CHECK(predict(Matrix(1, 2, {0.1, 0.9})) == 1);
    CHECK(predict(Matrix(1, 3, {0.5, 0.5, 0.5})) == 0);
    const Matrix logits(1, 3, {1.0, 3.0, 2.0});
    Matrix shifted = logits;
    for (size_t i = 0; i < shifted.size(); ++i) {
        shifted.data()[i] += 100.0;
    }
    CHECK(predict(logits) == predict(shifted));
    CHECK_THROWS_AS(predict(Matrix(0, 0)), std::invalid_argument);
}
