#pragma once

#include <cstdint>
#include <vector>

#include "cgnn/autodiff.hpp"
#include "cgnn/document_graph.hpp"
#include "cgnn/matrix.hpp"

namespace cgnn {

/// Columnwise max over the span's token rows.
Matrix mention_embed(const Matrix& h, const MentionSpan& span);
Var mention_embed(Tape& tape, Var h, const MentionSpan& span);

/// Two linear layers scoring a mention tuple: the k mention vectors are
/// concatenated with a max-pooled sentence vector, passed through a ReLU
/// hidden layer, and projected to class logits.
class PairScorer {
public:
    PairScorer(int entity_count, int feature_dim, int hidden_dim, int num_classes);

    int entity_count() const { return entity_count_; }
    int num_classes() const { return num_classes_; }

    void init_parameters(uint64_t seed);
    void init_parameters(Rng& rng);
    /// Checkpoint order: W1, b1, W2, b2.
    std::vector<Parameter*> parameters();

    Matrix tuple_score(const std::vector<Matrix>& mentions, const Matrix& sentence_vec) const;
    Var tuple_score(Tape& tape, const std::vector<Var>& mentions, Var sentence_vec);

    /// Per-class log-sum-exp of tuple scores over the Cartesian product of
    /// the clusters' mentions. Requires exactly entity_count() nonempty
    /// clusters.
    Matrix entity_score(const std::vector<EntityCluster>& clusters, const Matrix& h,
                        const Matrix& sentence_vec) const;
    Var entity_score(Tape& tape, const std::vector<EntityCluster>& clusters, Var h,
                     Var sentence_vec);

private:
    int entity_count_;
    int num_classes_;
    Parameter w1_, b1_, w2_, b2_;
};

/// Argmax class, ties to the lowest index.
int predict(const Matrix& logits);

}  // namespace cgnn
