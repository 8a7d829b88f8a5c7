#include "cgnn/relation.hpp"

#include <cmath>
#include <stdexcept>

namespace cgnn {

namespace {

std::vector<int> span_rows(const Matrix& h, const MentionSpan& span) {
    if (span.start < 0 || span.end > h.rows() || span.start >= span.end) {
        throw std::invalid_argument("mention_embed: span [" + std::to_string(span.start) + ", " +
                                    std::to_string(span.end) + ") invalid for " + h.shape_str());
    }
    std::vector<int> rows;
    for (int i = span.start; i < span.end; ++i) {
        rows.push_back(i);
    }
    return rows;
}

/// Lexicographic walk over the Cartesian product of cluster mention
/// indices.
std::vector<std::vector<int>> mention_tuples(const std::vector<EntityCluster>& clusters) {
    for (const EntityCluster& c : clusters) {
        if (c.mentions.empty()) {
            throw std::invalid_argument("entity_score: cluster '" + c.entity_id +
                                        "' has no mentions");
        }
    }
    std::vector<std::vector<int>> tuples;
    std::vector<int> pick(clusters.size(), 0);
    while (true) {
        tuples.push_back(pick);
        int level = static_cast<int>(clusters.size()) - 1;
        while (level >= 0) {
            if (++pick[level] < static_cast<int>(clusters[level].mentions.size())) {
                break;
            }
            pick[level] = 0;
            --level;
        }
        if (level < 0) {
            return tuples;
        }
    }
}

}  // namespace

Matrix mention_embed(const Matrix& h, const MentionSpan& span) {
    return row_max_pool(h, span_rows(h, span));
}

Var mention_embed(Tape& tape, Var h, const MentionSpan& span) {
    return tape.row_max_pool(h, span_rows(h.value(), span));
}

PairScorer::PairScorer(int entity_count, int feature_dim, int hidden_dim, int num_classes)
    : entity_count_(entity_count),
      num_classes_(num_classes),
      w1_(Matrix((entity_count + 1) * feature_dim, hidden_dim)),
      b1_(Matrix(1, hidden_dim)),
      w2_(Matrix(hidden_dim, num_classes)),
      b2_(Matrix(1, num_classes)) {
    if (entity_count < 2) {
        throw std::invalid_argument("PairScorer: need at least two entities");
    }
    if (num_classes < 1) {
        throw std::invalid_argument("PairScorer: need at least one class");
    }
}

void PairScorer::init_parameters(uint64_t seed) {
    Rng rng(seed);
    init_parameters(rng);
}

void PairScorer::init_parameters(Rng& rng) {
    for (Parameter* p : parameters()) {
        if (p->value.rows() == 1) {
            p->value.fill(0.0);
        } else {
            const double bound = std::sqrt(6.0 / (p->value.rows() + p->value.cols()));
            for (size_t i = 0; i < p->value.size(); ++i) {
                p->value.data()[i] = rng.uniform_symmetric(bound);
            }
        }
        p->zero_grad();
    }
}

std::vector<Parameter*> PairScorer::parameters() { return {&w1_, &b1_, &w2_, &b2_}; }

Matrix PairScorer::tuple_score(const std::vector<Matrix>& mentions,
                               const Matrix& sentence_vec) const {
    if (static_cast<int>(mentions.size()) != entity_count_) {
        throw std::invalid_argument("tuple_score: expected " + std::to_string(entity_count_) +
                                    " mentions, got " + std::to_string(mentions.size()));
    }
    std::vector<Matrix> parts = mentions;
    parts.push_back(sentence_vec);
    const Matrix features = concat_cols(parts);
    const Matrix hidden = relu(add_row_broadcast(matmul(features, w1_.value), b1_.value));
    return add_row_broadcast(matmul(hidden, w2_.value), b2_.value);
}

Var PairScorer::tuple_score(Tape& tape, const std::vector<Var>& mentions, Var sentence_vec) {
    if (static_cast<int>(mentions.size()) != entity_count_) {
        throw std::invalid_argument("tuple_score: expected " + std::to_string(entity_count_) +
                                    " mentions, got " + std::to_string(mentions.size()));
    }
    std::vector<Var> parts = mentions;
    parts.push_back(sentence_vec);
    Var features = tape.concat_cols(parts);
    Var hidden = tape.relu(tape.add_row_broadcast(tape.matmul(features, tape.parameter(w1_)),
                                                  tape.parameter(b1_)));
    return tape.add_row_broadcast(tape.matmul(hidden, tape.parameter(w2_)), tape.parameter(b2_));
}

Matrix PairScorer::entity_score(const std::vector<EntityCluster>& clusters, const Matrix& h,
                                const Matrix& sentence_vec) const {
    if (static_cast<int>(clusters.size()) != entity_count_) {
        throw std::invalid_argument("entity_score: expected " + std::to_string(entity_count_) +
                                    " clusters, got " + std::to_string(clusters.size()));
    }
    std::vector<std::vector<Matrix>> mention_vecs(clusters.size());
    for (size_t c = 0; c < clusters.size(); ++c) {
        for (const MentionSpan& span : clusters[c].mentions) {
            mention_vecs[c].push_back(mention_embed(h, span));
        }
    }
    std::vector<Matrix> tuple_logits;
    for (const std::vector<int>& pick : mention_tuples(clusters)) {
        std::vector<Matrix> mentions;
        for (size_t c = 0; c < pick.size(); ++c) {
            mentions.push_back(mention_vecs[c][pick[c]]);
        }
        tuple_logits.push_back(tuple_score(mentions, sentence_vec));
    }
    Matrix out(1, num_classes_);
    for (int j = 0; j < num_classes_; ++j) {
        std::vector<double> scores;
        scores.reserve(tuple_logits.size());
        for (const Matrix& logits : tuple_logits) {
            scores.push_back(logits.at(0, j));
        }
        out.at(0, j) = logsumexp(scores);
    }
    return out;
}

Var PairScorer::entity_score(Tape& tape, const std::vector<EntityCluster>& clusters, Var h,
                             Var sentence_vec) {
    if (static_cast<int>(clusters.size()) != entity_count_) {
        throw std::invalid_argument("entity_score: expected " + std::to_string(entity_count_) +
                                    " clusters, got " + std::to_string(clusters.size()));
    }
    std::vector<std::vector<Var>> mention_vecs(clusters.size());
    for (size_t c = 0; c < clusters.size(); ++c) {
        for (const MentionSpan& span : clusters[c].mentions) {
            mention_vecs[c].push_back(mention_embed(tape, h, span));
        }
    }
    std::vector<Var> tuple_logits;
    for (const std::vector<int>& pick : mention_tuples(clusters)) {
        std::vector<Var> mentions;
        for (size_t c = 0; c < pick.size(); ++c) {
            mentions.push_back(mention_vecs[c][pick[c]]);
        }
        tuple_logits.push_back(tuple_score(tape, mentions, sentence_vec));
    }
    if (tuple_logits.size() == 1) {
        return tuple_logits[0];
    }
    return tape.logsumexp_rows(tape.concat_rows(tuple_logits));
}

int predict(const Matrix& logits) {
    if (logits.size() == 0) {
        throw std::invalid_argument("predict: empty logits");
    }
    int best = 0;
    for (int j = 1; j < logits.cols(); ++j) {
        if (logits.at(0, j) > logits.at(0, best)) {
            best = j;
        }
    }
    return best;
}

}  // namespace cgnn
