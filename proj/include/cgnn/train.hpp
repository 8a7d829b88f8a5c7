#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cgnn/analysis.hpp"
#include "cgnn/embedding.hpp"
#include "cgnn/hierarchy.hpp"
#include "cgnn/metrics.hpp"
#include "cgnn/model.hpp"
#include "cgnn/relation.hpp"

namespace cgnn {

struct TrainingDiverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrainConfig {
    double lr = 0.1;
    double lr_decay = 0.95;
    int decay_after = 15;  // full-lr epochs before the decay kicks in
    int epochs = 30;
    uint64_t seed = 0;
    int level_count = 2;
    int sublayers = 1;
    int hidden_dim = 16;
    PoolMethod method = PoolMethod::HybridMatching;
    bool anonymize = false;
    double dropout = 0.0;
    bool mean_pool = false;
    int num_classes = 2;
};

/// Epoch-indexed (0-based) schedule: lr for e < decay_after, then
/// lr * decay^(e - decay_after + 1).
double learning_rate_for_epoch(const TrainConfig& cfg, int epoch);

/// -log softmax(logits)[label] and its gradient on the logits
/// (softmax - onehot).
std::pair<double, Matrix> cross_entropy(const Matrix& logits, int label);

/// Synthetic long-dependency corpus: each document is a single-sentence
/// token chain whose graph is a path; the binary label is the XOR of the
/// endpoint token classes; single-token mentions sit at positions 0 and
/// chain_len-1, so the entity distance is chain_len-1 by construction.
/// Class combinations are stratified exactly, then shuffled by seed.
Corpus synth_long_dep(int n_instances, int chain_len, int vocab, uint64_t seed);

/// One trainable/evaluable unit: a relation instance with its document's
/// hierarchy and token features resolved.
struct PreparedInstance {
    int doc_index = 0;
    Matrix features;  // per instance when anonymization is on
    RelationInstance instance;
    std::optional<double> entity_dist;
    int input_length = 0;
};

struct PreparedCorpus {
    std::vector<GraphHierarchy> hierarchies;  // one per document
    std::vector<PreparedInstance> instances;  // document order, then instance order
    int entity_count = 2;
    int input_dim = 0;
};

/// Builds hierarchies (level count = cfg.level_count, so K = L-1 pooling
/// steps), embeds tokens, and flattens instances. All instances must agree
/// on entity count.
PreparedCorpus prepare_corpus(const Corpus& corpus, const TrainConfig& cfg,
                              const EmbeddingTable& table, const ClauseMatchConfig& cm_cfg = {});

struct EpochStat {
    int epoch = 0;
    double mean_loss = 0.0;
    double dev_accuracy = 0.0;
};

struct TrainResult {
    std::vector<EpochStat> curve;
    int best_epoch = 0;  // by dev accuracy, ties to the earliest epoch
    Metrics dev_metrics;  // at the restored best epoch
};

/// Per-instance SGD in deterministic dataset order; model selection by best
/// dev accuracy (parameters are restored to the best epoch before
/// returning). Non-finite loss raises TrainingDiverged.
TrainResult train(MultiscaleGcn& model, PairScorer& head, const PreparedCorpus& train_set,
                  const PreparedCorpus& dev_set, const TrainConfig& cfg);

/// Class logits for one prepared instance (gradient-free path).
Matrix score_instance(const MultiscaleGcn& model, const PairScorer& head,
                      const GraphHierarchy& hierarchy, const PreparedInstance& pi);

std::pair<Metrics, std::vector<PredictionRecord>> evaluate(const MultiscaleGcn& model,
                                                           const PairScorer& head,
                                                           const PreparedCorpus& data,
                                                           int num_classes);

}  // namespace cgnn
