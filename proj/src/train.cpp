#include "cgnn/train.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cgnn {

double learning_rate_for_epoch(const TrainConfig& cfg, int epoch) {
    if (epoch < cfg.decay_after) {
        return cfg.lr;
    }
    return cfg.lr * std::pow(cfg.lr_decay, epoch - cfg.decay_after + 1);
}

std::pair<double, Matrix> cross_entropy(const Matrix& logits, int label) {
    if (logits.rows() != 1) {
        throw std::invalid_argument("cross_entropy: logits must be a single row, got " +
                                    logits.shape_str());
    }
    if (label < 0 || label >= logits.cols()) {
        throw std::invalid_argument("cross_entropy: label out of range");
    }
    std::vector<double> row(logits.data(), logits.data() + logits.size());
    const double lse = logsumexp(row);
    Matrix grad(1, logits.cols());
    for (int j = 0; j < logits.cols(); ++j) {
        grad.at(0, j) = std::exp(row[j] - lse) - (j == label ? 1.0 : 0.0);
    }
    return {lse - logits.at(0, label), grad};
}

Corpus synth_long_dep(int n_instances, int chain_len, int vocab, uint64_t seed) {
    if (chain_len < 4) {
        throw std::invalid_argument("synth_long_dep: chain_len must be >= 4");
    }
    if (n_instances < 1 || vocab < 1) {
        throw std::invalid_argument("synth_long_dep: need positive instance count and vocab");
    }
    Rng rng(seed);
    // Exact stratification over the four endpoint-class combinations keeps
    // both labels balanced for any instance count.
    std::vector<std::pair<int, int>> combos;
    combos.reserve(n_instances);
    for (int i = 0; i < n_instances; ++i) {
        combos.emplace_back((i % 4) / 2, (i % 4) % 2);
    }
    rng.shuffle(combos);

    const std::string class_words[2] = {"alpha", "beta"};
    Corpus corpus;
    corpus.reserve(n_instances);
    for (int i = 0; i < n_instances; ++i) {
        const auto [c0, c1] = combos[i];
        Document doc;
        doc.doc_id = "synth-" + std::to_string(chain_len) + "-" + std::to_string(i);
        std::vector<Token> sentence;
        for (int t = 0; t < chain_len; ++t) {
            Token token;
            if (t == 0) {
                token.form = class_words[c0];
                token.upos = "PROPN";
            } else if (t == chain_len - 1) {
                token.form = class_words[c1];
                token.upos = "PROPN";
            } else {
                token.form = "w" + std::to_string(rng.uniform_int(vocab));
                token.upos = "NOUN";
            }
            token.head = t;  // previous token; token 0 is the root
            token.deprel = t == 0 ? "root" : "dep";
            sentence.push_back(std::move(token));
        }
        doc.sentences.push_back(std::move(sentence));

        RelationInstance instance;
        instance.doc_id = doc.doc_id;
        instance.task = TaskKind::MentionLevel;
        instance.label = c0 ^ c1;
        instance.entities.push_back({"e0", {MentionSpan{0, 1}}});
        instance.entities.push_back({"e1", {MentionSpan{chain_len - 1, chain_len}}});

        CorpusEntry entry;
        entry.graph = build_document_graph(doc, {});
        entry.doc = std::move(doc);
        entry.instances.push_back(std::move(instance));
        corpus.push_back(std::move(entry));
    }
    return corpus;
}

PreparedCorpus prepare_corpus(const Corpus& corpus, const TrainConfig& cfg,
                              const EmbeddingTable& table, const ClauseMatchConfig& cm_cfg) {
    PreparedCorpus prepared;
    prepared.input_dim = table.dim() + kPosDim;
    prepared.entity_count = 0;
    for (size_t d = 0; d < corpus.size(); ++d) {
        const CorpusEntry& entry = corpus[d];
        prepared.hierarchies.push_back(build_hierarchy(entry.graph, cfg.method,
                                                       cfg.level_count - 1, cm_cfg, cfg.seed));
        Matrix shared_features;
        if (!cfg.anonymize) {
            shared_features = embed_tokens(entry.doc, table);
        }
        for (const RelationInstance& instance : entry.instances) {
            if (prepared.entity_count == 0) {
                prepared.entity_count = static_cast<int>(instance.entities.size());
            } else if (prepared.entity_count != static_cast<int>(instance.entities.size())) {
                throw std::invalid_argument(
                    "prepare_corpus: mixed entity counts (" +
                    std::to_string(prepared.entity_count) + " vs " +
                    std::to_string(instance.entities.size()) + ") in one corpus");
            }
            if (instance.label < 0 || instance.label >= cfg.num_classes) {
                throw std::invalid_argument("prepare_corpus: label " +
                                            std::to_string(instance.label) +
                                            " outside configured " +
                                            std::to_string(cfg.num_classes) + " classes");
            }
            PreparedInstance pi;
            pi.doc_index = static_cast<int>(d);
            pi.features = cfg.anonymize ? embed_tokens(anonymize(entry.doc, instance), table)
                                        : shared_features;
            pi.instance = instance;
            pi.entity_dist = entity_distance(entry.graph.graph.adjacency(), instance.entities);
            pi.input_length = entry.doc.token_count();
            prepared.instances.push_back(std::move(pi));
        }
    }
    return prepared;
}

namespace {

std::vector<int> all_rows(int n) {
    std::vector<int> rows(n);
    for (int i = 0; i < n; ++i) {
        rows[i] = i;
    }
    return rows;
}

std::vector<Matrix> snapshot(const std::vector<Parameter*>& params) {
    std::vector<Matrix> values;
    values.reserve(params.size());
    for (const Parameter* p : params) {
        values.push_back(p->value);
    }
    return values;
}

void restore(const std::vector<Parameter*>& params, const std::vector<Matrix>& values) {
    for (size_t i = 0; i < params.size(); ++i) {
        params[i]->value = values[i];
    }
}

}  // namespace

Matrix score_instance(const MultiscaleGcn& model, const PairScorer& head,
                      const GraphHierarchy& hierarchy, const PreparedInstance& pi) {
    const Matrix tokens = model.forward(hierarchy, pi.features);
    const Matrix sentence_vec = row_max_pool(tokens, all_rows(tokens.rows()));
    return head.entity_score(pi.instance.entities, tokens, sentence_vec);
}

TrainResult train(MultiscaleGcn& model, PairScorer& head, const PreparedCorpus& train_set,
                  const PreparedCorpus& dev_set, const TrainConfig& cfg) {
    std::vector<Parameter*> params = model.parameters();
    for (Parameter* p : head.parameters()) {
        params.push_back(p);
    }
    Rng dropout_rng(cfg.seed + 0x9e3779b97f4a7c15ull);

    TrainResult result;
    result.best_epoch = -1;
    double best_dev = -1.0;
    std::vector<Matrix> best_params = snapshot(params);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double lr = learning_rate_for_epoch(cfg, epoch);
        double loss_sum = 0.0;
        for (const PreparedInstance& pi : train_set.instances) {
            Tape tape;
            Var tokens = model.forward(tape, train_set.hierarchies[pi.doc_index], pi.features,
                                       cfg.dropout > 0.0 ? &dropout_rng : nullptr);
            Var sentence_vec = tape.row_max_pool(tokens, all_rows(tokens.rows()));
            Var logits = head.entity_score(tape, pi.instance.entities, tokens, sentence_vec);
            Var loss = tape.cross_entropy(logits, pi.instance.label);
            const double loss_value = loss.value().at(0, 0);
            if (!std::isfinite(loss_value)) {
                throw TrainingDiverged("non-finite loss at epoch " + std::to_string(epoch) +
                                       ", doc " + pi.instance.doc_id);
            }
            loss_sum += loss_value;
            tape.backward(loss);
            sgd_step(params, lr);
        }
        EpochStat stat;
        stat.epoch = epoch;
        stat.mean_loss = train_set.instances.empty()
                             ? 0.0
                             : loss_sum / static_cast<double>(train_set.instances.size());
        stat.dev_accuracy = evaluate(model, head, dev_set, cfg.num_classes).first.accuracy;
        result.curve.push_back(stat);
        if (stat.dev_accuracy > best_dev) {
            best_dev = stat.dev_accuracy;
            result.best_epoch = epoch;
            best_params = snapshot(params);
        }
    }
    restore(params, best_params);
    result.dev_metrics = evaluate(model, head, dev_set, cfg.num_classes).first;
    return result;
}

std::pair<Metrics, std::vector<PredictionRecord>> evaluate(const MultiscaleGcn& model,
                                                           const PairScorer& head,
                                                           const PreparedCorpus& data,
                                                           int num_classes) {
    std::vector<int> gold, predicted;
    std::vector<PredictionRecord> records;
    for (const PreparedInstance& pi : data.instances) {
        const Matrix logits = score_instance(model, head, data.hierarchies[pi.doc_index], pi);
        PredictionRecord record;
        record.gold = pi.instance.label;
        record.predicted = predict(logits);
        record.entity_distance = pi.entity_dist;
        record.input_length = pi.input_length;
        gold.push_back(record.gold);
        predicted.push_back(record.predicted);
        records.push_back(record);
    }
    return {metrics_from_predictions(gold, predicted, num_classes), std::move(records)};
}

}  // namespace cgnn
