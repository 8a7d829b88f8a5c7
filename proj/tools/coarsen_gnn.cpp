// Command-line front door: coarsen documents into DOT hierarchies, train the
// pooling-unpooling model, and bucket evaluation results by entity distance
// or input length. Never interactive; everything lands in files.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "cgnn/analysis.hpp"
#include "cgnn/checkpoint.hpp"
#include "cgnn/io.hpp"
#include "cgnn/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitArtifact = 4;
constexpr int kExitUsage = 64;

uint64_t default_seed() {
    if (const char* env = std::getenv("COARSEN_GNN_SEED")) {
        return std::strtoull(env, nullptr, 10);
    }
    return 0;
}

/// Input digests keyed by path, sorted for byte-stable manifests.
json input_digests(const std::vector<std::string>& paths) {
    std::vector<std::string> sorted = paths;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    json digests = json::object();
    for (const std::string& p : sorted) {
        if (fs::is_directory(p)) {
            std::vector<fs::path> files;
            for (const auto& entry : fs::directory_iterator(p)) {
                if (entry.is_regular_file()) {
                    files.push_back(entry.path());
                }
            }
            std::sort(files.begin(), files.end());
            for (const fs::path& f : files) {
                digests[f.string()] = cgnn::file_digest(f.string());
            }
        } else if (fs::exists(p)) {
            digests[p] = cgnn::file_digest(p);
        }
    }
    return digests;
}

void write_manifest(const std::string& out_dir, const std::string& command, const json& config,
                    uint64_t seed, const std::vector<std::string>& inputs) {
    json manifest;
    manifest["command"] = command;
    manifest["config"] = config;
    manifest["seed"] = seed;
    manifest["inputs"] = input_digests(inputs);
    manifest["tool_version"] = kToolVersion;
    cgnn::write_file((fs::path(out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
}

std::vector<std::string> token_labels(const cgnn::Document& doc) {
    std::vector<std::string> labels;
    for (const auto& sentence : doc.sentences) {
        for (const cgnn::Token& token : sentence) {
            labels.push_back(token.form);
        }
    }
    return labels;
}

struct CoarsenArgs {
    std::string input;
    std::string out_dir;
    std::string method = "hm";
    int levels = 2;
    uint64_t seed = default_seed();
    int jobs = 1;
};

int run_coarsen(const CoarsenArgs& args) {
    const cgnn::Corpus corpus = cgnn::load_corpus(args.input);
    const cgnn::PoolMethod method = cgnn::pool_method_from_string(args.method);
    fs::create_directories(args.out_dir);

    std::vector<cgnn::GraphHierarchy> hierarchies(corpus.size());
    cgnn::parallel_for(static_cast<int>(corpus.size()), args.jobs, [&](int i) {
        hierarchies[i] =
            cgnn::build_hierarchy(corpus[i].graph, method, args.levels, {}, args.seed);
    });

    json stats;
    stats["method"] = args.method;
    stats["levels"] = args.levels;
    stats["seed"] = args.seed;
    stats["documents"] = json::array();
    std::vector<double> mean_sizes(args.levels + 1, 0.0);
    for (size_t i = 0; i < corpus.size(); ++i) {
        const cgnn::GraphHierarchy& h = hierarchies[i];
        const std::string& doc_id = corpus[i].doc.doc_id;
        for (int level = 0; level < h.level_count(); ++level) {
            std::ostringstream dot;
            cgnn::write_level_dot(dot, h, level,
                                  level == 0 ? token_labels(corpus[i].doc)
                                             : std::vector<std::string>{});
            cgnn::write_file((fs::path(args.out_dir) /
                              (doc_id + ".level_" + std::to_string(level) + ".dot"))
                                 .string(),
                             dot.str());
        }
        std::ostringstream tree;
        cgnn::write_merge_tree_dot(tree, h);
        cgnn::write_file((fs::path(args.out_dir) / (doc_id + ".merge_tree.dot")).string(),
                         tree.str());

        json doc_stats;
        doc_stats["doc_id"] = doc_id;
        doc_stats["sizes"] = h.level_sizes();
        doc_stats["saturated_level"] =
            h.saturated_level ? json(*h.saturated_level) : json(nullptr);
        stats["documents"].push_back(doc_stats);
        for (int level = 0; level <= args.levels; ++level) {
            mean_sizes[level] += static_cast<double>(h.level_size(level)) / corpus.size();
        }
    }
    stats["mean_sizes"] = mean_sizes;
    cgnn::write_file((fs::path(args.out_dir) / "stats.json").string(), stats.dump(2) + "\n");

    json config = {{"input", args.input}, {"method", args.method},
                   {"levels", args.levels}, {"jobs", args.jobs}};
    write_manifest(args.out_dir, "coarsen", config, args.seed, {args.input});
    return kExitOk;
}

struct TrainArgs {
    std::string corpus;
    std::string out_dir;
    std::string embeddings;
    int embed_dim = 16;
    int synthetic_chain = 0;  // 0 = corpus mode
    int instances = 400;
    int vocab = 50;
    double dev_fraction = 0.2;
    cgnn::TrainConfig cfg;
    std::string method = "hm";
};

cgnn::EmbeddingTable make_table(const std::string& embeddings_path, int fallback_dim) {
    if (!embeddings_path.empty()) {
        return cgnn::EmbeddingTable::load(cgnn::read_file(embeddings_path));
    }
    return cgnn::EmbeddingTable(fallback_dim);
}

json metrics_to_json(const cgnn::Metrics& m) {
    return {{"total", m.total},         {"accuracy", m.accuracy},
            {"precision", m.precision}, {"recall", m.recall},
            {"f1", m.f1},               {"positive_f1", m.positive_f1},
            {"confusion", m.confusion}};
}

int run_train(TrainArgs& args) {
    args.cfg.method = cgnn::pool_method_from_string(args.method);
    const cgnn::EmbeddingTable table = make_table(args.embeddings, args.embed_dim);

    cgnn::Corpus train_docs, dev_docs, test_docs;
    if (args.synthetic_chain > 0) {
        const int n_train = std::max(1, args.instances * 3 / 5);
        const int n_dev = std::max(1, args.instances / 5);
        const int n_test = std::max(1, args.instances - n_train - n_dev);
        train_docs = cgnn::synth_long_dep(n_train, args.synthetic_chain, args.vocab,
                                          args.cfg.seed);
        dev_docs = cgnn::synth_long_dep(n_dev, args.synthetic_chain, args.vocab,
                                        args.cfg.seed + 1);
        test_docs = cgnn::synth_long_dep(n_test, args.synthetic_chain, args.vocab,
                                         args.cfg.seed + 2);
    } else {
        cgnn::Corpus all = cgnn::load_corpus(args.corpus);
        size_t n_dev = static_cast<size_t>(all.size() * args.dev_fraction);
        if (all.size() > 1 && n_dev == 0) {
            n_dev = 1;
        }
        for (size_t i = 0; i < all.size(); ++i) {
            (i + n_dev < all.size() ? train_docs : dev_docs).push_back(all[i]);
        }
        if (dev_docs.empty()) {
            dev_docs = train_docs;
        }
    }

    const cgnn::PreparedCorpus train_set = cgnn::prepare_corpus(train_docs, args.cfg, table);
    const cgnn::PreparedCorpus dev_set = cgnn::prepare_corpus(dev_docs, args.cfg, table);
    if (train_set.instances.empty()) {
        throw cgnn::ParseError(0, "corpus has no relation instances to train on");
    }

    cgnn::ModelConfig model_cfg;
    model_cfg.level_count = args.cfg.level_count;
    model_cfg.sublayers = args.cfg.sublayers;
    model_cfg.input_dim = train_set.input_dim;
    model_cfg.hidden_dim = args.cfg.hidden_dim;
    model_cfg.mean_pool = args.cfg.mean_pool;
    model_cfg.dropout = args.cfg.dropout;
    cgnn::MultiscaleGcn model(model_cfg);
    cgnn::PairScorer head(train_set.entity_count, args.cfg.hidden_dim, args.cfg.hidden_dim,
                          args.cfg.num_classes);
    model.init_parameters(args.cfg.seed);
    head.init_parameters(args.cfg.seed + 1);

    const cgnn::TrainResult result = cgnn::train(model, head, train_set, dev_set, args.cfg);

    fs::create_directories(args.out_dir);
    std::ostringstream curve;
    curve << "epoch,loss,dev_metric\n";
    for (const cgnn::EpochStat& stat : result.curve) {
        curve << stat.epoch << ',' << stat.mean_loss << ',' << stat.dev_accuracy << '\n';
    }
    cgnn::write_file((fs::path(args.out_dir) / "loss.csv").string(), curve.str());

    json metrics;
    metrics["best_epoch"] = result.best_epoch;
    metrics["train"] = metrics_to_json(
        cgnn::evaluate(model, head, train_set, args.cfg.num_classes).first);
    metrics["dev"] = metrics_to_json(result.dev_metrics);
    if (!test_docs.empty()) {
        const cgnn::PreparedCorpus test_set = cgnn::prepare_corpus(test_docs, args.cfg, table);
        metrics["test"] = metrics_to_json(
            cgnn::evaluate(model, head, test_set, args.cfg.num_classes).first);
    }
    cgnn::write_file((fs::path(args.out_dir) / "metrics.json").string(),
                     metrics.dump(2) + "\n");

    cgnn::CheckpointMeta meta;
    meta.model = model_cfg;
    meta.entity_count = train_set.entity_count;
    meta.num_classes = args.cfg.num_classes;
    meta.method = args.cfg.method;
    meta.seed = args.cfg.seed;
    cgnn::save_checkpoint((fs::path(args.out_dir) / "checkpoint.bin").string(), meta, model,
                          head);

    json config = {{"corpus", args.corpus},
                   {"synthetic", args.synthetic_chain},
                   {"instances", args.instances},
                   {"vocab", args.vocab},
                   {"method", args.method},
                   {"levels", args.cfg.level_count},
                   {"sublayers", args.cfg.sublayers},
                   {"hidden", args.cfg.hidden_dim},
                   {"epochs", args.cfg.epochs},
                   {"lr", args.cfg.lr},
                   {"lr_decay", args.cfg.lr_decay},
                   {"decay_after", args.cfg.decay_after},
                   {"dropout", args.cfg.dropout},
                   {"anonymize", args.cfg.anonymize},
                   {"mean_pool", args.cfg.mean_pool},
                   {"classes", args.cfg.num_classes},
                   {"embeddings", args.embeddings},
                   {"embed_dim", args.embed_dim},
                   {"dev_fraction", args.dev_fraction}};
    std::vector<std::string> inputs;
    if (!args.corpus.empty()) {
        inputs.push_back(args.corpus);
    }
    if (!args.embeddings.empty()) {
        inputs.push_back(args.embeddings);
    }
    write_manifest(args.out_dir, "train", config, args.cfg.seed, inputs);
    return kExitOk;
}

struct AnalyzeArgs {
    std::string corpus;
    std::string checkpoint;
    std::string out_dir;
    std::string embeddings;
    int embed_dim = 16;
    std::string bucket_by = "distance";
    std::vector<double> edges;
    int synthetic_chain = 0;
    int instances = 200;
    int vocab = 50;
    uint64_t seed = default_seed();
    bool anonymize = false;
    int jobs = 1;
};

int run_analyze(const AnalyzeArgs& args) {
    cgnn::LoadedCheckpoint loaded = cgnn::load_checkpoint(args.checkpoint);

    cgnn::Corpus corpus;
    if (args.synthetic_chain > 0) {
        corpus = cgnn::synth_long_dep(args.instances, args.synthetic_chain, args.vocab,
                                      args.seed);
    } else {
        corpus = cgnn::load_corpus(args.corpus);
    }

    cgnn::TrainConfig prep_cfg;
    prep_cfg.level_count = loaded.meta.model.level_count;
    prep_cfg.method = loaded.meta.method;
    prep_cfg.seed = loaded.meta.seed;
    prep_cfg.num_classes = loaded.meta.num_classes;
    prep_cfg.anonymize = args.anonymize;
    const cgnn::EmbeddingTable table = make_table(args.embeddings, args.embed_dim);
    const cgnn::PreparedCorpus prepared = cgnn::prepare_corpus(corpus, prep_cfg, table);
    if (prepared.input_dim != loaded.meta.model.input_dim) {
        throw cgnn::CheckpointError("checkpoint expects input width " +
                                    std::to_string(loaded.meta.model.input_dim) +
                                    " but corpus embeds to " +
                                    std::to_string(prepared.input_dim));
    }
    if (prepared.entity_count != loaded.meta.entity_count) {
        throw cgnn::CheckpointError("checkpoint scores " +
                                    std::to_string(loaded.meta.entity_count) +
                                    "-entity tuples but corpus has " +
                                    std::to_string(prepared.entity_count));
    }

    std::vector<cgnn::PredictionRecord> records(prepared.instances.size());
    cgnn::parallel_for(static_cast<int>(prepared.instances.size()), args.jobs, [&](int i) {
        const cgnn::PreparedInstance& pi = prepared.instances[i];
        const cgnn::Matrix logits = cgnn::score_instance(
            *loaded.model, *loaded.head, prepared.hierarchies[pi.doc_index], pi);
        records[i] = {pi.instance.label, cgnn::predict(logits), pi.entity_dist,
                      pi.input_length};
    });

    const cgnn::BucketKey key = args.bucket_by == "length" ? cgnn::BucketKey::InputLength
                                                           : cgnn::BucketKey::EntityDistance;
    const cgnn::DistanceReport report =
        cgnn::bucket_report(records, key, args.edges, loaded.meta.num_classes);

    fs::create_directories(args.out_dir);
    cgnn::write_file((fs::path(args.out_dir) / "report.json").string(),
                     cgnn::report_to_json(report));
    cgnn::write_file((fs::path(args.out_dir) / "report.csv").string(),
                     cgnn::report_to_csv(report));

    json config = {{"corpus", args.corpus},       {"checkpoint", args.checkpoint},
                   {"bucket_by", args.bucket_by}, {"edges", args.edges},
                   {"synthetic", args.synthetic_chain}, {"instances", args.instances},
                   {"vocab", args.vocab},         {"anonymize", args.anonymize},
                   {"embeddings", args.embeddings}, {"jobs", args.jobs}};
    std::vector<std::string> inputs{args.checkpoint};
    if (!args.corpus.empty()) {
        inputs.push_back(args.corpus);
    }
    if (!args.embeddings.empty()) {
        inputs.push_back(args.embeddings);
    }
    write_manifest(args.out_dir, "analyze", config, args.seed, inputs);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Document-graph coarsening and pooling-unpooling GCN toolkit"};
    app.require_subcommand(1);

    CoarsenArgs coarsen_args;
    CLI::App* coarsen = app.add_subcommand(
        "coarsen", "Coarsen document graphs and export DOT files per level");
    coarsen->add_option("input", coarsen_args.input, "CoNLL-U file or corpus directory")
        ->required();
    coarsen->add_option("--method", coarsen_args.method, "hm|cm|random|identity")
        ->check(CLI::IsMember({"hm", "cm", "random", "identity"}));
    coarsen->add_option("--levels", coarsen_args.levels, "pooling steps K")
        ->check(CLI::NonNegativeNumber);
    coarsen->add_option("--seed", coarsen_args.seed, "RNG seed (env COARSEN_GNN_SEED)");
    coarsen->add_option("--jobs", coarsen_args.jobs, "worker threads")
        ->check(CLI::PositiveNumber);
    coarsen->add_option("--out", coarsen_args.out_dir, "output directory")->required();

    TrainArgs train_args;
    train_args.cfg.seed = default_seed();
    CLI::App* train = app.add_subcommand("train", "Train the model and write a checkpoint");
    train->add_option("corpus", train_args.corpus, "corpus directory (omit for --synthetic)");
    train->add_option("--synthetic", train_args.synthetic_chain,
                      "generate a chain task of this length instead of reading a corpus");
    train->add_option("--instances", train_args.instances, "synthetic instance count");
    train->add_option("--vocab", train_args.vocab, "synthetic filler vocabulary size");
    train->add_option("--levels", train_args.cfg.level_count, "hierarchy levels L")
        ->check(CLI::PositiveNumber);
    train->add_option("--sublayers", train_args.cfg.sublayers, "convolutions per block S")
        ->check(CLI::PositiveNumber);
    train->add_option("--hidden", train_args.cfg.hidden_dim, "hidden width");
    train->add_option("--epochs", train_args.cfg.epochs, "training epochs")
        ->check(CLI::PositiveNumber);
    train->add_option("--lr", train_args.cfg.lr, "initial learning rate");
    train->add_option("--lr-decay", train_args.cfg.lr_decay, "per-epoch decay factor");
    train->add_option("--decay-after", train_args.cfg.decay_after,
                      "epochs at full lr before decay");
    train->add_option("--method", train_args.method, "hm|cm|random|identity")
        ->check(CLI::IsMember({"hm", "cm", "random", "identity"}));
    train->add_option("--seed", train_args.cfg.seed, "RNG seed (env COARSEN_GNN_SEED)");
    train->add_option("--dropout", train_args.cfg.dropout, "dropout rate after each block");
    train->add_flag("--anonymize", train_args.cfg.anonymize,
                    "replace mention tokens with entity placeholders");
    train->add_flag("--mean-pool", train_args.cfg.mean_pool,
                    "average member rows when pooling instead of summing");
    train->add_option("--classes", train_args.cfg.num_classes, "number of relation classes");
    train->add_option("--embeddings", train_args.embeddings, "word embedding text file")
        ->check(CLI::ExistingFile);
    train->add_option("--embed-dim", train_args.embed_dim,
                      "hash-embedding width when no file is given");
    train->add_option("--dev-fraction", train_args.dev_fraction,
                      "fraction of corpus documents held out for selection");
    train->add_option("--out", train_args.out_dir, "output directory")->required();

    AnalyzeArgs analyze_args;
    CLI::App* analyze = app.add_subcommand(
        "analyze", "Bucket checkpoint performance by entity distance or input length");
    analyze->add_option("corpus", analyze_args.corpus,
                        "corpus directory (omit for --synthetic)");
    analyze->add_option("--checkpoint", analyze_args.checkpoint, "trained checkpoint")
        ->required();
    analyze->add_option("--bucket-by", analyze_args.bucket_by, "distance|length")
        ->check(CLI::IsMember({"distance", "length"}));
    analyze->add_option("--edges", analyze_args.edges, "bucket edges, ascending")
        ->delimiter(',');
    analyze->add_option("--synthetic", analyze_args.synthetic_chain,
                        "generate a chain task of this length");
    analyze->add_option("--instances", analyze_args.instances, "synthetic instance count");
    analyze->add_option("--vocab", analyze_args.vocab, "synthetic filler vocabulary size");
    analyze->add_option("--seed", analyze_args.seed, "RNG seed (env COARSEN_GNN_SEED)");
    analyze->add_flag("--anonymize", analyze_args.anonymize,
                      "replace mention tokens with entity placeholders");
    analyze->add_option("--embeddings", analyze_args.embeddings, "word embedding text file")
        ->check(CLI::ExistingFile);
    analyze->add_option("--embed-dim", analyze_args.embed_dim,
                        "hash-embedding width when no file is given");
    analyze->add_option("--jobs", analyze_args.jobs, "worker threads")
        ->check(CLI::PositiveNumber);
    analyze->add_option("--out", analyze_args.out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (coarsen->parsed()) {
            return run_coarsen(coarsen_args);
        }
        if (train->parsed()) {
            if (train_args.corpus.empty() && train_args.synthetic_chain <= 0) {
                std::cerr << "train: provide a corpus directory or --synthetic CHAIN_LEN\n"
                          << train->help();
                return kExitUsage;
            }
            return run_train(train_args);
        }
        if (analyze->parsed()) {
            if (analyze_args.corpus.empty() && analyze_args.synthetic_chain <= 0) {
                std::cerr << "analyze: provide a corpus directory or --synthetic CHAIN_LEN\n"
                          << analyze->help();
                return kExitUsage;
            }
            return run_analyze(analyze_args);
        }
    } catch (const cgnn::ParseError& e) {
        std::cerr << "input parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const cgnn::TrainingDiverged& e) {
        std::cerr << "training diverged: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const cgnn::CheckpointError& e) {
        std::cerr << "checkpoint error: " << e.what() << "\n";
        return kExitArtifact;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
