#include "cgnn/analysis.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cgnn {

std::optional<double> mention_pair_distance(const AdjacencyMatrix& a, const MentionSpan& span_a,
                                            const MentionSpan& span_b) {
    if (span_a.length() <= 0 || span_b.length() <= 0) {
        throw std::invalid_argument("mention_pair_distance: empty span");
    }
    double sum = 0.0;
    int pairs = 0;
    for (int u = span_a.start; u < span_a.end; ++u) {
        const std::vector<std::optional<int>> dist = bfs_distances(a, u);
        for (int v = span_b.start; v < span_b.end; ++v) {
            if (!dist[v]) {
                return std::nullopt;
            }
            sum += *dist[v];
            ++pairs;
        }
    }
    return sum / pairs;
}

std::optional<double> entity_distance(const AdjacencyMatrix& a,
                                      const std::vector<EntityCluster>& clusters) {
    if (clusters.size() < 2) {
        throw std::invalid_argument("entity_distance: need at least two clusters");
    }
    double max_over_pairs = 0.0;
    for (size_t i = 0; i < clusters.size(); ++i) {
        for (size_t j = i + 1; j < clusters.size(); ++j) {
            // Minimum over mention combinations = the closest mention pair
            // of the two entities.
            std::optional<double> closest;
            for (const MentionSpan& ma : clusters[i].mentions) {
                for (const MentionSpan& mb : clusters[j].mentions) {
                    const std::optional<double> d = mention_pair_distance(a, ma, mb);
                    if (d && (!closest || *d < *closest)) {
                        closest = d;
                    }
                }
            }
            if (!closest) {
                return std::nullopt;
            }
            max_over_pairs = std::max(max_over_pairs, *closest);
        }
    }
    return max_over_pairs;
}

std::vector<double> coarsening_stats(const Corpus& corpus, PoolMethod method, int steps,
                                     const ClauseMatchConfig& cfg, uint64_t seed) {
    std::vector<double> means(steps + 1, 0.0);
    if (corpus.empty()) {
        return means;
    }
    for (const CorpusEntry& entry : corpus) {
        const GraphHierarchy h = build_hierarchy(entry.graph, method, steps, cfg, seed);
        for (int l = 0; l <= steps; ++l) {
            means[l] += h.level_size(l);
        }
    }
    for (double& m : means) {
        m /= static_cast<double>(corpus.size());
    }
    return means;
}

DistanceReport bucket_report(const std::vector<PredictionRecord>& records, BucketKey key,
                             const std::vector<double>& edges, int num_classes) {
    for (size_t i = 1; i < edges.size(); ++i) {
        if (edges[i] <= edges[i - 1]) {
            throw std::invalid_argument("bucket_report: edges must be strictly increasing");
        }
    }
    DistanceReport report;
    report.key = key;
    report.edges = edges;
    report.num_classes = num_classes;

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::pair<std::vector<int>, std::vector<int>>> bucket_preds(edges.size() + 1);
    std::pair<std::vector<int>, std::vector<int>> unreachable_preds;

    for (const PredictionRecord& r : records) {
        std::optional<double> value;
        if (key == BucketKey::InputLength) {
            value = static_cast<double>(r.input_length);
        } else {
            value = r.entity_distance;
        }
        if (!value) {
            unreachable_preds.first.push_back(r.gold);
            unreachable_preds.second.push_back(r.predicted);
            continue;
        }
        const size_t b = std::upper_bound(edges.begin(), edges.end(), *value) - edges.begin();
        bucket_preds[b].first.push_back(r.gold);
        bucket_preds[b].second.push_back(r.predicted);
    }

    for (size_t b = 0; b <= edges.size(); ++b) {
        BucketStats stats;
        stats.lo = b == 0 ? -inf : edges[b - 1];
        stats.hi = b == edges.size() ? inf : edges[b];
        stats.count = static_cast<int>(bucket_preds[b].first.size());
        if (stats.count > 0) {
            stats.metrics = metrics_from_predictions(bucket_preds[b].first,
                                                     bucket_preds[b].second, num_classes);
        }
        report.buckets.push_back(std::move(stats));
    }
    report.unreachable.lo = report.unreachable.hi =
        std::numeric_limits<double>::quiet_NaN();
    report.unreachable.count = static_cast<int>(unreachable_preds.first.size());
    if (report.unreachable.count > 0) {
        report.unreachable.metrics = metrics_from_predictions(unreachable_preds.first,
                                                              unreachable_preds.second,
                                                              num_classes);
    }
    return report;
}

namespace {

nlohmann::json metrics_to_json(const Metrics& m) {
    return {
        {"total", m.total},         {"accuracy", m.accuracy},
        {"precision", m.precision}, {"recall", m.recall},
        {"f1", m.f1},               {"positive_f1", m.positive_f1},
        {"confusion", m.confusion},
    };
}

nlohmann::json bucket_to_json(const BucketStats& b) {
    nlohmann::json j;
    j["lo"] = std::isfinite(b.lo) ? nlohmann::json(b.lo) : nlohmann::json(nullptr);
    j["hi"] = std::isfinite(b.hi) ? nlohmann::json(b.hi) : nlohmann::json(nullptr);
    j["count"] = b.count;
    j["metrics"] = b.metrics ? metrics_to_json(*b.metrics) : nlohmann::json(nullptr);
    return j;
}

std::string format_bound(double v) {
    if (std::isnan(v)) {
        return "";
    }
    if (std::isinf(v)) {
        return v < 0 ? "-inf" : "inf";
    }
    std::ostringstream out;
    out << v;
    return out.str();
}

}  // namespace

std::string report_to_json(const DistanceReport& report) {
    nlohmann::json j;
    j["key"] = report.key == BucketKey::EntityDistance ? "entity_distance" : "input_length";
    j["edges"] = report.edges;
    j["num_classes"] = report.num_classes;
    j["buckets"] = nlohmann::json::array();
    for (const BucketStats& b : report.buckets) {
        j["buckets"].push_back(bucket_to_json(b));
    }
    j["unreachable"] = bucket_to_json(report.unreachable);
    return j.dump(2) + "\n";
}

std::string report_to_csv(const DistanceReport& report) {
    std::ostringstream out;
    out << "bucket_lo,bucket_hi,count,accuracy,positive_f1\n";
    auto row = [&out](const std::string& lo, const std::string& hi, const BucketStats& b) {
        out << lo << ',' << hi << ',' << b.count << ',';
        if (b.metrics) {
            out << b.metrics->accuracy << ',' << b.metrics->positive_f1;
        } else {
            out << ',';
        }
        out << '\n';
    };
    for (const BucketStats& b : report.buckets) {
        row(format_bound(b.lo), format_bound(b.hi), b);
    }
    if (report.unreachable.count > 0) {
        row("unreachable", "unreachable", report.unreachable);
    }
    return out.str();
}

}  // namespace cgnn
