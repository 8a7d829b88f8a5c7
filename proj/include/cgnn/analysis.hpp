#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cgnn/document_graph.hpp"
#include "cgnn/hierarchy.hpp"
#include "cgnn/metrics.hpp"

namespace cgnn {

/// Mean shortest-path distance over all (token in a, token in b) pairs;
/// nullopt when any pair is disconnected.
std::optional<double> mention_pair_distance(const AdjacencyMatrix& a, const MentionSpan& span_a,
                                            const MentionSpan& span_b);

/// For every unordered cluster pair, the minimum mention-pair distance over
/// mention combinations; then the maximum over cluster pairs. Unreachable
/// propagates.
std::optional<double> entity_distance(const AdjacencyMatrix& a,
                                      const std::vector<EntityCluster>& clusters);

struct CorpusEntry {
    Document doc;
    DocumentGraph graph;
    std::vector<RelationInstance> instances;
};
using Corpus = std::vector<CorpusEntry>;

/// Mean node count at each level (K+1 values) over the corpus.
std::vector<double> coarsening_stats(const Corpus& corpus, PoolMethod method, int steps,
                                     const ClauseMatchConfig& cfg = {}, uint64_t seed = 0);

enum class BucketKey { EntityDistance, InputLength };

struct BucketStats {
    double lo = 0.0;  // inclusive; -inf for the first bucket
    double hi = 0.0;  // exclusive; +inf for the last bucket
    int count = 0;
    std::optional<Metrics> metrics;  // nullopt marks an empty bucket
};

struct DistanceReport {
    BucketKey key = BucketKey::EntityDistance;
    std::vector<double> edges;
    std::vector<BucketStats> buckets;
    BucketStats unreachable;  // instances with no connecting path
    int num_classes = 2;
};

/// Buckets the records by the chosen key into the half-open intervals cut
/// at `edges` (strictly increasing; empty = one bucket covering
/// everything). Unreachable entity distances are reported separately.
DistanceReport bucket_report(const std::vector<PredictionRecord>& records, BucketKey key,
                             const std::vector<double>& edges, int num_classes);

std::string report_to_json(const DistanceReport& report);
std::string report_to_csv(const DistanceReport& report);

}  // namespace cgnn
