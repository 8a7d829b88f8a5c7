#pragma once

#include <optional>
#include <vector>

namespace cgnn {

/// Confusion-matrix-derived scores. Zero-denominator precision/recall/F1
/// are reported as 0.
struct Metrics {
    int total = 0;
    double accuracy = 0.0;
    std::vector<double> precision;  // per class
    std::vector<double> recall;
    std::vector<double> f1;
    double positive_f1 = 0.0;  // F1 of class 1 for binary tasks
    std::vector<std::vector<int>> confusion;  // [gold][predicted]
};

Metrics metrics_from_predictions(const std::vector<int>& gold, const std::vector<int>& predicted,
                                 int num_classes);

/// One evaluated instance, with the keys the analysis buckets on.
struct PredictionRecord {
    int gold = 0;
    int predicted = 0;
    std::optional<double> entity_distance;  // nullopt = unreachable
    int input_length = 0;                   // tokens in the document
};

}  // namespace cgnn
