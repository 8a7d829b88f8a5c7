#include "cgnn/metrics.hpp"

#include <stdexcept>

namespace cgnn {

Metrics metrics_from_predictions(const std::vector<int>& gold, const std::vector<int>& predicted,
                                 int num_classes) {
    if (gold.size() != predicted.size()) {
        throw std::invalid_argument("metrics_from_predictions: size mismatch");
    }
    Metrics m;
    m.total = static_cast<int>(gold.size());
    m.confusion.assign(num_classes, std::vector<int>(num_classes, 0));
    int correct = 0;
    for (size_t i = 0; i < gold.size(); ++i) {
        if (gold[i] < 0 || gold[i] >= num_classes || predicted[i] < 0 ||
            predicted[i] >= num_classes) {
            throw std::invalid_argument("metrics_from_predictions: label out of range");
        }
        m.confusion[gold[i]][predicted[i]] += 1;
        if (gold[i] == predicted[i]) {
            ++correct;
        }
    }
    m.accuracy = m.total == 0 ? 0.0 : static_cast<double>(correct) / m.total;
    m.precision.assign(num_classes, 0.0);
    m.recall.assign(num_classes, 0.0);
    m.f1.assign(num_classes, 0.0);
    for (int c = 0; c < num_classes; ++c) {
        int predicted_c = 0, gold_c = 0;
        for (int other = 0; other < num_classes; ++other) {
            predicted_c += m.confusion[other][c];
            gold_c += m.confusion[c][other];
        }
        const int tp = m.confusion[c][c];
        m.precision[c] = predicted_c == 0 ? 0.0 : static_cast<double>(tp) / predicted_c;
        m.recall[c] = gold_c == 0 ? 0.0 : static_cast<double>(tp) / gold_c;
        const double pr = m.precision[c] + m.recall[c];
        m.f1[c] = pr == 0.0 ? 0.0 : 2.0 * m.precision[c] * m.recall[c] / pr;
    }
    m.positive_f1 = num_classes >= 2 ? m.f1[1] : m.f1[0];
    return m;
}

}  // namespace cgnn
