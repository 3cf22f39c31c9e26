#include "fedtab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fedtab/errors.hpp"

namespace fedtab {

double rmse(const std::vector<double>& predictions, const std::vector<double>& labels) {
    if (predictions.size() != labels.size() || predictions.empty())
        throw ShapeError("rmse: length mismatch");
    double acc = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double d = predictions[i] - labels[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(predictions.size()));
}

double accuracy(const std::vector<double>& scores, const std::vector<double>& labels) {
    if (scores.size() != labels.size() || scores.empty())
        throw ShapeError("accuracy: length mismatch");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double cls = scores[i] >= 0.0 ? 1.0 : 0.0;
        if (cls == labels[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(scores.size());
}

double auc(const std::vector<double>& scores, const std::vector<double>& labels) {
    if (scores.size() != labels.size() || scores.empty()) throw ShapeError("auc: length mismatch");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&scores](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // average ranks over tie groups (1-based)
    std::vector<double> rank(scores.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
        i = j + 1;
    }

    double pos = 0, rank_sum = 0;
    for (std::size_t k = 0; k < labels.size(); ++k) {
        if (labels[k] == 1.0) {
            pos += 1;
            rank_sum += rank[k];
        }
    }
    const double neg = static_cast<double>(labels.size()) - pos;
    if (pos == 0 || neg == 0) throw InputError("auc: needs both classes present");
    return (rank_sum - pos * (pos + 1) / 2.0) / (pos * neg);
}

Metrics evaluate_predictions(const std::vector<double>& predictions,
                             const std::vector<double>& labels, Task task) {
    Metrics m;
    if (task == Task::Regression) {
        m.rmse = rmse(predictions, labels);
    } else {
        m.acc = accuracy(predictions, labels);
        m.auc = auc(predictions, labels);
    }
    return m;
}

}  // namespace fedtab
