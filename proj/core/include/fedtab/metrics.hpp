#pragma once

#include <optional>
#include <vector>

#include "fedtab/table.hpp"

namespace fedtab {

struct Metrics {
    std::optional<double> rmse;
    std::optional<double> acc;
    std::optional<double> auc;
};

double rmse(const std::vector<double>& predictions, const std::vector<double>& labels);

// decision rule: score >= 0 -> class 1 (equivalent to sigmoid(score) >= 0.5)
double accuracy(const std::vector<double>& scores, const std::vector<double>& labels);

// Mann-Whitney rank statistic; ties credited 0.5
double auc(const std::vector<double>& scores, const std::vector<double>& labels);

Metrics evaluate_predictions(const std::vector<double>& predictions,
                             const std::vector<double>& labels, Task task);

}  // namespace fedtab
