#pragma once

#include <vector>

#include "fedtab/table.hpp"

namespace fedtab::plain {

// Centralized floating-point reference. It mirrors every convention of the
// secure path (bucket remainder rule, threshold index, strict less-than,
// first-index tie-breaks, leaf-bit order) so that disagreements between the
// two paths indicate bugs rather than convention drift.
struct PlainTable {
    int dimension = 0;
    std::vector<int> features;
    std::vector<double> thresholds;
    std::vector<double> weights;  // 2^D
};

struct LevelDecision {
    int feature = 0;
    std::size_t bucket = 0;
    // gap between the best and second-best candidate scores at this level,
    // pooled over all (feature, bucket) pairs
    double margin = 0.0;
};

struct PlainTableResult {
    PlainTable table;
    std::vector<LevelDecision> decisions;
};

// columns: global-feature-major, each of length N
PlainTableResult train_plain_table(const std::vector<std::vector<double>>& columns,
                                   const std::vector<double>& g, const std::vector<double>& h,
                                   const BoostHyper& hyper);

std::vector<PlainTable> train_plain_ensemble(const std::vector<std::vector<double>>& columns,
                                             const std::vector<double>& labels,
                                             const BoostHyper& hyper);

double infer_plain(const PlainTable& table, const std::vector<std::vector<double>>& columns,
                   std::size_t row);
std::vector<double> infer_plain_vec(const PlainTable& table,
                                    const std::vector<std::vector<double>>& columns);
std::vector<double> predict_plain(const std::vector<PlainTable>& ensemble,
                                  const std::vector<std::vector<double>>& columns);

double sigmoid(double x);

}  // namespace fedtab::plain
