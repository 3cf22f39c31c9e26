#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fedtab/table.hpp"

namespace fedtab {

// Column-major dataset with named features and an optional label column.
struct Dataset {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;
    std::vector<double> labels;
    std::string label_name;

    std::size_t rows() const { return columns.empty() ? labels.size() : columns[0].size(); }
    std::size_t features() const { return columns.size(); }
};

Dataset read_csv(const std::string& path, const std::string& label_column = "");
void write_csv(const std::string& path, const Dataset& ds, bool include_label);

// Round-robin assignment of feature indices to parties: column j goes to
// party (j mod n) + 1.
std::vector<std::vector<int>> partition_columns(int total_features, int parties);

struct RowSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};
RowSplit split_rows(std::size_t rows, double train_fraction, std::uint64_t seed);

Dataset select_rows(const Dataset& ds, const std::vector<std::size_t>& idx);
Dataset select_columns(const Dataset& ds, const std::vector<int>& idx, bool keep_labels);

// Seeded linear-model-plus-noise generator; classification thresholds the
// noisy logit at zero.
Dataset gen_synthetic(std::size_t samples, int features, int informative, Task task,
                      double noise, std::uint64_t seed);

// Affine map of regression targets into [-1, 1]; the inverse is applied to
// revealed predictions.
struct LabelScaler {
    double offset = 0.0;
    double scale = 1.0;

    static LabelScaler fit_unit_range(const std::vector<double>& y);
    std::vector<double> apply(const std::vector<double>& y) const;
    std::vector<double> invert(const std::vector<double>& y) const;
};

}  // namespace fedtab
