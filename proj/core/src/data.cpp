#include "fedtab/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "fedtab/errors.hpp"
#include "fedtab/prng.hpp"

namespace fedtab {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(line);
    while (std::getline(ss, cur, ',')) out.push_back(cur);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

Dataset read_csv(const std::string& path, const std::string& label_column) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty csv: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    Dataset ds;
    std::vector<std::string> header = split_line(line);
    int label_idx = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (!label_column.empty() && header[i] == label_column) {
            label_idx = static_cast<int>(i);
            ds.label_name = label_column;
        } else {
            ds.names.push_back(header[i]);
        }
    }
    if (!label_column.empty() && label_idx < 0)
        throw InputError("label column '" + label_column + "' not found in " + path);
    ds.columns.resize(ds.names.size());

    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size())
            throw InputError("csv row " + std::to_string(row + 2) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(header.size()));
        std::size_t c = 0;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            double v;
            try {
                v = std::stod(cells[i]);
            } catch (const std::exception&) {
                throw InputError("csv cell is not numeric: '" + cells[i] + "'");
            }
            if (static_cast<int>(i) == label_idx) {
                ds.labels.push_back(v);
            } else {
                ds.columns[c++].push_back(v);
            }
        }
        ++row;
    }
    return ds;
}

void write_csv(const std::string& path, const Dataset& ds, bool include_label) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    bool first = true;
    for (const auto& name : ds.names) {
        if (!first) out << ',';
        out << name;
        first = false;
    }
    if (include_label && !ds.labels.empty()) {
        if (!first) out << ',';
        out << (ds.label_name.empty() ? "label" : ds.label_name);
    }
    out << '\n';

    char buf[64];
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        first = true;
        for (const auto& col : ds.columns) {
            if (!first) out << ',';
            std::snprintf(buf, sizeof(buf), "%.10g", col[i]);
            out << buf;
            first = false;
        }
        if (include_label && !ds.labels.empty()) {
            if (!first) out << ',';
            std::snprintf(buf, sizeof(buf), "%.10g", ds.labels[i]);
            out << buf;
        }
        out << '\n';
    }
}

std::vector<std::vector<int>> partition_columns(int total_features, int parties) {
    if (parties < 1) throw ConfigError("partition_columns: need at least one party");
    std::vector<std::vector<int>> out(static_cast<std::size_t>(parties));
    for (int j = 0; j < total_features; ++j) {
        out[static_cast<std::size_t>(j % parties)].push_back(j);
    }
    return out;
}

RowSplit split_rows(std::size_t rows, double train_fraction, std::uint64_t seed) {
    if (train_fraction <= 0.0 || train_fraction >= 1.0)
        throw ConfigError("train fraction must lie strictly between 0 and 1");
    std::vector<std::size_t> idx(rows);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Prng rng = Prng(seed).derive(0x511744);
    for (std::size_t i = rows; i > 1; --i) {  // Fisher-Yates
        std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(idx[i - 1], idx[j]);
    }
    const std::size_t ntrain = static_cast<std::size_t>(
        std::floor(static_cast<double>(rows) * train_fraction));
    RowSplit out;
    out.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(ntrain));
    out.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(ntrain), idx.end());
    return out;
}

Dataset select_rows(const Dataset& ds, const std::vector<std::size_t>& idx) {
    Dataset out;
    out.names = ds.names;
    out.label_name = ds.label_name;
    out.columns.resize(ds.columns.size());
    for (std::size_t c = 0; c < ds.columns.size(); ++c) {
        out.columns[c].reserve(idx.size());
        for (std::size_t i : idx) out.columns[c].push_back(ds.columns[c][i]);
    }
    if (!ds.labels.empty()) {
        out.labels.reserve(idx.size());
        for (std::size_t i : idx) out.labels.push_back(ds.labels[i]);
    }
    return out;
}

Dataset select_columns(const Dataset& ds, const std::vector<int>& idx, bool keep_labels) {
    Dataset out;
    out.label_name = ds.label_name;
    for (int c : idx) {
        out.names.push_back(ds.names[static_cast<std::size_t>(c)]);
        out.columns.push_back(ds.columns[static_cast<std::size_t>(c)]);
    }
    if (keep_labels) out.labels = ds.labels;
    return out;
}

Dataset gen_synthetic(std::size_t samples, int features, int informative, Task task,
                      double noise, std::uint64_t seed) {
    if (samples < 1 || features < 1) throw ConfigError("gen_synthetic: sizes must be >= 1");
    if (informative < 1 || informative > features) informative = features;

    Prng rng = Prng(seed).derive(0x5e11);
    std::vector<double> w(static_cast<std::size_t>(informative));
    for (auto& v : w) v = rng.next_normal();

    Dataset ds;
    ds.columns.assign(static_cast<std::size_t>(features), {});
    for (int j = 0; j < features; ++j) {
        ds.names.push_back("f" + std::to_string(j));
        ds.columns[static_cast<std::size_t>(j)].resize(samples);
    }
    ds.label_name = "target";
    ds.labels.resize(samples);

    for (std::size_t i = 0; i < samples; ++i) {
        double score = 0;
        for (int j = 0; j < features; ++j) {
            const double x = rng.next_normal();
            ds.columns[static_cast<std::size_t>(j)][i] = x;
            if (j < informative) score += w[static_cast<std::size_t>(j)] * x;
        }
        score += noise * rng.next_normal();
        if (task == Task::Regression) {
            ds.labels[i] = score;
        } else {
            ds.labels[i] = score >= 0 ? 1.0 : 0.0;
        }
    }
    return ds;
}

LabelScaler LabelScaler::fit_unit_range(const std::vector<double>& y) {
    if (y.empty()) throw InputError("cannot fit scaler to empty labels");
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    LabelScaler s;
    s.offset = (*hi + *lo) / 2.0;
    s.scale = (*hi - *lo) / 2.0;
    if (s.scale == 0.0) s.scale = 1.0;
    return s;
}

std::vector<double> LabelScaler::apply(const std::vector<double>& y) const {
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = (y[i] - offset) / scale;
    return out;
}

std::vector<double> LabelScaler::invert(const std::vector<double>& y) const {
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] * scale + offset;
    return out;
}

}  // namespace fedtab
