#include "fedtab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fedtab/errors.hpp"
#include "fedtab/permute.hpp"

namespace fedtab::plain {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

PlainTableResult train_plain_table(const std::vector<std::vector<double>>& columns,
                                   const std::vector<double>& g, const std::vector<double>& h,
                                   const BoostHyper& hyper) {
    const std::size_t N = g.size();
    const std::size_t B = static_cast<std::size_t>(hyper.buckets);
    const std::size_t C = B - 1;
    const std::size_t M = N / B;
    if (B < 2 || B > N) throw ConfigError("train_plain_table: invalid bucket count");
    if (h.size() != N) throw ShapeError("train_plain_table: gradient length mismatch");

    std::vector<std::vector<double>> node_g{g};
    std::vector<std::vector<double>> node_h{h};

    PlainTableResult out;
    out.table.dimension = hyper.depth;
    for (int d = 0; d < hyper.depth; ++d) {
        double best = std::numeric_limits<double>::infinity();
        double second = std::numeric_limits<double>::infinity();
        int best_j = 0;
        std::size_t best_q = 0;
        for (std::size_t j = 0; j < columns.size(); ++j) {
            Permutation pi = stable_sort_permutation(columns[j]);
            std::vector<double> delta(C, 0.0);
            for (std::size_t k = 0; k < node_g.size(); ++k) {
                std::vector<double> gp = apply_permutation(pi, node_g[k]);
                std::vector<double> hp = apply_permutation(pi, node_h[k]);
                std::vector<double> alpha(B, 0.0), beta(B, 0.0);
                for (std::size_t b = 0; b < B; ++b) {
                    const std::size_t lo = b * M;
                    const std::size_t hi = (b + 1 == B) ? N : (b + 1) * M;
                    for (std::size_t i = lo; i < hi; ++i) {
                        alpha[b] += gp[i];
                        beta[b] += hp[i];
                    }
                }
                double g_total = 0, h_total = 0;
                for (std::size_t b = 0; b < B; ++b) {
                    g_total += alpha[b];
                    h_total += beta[b];
                }
                double gl = 0, hl = 0;
                for (std::size_t c = 0; c < C; ++c) {
                    gl += alpha[c];
                    hl += beta[c];
                    const double gr = g_total - gl;
                    const double hr = h_total - hl;
                    delta[c] += -0.5 * gl * gl / (hl + hyper.lambda) -
                                0.5 * gr * gr / (hr + hyper.lambda);
                }
            }
            for (std::size_t c = 0; c < C; ++c) {
                if (delta[c] < best) {
                    second = best;
                    best = delta[c];
                    best_j = static_cast<int>(j);
                    best_q = c;
                } else if (delta[c] < second) {
                    second = delta[c];
                }
            }
        }
        std::vector<double> sorted = columns[static_cast<std::size_t>(best_j)];
        std::stable_sort(sorted.begin(), sorted.end());
        const double t = sorted[(best_q + 1) * M];
        out.table.features.push_back(best_j);
        out.table.thresholds.push_back(t);
        out.decisions.push_back({best_j, best_q, second - best});

        std::vector<std::vector<double>> ng, nh;
        ng.reserve(2 * node_g.size());
        nh.reserve(2 * node_h.size());
        const auto& col = columns[static_cast<std::size_t>(best_j)];
        for (std::size_t k = 0; k < node_g.size(); ++k) {
            std::vector<double> gl(N, 0.0), gr(N, 0.0), hl(N, 0.0), hr(N, 0.0);
            for (std::size_t i = 0; i < N; ++i) {
                if (col[i] < t) {
                    gl[i] = node_g[k][i];
                    hl[i] = node_h[k][i];
                } else {
                    gr[i] = node_g[k][i];
                    hr[i] = node_h[k][i];
                }
            }
            ng.push_back(std::move(gl));
            ng.push_back(std::move(gr));
            nh.push_back(std::move(hl));
            nh.push_back(std::move(hr));
        }
        node_g = std::move(ng);
        node_h = std::move(nh);
    }

    out.table.weights.resize(node_g.size());
    for (std::size_t k = 0; k < node_g.size(); ++k) {
        double gs = 0, hs = 0;
        for (double v : node_g[k]) gs += v;
        for (double v : node_h[k]) hs += v;
        out.table.weights[k] = -gs / (hs + hyper.lambda);
    }
    return out;
}

std::vector<PlainTable> train_plain_ensemble(const std::vector<std::vector<double>>& columns,
                                             const std::vector<double>& labels,
                                             const BoostHyper& hyper) {
    const std::size_t N = labels.size();
    std::vector<double> yhat(N, 0.0);
    std::vector<PlainTable> out;
    out.reserve(static_cast<std::size_t>(hyper.trees));
    for (int t = 0; t < hyper.trees; ++t) {
        std::vector<double> g(N), h(N);
        if (hyper.task == Task::Regression) {
            for (std::size_t i = 0; i < N; ++i) {
                g[i] = yhat[i] - labels[i];
                h[i] = 1.0;
            }
        } else {
            for (std::size_t i = 0; i < N; ++i) {
                const double p = sigmoid(yhat[i]);
                g[i] = p - labels[i];
                h[i] = p * (1.0 - p);
            }
        }
        PlainTable table = train_plain_table(columns, g, h, hyper).table;
        if (hyper.shrinkage != 1.0) {
            for (auto& w : table.weights) w *= hyper.shrinkage;
        }
        std::vector<double> scores = infer_plain_vec(table, columns);
        for (std::size_t i = 0; i < N; ++i) yhat[i] += scores[i];
        out.push_back(std::move(table));
    }
    return out;
}

double infer_plain(const PlainTable& table, const std::vector<std::vector<double>>& columns,
                   std::size_t row) {
    std::size_t leaf = 0;
    const int D = table.dimension;
    for (int d = 0; d < D; ++d) {
        const double x = columns[static_cast<std::size_t>(table.features[static_cast<std::size_t>(d)])][row];
        const std::size_t bit = x < table.thresholds[static_cast<std::size_t>(d)] ? 0 : 1;
        leaf |= bit << (static_cast<std::size_t>(D) - 1 - static_cast<std::size_t>(d));
    }
    return table.weights[leaf];
}

std::vector<double> infer_plain_vec(const PlainTable& table,
                                    const std::vector<std::vector<double>>& columns) {
    const std::size_t N = columns.empty() ? 0 : columns[0].size();
    std::vector<double> out(N);
    for (std::size_t i = 0; i < N; ++i) out[i] = infer_plain(table, columns, i);
    return out;
}

std::vector<double> predict_plain(const std::vector<PlainTable>& ensemble,
                                  const std::vector<std::vector<double>>& columns) {
    const std::size_t N = columns.empty() ? 0 : columns[0].size();
    std::vector<double> out(N, 0.0);
    for (const auto& table : ensemble) {
        for (std::size_t i = 0; i < N; ++i) out[i] += infer_plain(table, columns, i);
    }
    return out;
}

}  // namespace fedtab::plain
