#include "fedtab/table.hpp"

#include <algorithm>
#include <cmath>

#include "fedtab/errors.hpp"

namespace fedtab {

namespace {
constexpr std::uint64_t kTagGradients = 0x11;
constexpr std::uint64_t kTagLevel = 0x12;
constexpr std::uint64_t kTagFeature = 0x13;
constexpr std::uint64_t kTagNode = 0x14;
constexpr std::uint64_t kTagFeatureArgmin = 0x15;
constexpr std::uint64_t kTagLevelArgmin = 0x16;
constexpr std::uint64_t kTagSplit = 0x17;
constexpr std::uint64_t kTagLeaves = 0x18;
constexpr std::uint64_t kTagInferLevel = 0x19;
}  // namespace

Task task_from_name(const std::string& name) {
    if (name == "regression") return Task::Regression;
    if (name == "classification") return Task::Classification;
    throw ConfigError("unknown task: " + name);
}

const char* task_name(Task t) {
    return t == Task::Regression ? "regression" : "classification";
}

const std::vector<double>& PartyDataView::column(int feature) const {
    auto it = local.find(feature);
    if (it == local.end()) throw ShapeError("column not held by this party");
    return it->second;
}

std::pair<SharedVector, SharedVector> compute_gradients(Engine& eng, const SharedVector& y,
                                                        const SharedVector& yhat, Task task,
                                                        const ApproxConfig& cfg) {
    if (y.size() != yhat.size()) throw ShapeError("compute_gradients: length mismatch");
    if (task == Task::Regression) {
        SharedVector g = eng.sub(yhat, y);
        std::vector<double> ones(y.size(), 1.0);
        SharedVector h = eng.public_fp(ones);
        return {g, h};
    }
    Engine sig = eng.child(kTagGradients);
    SharedVector p = secure_sigmoid(sig, yhat, cfg);
    SharedVector g = sig.sub(p, y);
    SharedVector one_minus_p = sig.neg(p);
    sig.add_public(one_minus_p, fp_encode(1.0, sig.fp()));
    SharedVector h = sig.mul_trunc(p, one_minus_p);
    return {g, h};
}

LevelGradients split_nodes(Engine& eng, const PartyDataView& view, const LevelChoice& choice,
                           const LevelGradients& lg) {
    const std::size_t N = view.rows;
    const bool owner = eng.me() == choice.owner;

    std::vector<ring_t> vl, vr;
    if (owner) {
        if (!choice.threshold) throw ProtocolError("split owner is missing the threshold");
        const auto& col = view.column(choice.feature);
        vl.resize(N);
        vr.resize(N);
        for (std::size_t i = 0; i < N; ++i) {
            vl[i] = col[i] < *choice.threshold ? 1 : 0;
            vr[i] = 1 - vl[i];
        }
    }
    SharedVector vl_sh = eng.share_from(choice.owner, vl, N, false);
    SharedVector vr_sh = eng.share_from(choice.owner, vr, N, false);

    // one batched multiplication round for all 4 * 2^d child updates
    SharedVector lhs = eng.zeros(0, false);
    SharedVector rhs = eng.zeros(0, true);
    for (std::size_t k = 0; k < lg.nodes(); ++k) {
        lhs = sv_concat(sv_concat(lhs, vl_sh), vl_sh);
        lhs = sv_concat(sv_concat(lhs, vr_sh), vr_sh);
        rhs = sv_concat(sv_concat(rhs, lg.g[k]), lg.h[k]);
        rhs = sv_concat(sv_concat(rhs, lg.g[k]), lg.h[k]);
    }
    SharedVector prod = eng.mul(lhs, rhs);

    LevelGradients out;
    out.g.resize(2 * lg.nodes());
    out.h.resize(2 * lg.nodes());
    for (std::size_t k = 0; k < lg.nodes(); ++k) {
        const std::size_t base = 4 * k * N;
        out.g[2 * k] = sv_slice(prod, base, N);
        out.h[2 * k] = sv_slice(prod, base + N, N);
        out.g[2 * k + 1] = sv_slice(prod, base + 2 * N, N);
        out.h[2 * k + 1] = sv_slice(prod, base + 3 * N, N);
        out.g[2 * k].scaled = out.h[2 * k].scaled = true;
        out.g[2 * k + 1].scaled = out.h[2 * k + 1].scaled = true;
    }
    return out;
}

LevelChoice find_level_split(Engine& eng, const PartyDataView& view, const LevelGradients& lg,
                             const BoostHyper& hyper, const ApproxConfig& cfg) {
    const std::size_t N = view.rows;
    const std::size_t B = static_cast<std::size_t>(hyper.buckets);
    if (B < 2) throw ConfigError("find_level_split: need at least 2 buckets");
    const std::size_t C = B - 1;  // candidate boundaries
    const std::size_t M = N / B;
    const int J = view.total_features;

    ApproxConfig div_cfg = cfg;
    div_cfg.newton_init_log2 =
        newton_init_for_bound(2.0 * (static_cast<double>(N) + hyper.lambda));

    SharedVector sigma = eng.zeros(0, true);  // per-feature best scores
    std::vector<std::size_t> gamma(static_cast<std::size_t>(J), 0);

    for (int j = 0; j < J; ++j) {
        Engine ej = eng.child(kTagFeature, static_cast<std::uint64_t>(j));
        const int owner = view.owner_of[static_cast<std::size_t>(j)];
        std::optional<Permutation> pi;
        if (eng.me() == owner) pi = stable_sort_permutation(view.column(j));

        // bucket sums per node, then local prefix aggregation
        SharedVector num = ej.zeros(0, true);
        SharedVector den = ej.zeros(0, true);
        for (std::size_t k = 0; k < lg.nodes(); ++k) {
            Engine ek = ej.child(kTagNode, k);
            BucketSums bs = secure_discretize(ek, owner, pi, lg.g[k], lg.h[k], B);

            SharedVector gl = ej.zeros(C, true), gr = ej.zeros(C, true);
            SharedVector hl = ej.zeros(C, true), hr = ej.zeros(C, true);
            ring_t g_total = 0, h_total = 0;
            for (std::size_t b = 0; b < B; ++b) {
                g_total += bs.alpha.v[b];
                h_total += bs.beta.v[b];
            }
            ring_t g_acc = 0, h_acc = 0;
            for (std::size_t c = 0; c < C; ++c) {
                g_acc += bs.alpha.v[c];
                h_acc += bs.beta.v[c];
                gl.v[c] = g_acc;
                hl.v[c] = h_acc;
                gr.v[c] = g_total - g_acc;
                hr.v[c] = h_total - h_acc;
            }
            // denominators 2(H + lambda)
            hl = ej.scalar_mul(hl, 2);
            hr = ej.scalar_mul(hr, 2);
            ej.add_public(hl, fp_encode(2.0 * hyper.lambda, ej.fp()));
            ej.add_public(hr, fp_encode(2.0 * hyper.lambda, ej.fp()));
            num = sv_concat(sv_concat(num, gl), gr);
            den = sv_concat(sv_concat(den, hl), hr);
        }

        // ratio first, then multiply: G * (G / 2(H+lambda)) stays in range
        SharedVector ratio = secure_div(ej, num, den, div_cfg);
        SharedVector impurity = ej.mul_trunc(ratio, num);

        SharedVector delta = ej.zeros(C, true);
        for (std::size_t k = 0; k < lg.nodes(); ++k) {
            delta = ej.sub(delta, sv_slice(impurity, 2 * k * C, C));
            delta = ej.sub(delta, sv_slice(impurity, (2 * k + 1) * C, C));
        }

        Engine ea = ej.child(kTagLevelArgmin);
        std::size_t q = secure_argmin(ea, delta);
        gamma[static_cast<std::size_t>(j)] = q;
        sigma = sv_concat(sigma, sv_slice(delta, q, 1));
    }

    Engine ef = eng.child(kTagFeatureArgmin);
    std::size_t best_feature = secure_argmin(ef, sigma);

    LevelChoice choice;
    choice.feature = static_cast<int>(best_feature);
    choice.owner = view.owner_of[best_feature];
    choice.bucket = gamma[best_feature];
    if (eng.me() == choice.owner) {
        std::vector<double> sorted = view.column(choice.feature);
        std::stable_sort(sorted.begin(), sorted.end());
        choice.threshold = sorted[(choice.bucket + 1) * M];
    }
    return choice;
}

SharedVector compute_leaf_weights(Engine& eng, const LevelGradients& lg, const BoostHyper& hyper,
                                  const ApproxConfig& cfg) {
    const std::size_t K = lg.nodes();
    SharedVector num = eng.zeros(K, true);
    SharedVector den = eng.zeros(K, true);
    for (std::size_t k = 0; k < K; ++k) {
        ring_t gs = 0, hs = 0;
        for (ring_t v : lg.g[k].v) gs += v;
        for (ring_t v : lg.h[k].v) hs += v;
        num.v[k] = ring::neg(gs);
        den.v[k] = hs;
    }
    eng.add_public(den, fp_encode(hyper.lambda, eng.fp()));

    ApproxConfig div_cfg = cfg;
    const std::size_t N = lg.g.empty() ? 1 : lg.g[0].size();
    div_cfg.newton_init_log2 =
        newton_init_for_bound(static_cast<double>(N) + hyper.lambda);
    return secure_div(eng, num, den, div_cfg);
}

DecisionTable train_table(Engine& eng, const PartyDataView& view, const SharedVector& y,
                          const SharedVector& yhat, const BoostHyper& hyper,
                          const ApproxConfig& cfg) {
    if (hyper.depth < 1) throw ConfigError("table dimension must be >= 1");
    if (static_cast<std::size_t>(hyper.buckets) > view.rows)
        throw ConfigError("more buckets than samples");

    Engine eg = eng.child(kTagGradients);
    auto [g0, h0] = compute_gradients(eg, y, yhat, hyper.task, cfg);
    LevelGradients lg;
    lg.g.push_back(std::move(g0));
    lg.h.push_back(std::move(h0));

    DecisionTable table;
    table.dimension = hyper.depth;
    for (int d = 0; d < hyper.depth; ++d) {
        Engine el = eng.child(kTagLevel, static_cast<std::uint64_t>(d));
        LevelChoice choice = find_level_split(el, view, lg, hyper, cfg);
        table.levels.push_back({choice.feature, choice.owner});
        if (choice.threshold) table.thresholds[d] = *choice.threshold;

        Engine es = eng.child(kTagSplit, static_cast<std::uint64_t>(d));
        lg = split_nodes(es, view, choice, lg);
    }
    Engine ew = eng.child(kTagLeaves);
    table.weights = compute_leaf_weights(ew, lg, hyper, cfg);
    return table;
}

SharedVector infer_table(Engine& eng, const PartyDataView& view, const DecisionTable& table) {
    const std::size_t N = view.rows;
    const int D = table.dimension;
    const std::size_t K = std::size_t{1} << D;
    if (static_cast<int>(table.levels.size()) != D) throw ShapeError("malformed table skeleton");
    if (table.weights.size() != K) throw ShapeError("leaf weight count mismatch");

    // round-parallel leaf indicators, one session per level
    std::vector<SharedVector> indicators;
    indicators.reserve(static_cast<std::size_t>(D));
    for (int d = 0; d < D; ++d) {
        const auto& lvl = table.levels[static_cast<std::size_t>(d)];
        Engine ed = eng.child(kTagInferLevel, static_cast<std::uint64_t>(d));
        std::vector<ring_t> u;
        if (eng.me() == lvl.owner) {
            auto it = table.thresholds.find(d);
            if (it == table.thresholds.end())
                throw ProtocolError("inference owner is missing a threshold");
            const auto& col = view.column(lvl.feature);
            u.resize(N * K);
            for (std::size_t i = 0; i < N; ++i) {
                const ring_t bit = col[i] < it->second ? 0 : 1;  // test-true = left = 0
                for (std::size_t k = 0; k < K; ++k) {
                    const ring_t kbit = (k >> (static_cast<std::size_t>(D) - 1 -
                                                static_cast<std::size_t>(d))) &
                                        1;
                    u[i * K + k] = kbit == bit ? 1 : 0;
                }
            }
        }
        indicators.push_back(ed.share_from(lvl.owner, u, N * K, false));
    }

    SharedVector acc = indicators[0];
    acc.session = eng.session();
    for (int d = 1; d < D; ++d) {
        SharedVector next = indicators[static_cast<std::size_t>(d)];
        next.session = eng.session();
        acc = eng.mul(acc, next);
    }

    SharedVector w_tiled{eng.me(), true, eng.session(), std::vector<ring_t>(N * K)};
    for (std::size_t i = 0; i < N; ++i) {
        std::copy(table.weights.v.begin(), table.weights.v.end(), w_tiled.v.begin() + static_cast<std::ptrdiff_t>(i * K));
    }
    SharedVector sel = eng.mul(acc, w_tiled);

    SharedVector out = eng.zeros(N, true);
    for (std::size_t i = 0; i < N; ++i) {
        ring_t s = 0;
        for (std::size_t k = 0; k < K; ++k) s += sel.v[i * K + k];
        out.v[i] = s;
    }
    return out;
}

}  // namespace fedtab
