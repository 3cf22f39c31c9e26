#include "fedtab/federation.hpp"

#include <algorithm>

#include "fedtab/errors.hpp"
#include "fedtab/multiparty.hpp"

namespace fedtab {

namespace {
constexpr std::uint64_t kTagRoot = 0xf3d7ab;
constexpr std::uint64_t kTagLabels = 0x21;
constexpr std::uint64_t kTagTable = 0x22;
constexpr std::uint64_t kTagInfer = 0x23;
constexpr std::uint64_t kTagShrink = 0x24;
constexpr std::uint64_t kTagPredict = 0x25;
constexpr std::uint64_t kTagRowCheck = 0x26;
constexpr std::uint64_t kDealerSeedLabel = 0xdea1e4;
}  // namespace

ProtocolParams paper_faithful_params() {
    ProtocolParams p;
    p.approx.newton_init_log2 = 20;
    p.approx.sigmoid_clamp = 0.0;
    return p;
}

FeatureMap build_feature_map(const std::vector<PartyInput>& inputs) {
    FeatureMap fmap;
    for (std::size_t p = 0; p < inputs.size(); ++p) {
        for (std::size_t c = 0; c < inputs[p].columns.size(); ++c) {
            fmap.owner_of.push_back(static_cast<int>(p) + 1);
            fmap.local_index.push_back(static_cast<int>(c));
            fmap.names.push_back(c < inputs[p].feature_names.size()
                                     ? inputs[p].feature_names[c]
                                     : "f" + std::to_string(fmap.owner_of.size() - 1));
        }
    }
    fmap.total = static_cast<int>(fmap.owner_of.size());
    return fmap;
}

PartyDataView make_view(const PartyInput& input, const FeatureMap& fmap, int party) {
    PartyDataView view;
    view.party = party;
    view.rows = input.rows();
    view.total_features = fmap.total;
    view.owner_of = fmap.owner_of;
    for (int j = 0; j < fmap.total; ++j) {
        if (fmap.owner_of[static_cast<std::size_t>(j)] == party) {
            view.local[j] = input.columns[static_cast<std::size_t>(
                fmap.local_index[static_cast<std::size_t>(j)])];
        }
    }
    return view;
}

SharedVector share_labels(Engine& eng, int ap, const std::optional<std::vector<double>>& labels,
                          std::size_t rows) {
    if (eng.me() == ap && !labels)
        throw RoleError("active participant has no labels to share");
    if (eng.me() != ap && labels)
        throw RoleError("share_labels invoked by a passive participant");
    std::vector<ring_t> encoded;
    if (eng.me() == ap) encoded = fp_encode_vec(*labels, eng.fp());
    return eng.share_from(ap, encoded, rows, true);
}

namespace {

void exchange_row_check(Engine& eng, std::size_t rows) {
    const std::uint32_t r = eng.begin_round();
    Frame f{static_cast<std::uint8_t>(eng.me()), eng.session(), r, {static_cast<ring_t>(rows)}};
    eng.net().broadcast(eng.me(), f, RoundKind::Control);
    for (int from = 1; from <= eng.parties(); ++from) {
        if (from == eng.me()) continue;
        Frame g = eng.net().recv(eng.me(), from, eng.session(), r);
        if (g.payload.size() != 1 || g.payload[0] != rows)
            throw ProtocolError("row alignment check failed against party " +
                                std::to_string(from));
    }
}

struct PartyTrainResult {
    std::vector<DecisionTable> tables;
};

void validate_inputs(const std::vector<PartyInput>& inputs, const RunConfig& cfg) {
    if (static_cast<int>(inputs.size()) != cfg.parties)
        throw ConfigError("party count does not match the number of inputs");
    if (cfg.parties < 2) throw ConfigError("need at least 2 parties");
    const std::size_t rows = inputs[0].rows();
    int labeled = 0;
    for (std::size_t p = 0; p < inputs.size(); ++p) {
        if (inputs[p].rows() != rows && !inputs[p].columns.empty())
            throw ShapeError("parties disagree on row count");
        if (inputs[p].labels) {
            ++labeled;
            if (static_cast<int>(p) + 1 != cfg.ap_id())
                throw RoleError("labels supplied by a passive participant");
            if (inputs[p].labels->size() != rows)
                throw ShapeError("label count does not match row count");
        }
    }
    if (labeled != 1) throw RoleError("exactly one party (the AP) must hold labels");
    if (cfg.hyper.task == Task::Classification) {
        for (double y : *inputs[static_cast<std::size_t>(cfg.ap_id() - 1)].labels) {
            if (y != 0.0 && y != 1.0)
                throw InputError("classification labels must be 0 or 1");
        }
    }
}

}  // namespace

TrainOutput train_ensemble(const std::vector<PartyInput>& inputs, const RunConfig& cfg) {
    validate_inputs(inputs, cfg);
    const int n = cfg.parties;
    const int ap = cfg.ap_id();
    const std::size_t rows = inputs[0].rows();
    FeatureMap fmap = build_feature_map(inputs);
    if (fmap.total == 0) throw ConfigError("no features supplied");

    LabelScaler scaler;  // identity unless regression
    std::optional<std::vector<double>> ap_labels = inputs[static_cast<std::size_t>(ap - 1)].labels;
    if (cfg.hyper.task == Task::Regression) {
        scaler = LabelScaler::fit_unit_range(*ap_labels);
        ap_labels = scaler.apply(*ap_labels);
    }

    SimNetwork net(n, cfg.scheduler);
    net.enable_audit(cfg.audit);
    Dealer dealer(mix64(cfg.seed, kDealerSeedLabel), n);
    FixedPointConfig fp{cfg.proto.precision_bits};

    auto results = run_parties(net, [&](int id) -> PartyTrainResult {
        PartyDataView view = make_view(inputs[static_cast<std::size_t>(id - 1)], fmap, id);
        Engine root(id, n, net, dealer, Prng(mix64(cfg.seed, static_cast<std::uint64_t>(id))),
                    mix64(cfg.seed, kTagRoot), fp);

        Engine check = root.child(kTagRowCheck);
        exchange_row_check(check, rows);

        Engine el = root.child(kTagLabels);
        SharedVector y = share_labels(el, ap, id == ap ? ap_labels : std::nullopt, rows);

        SharedVector yhat = root.zeros(rows, true);
        PartyTrainResult out;
        for (int t = 0; t < cfg.hyper.trees; ++t) {
            Engine et = root.child(kTagTable, static_cast<std::uint64_t>(t));
            DecisionTable table = train_table(et, view, y, yhat, cfg.hyper, cfg.proto.approx);
            if (cfg.hyper.shrinkage != 1.0) {
                Engine es = root.child(kTagShrink, static_cast<std::uint64_t>(t));
                SharedVector scaledw =
                    es.scalar_mul(table.weights, fp_encode(cfg.hyper.shrinkage, fp));
                table.weights = es.truncate(scaledw, fp.precision_bits);
            }
            Engine ei = root.child(kTagInfer, static_cast<std::uint64_t>(t));
            SharedVector scores = infer_table(ei, view, table);
            yhat = root.add(yhat, scores);
            out.tables.push_back(std::move(table));
        }
        return out;
    });

    TrainOutput out;
    out.cfg = cfg;
    out.fmap = std::move(fmap);
    out.scaler = scaler;
    out.stats = net.stats();
    out.tables.reserve(static_cast<std::size_t>(n));
    for (auto& r : results) out.tables.push_back(std::move(r.tables));
    if (cfg.audit) out.audit_log = net.audit_log();
    return out;
}

namespace {

struct PartyPredictResult {
    std::optional<std::vector<double>> scores;
    std::vector<std::vector<double>> per_round;
};

std::vector<PartyPredictResult> run_predict(const TrainOutput& model,
                                            const std::vector<PartyInput>& data, int prefix,
                                            bool per_round, TrafficStats* stats_out) {
    const RunConfig& cfg = model.cfg;
    const int n = cfg.parties;
    const int ap = cfg.ap_id();
    SimNetwork net(n, cfg.scheduler);
    Dealer dealer(mix64(cfg.seed, kDealerSeedLabel ^ 0x1), n);
    FixedPointConfig fp{cfg.proto.precision_bits};
    const int target = cfg.reveal == RevealTo::All ? 0 : ap;

    auto results = run_parties(net, [&](int id) -> PartyPredictResult {
        const PartyInput& input = data[static_cast<std::size_t>(id - 1)];
        PartyDataView view = make_view(input, model.fmap, id);
        Engine root(id, n, net, dealer,
                    Prng(mix64(cfg.seed, 0x9d00 + static_cast<std::uint64_t>(id))),
                    mix64(cfg.seed, kTagPredict), fp);

        const auto& my_tables = model.tables[static_cast<std::size_t>(id - 1)];
        SharedVector total = root.zeros(view.rows, true);
        PartyPredictResult out;
        for (int t = 0; t < prefix; ++t) {
            Engine ei = root.child(kTagInfer, static_cast<std::uint64_t>(t));
            SharedVector s = infer_table(ei, view, my_tables[static_cast<std::size_t>(t)]);
            total = root.add(total, s);
            if (per_round) {
                Engine er = root.child(kTagPredict, static_cast<std::uint64_t>(t));
                auto rec = er.reconstruct(total, ap);
                if (rec) {
                    std::vector<double> scores = fp_decode_vec(*rec, fp);
                    out.per_round.push_back(model.scaler.invert(scores));
                }
            }
        }
        Engine ef = root.child(kTagPredict, 0xffff);
        auto rec = ef.reconstruct(total, target);
        if (rec) {
            std::vector<double> scores = fp_decode_vec(*rec, fp);
            if (id == ap) scores = model.scaler.invert(scores);
            out.scores = std::move(scores);
        }
        return out;
    });
    if (stats_out) *stats_out = net.stats();
    return results;
}

}  // namespace

PredictOutput predict_ensemble(const TrainOutput& model, const std::vector<PartyInput>& data,
                               std::optional<int> table_prefix) {
    const int total = model.tables.empty() ? 0 : static_cast<int>(model.tables[0].size());
    const int prefix = table_prefix ? std::min(*table_prefix, total) : total;
    PredictOutput out;
    auto results = run_predict(model, data, prefix, false, &out.stats);
    for (auto& r : results) out.scores.push_back(std::move(r.scores));
    return out;
}

std::vector<std::vector<double>> predict_per_round(const TrainOutput& model,
                                                   const std::vector<PartyInput>& data) {
    const int total = model.tables.empty() ? 0 : static_cast<int>(model.tables[0].size());
    auto results = run_predict(model, data, total, true, nullptr);
    const int ap = model.cfg.ap_id();
    return results[static_cast<std::size_t>(ap - 1)].per_round;
}

}  // namespace fedtab
