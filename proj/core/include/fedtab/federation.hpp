#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fedtab/data.hpp"
#include "fedtab/metrics.hpp"
#include "fedtab/table.hpp"

namespace fedtab {

enum class RevealTo { Ap, All };

struct ProtocolParams {
    int precision_bits = 20;
    ApproxConfig approx{};
};

// Sets newton_init_log2 = 20 and disables the sigmoid clamp, matching the
// published parameterization.
ProtocolParams paper_faithful_params();

struct RunConfig {
    int parties = 4;
    int ap = 0;  // 0: the last party acts as the AP
    BoostHyper hyper{};
    ProtocolParams proto{};
    std::uint64_t seed = 1;
    RevealTo reveal = RevealTo::Ap;
    bool audit = false;
    SchedulerMode scheduler = SchedulerMode::Free;
    double latency_s = 0.005;
    double bandwidth_mbps = 100.0;

    int ap_id() const { return ap == 0 ? parties : ap; }
};

// One party's local slice of the vertically partitioned samples. Exactly the
// AP supplies labels.
struct PartyInput {
    std::vector<std::string> feature_names;
    std::vector<std::vector<double>> columns;
    std::optional<std::vector<double>> labels;

    std::size_t rows() const { return columns.empty() ? 0 : columns[0].size(); }
};

// Global feature ids: party order, then column order within a party.
struct FeatureMap {
    int total = 0;
    std::vector<int> owner_of;
    std::vector<int> local_index;
    std::vector<std::string> names;
};
FeatureMap build_feature_map(const std::vector<PartyInput>& inputs);

PartyDataView make_view(const PartyInput& input, const FeatureMap& fmap, int party);

// AP-side label sharing; passive participants must not supply labels.
SharedVector share_labels(Engine& eng, int ap, const std::optional<std::vector<double>>& labels,
                          std::size_t rows);

struct TrainOutput {
    RunConfig cfg;
    FeatureMap fmap;
    LabelScaler scaler;                              // identity for classification
    std::vector<std::vector<DecisionTable>> tables;  // [party - 1][t]
    TrafficStats stats;
    std::vector<SimNetwork::AuditRecord> audit_log;  // populated when cfg.audit
};

TrainOutput train_ensemble(const std::vector<PartyInput>& inputs, const RunConfig& cfg);

struct PredictOutput {
    // indexed by party - 1; nullopt for parties the scores were not revealed
    // to. The AP entry is denormalized; other parties see the raw scale.
    std::vector<std::optional<std::vector<double>>> scores;
    TrafficStats stats;
};

PredictOutput predict_ensemble(const TrainOutput& model, const std::vector<PartyInput>& data,
                               std::optional<int> table_prefix = std::nullopt);

// Cumulative AP-side predictions after each boosting round (one pass).
std::vector<std::vector<double>> predict_per_round(const TrainOutput& model,
                                                   const std::vector<PartyInput>& data);

}  // namespace fedtab
