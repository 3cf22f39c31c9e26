#pragma once

#include <string>
#include <vector>

#include "fedtab/federation.hpp"
#include "fedtab/oracle.hpp"

namespace fedtab {

// Distributed model artifacts:
//   <dir>/public.json            skeleton shared by everyone (no thresholds)
//   <dir>/party_<m>/thresholds.json  owner-private tests (+ AP label scaler)
//   <dir>/party_<m>/weights_<t>.bin  that party's leaf-weight share, LE u64
void save_model(const std::string& dir, const TrainOutput& model);
TrainOutput load_model(const std::string& dir);

// Centralized model with thresholds and weights inline.
void save_plain_model(const std::string& path, const std::vector<plain::PlainTable>& ensemble,
                      const LabelScaler& scaler, const BoostHyper& hyper,
                      const FeatureMap& fmap);
struct PlainModelFile {
    std::vector<plain::PlainTable> ensemble;
    LabelScaler scaler;
    BoostHyper hyper;
};
PlainModelFile load_plain_model(const std::string& path);

RunConfig config_from_json_file(const std::string& path);
void write_config_json(const std::string& path, const RunConfig& cfg);

std::string traffic_to_json(const TrafficStats& stats, double latency_s, double bandwidth_mbps);

}  // namespace fedtab
