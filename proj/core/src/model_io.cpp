#include "fedtab/model_io.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "fedtab/errors.hpp"

namespace fedtab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << content;
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    json j;
    in >> j;
    return j;
}

void write_words_le(const fs::path& path, const std::vector<ring_t>& words) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    for (ring_t w : words) {
        for (int b = 0; b < 8; ++b) out.put(static_cast<char>((w >> (8 * b)) & 0xff));
    }
}

std::vector<ring_t> read_words_le(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::vector<ring_t> out;
    char buf[8];
    while (in.read(buf, 8)) {
        ring_t w = 0;
        for (int b = 0; b < 8; ++b) w |= static_cast<ring_t>(static_cast<unsigned char>(buf[b]))
                                         << (8 * b);
        out.push_back(w);
    }
    return out;
}

}  // namespace

void save_model(const std::string& dir, const TrainOutput& model) {
    const fs::path root(dir);
    fs::create_directories(root);
    const int n = model.cfg.parties;
    const std::size_t trees = model.tables.empty() ? 0 : model.tables[0].size();

    json pub;
    pub["format"] = "fedtab-model-v1";
    pub["parties"] = n;
    pub["ap"] = model.cfg.ap_id();
    pub["task"] = task_name(model.cfg.hyper.task);
    pub["precision_bits"] = model.cfg.proto.precision_bits;
    pub["feature_names"] = model.fmap.names;
    pub["feature_owners"] = model.fmap.owner_of;
    json jt = json::array();
    for (std::size_t t = 0; t < trees; ++t) {
        const DecisionTable& table = model.tables[0][t];
        json levels = json::array();
        for (const auto& lvl : table.levels) {
            levels.push_back({{"feature_id", lvl.feature}, {"owner_id", lvl.owner}});
        }
        jt.push_back({{"dimension", table.dimension},
                      {"levels", levels},
                      {"weights_handle", "weights_" + std::to_string(t) + ".bin"}});
    }
    pub["tables"] = jt;
    write_file(root / "public.json", pub.dump(2) + "\n");

    for (int m = 1; m <= n; ++m) {
        const fs::path pdir = root / ("party_" + std::to_string(m));
        fs::create_directories(pdir);
        const auto& tables = model.tables[static_cast<std::size_t>(m - 1)];
        json side;
        side["party"] = m;
        json th = json::array();
        for (const auto& table : tables) {
            json levels = json::object();
            for (const auto& [level, t_d] : table.thresholds) {
                levels[std::to_string(level)] = t_d;
            }
            th.push_back(levels);
        }
        side["thresholds"] = th;
        if (m == model.cfg.ap_id()) {
            side["label_scaler"] = {{"offset", model.scaler.offset},
                                    {"scale", model.scaler.scale}};
        }
        write_file(pdir / "thresholds.json", side.dump(2) + "\n");
        for (std::size_t t = 0; t < tables.size(); ++t) {
            write_words_le(pdir / ("weights_" + std::to_string(t) + ".bin"),
                           tables[t].weights.v);
        }
    }
}

TrainOutput load_model(const std::string& dir) {
    const fs::path root(dir);
    json pub = read_json(root / "public.json");
    if (pub.value("format", "") != "fedtab-model-v1")
        throw InputError("not a fedtab model directory: " + dir);

    TrainOutput model;
    model.cfg.parties = pub.at("parties").get<int>();
    model.cfg.ap = pub.at("ap").get<int>();
    model.cfg.hyper.task = task_from_name(pub.at("task").get<std::string>());
    model.cfg.proto.precision_bits = pub.at("precision_bits").get<int>();
    model.fmap.names = pub.at("feature_names").get<std::vector<std::string>>();
    model.fmap.owner_of = pub.at("feature_owners").get<std::vector<int>>();
    model.fmap.total = static_cast<int>(model.fmap.owner_of.size());
    model.fmap.local_index.assign(model.fmap.owner_of.size(), 0);
    std::vector<int> counters(static_cast<std::size_t>(model.cfg.parties) + 1, 0);
    for (std::size_t j = 0; j < model.fmap.owner_of.size(); ++j) {
        model.fmap.local_index[j] = counters[static_cast<std::size_t>(model.fmap.owner_of[j])]++;
    }

    const auto& jt = pub.at("tables");
    for (int m = 1; m <= model.cfg.parties; ++m) {
        const fs::path pdir = root / ("party_" + std::to_string(m));
        json side = read_json(pdir / "thresholds.json");
        std::vector<DecisionTable> tables;
        for (std::size_t t = 0; t < jt.size(); ++t) {
            DecisionTable table;
            table.dimension = jt[t].at("dimension").get<int>();
            for (const auto& lvl : jt[t].at("levels")) {
                table.levels.push_back({lvl.at("feature_id").get<int>(),
                                        lvl.at("owner_id").get<int>()});
            }
            const auto& th = side.at("thresholds")[t];
            for (auto it = th.begin(); it != th.end(); ++it) {
                table.thresholds[std::stoi(it.key())] = it.value().get<double>();
            }
            table.weights.party = m;
            table.weights.scaled = true;
            table.weights.v =
                read_words_le(pdir / jt[t].at("weights_handle").get<std::string>());
            tables.push_back(std::move(table));
        }
        if (m == model.cfg.ap_id() && side.contains("label_scaler")) {
            model.scaler.offset = side["label_scaler"]["offset"].get<double>();
            model.scaler.scale = side["label_scaler"]["scale"].get<double>();
        }
        model.tables.push_back(std::move(tables));
    }
    return model;
}

void save_plain_model(const std::string& path, const std::vector<plain::PlainTable>& ensemble,
                      const LabelScaler& scaler, const BoostHyper& hyper,
                      const FeatureMap& fmap) {
    json j;
    j["format"] = "fedtab-plain-model-v1";
    j["task"] = task_name(hyper.task);
    j["label_scaler"] = {{"offset", scaler.offset}, {"scale", scaler.scale}};
    j["lambda"] = hyper.lambda;
    j["buckets"] = hyper.buckets;
    json jt = json::array();
    for (const auto& table : ensemble) {
        json levels = json::array();
        for (std::size_t d = 0; d < table.features.size(); ++d) {
            const int f = table.features[d];
            const int owner = f < static_cast<int>(fmap.owner_of.size())
                                  ? fmap.owner_of[static_cast<std::size_t>(f)]
                                  : 0;
            levels.push_back({{"feature_id", f}, {"owner_id", owner}});
        }
        jt.push_back({{"dimension", table.dimension},
                      {"levels", levels},
                      {"thresholds", table.thresholds},
                      {"weights", table.weights}});
    }
    j["tables"] = jt;
    write_file(path, j.dump(2) + "\n");
}

PlainModelFile load_plain_model(const std::string& path) {
    json j = read_json(path);
    if (j.value("format", "") != "fedtab-plain-model-v1")
        throw InputError("not a plain model file: " + path);
    PlainModelFile out;
    out.hyper.task = task_from_name(j.at("task").get<std::string>());
    out.hyper.lambda = j.value("lambda", 1.0);
    out.hyper.buckets = j.value("buckets", 32);
    out.scaler.offset = j["label_scaler"]["offset"].get<double>();
    out.scaler.scale = j["label_scaler"]["scale"].get<double>();
    for (const auto& jt : j.at("tables")) {
        plain::PlainTable table;
        table.dimension = jt.at("dimension").get<int>();
        for (const auto& lvl : jt.at("levels"))
            table.features.push_back(lvl.at("feature_id").get<int>());
        table.thresholds = jt.at("thresholds").get<std::vector<double>>();
        table.weights = jt.at("weights").get<std::vector<double>>();
        out.ensemble.push_back(std::move(table));
    }
    return out;
}

RunConfig config_from_json_file(const std::string& path) {
    json j = read_json(path);
    RunConfig cfg;
    cfg.parties = j.value("parties", 4);
    cfg.ap = j.value("ap", 0);
    cfg.seed = j.value("seed", std::uint64_t{1});
    cfg.hyper.task = task_from_name(j.value("task", "classification"));
    cfg.hyper.trees = j.value("trees", 10);
    cfg.hyper.depth = j.value("depth", 3);
    cfg.hyper.buckets = j.value("buckets", 32);
    cfg.hyper.lambda = j.value("lambda", 1.0);
    cfg.hyper.shrinkage = j.value("shrinkage", 1.0);
    cfg.proto.precision_bits = j.value("precision_bits", 20);
    cfg.proto.approx.newton_iters = j.value("newton_iters", 20);
    cfg.proto.approx.newton_init_log2 = j.value("newton_init_log2", 10);
    cfg.proto.approx.exp_log_rounds = j.value("exp_log_rounds", 2);
    cfg.proto.approx.sigmoid_clamp = j.value("sigmoid_clamp", 4.0);
    if (j.value("paper_faithful", false)) cfg.proto = paper_faithful_params();
    const std::string reveal = j.value("reveal_predictions_to", "ap");
    if (reveal == "ap") {
        cfg.reveal = RevealTo::Ap;
    } else if (reveal == "all") {
        cfg.reveal = RevealTo::All;
    } else {
        throw ConfigError("reveal_predictions_to must be 'ap' or 'all'");
    }
    cfg.audit = j.value("audit", false);
    const std::string sched = j.value("scheduler", "free");
    if (sched == "free") {
        cfg.scheduler = SchedulerMode::Free;
    } else if (sched == "round-robin") {
        cfg.scheduler = SchedulerMode::RoundRobin;
    } else {
        throw ConfigError("scheduler must be 'free' or 'round-robin'");
    }
    cfg.latency_s = j.value("latency_ms", 5.0) / 1000.0;
    cfg.bandwidth_mbps = j.value("bandwidth_mbps", 100.0);
    return cfg;
}

void write_config_json(const std::string& path, const RunConfig& cfg) {
    json j;
    j["parties"] = cfg.parties;
    j["ap"] = cfg.ap_id();
    j["seed"] = cfg.seed;
    j["task"] = task_name(cfg.hyper.task);
    j["trees"] = cfg.hyper.trees;
    j["depth"] = cfg.hyper.depth;
    j["buckets"] = cfg.hyper.buckets;
    j["lambda"] = cfg.hyper.lambda;
    j["shrinkage"] = cfg.hyper.shrinkage;
    j["precision_bits"] = cfg.proto.precision_bits;
    j["newton_iters"] = cfg.proto.approx.newton_iters;
    j["newton_init_log2"] = cfg.proto.approx.newton_init_log2;
    j["exp_log_rounds"] = cfg.proto.approx.exp_log_rounds;
    j["sigmoid_clamp"] = cfg.proto.approx.sigmoid_clamp;
    j["reveal_predictions_to"] = cfg.reveal == RevealTo::All ? "all" : "ap";
    j["audit"] = cfg.audit;
    j["scheduler"] = cfg.scheduler == SchedulerMode::RoundRobin ? "round-robin" : "free";
    j["latency_ms"] = cfg.latency_s * 1000.0;
    j["bandwidth_mbps"] = cfg.bandwidth_mbps;
    write_file(path, j.dump(2) + "\n");
}

std::string traffic_to_json(const TrafficStats& stats, double latency_s, double bandwidth_mbps) {
    json j;
    json per_op = json::object();
    for (const auto& [name, c] : stats.per_op) {
        per_op[name] = {{"rounds", c.rounds}, {"frames", c.frames}, {"bytes", c.bytes}};
    }
    json per_party = json::object();
    for (const auto& [id, c] : stats.per_party) {
        per_party[std::to_string(id)] = {{"rounds", c.rounds},
                                         {"frames", c.frames},
                                         {"bytes", c.bytes}};
    }
    j["per_op"] = per_op;
    j["per_party"] = per_party;
    j["totals"] = {{"rounds", stats.total.rounds},
                   {"frames", stats.total.frames},
                   {"bytes", stats.total.bytes}};
    j["modeled_seconds"] = stats.modeled_seconds(latency_s, bandwidth_mbps * 1e6);
    return j.dump(2) + "\n";
}

}  // namespace fedtab
