#include "fedtab/audit.hpp"

#include <cstdlib>
#include <unordered_map>

namespace fedtab {

namespace {

constexpr std::size_t kGram = 4;           // consecutive words needed for a vector hit
constexpr ring_t kScalarFloor = 1u << 16;  // skip thresholds that encode this small

struct Candidate {
    std::size_t secret;
    std::size_t offset;
};

}  // namespace

AuditSecrets collect_secrets(const TrainOutput& model, const std::vector<PartyInput>& inputs) {
    AuditSecrets s;
    s.fp = FixedPointConfig{model.cfg.proto.precision_bits};
    const int ap = model.cfg.ap_id();
    for (std::size_t p = 0; p < inputs.size(); ++p) {
        const int owner = static_cast<int>(p) + 1;
        for (std::size_t c = 0; c < inputs[p].columns.size(); ++c) {
            s.vectors.push_back({owner, "feature column (party " + std::to_string(owner) +
                                            ", local " + std::to_string(c) + ")",
                                 inputs[p].columns[c]});
        }
        if (inputs[p].labels) {
            s.vectors.push_back({ap, "label vector", *inputs[p].labels});
        }
    }
    for (std::size_t p = 0; p < model.tables.size(); ++p) {
        const int owner = static_cast<int>(p) + 1;
        for (std::size_t t = 0; t < model.tables[p].size(); ++t) {
            for (const auto& [level, threshold] : model.tables[p][t].thresholds) {
                s.scalars.push_back({owner, "threshold (table " + std::to_string(t) + ", level " +
                                                std::to_string(level) + ")",
                                     threshold});
            }
        }
    }
    return s;
}

AuditReport audit_transcript(const std::vector<SimNetwork::AuditRecord>& log,
                             const AuditSecrets& secrets) {
    // encode all vector secrets and index their k-gram leading words
    std::vector<std::vector<ring_t>> encoded;
    encoded.reserve(secrets.vectors.size());
    std::unordered_multimap<ring_t, Candidate> lead;
    for (std::size_t s = 0; s < secrets.vectors.size(); ++s) {
        std::vector<ring_t> v(secrets.vectors[s].values.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = fp_encode(secrets.vectors[s].values[i], secrets.fp);
        const std::size_t gram = std::min(kGram, v.size());
        if (gram > 0) {
            for (std::size_t off = 0; off + gram <= v.size(); ++off) {
                lead.emplace(v[off], Candidate{s, off});
            }
        }
        encoded.push_back(std::move(v));
    }

    std::unordered_map<ring_t, std::vector<std::size_t>> scalar_index;
    for (std::size_t s = 0; s < secrets.scalars.size(); ++s) {
        const ring_t enc = fp_encode(secrets.scalars[s].value, secrets.fp);
        const ring_t mag = ring::to_signed(enc) < 0 ? ring::neg(enc) : enc;
        if (mag < kScalarFloor) continue;  // indistinguishable from small metadata
        scalar_index[enc].push_back(s);
    }

    AuditReport report;
    for (const auto& rec : log) {
        ++report.frames_checked;
        const auto& payload = rec.frame.payload;
        for (std::size_t i = 0; i < payload.size(); ++i) {
            auto [lo, hi] = lead.equal_range(payload[i]);
            for (auto it = lo; it != hi; ++it) {
                const auto& sec = secrets.vectors[it->second.secret];
                if (rec.receiver == sec.owner) continue;
                const auto& v = encoded[it->second.secret];
                const std::size_t gram = std::min(kGram, v.size());
                if (i + gram > payload.size()) continue;
                bool match = true;
                for (std::size_t g = 1; g < gram; ++g) {
                    if (payload[i + g] != v[it->second.offset + g]) {
                        match = false;
                        break;
                    }
                }
                if (match) {
                    report.findings.push_back(
                        {rec.receiver, sec.name + " leaked to party " +
                                           std::to_string(rec.receiver) + " (run of " +
                                           std::to_string(gram) + " encoded words)"});
                }
            }
            auto sit = scalar_index.find(payload[i]);
            if (sit != scalar_index.end()) {
                for (std::size_t s : sit->second) {
                    if (rec.receiver == secrets.scalars[s].owner) continue;
                    report.findings.push_back(
                        {rec.receiver, secrets.scalars[s].name + " leaked to party " +
                                           std::to_string(rec.receiver)});
                }
            }
        }
    }
    return report;
}

}  // namespace fedtab
