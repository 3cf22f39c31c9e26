#pragma once

#include <string>
#include <vector>

#include "fedtab/federation.hpp"

namespace fedtab {

// Plaintexts that must never appear in a payload received by a party other
// than their owner. Vectors are matched by contiguous encoded runs; scalar
// thresholds by exact encoded words (tiny encodings that collide with
// protocol metadata such as permutation indices are skipped).
struct AuditSecrets {
    FixedPointConfig fp{};
    struct Vec {
        int owner = 0;
        std::string name;
        std::vector<double> values;
    };
    std::vector<Vec> vectors;
    struct Scalar {
        int owner = 0;
        std::string name;
        double value = 0;
    };
    std::vector<Scalar> scalars;
};

struct AuditFinding {
    int receiver = 0;
    std::string what;
};

struct AuditReport {
    std::vector<AuditFinding> findings;
    std::uint64_t frames_checked = 0;

    bool ok() const { return findings.empty(); }
};

AuditSecrets collect_secrets(const TrainOutput& model, const std::vector<PartyInput>& inputs);

AuditReport audit_transcript(const std::vector<SimNetwork::AuditRecord>& log,
                             const AuditSecrets& secrets);

}  // namespace fedtab
