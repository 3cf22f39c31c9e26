#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fedtab/permute.hpp"
#include "fedtab/secure_math.hpp"
#include "fedtab/sharing.hpp"

namespace fedtab {

enum class Task { Regression, Classification };

Task task_from_name(const std::string& name);
const char* task_name(Task t);

struct BoostHyper {
    int trees = 10;
    int depth = 3;
    int buckets = 32;
    double lambda = 1.0;
    double shrinkage = 1.0;
    Task task = Task::Classification;
};

// One party's view of the vertically partitioned samples: the rows are
// aligned across parties; each party holds only its own columns.
struct PartyDataView {
    int party = 0;
    std::size_t rows = 0;
    int total_features = 0;
    std::vector<int> owner_of;                // global feature id -> party id
    std::map<int, std::vector<double>> local; // my global feature id -> column

    const std::vector<double>& column(int feature) const;
};

struct TableLevelPublic {
    int feature = -1;
    int owner = 0;
};

// Party-local part of a distributed decision table. The public skeleton
// (levels) is identical at every party; thresholds holds only the levels this
// party owns; weights is this party's share of the 2^D leaf outputs.
// Leaf index bit convention: level d contributes the bit at position d
// counted from the most significant of D bits; test-true (left) = 0.
struct DecisionTable {
    int dimension = 0;
    std::vector<TableLevelPublic> levels;
    std::map<int, double> thresholds;
    SharedVector weights;
};

// Zero-masked per-node gradient vectors for one level.
struct LevelGradients {
    std::vector<SharedVector> g;
    std::vector<SharedVector> h;

    std::size_t nodes() const { return g.size(); }
};

struct LevelChoice {
    int feature = -1;
    int owner = 0;
    std::size_t bucket = 0;
    std::optional<double> threshold;  // present only at the owner
};

std::pair<SharedVector, SharedVector> compute_gradients(Engine& eng, const SharedVector& y,
                                                        const SharedVector& yhat, Task task,
                                                        const ApproxConfig& cfg);

// Secure node splitting: the test owner shares raw {0,1} indicator vectors
// and every node's gradients split into two masked children. Indicator
// products are exact (no truncation).
LevelGradients split_nodes(Engine& eng, const PartyDataView& view, const LevelChoice& choice,
                           const LevelGradients& lg);

// Level-wise split search: per feature, per node, bucketed gradient sums via
// secure discretization, then candidate scores
//   delta_c = sum_k [ -G_l^2 / (2(H_l+lambda)) - G_r^2 / (2(H_r+lambda)) ]
// with the ratio computed before the multiplication so magnitudes stay inside
// the fixed-point range. The winning (feature, bucket) ids become public; the
// threshold is looked up only by the feature owner.
LevelChoice find_level_split(Engine& eng, const PartyDataView& view, const LevelGradients& lg,
                             const BoostHyper& hyper, const ApproxConfig& cfg);

SharedVector compute_leaf_weights(Engine& eng, const LevelGradients& lg, const BoostHyper& hyper,
                                  const ApproxConfig& cfg);

DecisionTable train_table(Engine& eng, const PartyDataView& view, const SharedVector& y,
                          const SharedVector& yhat, const BoostHyper& hyper,
                          const ApproxConfig& cfg);

// Batched secure inference over all rows of `view`; returns a shared vector
// of the selected leaf weights (exact one-hot selection in the ring).
SharedVector infer_table(Engine& eng, const PartyDataView& view, const DecisionTable& table);

}  // namespace fedtab
