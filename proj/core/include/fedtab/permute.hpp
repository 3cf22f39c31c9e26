#pragma once

#include <optional>
#include <vector>

#include "fedtab/sharing.hpp"

namespace fedtab {

// Applying a permutation yields u with u[i] = x[map[i]].
struct Permutation {
    std::vector<std::uint32_t> map;

    std::size_t size() const { return map.size(); }
};

Permutation stable_sort_permutation(const std::vector<double>& column);
Permutation invert(const Permutation& p);

template <typename T>
std::vector<T> apply_permutation(const Permutation& p, const std::vector<T>& x) {
    std::vector<T> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[p.map[i]];
    return out;
}

// Permute a shared vector by the owner's private permutation using dealer
// permutation CR; two online rounds. Only `owner` passes a permutation.
SharedVector secure_permute(Engine& eng, int owner, const std::optional<Permutation>& pi,
                            const SharedVector& x);

// Per-bucket gradient sums after permuting by the owner's sort order.
// bucket b < B-1 covers positions [b*M, (b+1)*M) with M = floor(N/B); the
// last bucket absorbs the remainder. Additions only, so sums are exact.
struct BucketSums {
    SharedVector alpha;  // grouped first-order gradients, length B
    SharedVector beta;   // grouped second-order gradients, length B
    std::size_t bucket_len = 0;
};

BucketSums secure_discretize(Engine& eng, int owner, const std::optional<Permutation>& pi,
                             const SharedVector& g, const SharedVector& h, std::size_t buckets);

}  // namespace fedtab
