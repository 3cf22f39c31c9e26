#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fedtab/prng.hpp"
#include "fedtab/ring.hpp"
#include "fedtab/transport.hpp"

namespace fedtab {

enum class CrKind : std::uint64_t {
    ArithTriple = 1,
    BoolTriple = 2,
    TruncPair = 3,
    PermCR = 4,
};

CrKind cr_kind_from_name(const std::string& name);

// One party's slice of a batch of arithmetic Beaver triples (c = a*b).
struct TripleShares {
    std::vector<ring_t> a, b, c;
};

// One party's slice of word-packed Boolean triples (c = a AND b, XOR-shared).
struct BoolTripleShares {
    std::vector<std::uint64_t> a, b, c;
};

// One party's slice of truncation pairs: shares of random r and of its
// share-sum wrap count theta_r = (sum_m <r>_m - r) / 2^64.
struct TruncPairShares {
    std::vector<ring_t> r, theta;
};

// One party's slice of permutation correlated randomness: shares of a random
// vector r and of pi_p(r); the hidden permutation pi_p only at the owner.
struct PermCrShares {
    std::vector<ring_t> r_share;
    std::vector<ring_t> permuted_r_share;
    std::vector<std::uint32_t> pi_p;  // non-empty only at the owner
};

// Trusted offline dealer. All material is a pure function of
// (dealer seed, session tag, kind, index), so each party independently
// derives its own slice and streams stay aligned without provisioning
// ahead of time. The dealer never participates in the online phase.
class Dealer {
  public:
    Dealer(std::uint64_t seed, int parties);

    int parties() const { return n_; }

    TripleShares triples(SessionTag session, std::uint64_t first_index, std::size_t count,
                         int party) const;
    BoolTripleShares bool_triples(SessionTag session, std::uint64_t first_index,
                                  std::size_t count, int party) const;
    TruncPairShares trunc_pairs(SessionTag session, std::uint64_t first_index, std::size_t count,
                                int party) const;
    PermCrShares perm_cr(SessionTag session, std::uint64_t index, std::size_t length, int owner,
                         int party) const;

  private:
    Prng item_rng(CrKind kind, SessionTag session, std::uint64_t index) const;

    std::uint64_t seed_;
    int n_;
};

}  // namespace fedtab
