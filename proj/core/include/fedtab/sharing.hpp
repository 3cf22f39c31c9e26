#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fedtab/dealer.hpp"
#include "fedtab/prng.hpp"
#include "fedtab/ring.hpp"
#include "fedtab/transport.hpp"

namespace fedtab {

// One party's additive share of a vector of ring values.
struct SharedVector {
    int party = 0;
    bool scaled = false;  // true: values carry the 2^l fixed-point factor
    SessionTag session = 0;
    std::vector<ring_t> v;

    std::size_t size() const { return v.size(); }
};

// One party's XOR-share of a vector of 64-bit words (bit-packed Boolean data).
struct BoolWords {
    int party = 0;
    SessionTag session = 0;
    std::vector<std::uint64_t> w;

    std::size_t size() const { return w.size(); }
};

// --- dealer-/test-side helpers (no communication) ---

std::vector<std::vector<ring_t>> make_shares(std::span<const ring_t> x, int n, Prng& rng);
std::vector<ring_t> combine_share_rows(const std::vector<std::vector<ring_t>>& rows);
std::vector<ring_t> combine_shares(const std::vector<SharedVector>& shares);

// Per-party protocol engine bound to one session. All parties run the same
// code against their own Engine; dealer cursors and round numbers stay in
// sync because the call sequences are identical.
class Engine {
  public:
    Engine(int me, int parties, SimNetwork& net, const Dealer& dealer, Prng rng, SessionTag tag,
           FixedPointConfig fp = {});

    // Derived sub-session with fresh round/dealer cursors. Every party must
    // derive children with the same labels in the same order.
    Engine child(std::uint64_t label, std::uint64_t index = 0) const;

    int me() const { return me_; }
    int parties() const { return n_; }
    SessionTag session() const { return tag_; }
    const FixedPointConfig& fp() const { return fp_; }
    SimNetwork& net() { return *net_; }
    Prng& rng() { return rng_; }

    // ---- local share algebra (no communication) ----
    SharedVector zeros(std::size_t len, bool scaled) const;
    // P_1-held trivial sharing of public values
    SharedVector public_fp(std::span<const double> xs) const;
    SharedVector public_raw(std::span<const ring_t> xs) const;
    SharedVector add(const SharedVector& a, const SharedVector& b) const;
    SharedVector sub(const SharedVector& a, const SharedVector& b) const;
    SharedVector neg(const SharedVector& a) const;
    SharedVector scalar_mul(const SharedVector& a, ring_t k) const;  // integer constant
    void add_public(SharedVector& a, ring_t value) const;            // P_1 adds, all elements

    // ---- interactive operations ----
    // Sharing a private vector: owner splits and distributes, peers receive.
    SharedVector share_from(int owner, std::span<const ring_t> x, std::size_t len, bool scaled);
    // target = 0 reveals to all parties; otherwise only `target` learns the
    // value (everyone else gets nullopt).
    std::optional<std::vector<ring_t>> reconstruct(const SharedVector& x, int target);

    SharedVector mul(const SharedVector& x, const SharedVector& y);
    SharedVector truncate(const SharedVector& z, int shift_bits);
    SharedVector mul_trunc(const SharedVector& x, const SharedVector& y);

    // ---- Boolean domain (XOR shares over packed words) ----
    BoolWords bool_input_words(std::span<const std::uint64_t> mine_or_empty, int owner,
                               std::size_t len) const;  // trivial share, local
    BoolWords bool_and(const BoolWords& x, const BoolWords& y);

    // dealer access for protocols layered on top (secure permutation)
    PermCrShares take_perm_cr(std::size_t length, int owner);
    const Dealer& dealer() const { return *dealer_; }

    std::uint32_t begin_round();
    std::uint32_t rounds_used() const { return round_; }

  private:
    void check_match(const SharedVector& a, const SharedVector& b) const;

    int me_;
    int n_;
    SimNetwork* net_;
    const Dealer* dealer_;
    Prng rng_;
    SessionTag tag_;
    FixedPointConfig fp_;

    std::uint32_t round_ = 0;
    std::uint64_t triple_cursor_ = 0;
    std::uint64_t bool_cursor_ = 0;
    std::uint64_t trunc_cursor_ = 0;
    std::uint64_t perm_cursor_ = 0;
    std::uint64_t input_cursor_ = 0;
};

}  // namespace fedtab
