#include "fedtab/dealer.hpp"

#include <numeric>

#include "fedtab/errors.hpp"

namespace fedtab {

CrKind cr_kind_from_name(const std::string& name) {
    if (name == "arith-triple") return CrKind::ArithTriple;
    if (name == "bool-triple") return CrKind::BoolTriple;
    if (name == "trunc-pair") return CrKind::TruncPair;
    if (name == "perm-cr") return CrKind::PermCR;
    throw ConfigError("unknown correlated-randomness kind: " + name);
}

Dealer::Dealer(std::uint64_t seed, int parties) : seed_(seed), n_(parties) {
    if (parties < 2) throw ConfigError("dealer needs at least 2 parties");
}

Prng Dealer::item_rng(CrKind kind, SessionTag session, std::uint64_t index) const {
    return Prng(seed_).derive(static_cast<std::uint64_t>(kind)).derive(session).derive(index);
}

namespace {

// Additively split v; the requested party's share is returned.
ring_t split_take(Prng& rng, ring_t v, int n, int party) {
    ring_t acc = 0;
    ring_t mine = 0;
    for (int m = 1; m < n; ++m) {
        ring_t s = rng.next_u64();
        acc += s;
        if (m == party) mine = s;
    }
    if (party == n) mine = v - acc;
    return mine;
}

std::uint64_t split_take_xor(Prng& rng, std::uint64_t v, int n, int party) {
    std::uint64_t acc = 0;
    std::uint64_t mine = 0;
    for (int m = 1; m < n; ++m) {
        std::uint64_t s = rng.next_u64();
        acc ^= s;
        if (m == party) mine = s;
    }
    if (party == n) mine = v ^ acc;
    return mine;
}

}  // namespace

TripleShares Dealer::triples(SessionTag session, std::uint64_t first_index, std::size_t count,
                             int party) const {
    TripleShares out;
    out.a.resize(count);
    out.b.resize(count);
    out.c.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        Prng rng = item_rng(CrKind::ArithTriple, session, first_index + i);
        ring_t a = rng.next_u64();
        ring_t b = rng.next_u64();
        ring_t c = a * b;
        out.a[i] = split_take(rng, a, n_, party);
        out.b[i] = split_take(rng, b, n_, party);
        out.c[i] = split_take(rng, c, n_, party);
    }
    return out;
}

BoolTripleShares Dealer::bool_triples(SessionTag session, std::uint64_t first_index,
                                      std::size_t count, int party) const {
    BoolTripleShares out;
    out.a.resize(count);
    out.b.resize(count);
    out.c.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        Prng rng = item_rng(CrKind::BoolTriple, session, first_index + i);
        std::uint64_t a = rng.next_u64();
        std::uint64_t b = rng.next_u64();
        std::uint64_t c = a & b;
        out.a[i] = split_take_xor(rng, a, n_, party);
        out.b[i] = split_take_xor(rng, b, n_, party);
        out.c[i] = split_take_xor(rng, c, n_, party);
    }
    return out;
}

TruncPairShares Dealer::trunc_pairs(SessionTag session, std::uint64_t first_index,
                                    std::size_t count, int party) const {
    TruncPairShares out;
    out.r.resize(count);
    out.theta.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        Prng rng = item_rng(CrKind::TruncPair, session, first_index + i);
        ring_t r = rng.next_u64();
        // draw all shares to compute the wrap count exactly
        std::vector<ring_t> shares(static_cast<std::size_t>(n_));
        ring_t acc = 0;
        for (int m = 0; m < n_ - 1; ++m) {
            shares[static_cast<std::size_t>(m)] = rng.next_u64();
            acc += shares[static_cast<std::size_t>(m)];
        }
        shares[static_cast<std::size_t>(n_ - 1)] = r - acc;
        unsigned __int128 total = 0;
        for (ring_t s : shares) total += s;
        ring_t theta = static_cast<ring_t>((total - r) >> 64);
        out.r[i] = shares[static_cast<std::size_t>(party - 1)];
        out.theta[i] = split_take(rng, theta, n_, party);
    }
    return out;
}

PermCrShares Dealer::perm_cr(SessionTag session, std::uint64_t index, std::size_t length,
                             int owner, int party) const {
    if (owner < 1 || owner > n_) throw ConfigError("perm-cr: owner id out of range");
    Prng rng = item_rng(CrKind::PermCR, session, index);

    std::vector<std::uint32_t> pi(length);
    std::iota(pi.begin(), pi.end(), 0u);
    for (std::size_t i = length; i > 1; --i) {  // Fisher-Yates
        std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(pi[i - 1], pi[j]);
    }

    std::vector<ring_t> r(length);
    for (auto& v : r) v = rng.next_u64();
    std::vector<ring_t> pr(length);
    for (std::size_t i = 0; i < length; ++i) pr[i] = r[pi[i]];

    PermCrShares out;
    out.r_share.resize(length);
    out.permuted_r_share.resize(length);
    for (std::size_t i = 0; i < length; ++i) out.r_share[i] = split_take(rng, r[i], n_, party);
    for (std::size_t i = 0; i < length; ++i)
        out.permuted_r_share[i] = split_take(rng, pr[i], n_, party);
    if (party == owner) out.pi_p = std::move(pi);
    return out;
}

}  // namespace fedtab
