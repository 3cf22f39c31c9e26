#include "fedtab/sharing.hpp"

#include <algorithm>

#include "fedtab/errors.hpp"

namespace fedtab {

std::vector<std::vector<ring_t>> make_shares(std::span<const ring_t> x, int n, Prng& rng) {
    if (n < 2) throw ConfigError("make_shares: need at least 2 parties");
    std::vector<std::vector<ring_t>> rows(static_cast<std::size_t>(n),
                                          std::vector<ring_t>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
        ring_t acc = 0;
        for (int m = 0; m < n - 1; ++m) {
            ring_t s = rng.next_u64();
            rows[static_cast<std::size_t>(m)][i] = s;
            acc += s;
        }
        rows[static_cast<std::size_t>(n - 1)][i] = x[i] - acc;
    }
    return rows;
}

std::vector<ring_t> combine_share_rows(const std::vector<std::vector<ring_t>>& rows) {
    if (rows.empty()) return {};
    std::vector<ring_t> out(rows[0].size(), 0);
    for (const auto& r : rows) {
        if (r.size() != out.size()) throw ShapeError("combine: share length mismatch");
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += r[i];
    }
    return out;
}

std::vector<ring_t> combine_shares(const std::vector<SharedVector>& shares) {
    if (shares.empty()) return {};
    std::vector<ring_t> out(shares[0].size(), 0);
    for (const auto& s : shares) {
        if (s.size() != out.size()) throw ShapeError("combine: share length mismatch");
        if (s.session != shares[0].session) throw ProtocolError("combine: session tag mismatch");
        if (s.scaled != shares[0].scaled) throw ShapeError("combine: scaled flag mismatch");
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += s.v[i];
    }
    return out;
}

Engine::Engine(int me, int parties, SimNetwork& net, const Dealer& dealer, Prng rng,
               SessionTag tag, FixedPointConfig fp)
    : me_(me), n_(parties), net_(&net), dealer_(&dealer), rng_(std::move(rng)), tag_(tag),
      fp_(fp) {
    if (me < 1 || me > parties) throw ConfigError("party id out of range");
}

Engine Engine::child(std::uint64_t label, std::uint64_t index) const {
    SessionTag t = mix64(mix64(tag_, label), index);
    return Engine(me_, n_, *net_, *dealer_, rng_.derive(t), t, fp_);
}

std::uint32_t Engine::begin_round() { return round_++; }

void Engine::check_match(const SharedVector& a, const SharedVector& b) const {
    if (a.size() != b.size()) throw ShapeError("shared vectors differ in length");
    if (a.scaled != b.scaled) throw ShapeError("shared vectors differ in scaling");
}

SharedVector Engine::zeros(std::size_t len, bool scaled) const {
    return SharedVector{me_, scaled, tag_, std::vector<ring_t>(len, 0)};
}

SharedVector Engine::public_fp(std::span<const double> xs) const {
    SharedVector out = zeros(xs.size(), true);
    if (me_ == 1) {
        for (std::size_t i = 0; i < xs.size(); ++i) out.v[i] = fp_encode(xs[i], fp_);
    }
    return out;
}

SharedVector Engine::public_raw(std::span<const ring_t> xs) const {
    SharedVector out = zeros(xs.size(), false);
    if (me_ == 1) {
        for (std::size_t i = 0; i < xs.size(); ++i) out.v[i] = xs[i];
    }
    return out;
}

SharedVector Engine::add(const SharedVector& a, const SharedVector& b) const {
    check_match(a, b);
    SharedVector out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.v[i] += b.v[i];
    return out;
}

SharedVector Engine::sub(const SharedVector& a, const SharedVector& b) const {
    check_match(a, b);
    SharedVector out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.v[i] -= b.v[i];
    return out;
}

SharedVector Engine::neg(const SharedVector& a) const {
    SharedVector out = a;
    for (auto& v : out.v) v = ring::neg(v);
    return out;
}

SharedVector Engine::scalar_mul(const SharedVector& a, ring_t k) const {
    SharedVector out = a;
    for (auto& v : out.v) v *= k;
    return out;
}

void Engine::add_public(SharedVector& a, ring_t value) const {
    if (me_ == 1) {
        for (auto& v : a.v) v += value;
    }
}

SharedVector Engine::share_from(int owner, std::span<const ring_t> x, std::size_t len,
                                bool scaled) {
    const std::uint32_t r = begin_round();
    SharedVector out{me_, scaled, tag_, {}};
    if (me_ == owner) {
        if (x.size() != len) throw ShapeError("share_from: input length mismatch");
        Prng rng = rng_.derive(mix64(0x5eedull, input_cursor_));
        auto rows = make_shares(x, n_, rng);
        for (int to = 1; to <= n_; ++to) {
            if (to == me_) continue;
            Frame f{static_cast<std::uint8_t>(me_), tag_, r,
                    std::move(rows[static_cast<std::size_t>(to - 1)])};
            net_->send(to, f, RoundKind::ShareDist);
        }
        out.v = std::move(rows[static_cast<std::size_t>(me_ - 1)]);
    } else {
        out.v = net_->recv(me_, owner, tag_, r).payload;
        if (out.v.size() != len) throw ShapeError("share_from: received length mismatch");
    }
    ++input_cursor_;
    return out;
}

std::optional<std::vector<ring_t>> Engine::reconstruct(const SharedVector& x, int target) {
    const std::uint32_t r = begin_round();
    if (target == 0) {
        Frame f{static_cast<std::uint8_t>(me_), tag_, r, x.v};
        net_->broadcast(me_, f, RoundKind::Reconstruct);
        std::vector<ring_t> acc = x.v;
        for (int from = 1; from <= n_; ++from) {
            if (from == me_) continue;
            Frame g = net_->recv(me_, from, tag_, r);
            if (g.payload.size() != acc.size()) throw ProtocolError("reconstruct: missing share");
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += g.payload[i];
        }
        return acc;
    }
    if (me_ != target) {
        Frame f{static_cast<std::uint8_t>(me_), tag_, r, x.v};
        net_->send(target, f, RoundKind::Reconstruct);
        return std::nullopt;
    }
    std::vector<ring_t> acc = x.v;
    for (int from = 1; from <= n_; ++from) {
        if (from == me_) continue;
        Frame g = net_->recv(me_, from, tag_, r);
        if (g.payload.size() != acc.size()) throw ProtocolError("reconstruct: missing share");
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += g.payload[i];
    }
    return acc;
}

SharedVector Engine::mul(const SharedVector& x, const SharedVector& y) {
    if (x.size() != y.size()) throw ShapeError("mul: length mismatch");
    const std::size_t L = x.size();
    TripleShares t = dealer_->triples(tag_, triple_cursor_, L, me_);
    triple_cursor_ += L;

    // open e = x - a and f = y - b in one round
    std::vector<ring_t> ef(2 * L);
    for (std::size_t i = 0; i < L; ++i) {
        ef[i] = x.v[i] - t.a[i];
        ef[L + i] = y.v[i] - t.b[i];
    }
    const std::uint32_t r = begin_round();
    Frame f{static_cast<std::uint8_t>(me_), tag_, r, ef};
    net_->broadcast(me_, f, RoundKind::MulReveal);
    for (int from = 1; from <= n_; ++from) {
        if (from == me_) continue;
        Frame g = net_->recv(me_, from, tag_, r);
        for (std::size_t i = 0; i < 2 * L; ++i) ef[i] += g.payload[i];
    }

    SharedVector out{me_, x.scaled || y.scaled, tag_, std::vector<ring_t>(L)};
    const ring_t j = (me_ == 1) ? 1 : 0;
    for (std::size_t i = 0; i < L; ++i) {
        const ring_t e = ef[i];
        const ring_t ff = ef[L + i];
        out.v[i] = j * e * ff + ff * t.a[i] + e * t.b[i] + t.c[i];
    }
    return out;
}

SharedVector Engine::truncate(const SharedVector& z, int shift_bits) {
    if (shift_bits <= 0 || shift_bits >= kRingBits)
        throw ConfigError("truncate: invalid shift width");
    const std::size_t L = z.size();
    TruncPairShares pair = dealer_->trunc_pairs(tag_, trunc_cursor_, L, me_);
    trunc_cursor_ += L;

    std::vector<ring_t> p(L);
    std::vector<ring_t> beta(L);
    for (std::size_t i = 0; i < L; ++i) {
        p[i] = z.v[i] + pair.r[i];
        beta[i] = (p[i] < z.v[i]) ? 1 : 0;  // carry of the 64-bit addition
    }

    const std::uint32_t r = begin_round();
    std::vector<ring_t> theta_p(L, 0);
    if (me_ != 1) {
        Frame f{static_cast<std::uint8_t>(me_), tag_, r, p};
        net_->send(1, f, RoundKind::TruncReveal);
    } else {
        std::vector<unsigned __int128> sums(L);
        for (std::size_t i = 0; i < L; ++i) sums[i] = p[i];
        for (int from = 2; from <= n_; ++from) {
            Frame g = net_->recv(me_, from, tag_, r);
            for (std::size_t i = 0; i < L; ++i) sums[i] += g.payload[i];
        }
        for (std::size_t i = 0; i < L; ++i) theta_p[i] = static_cast<ring_t>(sums[i] >> 64);
    }

    SharedVector out{me_, z.scaled, tag_, std::vector<ring_t>(L)};
    const ring_t corr = ring_t{1} << (kRingBits - shift_bits);
    for (std::size_t i = 0; i < L; ++i) {
        const ring_t theta_z = theta_p[i] + beta[i] - pair.theta[i];
        out.v[i] = (z.v[i] >> shift_bits) - theta_z * corr;
    }
    return out;
}

SharedVector Engine::mul_trunc(const SharedVector& x, const SharedVector& y) {
    SharedVector prod = mul(x, y);
    if (x.scaled && y.scaled) {
        return truncate(prod, fp_.precision_bits);
    }
    return prod;  // indicator-by-value products are exact as-is
}

BoolWords Engine::bool_input_words(std::span<const std::uint64_t> mine_or_empty, int owner,
                                   std::size_t len) const {
    BoolWords out{me_, tag_, std::vector<std::uint64_t>(len, 0)};
    if (me_ == owner) {
        if (mine_or_empty.size() != len) throw ShapeError("bool input length mismatch");
        std::copy(mine_or_empty.begin(), mine_or_empty.end(), out.w.begin());
    }
    return out;
}

BoolWords Engine::bool_and(const BoolWords& x, const BoolWords& y) {
    if (x.size() != y.size()) throw ShapeError("bool_and: length mismatch");
    const std::size_t L = x.size();
    BoolTripleShares t = dealer_->bool_triples(tag_, bool_cursor_, L, me_);
    bool_cursor_ += L;

    std::vector<std::uint64_t> ef(2 * L);
    for (std::size_t i = 0; i < L; ++i) {
        ef[i] = x.w[i] ^ t.a[i];
        ef[L + i] = y.w[i] ^ t.b[i];
    }
    const std::uint32_t r = begin_round();
    Frame f{static_cast<std::uint8_t>(me_), tag_, r, ef};
    net_->broadcast(me_, f, RoundKind::BoolReveal);
    for (int from = 1; from <= n_; ++from) {
        if (from == me_) continue;
        Frame g = net_->recv(me_, from, tag_, r);
        for (std::size_t i = 0; i < 2 * L; ++i) ef[i] ^= g.payload[i];
    }

    BoolWords out{me_, tag_, std::vector<std::uint64_t>(L)};
    const bool lead = (me_ == 1);
    for (std::size_t i = 0; i < L; ++i) {
        const std::uint64_t e = ef[i];
        const std::uint64_t ff = ef[L + i];
        std::uint64_t z = (ff & t.a[i]) ^ (e & t.b[i]) ^ t.c[i];
        if (lead) z ^= e & ff;
        out.w[i] = z;
    }
    return out;
}

PermCrShares Engine::take_perm_cr(std::size_t length, int owner) {
    PermCrShares cr = dealer_->perm_cr(tag_, perm_cursor_, length, owner, me_);
    ++perm_cursor_;
    return cr;
}

}  // namespace fedtab
