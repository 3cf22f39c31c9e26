#include "fedtab/secure_math.hpp"

#include <cmath>

#include "fedtab/errors.hpp"

namespace fedtab {

int newton_init_for_bound(double bound) {
    if (bound <= 0) throw ConfigError("newton_init_for_bound: bound must be positive");
    return static_cast<int>(std::ceil(std::log2(bound))) + 1;
}

SharedVector sv_concat(const SharedVector& a, const SharedVector& b) {
    SharedVector out = a;
    out.v.insert(out.v.end(), b.v.begin(), b.v.end());
    return out;
}

SharedVector sv_slice(const SharedVector& a, std::size_t offset, std::size_t len) {
    SharedVector out{a.party, a.scaled, a.session,
                     std::vector<ring_t>(a.v.begin() + static_cast<std::ptrdiff_t>(offset),
                                         a.v.begin() + static_cast<std::ptrdiff_t>(offset + len))};
    return out;
}

namespace {

BoolWords bxor(const BoolWords& a, const BoolWords& b) {
    BoolWords out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.w[i] ^= b.w[i];
    return out;
}

BoolWords shl(const BoolWords& a, int bits) {
    BoolWords out = a;
    for (auto& w : out.w) w <<= bits;
    return out;
}

BoolWords bconcat(const BoolWords& a, const BoolWords& b) {
    BoolWords out = a;
    out.w.insert(out.w.end(), b.w.begin(), b.w.end());
    return out;
}

BoolWords bslice(const BoolWords& a, std::size_t offset, std::size_t len) {
    BoolWords out{a.party, a.session,
                  std::vector<std::uint64_t>(a.w.begin() + static_cast<std::ptrdiff_t>(offset),
                                             a.w.begin() +
                                                 static_cast<std::ptrdiff_t>(offset + len))};
    return out;
}

// Compress k XOR-shared addend words down to two with 3->2 carry-save
// full-adder layers; ANDs of every group in a layer share one round.
std::vector<BoolWords> csa_compress(Engine& eng, std::vector<BoolWords> addends) {
    while (addends.size() > 2) {
        std::vector<BoolWords> next;
        std::vector<BoolWords> groups_z;
        BoolWords lhs{eng.me(), eng.session(), {}};
        BoolWords rhs{eng.me(), eng.session(), {}};
        std::size_t g = 0;
        for (; g + 2 < addends.size() + 1 && g + 2 <= addends.size(); g += 3) {
            const BoolWords& x = addends[g];
            const BoolWords& y = addends[g + 1];
            const BoolWords& z = addends[g + 2];
            next.push_back(bxor(bxor(x, y), z));  // sum word
            lhs = bconcat(lhs, bxor(x, z));
            rhs = bconcat(rhs, bxor(y, z));
            groups_z.push_back(z);
        }
        for (; g < addends.size(); ++g) next.push_back(addends[g]);
        if (!groups_z.empty()) {
            const std::size_t L = groups_z[0].size();
            BoolWords carries = eng.bool_and(lhs, rhs);
            for (std::size_t i = 0; i < groups_z.size(); ++i) {
                BoolWords c = bxor(bslice(carries, i * L, L), groups_z[i]);
                next.push_back(shl(c, 1));  // carry feeds the next bit position
            }
        }
        addends = std::move(next);
    }
    return addends;
}

// MSB of the mod-2^64 sum of two XOR-shared words, via Kogge-Stone carries.
BoolWords sum_msb(Engine& eng, const BoolWords& a, const BoolWords& b) {
    const std::size_t L = a.size();
    BoolWords g = eng.bool_and(a, b);
    BoolWords p = bxor(a, b);
    for (int sh = 1; sh < 64; sh <<= 1) {
        BoolWords both = eng.bool_and(bconcat(p, p), bconcat(shl(g, sh), shl(p, sh)));
        g = bxor(g, bslice(both, 0, L));
        p = bslice(both, L, L);
    }
    BoolWords sum = bxor(bxor(a, b), shl(g, 1));
    for (auto& w : sum.w) w = (w >> 63) & 1;
    return sum;
}

// Lift an XOR-shared bit (one per element) into arithmetic sharing.
SharedVector bits_to_arith(Engine& eng, const BoolWords& bits) {
    const std::size_t L = bits.size();
    std::vector<SharedVector> terms;
    terms.reserve(static_cast<std::size_t>(eng.parties()));
    for (int m = 1; m <= eng.parties(); ++m) {
        SharedVector t = eng.zeros(L, false);
        if (eng.me() == m) t.v = bits.w;
        terms.push_back(std::move(t));
    }
    while (terms.size() > 1) {
        std::vector<SharedVector> next;
        std::size_t pairs = terms.size() / 2;
        SharedVector lhs = terms[0];
        SharedVector rhs = terms[1];
        for (std::size_t i = 1; i < pairs; ++i) {
            lhs = sv_concat(lhs, terms[2 * i]);
            rhs = sv_concat(rhs, terms[2 * i + 1]);
        }
        SharedVector prod = eng.mul(lhs, rhs);
        for (std::size_t i = 0; i < pairs; ++i) {
            // x xor y = x + y - 2xy
            SharedVector u = sv_slice(lhs, i * L, L);
            SharedVector v = sv_slice(rhs, i * L, L);
            SharedVector uv = sv_slice(prod, i * L, L);
            SharedVector folded = eng.sub(eng.add(u, v), eng.scalar_mul(uv, 2));
            next.push_back(std::move(folded));
        }
        if (terms.size() % 2 == 1) next.push_back(terms.back());
        terms = std::move(next);
    }
    return terms[0];
}

}  // namespace

SharedVector secure_less(Engine& eng, const SharedVector& a, const SharedVector& b) {
    if (a.size() != b.size()) throw ShapeError("secure_less: length mismatch");
    SharedVector d = eng.sub(a, b);

    std::vector<BoolWords> addends;
    addends.reserve(static_cast<std::size_t>(eng.parties()));
    for (int m = 1; m <= eng.parties(); ++m) {
        addends.push_back(eng.bool_input_words(eng.me() == m ? std::span<const std::uint64_t>(d.v)
                                                             : std::span<const std::uint64_t>(),
                                               m, d.size()));
    }
    auto two = csa_compress(eng, std::move(addends));
    BoolWords msb = sum_msb(eng, two[0], two[1]);
    return bits_to_arith(eng, msb);
}

std::size_t secure_argmin(Engine& eng, const SharedVector& v) {
    if (v.size() == 0) throw ShapeError("secure_argmin: empty vector");
    SharedVector cur_min = sv_slice(v, 0, 1);
    ring_t zero = 0;
    SharedVector cur_idx = eng.public_raw(std::span<const ring_t>(&zero, 1));
    for (std::size_t i = 1; i < v.size(); ++i) {
        SharedVector vi = sv_slice(v, i, 1);
        SharedVector b = secure_less(eng, vi, cur_min);

        ring_t iv = static_cast<ring_t>(i);
        SharedVector step = eng.public_raw(std::span<const ring_t>(&iv, 1));
        SharedVector d_val = eng.sub(vi, cur_min);
        SharedVector d_idx{eng.me(), false, eng.session(), {step.v[0] - cur_idx.v[0]}};

        SharedVector sel = eng.mul(sv_concat(b, b), sv_concat(d_val, d_idx));
        cur_min = eng.add(cur_min, sv_slice(sel, 0, 1));
        SharedVector didx = sv_slice(sel, 1, 1);
        didx.scaled = false;
        cur_idx = eng.add(cur_idx, didx);
    }
    auto rec = eng.reconstruct(cur_idx, 0);
    return static_cast<std::size_t>(rec.value()[0]);
}

SharedVector secure_reciprocal(Engine& eng, const SharedVector& y, const ApproxConfig& cfg) {
    if (cfg.newton_iters < 1) throw ConfigError("newton_iters must be >= 1");
    if (cfg.newton_init_log2 > eng.fp().precision_bits)
        throw ConfigError("newton_init_log2 exceeds fixed-point precision");
    std::vector<double> init(y.size(), std::ldexp(1.0, -cfg.newton_init_log2));
    SharedVector z = eng.public_fp(init);
    for (int it = 0; it < cfg.newton_iters; ++it) {
        SharedVector zz = eng.mul_trunc(z, z);
        SharedVector yzz = eng.mul_trunc(y, zz);
        z = eng.sub(eng.scalar_mul(z, 2), yzz);
    }
    return z;
}

SharedVector secure_div(Engine& eng, const SharedVector& x, const SharedVector& y,
                        const ApproxConfig& cfg) {
    SharedVector r = secure_reciprocal(eng, y, cfg);
    return eng.mul_trunc(x, r);
}

SharedVector secure_exp(Engine& eng, const SharedVector& x, const ApproxConfig& cfg) {
    if (cfg.exp_log_rounds < 1) throw ConfigError("exp_log_rounds must be >= 1");
    // x / 2^n is a plain power-of-two rescale
    SharedVector a = eng.truncate(x, cfg.exp_log_rounds);
    eng.add_public(a, fp_encode(1.0, eng.fp()));
    for (int i = 0; i < cfg.exp_log_rounds; ++i) {
        a = eng.mul_trunc(a, a);
    }
    return a;
}

SharedVector secure_sigmoid(Engine& eng, const SharedVector& x, const ApproxConfig& cfg) {
    const std::size_t L = x.size();
    SharedVector xc = x;
    if (cfg.sigmoid_clamp > 0) {
        std::vector<double> lo_v(L, -cfg.sigmoid_clamp);
        std::vector<double> hi_v(L, cfg.sigmoid_clamp);
        SharedVector lo = eng.public_fp(lo_v);
        SharedVector hi = eng.public_fp(hi_v);
        // one batched comparison: [x < lo | hi < x]
        SharedVector b = secure_less(eng, sv_concat(x, hi), sv_concat(lo, x));
        SharedVector adj =
            eng.mul(b, sv_concat(eng.sub(lo, x), eng.sub(hi, x)));  // indicator select, exact
        xc = eng.add(eng.add(x, sv_slice(adj, 0, L)), sv_slice(adj, L, L));
        xc.scaled = true;
    }
    SharedVector ea = secure_exp(eng, eng.neg(xc), cfg);
    eng.add_public(ea, fp_encode(1.0, eng.fp()));
    return secure_reciprocal(eng, ea, cfg);
}

}  // namespace fedtab
