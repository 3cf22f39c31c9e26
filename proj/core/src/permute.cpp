#include "fedtab/permute.hpp"

#include <algorithm>
#include <numeric>

#include "fedtab/errors.hpp"

namespace fedtab {

Permutation stable_sort_permutation(const std::vector<double>& column) {
    Permutation p;
    p.map.resize(column.size());
    std::iota(p.map.begin(), p.map.end(), 0u);
    std::stable_sort(p.map.begin(), p.map.end(),
                     [&column](std::uint32_t a, std::uint32_t b) { return column[a] < column[b]; });
    return p;
}

Permutation invert(const Permutation& p) {
    Permutation inv;
    inv.map.resize(p.size());
    for (std::uint32_t i = 0; i < p.size(); ++i) inv.map[p.map[i]] = i;
    return inv;
}

SharedVector secure_permute(Engine& eng, int owner, const std::optional<Permutation>& pi,
                            const SharedVector& x) {
    const std::size_t N = x.size();
    if (eng.me() == owner) {
        if (!pi) throw ProtocolError("secure_permute: owner must supply a permutation");
        if (pi->size() != N) throw ShapeError("secure_permute: permutation length mismatch");
    }
    PermCrShares cr = eng.take_perm_cr(N, owner);

    // Round 1: owner derives pi_s with pi(.) = pi_s[pi_p(.)] and broadcasts it.
    const std::uint32_t r1 = eng.begin_round();
    Permutation pi_s;
    if (eng.me() == owner) {
        Permutation inv_p = invert(Permutation{cr.pi_p});
        pi_s.map.resize(N);
        for (std::size_t i = 0; i < N; ++i) pi_s.map[i] = inv_p.map[pi->map[i]];
        Frame f{static_cast<std::uint8_t>(eng.me()), eng.session(), r1, {}};
        f.payload.assign(pi_s.map.begin(), pi_s.map.end());
        eng.net().broadcast(eng.me(), f, RoundKind::PermSigma);
    } else {
        Frame f = eng.net().recv(eng.me(), owner, eng.session(), r1);
        pi_s.map.assign(f.payload.begin(), f.payload.end());
    }

    // every party masks its share locally
    std::vector<ring_t> masked(N);
    for (std::size_t i = 0; i < N; ++i) masked[i] = x.v[i] - cr.r_share[i];

    // Round 2: x - r is revealed to the owner only.
    const std::uint32_t r2 = eng.begin_round();
    SharedVector out{eng.me(), x.scaled, eng.session(), {}};
    if (eng.me() != owner) {
        Frame f{static_cast<std::uint8_t>(eng.me()), eng.session(), r2, std::move(masked)};
        eng.net().send(owner, f, RoundKind::PermReveal);
        out.v = apply_permutation(pi_s, cr.permuted_r_share);
    } else {
        for (int from = 1; from <= eng.parties(); ++from) {
            if (from == eng.me()) continue;
            Frame f = eng.net().recv(eng.me(), from, eng.session(), r2);
            for (std::size_t i = 0; i < N; ++i) masked[i] += f.payload[i];
        }
        std::vector<ring_t> permuted_mask(N);
        for (std::size_t i = 0; i < N; ++i) permuted_mask[i] = masked[pi->map[i]];
        out.v = apply_permutation(pi_s, cr.permuted_r_share);
        for (std::size_t i = 0; i < N; ++i) out.v[i] += permuted_mask[i];
    }
    return out;
}

BucketSums secure_discretize(Engine& eng, int owner, const std::optional<Permutation>& pi,
                             const SharedVector& g, const SharedVector& h, std::size_t buckets) {
    const std::size_t N = g.size();
    if (h.size() != N) throw ShapeError("secure_discretize: gradient length mismatch");
    if (buckets < 2) throw ConfigError("secure_discretize: need at least 2 buckets");
    if (buckets > N) throw ConfigError("secure_discretize: more buckets than samples");

    // same logical permutation, independent CR per invocation
    SharedVector gp = secure_permute(eng, owner, pi, g);
    SharedVector hp = secure_permute(eng, owner, pi, h);

    const std::size_t M = N / buckets;
    BucketSums out;
    out.bucket_len = M;
    out.alpha = eng.zeros(buckets, g.scaled);
    out.beta = eng.zeros(buckets, h.scaled);
    for (std::size_t b = 0; b < buckets; ++b) {
        const std::size_t lo = b * M;
        const std::size_t hi = (b + 1 == buckets) ? N : (b + 1) * M;
        ring_t sa = 0, sb = 0;
        for (std::size_t i = lo; i < hi; ++i) {
            sa += gp.v[i];
            sb += hp.v[i];
        }
        out.alpha.v[b] = sa;
        out.beta.v[b] = sb;
    }
    return out;
}

}  // namespace fedtab
