#pragma once

#include <cmath>
#include <cstdint>

namespace fedtab {

// splitmix64 step; also used as the mixing function for domain separation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a;
    std::uint64_t h = splitmix64(s);
    s ^= b + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return splitmix64(s);
}

// Deterministic stream generator. Seedable from an arbitrary chain of
// domain-separation labels so that (seed, session, kind, index) streams
// never collide.
class Prng {
  public:
    explicit Prng(std::uint64_t seed) : state_(seed) {
        // decorrelate trivially-related seeds
        (void)splitmix64(state_);
    }

    Prng derive(std::uint64_t label) const { return Prng(mix64(state_, label)); }

    std::uint64_t next_u64() { return splitmix64(state_); }

    // uniform in [0, bound) without modulo bias (rejection sampling)
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t limit = bound * (UINT64_MAX / bound);
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % bound;
    }

    double next_unit() {  // [0, 1)
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // standard normal via Box-Muller
    double next_normal() {
        double u1 = next_unit();
        double u2 = next_unit();
        while (u1 <= 0.0) u1 = next_unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

  private:
    std::uint64_t state_;
};

}  // namespace fedtab
