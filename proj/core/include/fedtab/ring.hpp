#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "fedtab/errors.hpp"

namespace fedtab {

// Ring element of Z_{2^64}. All arithmetic wraps silently; unsigned
// overflow is well-defined in C++, so plain uint64_t ops are exact.
using ring_t = std::uint64_t;

inline constexpr int kRingBits = 64;

namespace ring {

inline ring_t add(ring_t a, ring_t b) { return a + b; }
inline ring_t sub(ring_t a, ring_t b) { return a - b; }
inline ring_t neg(ring_t a) { return ~a + 1; }
inline ring_t mul(ring_t a, ring_t b) { return a * b; }

inline std::int64_t to_signed(ring_t v) { return static_cast<std::int64_t>(v); }
inline ring_t from_signed(std::int64_t v) { return static_cast<ring_t>(v); }

}  // namespace ring

// Fixed-point embedding: reals scaled by 2^l, two's complement sign.
struct FixedPointConfig {
    int precision_bits = 20;  // l

    double scale() const { return std::ldexp(1.0, precision_bits); }
    // Representable range: |x| < 2^(64 - l - 1).
    double max_abs() const { return std::ldexp(1.0, kRingBits - precision_bits - 1); }
};

// round-half-away-from-zero (std::round's tie rule)
inline ring_t fp_encode(double x, const FixedPointConfig& cfg = {}) {
    if (!(std::fabs(x) < cfg.max_abs())) {
        throw RangeError("fp_encode: value out of fixed-point range");
    }
    const double scaled = std::round(x * cfg.scale());
    return ring::from_signed(static_cast<std::int64_t>(scaled));
}

inline double fp_decode(ring_t v, const FixedPointConfig& cfg = {}) {
    return static_cast<double>(ring::to_signed(v)) / cfg.scale();
}

inline std::vector<ring_t> fp_encode_vec(const std::vector<double>& xs,
                                         const FixedPointConfig& cfg = {}) {
    std::vector<ring_t> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = fp_encode(xs[i], cfg);
    return out;
}

inline std::vector<double> fp_decode_vec(const std::vector<ring_t>& vs,
                                         const FixedPointConfig& cfg = {}) {
    std::vector<double> out(vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i) out[i] = fp_decode(vs[i], cfg);
    return out;
}

}  // namespace fedtab
