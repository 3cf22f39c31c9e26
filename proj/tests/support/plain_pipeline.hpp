#pragma once

#include <algorithm>
#include <cmath>

#include "fedtab/secure_math.hpp"

namespace fedtab::test {

// Float references that walk the identical iteration/approximation pipeline
// as the secure path; used to freeze expected values independently.

inline double plain_reciprocal(double y, const ApproxConfig& cfg) {
    double z = std::ldexp(1.0, -cfg.newton_init_log2);
    for (int i = 0; i < cfg.newton_iters; ++i) z = 2.0 * z - y * z * z;
    return z;
}

inline double plain_exp(double x, const ApproxConfig& cfg) {
    const double base = 1.0 + x / std::ldexp(1.0, cfg.exp_log_rounds);
    double a = base;
    for (int i = 0; i < cfg.exp_log_rounds; ++i) a *= a;
    return a;
}

inline double plain_sigmoid_pipeline(double x, const ApproxConfig& cfg) {
    double xc = x;
    if (cfg.sigmoid_clamp > 0) xc = std::clamp(x, -cfg.sigmoid_clamp, cfg.sigmoid_clamp);
    return plain_reciprocal(1.0 + plain_exp(-xc, cfg), cfg);
}

}  // namespace fedtab::test
