#pragma once

#include <cstddef>

#include "fedtab/sharing.hpp"

namespace fedtab {

// Knobs for the iterative approximations. The defaults favor accuracy for
// denominators up to ~2^11; newton_init_log2 = 20 reproduces the published
// parameterization (and its e^-y error profile for small y).
struct ApproxConfig {
    int newton_iters = 20;
    int newton_init_log2 = 10;  // z_0 = 2^-newton_init_log2
    int exp_log_rounds = 2;     // n; e^x ~ (1 + x/2^n)^(2^n)
    double sigmoid_clamp = 4.0; // clamp inputs to [-c, c]; 0 disables
};

// Smallest safe initialization exponent for denominators in (0, bound]:
// guarantees y * z_0 < 1 so the Newton iteration converges.
int newton_init_for_bound(double bound);

// --- shared-vector utilities ---
SharedVector sv_concat(const SharedVector& a, const SharedVector& b);
SharedVector sv_slice(const SharedVector& a, std::size_t offset, std::size_t len);

// Elementwise strict comparison: reconstructs to 1 iff a < b as signed
// two's-complement values (requires |a - b| < 2^63). Result is raw {0,1}.
// Bit-decomposes each party's share of a - b, compresses the n addends with
// carry-save full adders, extracts the MSB with a Kogge-Stone prefix adder
// over packed 64-bit words, then lifts the XOR-shared bit to arithmetic
// sharing by pairwise folding (x xor y = x + y - 2xy).
SharedVector secure_less(Engine& eng, const SharedVector& a, const SharedVector& b);

// Index of the minimum element, revealed to all parties. Ties resolve to the
// smallest index (strict less-than never replaces on equality).
std::size_t secure_argmin(Engine& eng, const SharedVector& v);

// Newton-Raphson reciprocal: z_i = 2 z_{i-1} - y z_{i-1}^2, z_0 = 2^-init.
// Caller contract: y > 0 and y * z_0 < 2.
SharedVector secure_reciprocal(Engine& eng, const SharedVector& y, const ApproxConfig& cfg);

SharedVector secure_div(Engine& eng, const SharedVector& x, const SharedVector& y,
                        const ApproxConfig& cfg);

// e^x by limit approximation with exp_log_rounds squarings (exactly that many
// online multiplication rounds).
SharedVector secure_exp(Engine& eng, const SharedVector& x, const ApproxConfig& cfg);

// 1 / (1 + e^-x), with optional oblivious clamp of x to [-c, c] first.
SharedVector secure_sigmoid(Engine& eng, const SharedVector& x, const ApproxConfig& cfg);

}  // namespace fedtab
