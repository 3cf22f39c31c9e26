#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "fedtab/secure_math.hpp"
#include "harness.hpp"
#include "plain_pipeline.hpp"

using namespace fedtab;
using fedtab::test::TestWorld;

namespace {

// round-trips a vector of reals through a secure unary op and reconstructs
template <typename F>
std::vector<double> run_unary(int n, std::uint64_t seed, const std::vector<double>& xs, F op) {
    TestWorld w(n, seed);
    auto out = w.run([&](Engine& e) {
        SharedVector sx = e.share_from(
            1, e.me() == 1 ? fp_encode_vec(xs) : std::vector<ring_t>{}, xs.size(), true);
        return op(e, sx);
    });
    return test::decode_joined(out);
}

std::vector<ring_t> signed_vec(const std::vector<std::int64_t>& xs) {
    std::vector<ring_t> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = ring::from_signed(xs[i]);
    return out;
}

}  // namespace

TEST_CASE("secure_less agrees with plaintext signed comparison") {
    for (int n : {2, 3, 4}) {
        TestWorld w(n, 11 + static_cast<std::uint64_t>(n));
        Prng vals(22 + static_cast<std::uint64_t>(n));
        const std::size_t L = 10000 / 4;
        std::vector<std::int64_t> a(L), b(L);
        for (std::size_t i = 0; i < L; ++i) {
            a[i] = static_cast<std::int64_t>(vals.next_u64() >> 2);  // |a - b| < 2^63
            b[i] = static_cast<std::int64_t>(vals.next_u64() >> 2);
            if (vals.next_unit() < 0.5) a[i] = -a[i];
            if (vals.next_unit() < 0.5) b[i] = -b[i];
        }
        auto out = w.run([&](Engine& e) {
            SharedVector sa =
                e.share_from(1, e.me() == 1 ? signed_vec(a) : std::vector<ring_t>{}, L, false);
            SharedVector sb =
                e.share_from(2, e.me() == 2 ? signed_vec(b) : std::vector<ring_t>{}, L, false);
            return secure_less(e, sa, sb);
        });
        auto bits = combine_shares(out);
        for (std::size_t i = 0; i < L; ++i) {
            REQUIRE(bits[i] == (a[i] < b[i] ? 1u : 0u));
        }
    }
}

TEST_CASE("secure_less boundary cases") {
    // equal pairs, 1-ulp gaps, extreme magnitudes
    const std::int64_t big = std::int64_t{1} << 62;
    std::vector<std::int64_t> a{5, 7, 7, -1, big, -big, 0, 1};
    std::vector<std::int64_t> b{7, 7, 6, 0, -big, big, 0, 0};
    TestWorld w(3, 99);
    auto out = w.run([&](Engine& e) {
        SharedVector sa =
            e.share_from(1, e.me() == 1 ? signed_vec(a) : std::vector<ring_t>{}, a.size(), false);
        SharedVector sb =
            e.share_from(2, e.me() == 2 ? signed_vec(b) : std::vector<ring_t>{}, b.size(), false);
        return secure_less(e, sa, sb);
    });
    auto bits = combine_shares(out);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(bits[i] == (a[i] < b[i] ? 1u : 0u));
    }
}

TEST_CASE("fixed-point comparisons through secure_less") {
    TestWorld w(2, 5);
    auto out = w.run([&](Engine& e) {
        std::vector<double> a{5.0, 2.5};
        std::vector<double> b{7.0, 2.5};
        SharedVector sa = e.share_from(1, e.me() == 1 ? fp_encode_vec(a) : std::vector<ring_t>{},
                                       2, true);
        SharedVector sb = e.share_from(2, e.me() == 2 ? fp_encode_vec(b) : std::vector<ring_t>{},
                                       2, true);
        return secure_less(e, sa, sb);
    });
    auto bits = combine_shares(out);
    CHECK(bits[0] == 1);  // 5 < 7
    CHECK(bits[1] == 0);  // strict: equal is not less
}

TEST_CASE("secure_argmin matches plaintext argmin with first-index ties") {
    SUBCASE("worked examples") {
        TestWorld w(3, 31);
        auto out = w.run([&](Engine& e) {
            std::vector<double> v{3.0, 1.0, 2.0};
            SharedVector sv = e.share_from(
                1, e.me() == 1 ? fp_encode_vec(v) : std::vector<ring_t>{}, 3, true);
            Engine c1 = e.child(1);
            std::size_t q1 = secure_argmin(c1, sv);

            std::vector<double> ties{2.0, 2.0, 2.0};
            SharedVector st = e.share_from(
                2, e.me() == 2 ? fp_encode_vec(ties) : std::vector<ring_t>{}, 3, true);
            Engine c2 = e.child(2);
            std::size_t q2 = secure_argmin(c2, st);
            return std::make_pair(q1, q2);
        });
        for (auto [q1, q2] : out) {
            CHECK(q1 == 1);
            CHECK(q2 == 0);  // tie-break to the first index
        }
    }

    SUBCASE("randomized against the oracle") {
        Prng vals(404);
        for (int rep = 0; rep < 40; ++rep) {
            const std::size_t K = 2 + static_cast<std::size_t>(vals.next_below(63));
            std::vector<double> v(K);
            for (auto& x : v) x = (vals.next_unit() - 0.5) * 100.0;
            if (rep % 5 == 0) v[K / 2] = v[0];  // inject occasional ties
            std::size_t want = 0;
            for (std::size_t i = 1; i < K; ++i) {
                if (v[i] < v[want]) want = i;
            }
            const int n = 2 + rep % 3;
            TestWorld w(n, 1000 + static_cast<std::uint64_t>(rep));
            auto out = w.run([&](Engine& e) {
                SharedVector sv = e.share_from(
                    1, e.me() == 1 ? fp_encode_vec(v) : std::vector<ring_t>{}, K, true);
                return secure_argmin(e, sv);
            });
            for (auto q : out) REQUIRE(q == want);
        }
    }

    SUBCASE("empty vector is a shape error") {
        TestWorld w(2, 1);
        w.run([&](Engine& e) {
            SharedVector sv = e.zeros(0, true);
            CHECK_THROWS_AS(secure_argmin(e, sv), ShapeError);
            return 0;
        });
    }
}

TEST_CASE("secure_reciprocal tracks the float recurrence") {
    ApproxConfig dflt;  // z0 = 2^-10, 20 iterations

    SUBCASE("y = 16 under the default configuration") {
        auto got = run_unary(3, 61, {16.0},
                             [&](Engine& e, SharedVector& s) {
                                 return secure_reciprocal(e, s, dflt);
                             });
        CHECK(std::fabs(got[0] - 0.0625) / 0.0625 < 1e-4);
    }

    SUBCASE("paper-style initialization documents its small-y error") {
        ApproxConfig paper;
        paper.newton_init_log2 = 20;
        auto got = run_unary(2, 62, {1.0},
                             [&](Engine& e, SharedVector& s) {
                                 return secure_reciprocal(e, s, paper);
                             });
        const double predicted = test::plain_reciprocal(1.0, paper);  // ~ 1 - e^-1
        CHECK(got[0] == doctest::Approx(predicted).epsilon(1e-3));
        CHECK(got[0] == doctest::Approx(0.6321).epsilon(1e-2));
    }

    SUBCASE("error model over y in [1, 1000]") {
        std::vector<double> ys;
        for (double y = 1.0; y <= 1000.0; y *= 1.9) ys.push_back(y);
        auto got = run_unary(3, 63, ys,
                             [&](Engine& e, SharedVector& s) {
                                 return secure_reciprocal(e, s, dflt);
                             });
        for (std::size_t i = 0; i < ys.size(); ++i) {
            const double rel = std::fabs(got[i] * ys[i] - 1.0);
            const double bound =
                2.0 * std::exp(-ys[i] * std::ldexp(1.0, -dflt.newton_init_log2) *
                               std::ldexp(1.0, dflt.newton_iters)) +
                std::ldexp(1.0, -14);
            REQUIRE(rel <= bound);
        }
    }
}

TEST_CASE("secure_div composes reciprocal and one product") {
    ApproxConfig dflt;
    TestWorld w(3, 71);
    auto out = w.run([&](Engine& e) {
        std::vector<double> xs{-4.0, 0.0, 3.0};
        std::vector<double> ys{4.0, 7.0, 2.0};
        SharedVector sx = e.share_from(1, e.me() == 1 ? fp_encode_vec(xs) : std::vector<ring_t>{},
                                       3, true);
        SharedVector sy = e.share_from(2, e.me() == 2 ? fp_encode_vec(ys) : std::vector<ring_t>{},
                                       3, true);
        return secure_div(e, sx, sy, dflt);
    });
    auto got = test::decode_joined(out);
    CHECK(std::fabs(got[0] - (-1.0)) <= 1e-3);
    CHECK(got[1] == 0.0);  // zero numerator stays exactly zero
    CHECK(std::fabs(got[2] - 1.5) <= 1e-3);
}

TEST_CASE("secure_exp reproduces the limit approximation") {
    ApproxConfig cfg;  // n = 2
    auto got = run_unary(2, 81, {0.0, 1.0, -2.0},
                         [&](Engine& e, SharedVector& s) { return secure_exp(e, s, cfg); });
    CHECK(std::fabs(got[0] - 1.0) <= 1e-4);        // (1+0)^4
    CHECK(got[1] == doctest::Approx(2.44140625).epsilon(1e-3));
    CHECK(got[2] == doctest::Approx(0.0625).epsilon(2e-2));
}

TEST_CASE("secure_exp spends exactly n multiplication rounds") {
    for (int nr : {1, 2, 3}) {
        TestWorld w(3, 90 + static_cast<std::uint64_t>(nr));
        ApproxConfig cfg;
        cfg.exp_log_rounds = nr;
        w.run([&](Engine& e) {
            SharedVector s = e.public_fp(std::vector<double>{0.5});
            return secure_exp(e, s, cfg);
        });
        CHECK(w.net.stats().per_op.at("mul").rounds == static_cast<std::uint64_t>(nr));
    }
}

TEST_CASE("secure_sigmoid matches the float pipeline within 1e-3") {
    ApproxConfig cfg;
    std::vector<double> grid;
    for (double x = -4.0; x <= 4.0 + 1e-9; x += 0.5) grid.push_back(x);
    auto got = run_unary(3, 95, grid,
                         [&](Engine& e, SharedVector& s) { return secure_sigmoid(e, s, cfg); });
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double want = test::plain_sigmoid_pipeline(grid[i], cfg);
        REQUIRE(std::fabs(got[i] - want) <= 1e-3);
    }
    // monotone nondecreasing on the grid (allow fixed-point jitter)
    for (std::size_t i = 1; i < grid.size(); ++i) {
        REQUIRE(got[i] + 1e-6 >= got[i - 1]);
    }
    CHECK(std::fabs(got[8] - 0.5) <= 1e-3);  // x = 0
}

TEST_CASE("paper-style sigmoid shows the documented reciprocal bias at 0") {
    ApproxConfig paper;
    paper.newton_init_log2 = 20;
    paper.sigmoid_clamp = 0.0;
    auto got = run_unary(2, 96, {0.0},
                         [&](Engine& e, SharedVector& s) { return secure_sigmoid(e, s, paper); });
    const double want = test::plain_sigmoid_pipeline(0.0, paper);  // ~ 0.4323
    CHECK(got[0] == doctest::Approx(want).epsilon(1e-3));
}

TEST_CASE("clamping keeps far-negative inputs in the valid region") {
    ApproxConfig cfg;
    auto got = run_unary(2, 97, {-40.0, 40.0},
                         [&](Engine& e, SharedVector& s) { return secure_sigmoid(e, s, cfg); });
    CHECK(got[0] == doctest::Approx(test::plain_sigmoid_pipeline(-4.0, cfg)).epsilon(1e-3));
    CHECK(got[1] == doctest::Approx(test::plain_sigmoid_pipeline(4.0, cfg)).epsilon(1e-3));
}
