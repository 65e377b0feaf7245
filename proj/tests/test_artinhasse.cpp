#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "aswl/artin_hasse.hpp"

using namespace aswl;

namespace {

// Independent oracle: expand exp(sum T^{p^i}/p^i) as sum g^n / n! over exact
// rationals. Slower route than the recurrence under test.
TruncSeries<Rat> exp_oracle(std::int64_t p, long prec) {
    TruncSeries<Rat> g = series_zero(prec, Rat(0));
    for (Int pw = 1; pw < prec; pw *= p) g[static_cast<long>(pw)] = Rat(1, Int(pw));
    TruncSeries<Rat> acc = series_one(prec, Rat(0), Rat(1));
    TruncSeries<Rat> pw = series_one(prec, Rat(0), Rat(1));
    Rat fact = 1;
    for (long n = 1; n < prec; ++n) {
        pw = series_mul(pw, g, Rat(0));
        fact *= n;
        for (long j = 0; j < prec; ++j) acc[j] += pw[j] / fact;
    }
    return acc;
}

}  // namespace

TEST_CASE("E-series matches the exponential oracle") {
    for (std::int64_t p : {2, 3}) {
        auto e = artin_hasse_series(p, 32);
        auto oracle = exp_oracle(p, 32);
        for (long n = 0; n < 32; ++n) CHECK(e[n] == oracle[n]);
    }
}

TEST_CASE("E-series p-integrality to order 64 and leading terms") {
    for (std::int64_t p : {2, 3}) {
        auto e = artin_hasse_series(p, 65);  // throws NonIntegralCoefficient on failure
        CHECK(e[0] == Rat(1));
        CHECK(e[1] == Rat(1));
        for (long n = 0; n < 65; ++n) CHECK(rat_den(e[n]) % p != 0);
    }
    auto e2 = artin_hasse_series(2, 8);
    CHECK(e2[2] == Rat(1));  // exp(T + T^2/2 + ...) = 1 + T + T^2 + ...
}

TEST_CASE("ah_inverse digit algorithm basics") {
    auto ctx = make_zm(2, 8);
    auto zero = zm(ctx, Int(0)), one = zm(ctx, Int(1));

    auto h0 = ah_inverse(series_one(12, zero, one), ctx);
    for (long j = 0; j < 12; ++j) CHECK(h0[j].is_zero());

    auto h1 = ah_inverse(binomial_series(ctx, 1, 12), ctx);
    CHECK(h1[0].is_zero());
    CHECK(h1[1] == one);  // pi_0 = T + O(T^2)
}

TEST_CASE("ah_inverse round trips on random unit series") {
    std::mt19937_64 rng(7011);
    for (auto [p, M] : {std::pair<std::int64_t, long>{2, 6}, {3, 4}}) {
        auto ctx = make_zm(p, M);
        auto zero = zm(ctx, Int(0)), one = zm(ctx, Int(1));
        auto E = artin_hasse_series_mod(ctx, 16);
        std::uniform_int_distribution<std::int64_t> pick(0, static_cast<std::int64_t>(ctx.mod) - 1);
        for (int iter = 0; iter < 10; ++iter) {
            TruncSeries<Zm> s = series_one(16, zero, one);
            for (long j = 1; j < 16; ++j) s[j] = zm(ctx, Int(pick(rng)));
            auto h = ah_inverse(s, ctx);  // verifies E(h) == s internally
            // E o ah_inverse = id is checked inside; check ah_inverse o E = id.
            TruncSeries<Zm> g = series_zero(16, zero);
            for (long j = 1; j < 16; ++j) g[j] = zm(ctx, Int(pick(rng)));
            auto comp = series_compose_prefix(E, g, 16, zero);
            auto back = ah_inverse(comp, ctx);
            for (long j = 0; j < 16; ++j) CHECK(back[j] == g[j]);
        }
    }
}

TEST_CASE("pi_0 shape and defining identity") {
    for (auto [p, M] : {std::pair<std::int64_t, long>{2, 8}, {3, 8}}) {
        auto ctx = make_zm(p, M);
        auto zero = zm(ctx, Int(0));
        long prec = 64;
        auto pi0 = pi0_series(ctx, prec);
        CHECK(pi0[0].is_zero());
        CHECK(pi0[1].v % p == 1);  // pi_0 mod p lies in T (1 + T F_p[[T]])
        auto E = artin_hasse_series_mod(ctx, prec);
        auto comp = series_compose_prefix(E, pi0, prec, zero);
        auto target = binomial_series(ctx, 1, prec);
        for (long j = 0; j < prec; ++j) CHECK(comp[j] == target[j]);
    }
}

TEST_CASE("coefficient decay of pi_i across i") {
    const long M = 8;
    for (std::int64_t p : {2, 3}) {
        auto ctx = make_zm(p, M);
        std::vector<TruncSeries<Zm>> fam;
        for (long i = 0; i <= 6; ++i) fam.push_back(pi_i_series(ctx, i, 10));
        for (long j = 1; j <= 8; ++j) {
            for (long i = 0; i <= 6; ++i) {
                long v = zm_vp(fam[static_cast<std::size_t>(i)][j]);
                // v_p(b_ij) >= min(i - log_p j, M), i.e. j p^v >= p^i or saturation.
                bool deep = v >= M;
                bool bound = Int(j) * int_pow(p, static_cast<std::uint64_t>(v)) >= int_pow(p, static_cast<std::uint64_t>(i));
                CHECK((deep || bound));
            }
        }
    }
}

TEST_CASE("pi_i at pi_chi: exact vanishing and valuations") {
    // i >= m short-circuits to a proven exact zero.
    for (auto [p, m] : {std::pair<std::int64_t, long>{2, 1}, {2, 2}, {3, 1}}) {
        auto cctx = make_cyclo(p, m);
        for (long i = m; i <= m + 2; ++i) {
            auto z = pi_i_at_chi(cctx, i, 6);
            CHECK(z.is_zero());
            CHECK(z.exact());
            CHECK(vpi(z) == pival_infinite());
        }
    }
    // i < m: v(pi_i(pi_chi)) = p^i.
    for (auto [p, m, M] : {std::tuple<std::int64_t, long, long>{2, 1, 8},
                           {2, 2, 8},
                           {2, 3, 6},
                           {3, 1, 6},
                           {3, 2, 4},
                           {3, 3, 3}}) {
        auto cctx = make_cyclo(p, m);
        ZmCtx zctx = make_zm(p, M);
        auto pi0 = pi0_series(zctx, M * cctx.phi + 1);
        for (long i = 0; i < m; ++i) {
            auto val = vpi(pi_i_at_chi(cctx, i, M, &pi0));
            CHECK(val == pival_finite(ipow64(p, static_cast<unsigned>(i))));
        }
    }
}

TEST_CASE("pi_0 at -2 for p=2, m=1") {
    auto cctx = make_cyclo(2, 1);
    auto v = vpi(pi_i_at_chi(cctx, 0, 8));
    CHECK(v == pival_finite(1));  // v_2(pi_0(-2)) = 1
}

TEST_CASE("E(pi_{i+1}(pi_chi)) = E(pi_i(pi_chi))^p") {
    for (auto [p, m, M] : {std::tuple<std::int64_t, long, long>{2, 3, 6}, {3, 2, 4}}) {
        auto cctx = make_cyclo(p, m);
        ZmCtx zctx = make_zm(p, M);
        long prec = M * cctx.phi + 1;
        auto pi0 = pi0_series(zctx, prec);
        auto E = artin_hasse_series_mod(zctx, prec);
        for (long i = 0; i + 1 < m; ++i) {
            auto xi = pi_i_at_chi(cctx, i, M, &pi0);
            auto xi1 = pi_i_at_chi(cctx, i + 1, M, &pi0);
            auto lhs = series_eval_cyclo(E, xi1, M);
            auto rhs = cyclo_pow(series_eval_cyclo(E, xi, M), p);
            CHECK(lhs == rhs);
        }
    }
}
