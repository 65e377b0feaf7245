#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "aswl/field.hpp"

using namespace aswl;

namespace {

FqkElem fqk(long k, std::vector<std::uint8_t> c) { return FqkElem{k, std::move(c)}; }

// F_p-trace of x in F_{p^n}: sum of p-power conjugates, read off the constant
// coordinate (the rest must vanish).
std::int64_t fp_trace(const ExtCtx& e, const FqkElem& x) {
    auto acc = x.c;
    auto y = x.c;
    for (long l = 1; l < e.n; ++l) {
        y = gfp::powmod(y, e.field->p, e.modulus, e.field->p);
        for (std::size_t i = 0; i < acc.size(); ++i)
            acc[i] = static_cast<std::uint8_t>((acc[i] + y[i]) % e.field->p);
    }
    for (std::size_t i = 1; i < acc.size(); ++i) REQUIRE(acc[i] == 0);
    return acc[0];
}

std::vector<FqkElem> all_elements(const ExtCtx& e) {
    std::vector<FqkElem> out;
    Int total = int_pow(e.field->p, static_cast<std::uint64_t>(e.n));
    for (Int ctr = 0; ctr < total; ++ctr) {
        FqkElem x;
        x.k = e.k;
        x.c.assign(static_cast<std::size_t>(e.n), 0);
        Int rest = ctr;
        for (long pos = e.n - 1; pos >= 0; --pos) {
            x.c[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(rest % e.field->p);
            rest /= e.field->p;
        }
        out.push_back(std::move(x));
    }
    return out;
}

}  // namespace

TEST_CASE("make_field validation") {
    CHECK_NOTHROW(make_field(2, 2, {1, 1, 1}));
    CHECK_NOTHROW(make_field(3, 1, {1, 1}));
    CHECK_THROWS_AS(make_field(2, 2, {1, 0, 1}), ReducibleModulusError);  // (t+1)^2
    CHECK_THROWS_AS(make_field(4, 1, {1, 1}), NotPrimeError);
    CHECK_THROWS_AS(make_field(2, 2, {1, 1}), InputError);  // degree mismatch
}

TEST_CASE("closed points over F_2, small degrees") {
    auto f2 = make_field(2, 1, {1, 1});
    auto d1 = closed_points(f2, 1);
    REQUIRE(d1.size() == 2);
    CHECK(d1[0] == fqk(1, {0}));
    CHECK(d1[1] == fqk(1, {1}));
    CHECK(closed_points(f2, 2).size() == 1);  // (4-2)/2
    CHECK(closed_points(f2, 3).size() == 2);  // (8-2)/3
}

TEST_CASE("closed point counts match the Mobius formula") {
    struct Cfg {
        std::int64_t p;
        long a;
        std::vector<std::int64_t> mod;
    };
    for (const auto& cfg : {Cfg{2, 1, {1, 1}}, Cfg{3, 1, {1, 1}}, Cfg{2, 2, {1, 1, 1}}}) {
        auto fld = make_field(cfg.p, cfg.a, cfg.mod);
        for (long d = 1; d <= 12; ++d) {
            std::uint64_t expected = closed_point_count(fld, d);
            ExtCtx ext = make_ext(fld, d);
            std::uint64_t seen = 0;
            for_each_closed_point(ext, d, [&](const FqkElem&) { ++seen; });
            CHECK(seen == expected);
        }
    }
}

TEST_CASE("representatives are canonical and partition the field") {
    struct Cfg {
        std::int64_t p;
        long a;
        std::vector<std::int64_t> mod;
        long dmax;
    };
    for (const auto& cfg : {Cfg{2, 1, {1, 1}, 6}, Cfg{3, 1, {1, 1}, 4}, Cfg{2, 2, {1, 1, 1}, 3}}) {
        auto fld = make_field(cfg.p, cfg.a, cfg.mod);
        for (long d = 1; d <= cfg.dmax; ++d) {
            auto reps = closed_points(fld, d);
            ExtCtx ext = make_ext(fld, d);
            CHECK(std::is_sorted(reps.begin(), reps.end()));
            std::set<std::vector<std::uint8_t>> seen;
            for (const auto& r : reps) {
                // orbit of exact size d with r as its lex-least member
                auto y = r.c;
                long size = 0;
                for (long l = 1; l <= d; ++l) {
                    y = fq_frob_q(ext, y);
                    if (l < d) CHECK_FALSE(y < r.c);
                    if (y == r.c) {
                        size = l;
                        break;
                    }
                    seen.insert(y);
                }
                if (r.is_zero())
                    CHECK(size == 1);
                else
                    CHECK(size == d);
                seen.insert(r.c);
            }
            // orbits of exact degree d cover sum_{e|d} mu(d/e) q^e elements
            std::uint64_t expected = static_cast<std::uint64_t>(reps.size()) * static_cast<std::uint64_t>(d);
            if (d == 1) expected = static_cast<std::uint64_t>(fld.q());  // zero orbit has size 1
            CHECK(seen.size() == expected);
        }
    }
}

TEST_CASE("teichmuller fixed points and lift property") {
    auto f2 = make_field(2, 1, {1, 1});
    auto u = make_unram(f2, 2, 8);  // Z_4 / 2^8
    auto zero = teichmuller(u, fqk(2, {0, 0}));
    auto one = teichmuller(u, fqk(2, {1, 0}));
    CHECK(zero.is_zero());
    CHECK(one == unram_from_int(u, 1));

    // omega, a generator of F_4^*: [omega]^3 = 1 mod 2^8
    auto om = teichmuller(u, fqk(2, {0, 1}));
    CHECK(unram_pow(u, om, 3) == unram_from_int(u, 1));

    for (auto cfg : {std::pair<std::int64_t, long>{2, 3}, {3, 2}}) {
        std::vector<std::int64_t> mod(static_cast<std::size_t>(cfg.first == 2 ? 2 : 2), 0);
        auto fld = make_field(cfg.first, 1, {1, 1});
        auto uk = make_unram(fld, cfg.second, 5);
        for (const auto& x : all_elements(uk.ext)) {
            auto z = teichmuller(uk, x);
            CHECK(unram_reduce_mod_p(uk, z) == x);
        }
    }
}

TEST_CASE("teichmuller is multiplicative on all pairs in small fields") {
    struct Cfg {
        std::int64_t p;
        long a;
        std::vector<std::int64_t> mod;
        long k;
    };
    for (const auto& cfg : {Cfg{2, 1, {1, 1}, 2}, Cfg{3, 1, {1, 1}, 2}, Cfg{2, 2, {1, 1, 1}, 2}}) {
        auto fld = make_field(cfg.p, cfg.a, cfg.mod);
        auto u = make_unram(fld, cfg.k, 6);
        auto elems = all_elements(u.ext);
        std::vector<UnramElem> lifts;
        for (const auto& x : elems) lifts.push_back(teichmuller(u, x));
        for (std::size_t i = 0; i < elems.size(); ++i)
            for (std::size_t j = 0; j < elems.size(); ++j) {
                auto xy = fq_mul(u.ext, elems[i].c, elems[j].c);
                auto lift_xy = teichmuller(u, fqk(cfg.k, xy));
                CHECK(unram_mul(u, lifts[i], lifts[j]) == lift_xy);
            }
    }
}

TEST_CASE("frobenius fixes Z_p, has order a*k, and matches p-th power on lifts") {
    auto f2 = make_field(2, 1, {1, 1});
    for (long k = 1; k <= 4; ++k) {
        auto u = make_unram(f2, k, 6, /*with_sigma=*/true);
        auto c = unram_from_int(u, 37 % static_cast<std::int64_t>(u.pM));
        CHECK(frobenius_apply(u, c) == c);
        for (const auto& x : all_elements(u.ext)) {
            auto z = teichmuller(u, x);
            // sigma^{ak} = identity
            auto w = z;
            for (long l = 0; l < u.n(); ++l) w = frobenius_apply(u, w);
            CHECK(w == z);
            // sigma([x]) = [x^p] = [x]^p
            auto xp = gfp::powmod(x.c, u.p(), u.ext.modulus, u.p());
            CHECK(frobenius_apply(u, z) == teichmuller(u, fqk(k, xp)));
            CHECK(frobenius_apply(u, z) == unram_pow(u, z, u.p()));
        }
    }
    auto f9 = make_field(3, 2, {1, 0, 1});
    auto u9 = make_unram(f9, 1, 4, true);
    for (const auto& x : all_elements(u9.ext)) {
        auto z = teichmuller(u9, x);
        CHECK(frobenius_apply(u9, z) == unram_pow(u9, z, 3));
    }
}

TEST_CASE("trace to Z_p") {
    auto f2 = make_field(2, 1, {1, 1});
    auto u = make_unram(f2, 2, 8, true);
    CHECK(trace_to_zp(u, unram_from_int(u, 1)) == 2);  // trace of 1 is the degree
    CHECK(trace_to_zp(u, unram_zero(u)) == 0);
    // [omega] is a root of z^2 + z + 1, so its trace is -1.
    auto om = teichmuller(u, fqk(2, {0, 1}));
    CHECK(trace_to_zp(u, om) == Int(u.pM) - 1);

    std::mt19937_64 rng(99251);
    struct Cfg {
        std::int64_t p;
        long a;
        std::vector<std::int64_t> mod;
        long k;
    };
    for (const auto& cfg : {Cfg{2, 1, {1, 1}, 3}, Cfg{3, 1, {1, 1}, 2}, Cfg{2, 2, {1, 1, 1}, 2}}) {
        auto fld = make_field(cfg.p, cfg.a, cfg.mod);
        auto uk = make_unram(fld, cfg.k, 5, true);
        std::uniform_int_distribution<std::uint64_t> pick(0, uk.pM - 1);
        for (int it = 0; it < 40; ++it) {
            auto z = unram_zero(uk);
            for (auto& cc : z.c) cc = pick(rng);
            Int t = trace_to_zp(uk, z);
            // agreement of the sigma-sum with the Newton-identity linear form
            CHECK(Int(trace_linear(uk, z)) == t);
            // reduction mod p equals the F_p-trace of the reduction
            CHECK(t % cfg.p == fp_trace(uk.ext, unram_reduce_mod_p(uk, z)));
        }
    }
}
