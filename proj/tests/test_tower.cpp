#include <catch2/catch_amalgamated.hpp>

#include "aswl/tower.hpp"

using namespace aswl;

namespace {

TowerSpec spec_f2(std::vector<std::pair<long, long>> support) {
    TowerSpec s;
    s.field = make_field(2, 1, {1, 1});
    for (auto ij : support) s.coeffs[ij] = {1};
    return s;
}

}  // namespace

TEST_CASE("validate accepts and rejects") {
    CHECK_NOTHROW(validate(spec_f2({{0, 3}})));
    CHECK_THROWS_AS(validate(spec_f2({{0, 4}})), ForbiddenExponentError);  // 4 in 2Z
    CHECK_THROWS_AS(validate(spec_f2({{1, 5}})), EmptyLevelZeroError);
    CHECK_THROWS_AS(validate(spec_f2({{0, 3}, {1, 0}})), DegreeDivisibleByPError);  // constant-only level
    TowerSpec zero = spec_f2({{0, 3}});
    zero.coeffs[{0, 1}] = {0};
    CHECK_THROWS_AS(validate(zero), InputError);
}

TEST_CASE("delta, m, W") {
    auto inv = invariants(spec_f2({{0, 3}}));
    CHECK(inv.delta == Rat(3));
    CHECK(inv.m == 0);
    CHECK(inv.d_m == 3);
    CHECK(inv.W == Rat(1, 6));
    CHECK(inv.stability_margin == Rat(1, 2));

    // truncation of f = X^b + sum p^i X^{b p^i - 1} at b = 3
    auto inv522 = invariants(spec_f2({{0, 3}, {1, 5}, {2, 11}}));
    CHECK(inv522.delta == Rat(3));
    CHECK(inv522.m == 0);

    auto invx = invariants(spec_f2({{0, 1}}));
    CHECK(invx.delta == Rat(1));
    CHECK(invx.W == Rat(0));

    // the maximum can sit at a positive level
    auto inv17 = invariants(validate(spec_f2({{0, 3}, {1, 7}})));
    CHECK(inv17.delta == Rat(7, 2));
    CHECK(inv17.m == 1);
    CHECK(inv17.d_m == 7);
}

TEST_CASE("conductor") {
    auto s = spec_f2({{0, 3}});
    CHECK(conductor(s, 2) == 7);  // 1 + 3*2
    CHECK(conductor(s, 1) == 4);  // 1 + d_m
    auto multi = spec_f2({{0, 3}, {1, 5}});
    CHECK(conductor(multi, invariants(multi).m + 1) == 1 + invariants(multi).d_m);
    // special and general branches agree above m
    for (long mp = 1; mp <= 4; ++mp) {
        CHECK(conductor(s, mp) == conductor_general(s, mp));
        CHECK(conductor(multi, mp) == conductor_general(multi, mp));
    }
}

TEST_CASE("degree of L and consistency with the conductor") {
    auto s = spec_f2({{0, 3}});
    CHECK(degree_L(s, 1) == 2);
    CHECK(degree_L(s, 2) == 5);
    CHECK(degree_L(s, 3) == 11);
    auto multi = spec_f2({{0, 3}, {1, 5}});
    for (long mc = 1; mc <= 4; ++mc) {
        CHECK(degree_L(s, mc) == degree_L_general(s, mc));
        CHECK(degree_L(multi, mc) == degree_L_general(multi, mc));
        // deg L = conductor - 2 above m
        CHECK(degree_L(s, mc) == conductor(s, mc) - 2);
        CHECK(degree_L(multi, mc) == conductor(multi, mc) - 2);
    }
}

TEST_CASE("c coefficients") {
    auto s1 = spec_f2({{0, 3}});
    auto u = make_unram(s1.field, 1, 6);
    auto c1 = c_coeffs(s1, 6, u);
    REQUIRE(c1.count(3));
    CHECK(c1.at(3) == unram_from_int(u, 1));

    auto s2 = spec_f2({{0, 3}, {1, 3}});
    auto c2 = c_coeffs(s2, 6, u);
    CHECK(c2.at(3) == unram_from_int(u, 3));  // 1 + 2*1

    auto s3 = spec_f2({{0, 3}, {1, 5}});
    auto c3 = c_coeffs(s3, 6, u);
    CHECK(c3.at(5) == unram_from_int(u, 2));
    CHECK(c_valuations(s3).at(5) == 1);
}

TEST_CASE("stability constants") {
    auto s = spec_f2({{0, 3}});
    auto sc = stability_constants(s);
    CHECK(sc.Delta.at({0, 3}) == Rat(0));
    REQUIRE(sc.relevant.size() == 1);
    CHECK(sc.relevant[0] == std::pair<long, long>{0, 3});
    REQUIRE(sc.N.has_value());
    CHECK(*sc.N == 0);
    REQUIRE(sc.m_prime.has_value());
    CHECK(*sc.m_prime == 2);  // 1 + ceil(log2(7/6))
    CHECK_FALSE(sc.higher_levels_can_matter);

    auto s15 = spec_f2({{0, 3}, {1, 5}});
    auto sc15 = stability_constants(s15);
    CHECK(sc15.Delta.at({1, 5}) == Rat(1, 3));
    CHECK(sc15.relevant == std::vector<std::pair<long, long>>{{0, 3}});
    CHECK(sc15.tail_margin_ok.at(1));  // 5 <= 6 - 1/2

    // Delta_x >= 0 with equality exactly at (m, d_m), over the whole support
    for (auto support : {std::vector<std::pair<long, long>>{{0, 3}},
                         {{0, 3}, {1, 5}},
                         {{0, 3}, {1, 5}, {2, 11}},
                         {{0, 3}, {1, 7}}}) {
        auto sp = spec_f2(support);
        auto inv = invariants(sp);
        auto scs = stability_constants(sp);
        for (const auto& [ij, dx] : scs.Delta) {
            CHECK(dx >= 0);
            CHECK((dx == 0) == (ij.first == inv.m && ij.second == inv.d_m));
        }
    }

    // W = 0 towers are 1-slope stable with no level cutoff data
    auto sc1 = stability_constants(spec_f2({{0, 1}}));
    CHECK_FALSE(sc1.N.has_value());
    REQUIRE(sc1.m_prime.has_value());
    CHECK(*sc1.m_prime == 1);

    // W > 1/delta: higher levels can always matter
    auto sc7 = stability_constants(spec_f2({{0, 7}}));
    CHECK(invariants(spec_f2({{0, 7}})).W == Rat(9, 14));
    CHECK(sc7.higher_levels_can_matter);
}
