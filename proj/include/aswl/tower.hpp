#pragma once

// The Z_p-cover data model: sparse coefficient table a_ij over F_q and the
// closed-form invariants attached to it (delta, m, d_m, W, conductor,
// L-degree, c_i coefficients, Delta_x, relevance set, stability thresholds).
// All rationals here are exact.

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "aswl/field.hpp"
#include "aswl/numeric.hpp"

namespace aswl {

struct TowerSpec {
    FieldCtx field;
    // (level i, exponent j) -> nonzero element of F_q (coords over F_p, length a)
    std::map<std::pair<long, long>, std::vector<std::uint8_t>> coeffs;
};

struct TowerInvariants {
    Rat delta;
    long m = 0;
    long d_m = 0;
    bool genus_stable = true;  // finite data always is
    Rat W;       // a(p-1)(d_m-1)^2 / (8 delta)
    Rat stability_margin;  // a(p-1)(d_m-1)^2 / 8
};

struct StabilityConstants {
    std::map<std::pair<long, long>, Rat> Delta;      // p^i - j/delta per present coefficient
    std::vector<std::pair<long, long>> relevant;     // present x with Delta_x < W
    std::optional<long> N;                           // max relevant level (absent if W = 0)
    std::optional<long> m_prime;                     // slope-stability conductor bound
    bool higher_levels_can_matter = false;           // W > 1/delta: levels above N could still be relevant
    std::map<long, bool> tail_margin_ok;              // levels i > m: d_i <= delta p^i - W delta
};

// Degrees d_i = deg f_i of the present levels.
inline std::map<long, long> level_degrees(const TowerSpec& spec) {
    std::map<long, long> d;
    for (const auto& [ij, val] : spec.coeffs) {
        auto it = d.find(ij.first);
        if (it == d.end() || it->second < ij.second) d[ij.first] = ij.second;
    }
    return d;
}

// v_p(c_j) = least level carrying exponent j.
inline std::map<long, long> c_valuations(const TowerSpec& spec) {
    std::map<long, long> v;
    for (const auto& [ij, val] : spec.coeffs)
        if (!v.count(ij.second) || v[ij.second] > ij.first) v[ij.second] = ij.first;
    return v;
}

inline const TowerSpec& validate(const TowerSpec& spec) {
    const std::int64_t p = spec.field.p;
    if (spec.coeffs.empty()) throw EmptyLevelZeroError("validate: no coefficients given");
    for (const auto& [ij, val] : spec.coeffs) {
        auto [i, j] = ij;
        if (i < 0 || j < 0) throw InputError("validate: negative index");
        if (j >= 1 && j % p == 0)
            throw ForbiddenExponentError("validate: a_{" + std::to_string(i) + "," + std::to_string(j) +
                                         "} has exponent divisible by p");
        if (static_cast<long>(val.size()) != spec.field.a)
            throw InputError("validate: coefficient with wrong coordinate length");
        bool nonzero = false;
        for (auto x : val) nonzero = nonzero || (x % p != 0);
        if (!nonzero)
            throw InputError("validate: a_{" + std::to_string(i) + "," + std::to_string(j) + "} is zero");
    }
    auto degs = level_degrees(spec);
    if (!degs.count(0) || degs.at(0) < 1) throw EmptyLevelZeroError("validate: deg(f_0) >= 1 is required");
    for (const auto& [i, di] : degs)
        if (di % p == 0)
            throw DegreeDivisibleByPError("validate: p divides deg(f_" + std::to_string(i) + ")");
    // membership in the index set: j <= delta p^i (automatic for delta = max d_i/p^i,
    // kept as a guard)
    Rat delta = 0;
    for (const auto& [i, di] : degs) {
        Rat r = Rat(di) / int_pow(p, static_cast<std::uint64_t>(i));
        if (r > delta) delta = r;
    }
    for (const auto& [ij, val] : spec.coeffs)
        if (Rat(ij.second) > delta * int_pow(p, static_cast<std::uint64_t>(ij.first)))
            throw OutsideXError("validate: a_{" + std::to_string(ij.first) + "," + std::to_string(ij.second) +
                                "} lies outside the admissible index set");
    return spec;
}

inline TowerInvariants invariants(const TowerSpec& spec) {
    const std::int64_t p = spec.field.p;
    auto degs = level_degrees(spec);
    TowerInvariants inv;
    bool first = true;
    for (const auto& [i, di] : degs) {
        Rat r = Rat(di) / int_pow(p, static_cast<std::uint64_t>(i));
        if (first || r > inv.delta) {
            inv.delta = r;
            inv.m = i;
            inv.d_m = di;
            first = false;
        }
    }
    Rat base = Rat(spec.field.a) * (p - 1) * (inv.d_m - 1) * (inv.d_m - 1) / 8;
    inv.W = base / inv.delta;
    inv.stability_margin = base;
    inv.genus_stable = true;
    return inv;
}

// Conductor exponent at infinity of C_{m'} -> C_0 from the c_i data:
// max{1 + j p^{m'-v_p(c_j)-1} : j >= 1, p coprime to j, v_p(c_j) < m'}.
inline long conductor_general(const TowerSpec& spec, long m_prime) {
    if (m_prime < 1) throw InputError("conductor: m' must be >= 1");
    const std::int64_t p = spec.field.p;
    long best = -1;
    for (const auto& [j, v] : c_valuations(spec)) {
        if (j < 1 || v >= m_prime) continue;
        long cand = 1 + j * ipow64(p, static_cast<unsigned>(m_prime - v - 1));
        best = std::max(best, cand);
    }
    if (best < 0) throw InternalError("conductor: no contributing coefficient");
    return best;
}

inline long conductor(const TowerSpec& spec, long m_prime) {
    auto inv = invariants(spec);
    if (m_prime > inv.m)
        return 1 + inv.d_m * ipow64(spec.field.p, static_cast<unsigned>(m_prime - inv.m - 1));
    return conductor_general(spec, m_prime);
}

// deg L(chi, s) from the c_i data:
// -1 + p^{m_chi - 1} max{j / p^{v_p(c_j)} : j >= 1, v_p(c_j) < m_chi}.
inline long degree_L_general(const TowerSpec& spec, long m_chi) {
    if (m_chi < 1) throw InputError("degree_L: m_chi must be >= 1");
    const std::int64_t p = spec.field.p;
    long best = -1;
    for (const auto& [j, v] : c_valuations(spec)) {
        if (j < 1 || v >= m_chi) continue;
        long cand = j * ipow64(p, static_cast<unsigned>(m_chi - 1 - v));
        best = std::max(best, cand);
    }
    if (best < 0) throw InternalError("degree_L: no contributing coefficient");
    return best - 1;
}

inline long degree_L(const TowerSpec& spec, long m_chi) {
    auto inv = invariants(spec);
    if (m_chi > inv.m) {
        Rat d = inv.delta * int_pow(spec.field.p, static_cast<std::uint64_t>(m_chi - 1));
        return static_cast<long>(rat_num(d)) - 1;  // delta p^{m_chi-1} is integral here
    }
    return degree_L_general(spec, m_chi);
}

// c_j = sum_i p^i [a_ij] in Z_q / p^M.
inline std::map<long, UnramElem> c_coeffs(const TowerSpec& spec, long M, const UnramCtx& u) {
    if (u.ext.k != 1 || u.M != M) throw InternalError("c_coeffs: wrong lift context");
    std::map<long, UnramElem> out;
    for (const auto& [ij, val] : spec.coeffs) {
        auto [i, j] = ij;
        if (i >= M) continue;  // p^i vanishes mod p^M
        UnramElem term = teichmuller_base(u, val);
        term = unram_scale(u, term, static_cast<std::uint64_t>(ipow64(spec.field.p, static_cast<unsigned>(i))));
        auto it = out.find(j);
        if (it == out.end())
            out.emplace(j, term);
        else
            it->second = unram_add(u, it->second, term);
    }
    return out;
}

inline std::map<long, UnramElem> c_coeffs(const TowerSpec& spec, long M) {
    UnramCtx u = make_unram(spec.field, 1, M);
    return c_coeffs(spec, M, u);
}

inline StabilityConstants stability_constants(const TowerSpec& spec) {
    const std::int64_t p = spec.field.p;
    auto inv = invariants(spec);
    StabilityConstants sc;
    for (const auto& [ij, val] : spec.coeffs) {
        Rat delta_x = Rat(int_pow(p, static_cast<std::uint64_t>(ij.first))) - Rat(ij.second) / inv.delta;
        sc.Delta[ij] = delta_x;
        if (delta_x < inv.W) sc.relevant.push_back(ij);
    }
    if (inv.W > 0) {
        long N = 0;
        for (const auto& ij : sc.relevant) N = std::max(N, ij.first);
        sc.N = N;
        // m' = 1 + ceil(log_p((p^N + W)/(p-1)))
        Rat arg = (Rat(int_pow(p, static_cast<std::uint64_t>(N))) + inv.W) / (p - 1);
        sc.m_prime = 1 + ceil_log_p(arg, p);
    } else {
        sc.m_prime = 1;  // bounds coincide, 1-slope stable
    }
    sc.higher_levels_can_matter = inv.W * inv.delta > 1;
    for (const auto& [i, di] : level_degrees(spec)) {
        if (i <= inv.m) continue;
        Rat bound = inv.delta * int_pow(p, static_cast<std::uint64_t>(i)) - inv.W * inv.delta;
        sc.tail_margin_ok[i] = Rat(di) <= bound;
    }
    return sc;
}

}  // namespace aswl
