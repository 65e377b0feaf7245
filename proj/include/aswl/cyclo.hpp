#pragma once

// Arithmetic in O_m = Z[zeta_{p^m}] written in the power basis of the
// uniformizer pi = zeta - 1, with the pi-adic valuation.
//
// Elements are either exact (unbounded integer coordinates) or truncated
// mod p^M. Exact mode is the default for the Euler-product path; truncated
// mode backs the Fredholm-determinant path, where valuations are trusted
// only below M*phi.

#include <cassert>
#include <cstdint>
#include <vector>

#include "aswl/errors.hpp"
#include "aswl/numeric.hpp"

namespace aswl {

struct CycloCtx {
    std::int64_t p = 0;
    long m = 0;             // conductor exponent, chi has order p^m
    long phi = 0;           // (p-1) p^{m-1} = deg of the ring over Z
    std::vector<Int> modulus;  // P_m(pi) = sum_{l<p} (1+pi)^{l p^{m-1}}, length phi+1, monic
    Int ppow_m;             // p^m

    bool operator==(const CycloCtx& o) const { return p == o.p && m == o.m; }
};

// Valuation read-out. `saturated` marks a truncated-mode zero: the true
// valuation is only known to be >= M*phi.
struct PiVal {
    bool infinite = false;
    bool saturated = false;
    long v = 0;

    bool finite() const { return !infinite; }
    bool operator==(const PiVal& o) const {
        return infinite == o.infinite && saturated == o.saturated && (infinite || v == o.v);
    }
};

inline PiVal pival_finite(long v) { return PiVal{false, false, v}; }
inline PiVal pival_infinite() { return PiVal{true, false, 0}; }
inline PiVal pival_saturated() { return PiVal{true, true, 0}; }

struct CycloElem {
    const CycloCtx* ctx = nullptr;
    std::vector<Int> c;  // length ctx->phi
    long trunc_M = 0;    // 0 = exact, otherwise coordinates live mod p^M

    bool exact() const { return trunc_M == 0; }

    bool is_zero() const {
        for (const auto& x : c)
            if (x != 0) return false;
        return true;
    }

    bool operator==(const CycloElem& o) const {
        assert(ctx == o.ctx || *ctx == *o.ctx);
        return trunc_M == o.trunc_M && c == o.c;
    }
};

inline CycloCtx make_cyclo(std::int64_t p, long m) {
    if (!is_prime_u64(static_cast<std::uint64_t>(p))) throw NotPrimeError("make_cyclo: p is not prime");
    if (m < 1) throw InputError("make_cyclo: m must be >= 1");
    CycloCtx ctx;
    ctx.p = p;
    ctx.m = m;
    ctx.phi = static_cast<long>((p - 1) * int_pow(p, static_cast<std::uint64_t>(m - 1)));
    ctx.ppow_m = int_pow(p, static_cast<std::uint64_t>(m));

    // Expand sum_{l<p} (1+pi)^{l p^{m-1}}.
    std::int64_t step = static_cast<std::int64_t>(ipow64(p, static_cast<unsigned>(m - 1)));
    std::vector<Int> mod(static_cast<std::size_t>(ctx.phi) + 1, 0);
    std::vector<Int> pw{1};  // (1+pi)^{l*step}, exact integer polynomial
    for (std::int64_t l = 0; l < p; ++l) {
        for (std::size_t j = 0; j < pw.size(); ++j) mod[j] += pw[j];
        if (l + 1 < p) {
            // multiply pw by (1+pi)^step via binomial coefficients
            std::vector<Int> binom(static_cast<std::size_t>(step) + 1);
            Int b = 1;
            for (std::int64_t j = 0; j <= step; ++j) {
                binom[static_cast<std::size_t>(j)] = b;
                b = b * (step - j) / (j + 1);
            }
            std::vector<Int> nw(pw.size() + static_cast<std::size_t>(step), 0);
            for (std::size_t i = 0; i < pw.size(); ++i)
                for (std::size_t j = 0; j < binom.size(); ++j) nw[i + j] += pw[i] * binom[j];
            pw.swap(nw);
        }
    }
    if (static_cast<long>(mod.size()) != ctx.phi + 1 || mod.back() != 1)
        throw InternalError("make_cyclo: modulus is not monic of degree phi");
    // Eisenstein shape: constant term p, lower coefficients divisible by p.
    if (mod[0] != p) throw InternalError("make_cyclo: constant term of P_m is not p");
    for (long j = 0; j < ctx.phi; ++j)
        if (mod[static_cast<std::size_t>(j)] % p != 0)
            throw InternalError("make_cyclo: P_m is not Eisenstein at p");
    ctx.modulus = std::move(mod);
    return ctx;
}

namespace detail {

inline void cyclo_truncate(const CycloCtx& ctx, std::vector<Int>& c, long M) {
    if (M == 0) return;
    Int mod = int_pow(ctx.p, static_cast<std::uint64_t>(M));
    for (auto& x : c) {
        x %= mod;
        if (x < 0) x += mod;
    }
}

// Reduce a coefficient vector of arbitrary length by the monic modulus.
inline std::vector<Int> cyclo_reduce(const CycloCtx& ctx, std::vector<Int> v) {
    const long phi = ctx.phi;
    for (std::size_t e = v.size(); e-- > static_cast<std::size_t>(phi);) {
        if (v[e] == 0) continue;
        Int lead = std::move(v[e]);
        v[e] = 0;
        std::size_t base = e - static_cast<std::size_t>(phi);
        for (long j = 0; j < phi; ++j) v[base + static_cast<std::size_t>(j)] -= lead * ctx.modulus[static_cast<std::size_t>(j)];
    }
    v.resize(static_cast<std::size_t>(phi));
    return v;
}

}  // namespace detail

inline CycloElem cyclo_zero(const CycloCtx& ctx, long trunc_M = 0) {
    return CycloElem{&ctx, std::vector<Int>(static_cast<std::size_t>(ctx.phi), 0), trunc_M};
}

inline CycloElem cyclo_from_int(const CycloCtx& ctx, Int n, long trunc_M = 0) {
    CycloElem e = cyclo_zero(ctx, trunc_M);
    e.c[0] = std::move(n);
    detail::cyclo_truncate(ctx, e.c, trunc_M);
    return e;
}

inline CycloElem cyclo_one(const CycloCtx& ctx, long trunc_M = 0) { return cyclo_from_int(ctx, 1, trunc_M); }

// pi itself (valid for phi >= 2; for m=1, p=2 the ring is Z and pi = -2).
inline CycloElem cyclo_pi(const CycloCtx& ctx, long trunc_M = 0) {
    CycloElem e = cyclo_zero(ctx, trunc_M);
    if (ctx.phi >= 2) {
        e.c[1] = 1;
    } else {
        e.c[0] = -ctx.modulus[0];  // pi = -P_1(0) when phi = 1
        detail::cyclo_truncate(ctx, e.c, trunc_M);
    }
    return e;
}

namespace detail {
inline long common_trunc(const CycloElem& a, const CycloElem& b) {
    if (a.trunc_M != b.trunc_M) throw InternalError("cyclo: mixing exact and truncated operands");
    return a.trunc_M;
}
}  // namespace detail

inline CycloElem operator+(const CycloElem& a, const CycloElem& b) {
    long M = detail::common_trunc(a, b);
    CycloElem r = a;
    for (std::size_t j = 0; j < r.c.size(); ++j) r.c[j] += b.c[j];
    detail::cyclo_truncate(*a.ctx, r.c, M);
    return r;
}

inline CycloElem operator-(const CycloElem& a, const CycloElem& b) {
    long M = detail::common_trunc(a, b);
    CycloElem r = a;
    for (std::size_t j = 0; j < r.c.size(); ++j) r.c[j] -= b.c[j];
    detail::cyclo_truncate(*a.ctx, r.c, M);
    return r;
}

inline CycloElem operator-(const CycloElem& a) {
    CycloElem r = a;
    for (auto& x : r.c) x = -x;
    detail::cyclo_truncate(*a.ctx, r.c, a.trunc_M);
    return r;
}

inline CycloElem operator*(const CycloElem& a, const CycloElem& b) {
    long M = detail::common_trunc(a, b);
    const CycloCtx& ctx = *a.ctx;
    const long phi = ctx.phi;
    std::vector<Int> conv(static_cast<std::size_t>(2 * phi - 1), 0);
    for (long i = 0; i < phi; ++i) {
        if (a.c[static_cast<std::size_t>(i)] == 0) continue;
        for (long j = 0; j < phi; ++j) {
            if (b.c[static_cast<std::size_t>(j)] == 0) continue;
            conv[static_cast<std::size_t>(i + j)] += a.c[static_cast<std::size_t>(i)] * b.c[static_cast<std::size_t>(j)];
        }
    }
    CycloElem r{&ctx, detail::cyclo_reduce(ctx, std::move(conv)), M};
    detail::cyclo_truncate(ctx, r.c, M);
    return r;
}

inline CycloElem operator*(const CycloElem& a, const Int& n) {
    CycloElem r = a;
    for (auto& x : r.c) x *= n;
    detail::cyclo_truncate(*a.ctx, r.c, a.trunc_M);
    return r;
}

inline CycloElem cyclo_pow(CycloElem base, Int e) {
    assert(e >= 0);
    CycloElem r = cyclo_one(*base.ctx, base.trunc_M);
    while (e > 0) {
        if ((e & 1) != 0) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

inline CycloElem to_truncated(const CycloElem& a, long M) {
    CycloElem r = a;
    r.trunc_M = M;
    detail::cyclo_truncate(*a.ctx, r.c, M);
    return r;
}

// pi-adic valuation. For x = sum a_j pi^j the candidates phi*v_p(a_j) + j are
// pairwise distinct mod phi, so the minimum is the exact valuation.
inline PiVal vpi(const CycloElem& x) {
    const CycloCtx& ctx = *x.ctx;
    bool any = false;
    long best = 0;
    for (long j = 0; j < ctx.phi; ++j) {
        const Int& a = x.c[static_cast<std::size_t>(j)];
        if (a == 0) continue;
        long cand = ctx.phi * vp_int(a, ctx.p) + j;
        if (!any || cand < best) best = cand;
        any = true;
    }
    if (!any) return x.exact() ? pival_infinite() : pival_saturated();
    return pival_finite(best);
}

// chi(n) = (1+pi)^n, reduced mod P_m. A homomorphism Z/p^m -> O_m^*.
inline CycloElem chi_of(const CycloCtx& ctx, Int n, long trunc_M = 0) {
    n %= ctx.ppow_m;
    if (n < 0) n += ctx.ppow_m;
    CycloElem onepi = cyclo_one(ctx, trunc_M);
    if (ctx.phi >= 2)
        onepi.c[1] = 1;
    else
        onepi.c[0] += -ctx.modulus[0];  // 1 + pi in the rank-1 case
    detail::cyclo_truncate(ctx, onepi.c, trunc_M);
    return cyclo_pow(onepi, n);
}

// Convert a pi-adic valuation to the v_q normalization (v_q(q) = 1):
// v_{pi_chi}(q) = a (p-1) p^{m-1}.
inline Rat vq_normalize(const Rat& v, long a, std::int64_t p, long m) {
    Rat e = Rat(a) * (p - 1) * Int(int_pow(p, static_cast<std::uint64_t>(m - 1)));
    return v / e;
}

}  // namespace aswl
