#pragma once

// Scalars mod p^M, the coefficient ring for p-adically truncated series.

#include <cstdint>

#include "aswl/numeric.hpp"

namespace aswl {

struct ZmCtx {
    std::int64_t p = 0;
    long M = 0;
    Int mod;  // p^M
};

inline ZmCtx make_zm(std::int64_t p, long M) {
    ZmCtx c;
    c.p = p;
    c.M = M;
    c.mod = int_pow(p, static_cast<std::uint64_t>(M));
    return c;
}

struct Zm {
    const ZmCtx* ctx = nullptr;
    Int v;

    bool is_zero() const { return v == 0; }
    bool operator==(const Zm& o) const { return v == o.v; }
};

inline Zm zm(const ZmCtx& ctx, Int x) {
    x %= ctx.mod;
    if (x < 0) x += ctx.mod;
    return Zm{&ctx, std::move(x)};
}

// Reduce an exact rational with p-free denominator.
inline Zm zm(const ZmCtx& ctx, const Rat& r) {
    Int den = rat_den(r);
    if (den % ctx.p == 0) throw NonIntegralCoefficientError("zm: denominator divisible by p");
    return zm(ctx, rat_num(r) * inv_mod_ppow(den, ctx.p, ctx.M));
}

inline Zm operator+(const Zm& a, const Zm& b) { return zm(*a.ctx, Int(a.v + b.v)); }
inline Zm operator-(const Zm& a, const Zm& b) { return zm(*a.ctx, Int(a.v - b.v)); }
inline Zm operator*(const Zm& a, const Zm& b) { return zm(*a.ctx, Int(a.v * b.v)); }

// v_p of a residue; saturated (>= M) reads report M.
inline long zm_vp(const Zm& a) {
    if (a.v == 0) return a.ctx->M;
    return std::min<long>(a.ctx->M, vp_int(a.v, a.ctx->p));
}

}  // namespace aswl
