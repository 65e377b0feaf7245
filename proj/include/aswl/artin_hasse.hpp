#pragma once

// The Artin-Hasse exponential E(T) = exp(sum_i T^{p^i}/p^i), its inverse by
// the digit-by-digit induction, the series pi_0 = E^{-1}(1+T), and the
// values pi_i(pi_chi) inside O_m.

#include <cstdint>

#include "aswl/cyclo.hpp"
#include "aswl/numeric.hpp"
#include "aswl/series.hpp"
#include "aswl/zmod.hpp"

namespace aswl {

// E(T) over exact rationals. Coefficients satisfy n e_n = sum_{p^i <= n} e_{n-p^i};
// every e_n is p-integral, which is checked rather than assumed.
inline TruncSeries<Rat> artin_hasse_series(std::int64_t p, long prec) {
    if (prec < 1) throw InputError("artin_hasse_series: prec must be >= 1");
    TruncSeries<Rat> e = series_zero(prec, Rat(0));
    e[0] = 1;
    for (long n = 1; n < prec; ++n) {
        Rat s = 0;
        for (Int pi = 1; pi <= n; pi *= p) s += e[n - static_cast<long>(pi)];
        e[n] = s / n;
        if (rat_den(e[n]) % p == 0)
            throw NonIntegralCoefficientError("artin_hasse_series: coefficient not p-integral");
    }
    return e;
}

inline TruncSeries<Zm> artin_hasse_series_mod(const ZmCtx& ctx, long prec) {
    auto e = artin_hasse_series(ctx.p, prec);
    TruncSeries<Zm> r = series_zero(prec, zm(ctx, Int(0)));
    for (long n = 0; n < prec; ++n) r[n] = zm(ctx, e[n]);
    return r;
}

// Solve E(h) = target digit by digit: at step j the T^j coefficient of
// E(h) - target is removed by h <- h - c T^j. Works over any coefficient
// ring with exact equality.
template <typename T>
TruncSeries<T> ah_inverse(const TruncSeries<T>& target, const TruncSeries<T>& E, const T& zero, const T& one) {
    if (!(target[0] == one)) throw InputError("ah_inverse: target must have constant term 1");
    const long n = target.prec();
    TruncSeries<T> h = series_zero(n, zero);
    for (long j = 1; j < n; ++j) {
        auto comp = series_compose_prefix(E, h, j + 1, zero);
        h[j] = target[j] - comp[j];
    }
    auto comp = series_compose_prefix(E, h, n, zero);
    for (long j = 0; j < n; ++j)
        if (!(comp[j] == target[j])) throw InternalError("ah_inverse: induction failed to converge");
    return h;
}

inline TruncSeries<Zm> ah_inverse(const TruncSeries<Zm>& target, const ZmCtx& ctx) {
    auto E = artin_hasse_series_mod(ctx, target.prec());
    return ah_inverse(target, E, zm(ctx, Int(0)), zm(ctx, Int(1)));
}

// (1+T)^e mod p^M as a truncated series.
inline TruncSeries<Zm> binomial_series(const ZmCtx& ctx, const Int& e, long prec) {
    TruncSeries<Zm> s = series_zero(prec, zm(ctx, Int(0)));
    Int b = 1;
    for (long j = 0; j < prec; ++j) {
        if (j > e) break;
        s[j] = zm(ctx, b);
        b = b * (e - j) / (j + 1);
    }
    return s;
}

// pi_0(T) = E^{-1}(1+T) mod (p^M, T^prec).
inline TruncSeries<Zm> pi0_series(const ZmCtx& ctx, long prec) {
    return ah_inverse(binomial_series(ctx, 1, prec), ctx);
}

// pi_i(T) = E^{-1}((1+T)^{p^i}) mod (p^M, T^prec).
inline TruncSeries<Zm> pi_i_series(const ZmCtx& ctx, long i, long prec) {
    return ah_inverse(binomial_series(ctx, int_pow(ctx.p, static_cast<std::uint64_t>(i)), prec), ctx);
}

// Evaluate a Z/p^M-coefficient series at x in O_m with vpi(x) >= 1. The tail
// beyond T^prec has valuation >= prec, so prec >= M*phi makes the result
// exact mod p^M; this bound is asserted.
inline CycloElem series_eval_cyclo(const TruncSeries<Zm>& f, const CycloElem& x, long M) {
    const CycloCtx& cc = *x.ctx;
    if (x.trunc_M != M) throw InternalError("series_eval_cyclo: precision mismatch");
    PiVal vx = vpi(x);
    if (vx.saturated || (vx.finite() && vx.v < 1))
        throw SaturatedPrecisionError("series_eval_cyclo: argument valuation below 1");
    if (!vx.infinite && f.prec() < M * cc.phi)
        throw SaturatedPrecisionError("series_eval_cyclo: series too short to bound the tail");
    CycloElem acc = cyclo_zero(cc, M);
    for (long k = f.prec(); k-- > 0;) acc = acc * x + cyclo_from_int(cc, f[k].v, M);
    return acc;
}

// pi_i(pi_chi) in O_m mod p^M. Exact zero (proven, not computed) for
// i >= m; otherwise pi_0 evaluated at (1+pi)^{p^i} - 1.
inline CycloElem pi_i_at_chi(const CycloCtx& cctx, long i, long M, const TruncSeries<Zm>* pi0 = nullptr) {
    if (i < 0) throw InputError("pi_i_at_chi: i must be >= 0");
    if (i >= cctx.m) return cyclo_zero(cctx, 0);  // exact zero, proven
    CycloElem y = chi_of(cctx, int_pow(cctx.p, static_cast<std::uint64_t>(i))) - cyclo_one(cctx);
    PiVal vy = vpi(y);
    if (!vy.finite() || vy.v != ipow64(cctx.p, static_cast<unsigned>(i)))
        throw InternalError("pi_i_at_chi: unexpected valuation of (1+pi)^{p^i} - 1");
    CycloElem yt = to_truncated(y, M);
    if (vpi(yt).saturated) throw SaturatedPrecisionError("pi_i_at_chi: argument saturated at this precision");
    if (pi0 != nullptr) return series_eval_cyclo(*pi0, yt, M);
    ZmCtx local = make_zm(cctx.p, M);
    auto s = pi0_series(local, M * cctx.phi + 1);
    return series_eval_cyclo(s, yt, M);
}

}  // namespace aswl
