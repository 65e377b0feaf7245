#pragma once

// The second, independent computation path: the specialized splitting
// function E_f, the truncated matrix of the Dwork operator psi^a, the
// Fredholm determinant C*(chi, s) by a division-free characteristic
// polynomial, and the reconstruction L*(chi, s) = C*(s)/C*(qs).
//
// Elements live in O_m (x) Z_q mod p^M: polynomials in the unramified
// generator t of degree < a with truncated CycloElem coordinates. sigma acts
// through the field module's sigma(t) and fixes pi.

#include <memory>
#include <optional>
#include <vector>

#include "aswl/analysis.hpp"
#include "aswl/artin_hasse.hpp"
#include "aswl/cyclo.hpp"
#include "aswl/field.hpp"
#include "aswl/lfun.hpp"
#include "aswl/series.hpp"
#include "aswl/tower.hpp"

namespace aswl {

struct DworkCtx {
    const CycloCtx* cctx = nullptr;
    const FieldCtx* field = nullptr;
    long M = 1;
    long a = 1;
    std::vector<Int> lift;  // monic lift of the base-field modulus, degree a
    std::vector<std::vector<Int>> sigma_t_pow;  // sigma(t)^e as integer coordinate rows, e < a
};

struct DworkElem {
    const DworkCtx* ctx = nullptr;
    std::vector<CycloElem> c;  // length a, truncated mode M

    bool is_zero() const {
        for (const auto& x : c)
            if (!x.is_zero()) return false;
        return true;
    }
    bool operator==(const DworkElem& o) const { return c == o.c; }
};

inline DworkCtx make_dwork_ctx(const CycloCtx& cctx, const FieldCtx& field, long M) {
    DworkCtx d;
    d.cctx = &cctx;
    d.field = &field;
    d.M = M;
    d.a = field.a;
    UnramCtx u = make_unram(field, 1, M, /*with_sigma=*/true);
    d.lift.assign(u.lift.begin(), u.lift.end());
    d.sigma_t_pow.resize(static_cast<std::size_t>(d.a));
    for (long e = 0; e < d.a; ++e) {
        const auto& pw = u.sigma_pow[static_cast<std::size_t>(e)];
        d.sigma_t_pow[static_cast<std::size_t>(e)].assign(pw.c.begin(), pw.c.end());
    }
    return d;
}

inline DworkElem dw_zero(const DworkCtx& d) {
    return DworkElem{&d, std::vector<CycloElem>(static_cast<std::size_t>(d.a), cyclo_zero(*d.cctx, d.M))};
}

inline DworkElem dw_one(const DworkCtx& d) {
    DworkElem r = dw_zero(d);
    r.c[0] = cyclo_one(*d.cctx, d.M);
    return r;
}

inline DworkElem dw_from_cyclo(const DworkCtx& d, const CycloElem& x) {
    DworkElem r = dw_zero(d);
    r.c[0] = (x.trunc_M == d.M) ? x : to_truncated(x, d.M);
    return r;
}

// Coordinates of an element of Z_q/p^M become the t-coefficients.
inline DworkElem dw_from_unram(const DworkCtx& d, const UnramElem& z) {
    if (static_cast<long>(z.c.size()) != d.a || z.M != d.M)
        throw InternalError("dw_from_unram: wrong shape");
    DworkElem r = dw_zero(d);
    for (long e = 0; e < d.a; ++e) r.c[static_cast<std::size_t>(e)] = cyclo_from_int(*d.cctx, Int(z.c[static_cast<std::size_t>(e)]), d.M);
    return r;
}

inline DworkElem operator+(const DworkElem& x, const DworkElem& y) {
    DworkElem r = x;
    for (std::size_t e = 0; e < r.c.size(); ++e) r.c[e] = r.c[e] + y.c[e];
    return r;
}

inline DworkElem operator-(const DworkElem& x, const DworkElem& y) {
    DworkElem r = x;
    for (std::size_t e = 0; e < r.c.size(); ++e) r.c[e] = r.c[e] - y.c[e];
    return r;
}

inline DworkElem operator*(const DworkElem& x, const DworkElem& y) {
    const DworkCtx& d = *x.ctx;
    const long a = d.a;
    if (a == 1) {
        DworkElem r = dw_zero(d);
        r.c[0] = x.c[0] * y.c[0];
        return r;
    }
    std::vector<CycloElem> conv(static_cast<std::size_t>(2 * a - 1), cyclo_zero(*d.cctx, d.M));
    for (long i = 0; i < a; ++i) {
        if (x.c[static_cast<std::size_t>(i)].is_zero()) continue;
        for (long j = 0; j < a; ++j) {
            if (y.c[static_cast<std::size_t>(j)].is_zero()) continue;
            conv[static_cast<std::size_t>(i + j)] =
                conv[static_cast<std::size_t>(i + j)] + x.c[static_cast<std::size_t>(i)] * y.c[static_cast<std::size_t>(j)];
        }
    }
    for (long e = 2 * a - 2; e >= a; --e) {
        CycloElem lead = conv[static_cast<std::size_t>(e)];
        if (lead.is_zero()) continue;
        conv[static_cast<std::size_t>(e)] = cyclo_zero(*d.cctx, d.M);
        for (long j = 0; j < a; ++j)
            conv[static_cast<std::size_t>(e - a + j)] =
                conv[static_cast<std::size_t>(e - a + j)] - lead * d.lift[static_cast<std::size_t>(j)];
    }
    DworkElem r = dw_zero(d);
    for (long e = 0; e < a; ++e) r.c[static_cast<std::size_t>(e)] = conv[static_cast<std::size_t>(e)];
    return r;
}

inline DworkElem dw_scale_int(const DworkElem& x, const Int& n) {
    DworkElem r = x;
    for (auto& cc : r.c) cc = cc * n;
    return r;
}

// Multiply by a scalar from O_m (acts on every t-coordinate).
inline DworkElem dw_scale_cyclo(const DworkElem& x, const CycloElem& s) {
    DworkElem r = x;
    const CycloElem st = (s.trunc_M == x.ctx->M) ? s : to_truncated(s, x.ctx->M);
    for (auto& cc : r.c) cc = cc * st;
    return r;
}

// sigma: fixes pi, sends t to sigma(t).
inline DworkElem dw_sigma(const DworkElem& x) {
    const DworkCtx& d = *x.ctx;
    if (d.a == 1) return x;
    DworkElem acc = dw_zero(d);
    for (long e = 0; e < d.a; ++e) {
        const CycloElem& ce = x.c[static_cast<std::size_t>(e)];
        if (ce.is_zero()) continue;
        for (long j = 0; j < d.a; ++j) {
            const Int& coord = d.sigma_t_pow[static_cast<std::size_t>(e)][static_cast<std::size_t>(j)];
            if (coord == 0) continue;
            acc.c[static_cast<std::size_t>(j)] = acc.c[static_cast<std::size_t>(j)] + ce * coord;
        }
    }
    return acc;
}

// Gauss valuation: minimum coordinate valuation.
inline PiVal dw_vpi(const DworkElem& x) {
    bool any = false, any_sat = false;
    long best = 0;
    for (const auto& cc : x.c) {
        PiVal v = vpi(cc);
        if (v.saturated) {
            any_sat = true;
            continue;
        }
        if (v.infinite) continue;
        if (!any || v.v < best) best = v.v;
        any = true;
    }
    if (!any) return any_sat ? pival_saturated() : pival_infinite();
    return pival_finite(best);
}

// ---- the splitting function and the nuclear matrix ----------------------

// E_f specialized at chi: product over present (i,j) with i < m_chi of
// E(pi_i(pi_chi) [a_ij] X^j), mod (p^M, X^xprec).
inline TruncSeries<DworkElem> ef_series(const TowerSpec& spec, const Character& chi, const DworkCtx& d,
                                        long xprec) {
    const CycloCtx& cc = *chi.cctx;
    const long M = d.M;
    ZmCtx zctx = make_zm(cc.p, M);
    long eval_prec = M * cc.phi + 1;
    auto E = artin_hasse_series_mod(zctx, std::max(xprec, eval_prec));
    auto pi0 = pi0_series(zctx, eval_prec);

    // pi_i(pi_chi) for the levels that survive ev_chi
    std::map<long, CycloElem> pival;
    for (const auto& [ij, val] : spec.coeffs) {
        long i = ij.first;
        if (i >= cc.m || pival.count(i)) continue;
        CycloElem y = chi(int_pow(cc.p, static_cast<std::uint64_t>(i))) - cyclo_one(cc);
        PiVal vy = vpi(y);
        if (!vy.finite() || vy.v != ipow64(cc.p, static_cast<unsigned>(i)))
            throw InternalError("ef_series: unexpected valuation of chi(p^i) - 1");
        pival.emplace(i, series_eval_cyclo(pi0, to_truncated(y, M), M));
    }

    UnramCtx u1 = make_unram(spec.field, 1, M);
    DworkElem zero = dw_zero(d), one = dw_one(d);
    TruncSeries<DworkElem> acc = series_one(xprec, zero, one);
    for (const auto& [ij, val] : spec.coeffs) {
        auto [i, j] = ij;
        if (i >= cc.m) continue;  // pi_i(pi_chi) = 0 exactly: factor is 1
        DworkElem arg = dw_from_unram(d, teichmuller_base(u1, val));
        arg = dw_scale_cyclo(arg, pival.at(i));
        PiVal va = dw_vpi(arg);
        if (!va.finite() || va.v < 1) throw SaturatedPrecisionError("ef_series: factor argument has valuation < 1");
        // factor: sum_n e_n arg^n X^{jn}
        TruncSeries<DworkElem> fac = series_zero(xprec, zero);
        fac[0] = one;
        DworkElem pw = one;
        long nmax = (j == 0) ? (eval_prec - 1) : ((xprec - 1) / j);
        for (long n = 1; n <= nmax; ++n) {
            pw = pw * arg;
            if (pw.is_zero()) break;
            DworkElem term = dw_scale_int(pw, E[n].v);
            if (j == 0)
                fac[0] = fac[0] + term;
            else
                fac[n * j] = fac[n * j] + term;
        }
        acc = series_mul(acc, fac, zero);
    }
    return acc;
}

struct NuclearMatrix {
    long D = 0;
    std::vector<std::vector<DworkElem>> A;  // A[i][j] = beta_{q i - j}
};

// B(X) = prod_{l<a} Ef^{sigma^l}(X^{p^l}) mod X^{qD}; entries beta_{qi-j}.
inline NuclearMatrix psi_matrix(const TowerSpec& spec, const Character& chi, const DworkCtx& d, long D) {
    const std::int64_t p = spec.field.p;
    const long a = spec.field.a;
    const long q = static_cast<long>(ipow64(p, static_cast<unsigned>(a)));
    const long xprec = q * D;
    auto ef = ef_series(spec, chi, d, xprec);
    DworkElem zero = dw_zero(d), one = dw_one(d);
    TruncSeries<DworkElem> B = series_one(xprec, zero, one);
    TruncSeries<DworkElem> cur = ef;
    for (long l = 0; l < a; ++l) {
        if (l > 0)
            for (long t = 0; t < cur.prec(); ++t) cur[t] = dw_sigma(cur[t]);
        long pl = ipow64(p, static_cast<unsigned>(l));
        B = series_mul(B, series_stretch(cur, pl, xprec, zero), zero);
    }
    NuclearMatrix m;
    m.D = D;
    m.A.assign(static_cast<std::size_t>(D), std::vector<DworkElem>(static_cast<std::size_t>(D), zero));
    for (long i = 0; i < D; ++i)
        for (long j = 0; j < D; ++j) {
            long idx = q * i - j;
            if (idx >= 0 && idx < xprec) m.A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = B[idx];
        }
    return m;
}

// Division-free characteristic series det(I - sA) mod s^{K+1} (Berkowitz).
// The Toeplitz transitions are lower triangular, so the degree-<=K prefix of
// the coefficient vector is closed under the recursion and everything above
// K is never formed.
inline TruncSeries<DworkElem> char_series(const NuclearMatrix& mat, long K, const DworkCtx& d) {
    const long n = mat.D;
    if (K > n) throw InputError("char_series: K must be <= D");
    DworkElem zero = dw_zero(d), one = dw_one(d);
    std::vector<DworkElem> C{one};
    for (long r = 1; r <= n; ++r) {
        const long cap = std::min<long>(r, K);
        // first column of the Toeplitz transition: 1, -a_rr, -R S, -R A S, ...
        std::vector<DworkElem> tcol(static_cast<std::size_t>(cap) + 1, zero);
        tcol[0] = one;
        if (cap >= 1) tcol[1] = zero - mat.A[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(r - 1)];
        std::vector<DworkElem> vec(static_cast<std::size_t>(r - 1), zero);
        for (long i = 0; i < r - 1; ++i) vec[static_cast<std::size_t>(i)] = mat.A[static_cast<std::size_t>(i)][static_cast<std::size_t>(r - 1)];
        for (long l = 2; l <= cap; ++l) {
            DworkElem dot = zero;
            for (long i = 0; i < r - 1; ++i)
                dot = dot + mat.A[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(i)] * vec[static_cast<std::size_t>(i)];
            tcol[static_cast<std::size_t>(l)] = zero - dot;
            if (l < cap) {
                std::vector<DworkElem> nxt(static_cast<std::size_t>(r - 1), zero);
                for (long i = 0; i < r - 1; ++i) {
                    DworkElem acc = zero;
                    for (long j2 = 0; j2 < r - 1; ++j2)
                        acc = acc + mat.A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j2)] * vec[static_cast<std::size_t>(j2)];
                    nxt[static_cast<std::size_t>(i)] = acc;
                }
                vec.swap(nxt);
            }
        }
        std::vector<DworkElem> Cnew(static_cast<std::size_t>(cap) + 1, zero);
        for (long i = 0; i <= cap; ++i)
            for (long l = 0; l <= i; ++l) {
                if (l >= static_cast<long>(tcol.size()) || i - l >= static_cast<long>(C.size())) continue;
                Cnew[static_cast<std::size_t>(i)] =
                    Cnew[static_cast<std::size_t>(i)] + tcol[static_cast<std::size_t>(l)] * C[static_cast<std::size_t>(i - l)];
            }
        C.swap(Cnew);
    }
    TruncSeries<DworkElem> out = series_zero(K + 1, zero);
    for (long k = 0; k <= K && k < static_cast<long>(C.size()); ++k) out[k] = C[static_cast<std::size_t>(k)];
    return out;
}

// L*(chi, s) = C(s) / C(qs) mod s^{K+1}.
inline TruncSeries<DworkElem> l_star_from_C(const TruncSeries<DworkElem>& C, const Int& q, long K,
                                            const DworkCtx& d) {
    if (K + 1 > C.prec()) throw InputError("l_star_from_C: series too short");
    DworkElem zero = dw_zero(d), one = dw_one(d);
    if (!(C[0] == one)) throw InputError("l_star_from_C: constant term must be 1");
    TruncSeries<DworkElem> Cq = series_zero(K + 1, zero);
    Int qpow = 1;
    for (long k = 0; k <= K; ++k) {
        Cq[k] = dw_scale_int(C[k], qpow);
        qpow *= q;
    }
    TruncSeries<DworkElem> head = series_zero(K + 1, zero);
    for (long k = 0; k <= K; ++k) head[k] = C[k];
    return series_mul(head, series_inverse_one(Cq, zero, one), zero);
}

// Trace of mat^k.
inline DworkElem matrix_power_trace(const NuclearMatrix& mat, long k, const DworkCtx& d) {
    const long n = mat.D;
    DworkElem zero = dw_zero(d);
    std::vector<std::vector<DworkElem>> P = mat.A;
    for (long t = 1; t < k; ++t) {
        std::vector<std::vector<DworkElem>> Q(static_cast<std::size_t>(n),
                                              std::vector<DworkElem>(static_cast<std::size_t>(n), zero));
        for (long i = 0; i < n; ++i)
            for (long l = 0; l < n; ++l) {
                if (P[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)].is_zero()) continue;
                for (long j = 0; j < n; ++j)
                    Q[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                        Q[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +
                        P[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)] *
                            mat.A[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)];
            }
        P.swap(Q);
    }
    DworkElem tr = zero;
    for (long i = 0; i < n; ++i) tr = tr + P[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
    return tr;
}

// ---- defaults and stabilization ----------------------------------------

inline long dwork_default_D(const TowerSpec& spec, long m_chi) {
    auto inv = invariants(spec);
    return std::max<long>(degree_L(spec, m_chi) + 2 * inv.d_m, 8);
}

// M = ceil(upper bound at K in v_p units) + 4 guard digits.
inline long dwork_default_M(const TowerSpec& spec, long m_chi, long K) {
    const std::int64_t p = spec.field.p;
    long phi = static_cast<long>((p - 1) * ipow64(p, static_cast<unsigned>(m_chi - 1)));
    Rat up = upper_bound_pichi(spec, K) / phi;
    Int num = rat_num(up), den = rat_den(up);
    long ceil_vp = static_cast<long>((num + den - 1) / den);
    return ceil_vp + 4;
}

struct DworkRun {
    std::shared_ptr<DworkCtx> ctx;  // owns the context the elements point into
    TruncSeries<DworkElem> cstar;   // first K+1 coefficients
    TruncSeries<DworkElem> lstar;   // first K+1 coefficients of C(s)/C(qs)
    NuclearMatrix mat;              // matrix at the final truncation
    long D_initial = 0;
    long D_final = 0;
    long doublings = 0;
    bool stabilized = false;
    long M = 0;
};

inline std::vector<PiVal> prefix_valuations(const TruncSeries<DworkElem>& s) {
    std::vector<PiVal> v;
    for (long k = 0; k < s.prec(); ++k) v.push_back(dw_vpi(s[k]));
    return v;
}

// Compute C* with truncation D, then double D until the first K+1
// coefficient valuations stop moving.
inline DworkRun dwork_run(const TowerSpec& spec, const Character& chi, long K,
                          std::optional<long> D_override = std::nullopt,
                          std::optional<long> M_override = std::nullopt, long max_D = 512) {
    const CycloCtx& cc = *chi.cctx;
    long m_chi = cc.m;
    DworkRun run;
    run.D_initial = D_override.value_or(dwork_default_D(spec, m_chi));
    run.M = M_override.value_or(dwork_default_M(spec, m_chi, K));
    run.ctx = std::make_shared<DworkCtx>(make_dwork_ctx(cc, spec.field, run.M));
    const DworkCtx& dc = *run.ctx;

    long D = std::max<long>(run.D_initial, K);
    auto mat = psi_matrix(spec, chi, dc, D);
    auto cs = char_series(mat, K, dc);
    auto vals = prefix_valuations(cs);
    while (true) {
        long D2 = 2 * D;
        if (D2 > max_D) throw ResourceLimitError("dwork_run: stabilization did not occur below the size cap");
        auto mat2 = psi_matrix(spec, chi, dc, D2);
        auto cs2 = char_series(mat2, K, dc);
        auto vals2 = prefix_valuations(cs2);
        ++run.doublings;
        if (vals == vals2) {
            run.stabilized = true;
            run.D_final = D2;
            run.cstar = cs2;
            run.mat = std::move(mat2);
            break;
        }
        D = D2;
        mat = std::move(mat2);
        cs = std::move(cs2);
        vals = std::move(vals2);
    }
    run.lstar = l_star_from_C(run.cstar, spec.field.q(), K, dc);
    return run;
}

// Polygon points of the computed C* prefix in v_q units. A saturated
// coefficient sits at valuation >= M*phi; when that floor exceeds the upper
// bound it cannot touch the hull and is dropped, otherwise the polygon is
// not determined at this precision and newton_polygon will refuse it.
inline std::vector<PolygonPoint> cstar_polygon_points(const TowerSpec& spec, long m_chi, const DworkRun& run) {
    const std::int64_t p = spec.field.p;
    const long a = spec.field.a;
    const long phi = static_cast<long>((p - 1) * ipow64(p, static_cast<unsigned>(m_chi - 1)));
    std::vector<PolygonPoint> pts;
    for (long k = 0; k < run.cstar.prec(); ++k) {
        PiVal v = dw_vpi(run.cstar[k]);
        PolygonPoint pt;
        pt.idx = k;
        if (v.finite()) {
            pt.val = Rat(v.v) / (Rat(a) * phi);
        } else if (v.saturated) {
            Rat floor_vq = Rat(run.M) / a;  // M*phi pi-digits, normalized
            Rat upper_vq = upper_bound_pichi(spec, k) / (Rat(a) * phi);
            if (floor_vq > upper_vq)
                pt.infinite = true;  // provably above the hull; safe to drop
            else
                pt.saturated = true;
        } else {
            pt.infinite = true;
        }
        pts.push_back(std::move(pt));
    }
    return pts;
}

}  // namespace aswl
