#pragma once

// The point-counting path: Frobenius traces of closed points, pi-adic
// exponential sums, and the exact polynomials L(chi, s), L*(chi, s) over O_m
// computed from the Euler product truncated at point degree deg L. No
// exp/log and no integer division appear here.

#include <cstdint>
#include <vector>

#include "aswl/cyclo.hpp"
#include "aswl/field.hpp"
#include "aswl/series.hpp"
#include "aswl/tower.hpp"

namespace aswl {

// A finite character of Z_p given by chi(1) = (1+pi)^u in O_m, u prime to p.
// u = 1 is the canonical choice; other units give Galois conjugates.
struct Character {
    const CycloCtx* cctx = nullptr;
    long u = 1;

    long m_chi() const { return cctx->m; }
    CycloElem operator()(const Int& t) const { return chi_of(*cctx, Int(t * u)); }
};

struct LPolynomial {
    const CycloCtx* cctx = nullptr;
    std::vector<CycloElem> coeffs;  // exact mode, coeffs[0] = 1

    long deg() const { return static_cast<long>(coeffs.size()) - 1; }
};

namespace detail {

// c_j = sum_i p^i [a_ij] inside Z_{q^d}/p^M, exponents grouped.
inline std::map<long, UnramElem> tower_c_values(const TowerSpec& spec, const UnramCtx& u) {
    std::map<long, UnramElem> cv;
    for (const auto& [ij, val] : spec.coeffs) {
        auto [i, j] = ij;
        if (i >= u.M) continue;
        UnramElem term = teichmuller_base(u, val);
        term = unram_scale(u, term, static_cast<std::uint64_t>(ipow64(u.p(), static_cast<unsigned>(i))));
        auto it = cv.find(j);
        if (it == cv.end())
            cv.emplace(j, term);
        else
            it->second = unram_add(u, it->second, term);
    }
    return cv;
}

// Tr(f([x])) mod p^M for z = [x], with the c_j values prepared above.
inline std::uint64_t frob_trace_of_lift(const UnramCtx& u, const std::map<long, UnramElem>& cv,
                                        const UnramElem& z, std::vector<unsigned __int128>& scratch) {
    UnramElem acc = unram_zero(u);
    UnramElem pw, tmp;
    for (const auto& [j, cj] : cv) {
        if (j == 0) {
            acc = unram_add(u, acc, cj);
            continue;
        }
        // z^j by binary powering
        pw = unram_from_int(u, 1);
        UnramElem base = z;
        long e = j;
        while (e > 0) {
            if (e & 1) {
                unram_mul_into(u, pw, base, tmp, scratch);
                std::swap(pw, tmp);
            }
            e >>= 1;
            if (e) {
                unram_mul_into(u, base, base, tmp, scratch);
                std::swap(base, tmp);
            }
        }
        unram_mul_into(u, pw, cj, tmp, scratch);
        acc = unram_add(u, acc, tmp);
    }
    return trace_linear(u, acc);
}

}  // namespace detail

// Frobenius element of a single closed point, reduced mod p^{m_target}.
inline Int frob(const TowerSpec& spec, const FqkElem& x, long m_target) {
    UnramCtx u = make_unram(spec.field, x.k, m_target);
    auto cv = detail::tower_c_values(spec, u);
    std::vector<unsigned __int128> scratch;
    if (x.is_zero()) {
        auto it = cv.find(0);
        if (it == cv.end()) return 0;
        return Int(trace_linear(u, it->second));
    }
    UnramElem z = teichmuller(u, x);
    return Int(detail::frob_trace_of_lift(u, cv, z, scratch));
}

// Residue histogram of Frob over closed points of exact degree d:
// counts[t] = #{x closed of degree d : Frob(x) = t mod p^{m_target}}.
// The zero point contributes to d = 1.
inline std::vector<std::uint64_t> frob_histogram_degree(const TowerSpec& spec, long d, long m_target) {
    UnramCtx u = make_unram(spec.field, d, m_target);
    auto cv = detail::tower_c_values(spec, u);
    std::vector<std::uint64_t> hist(static_cast<std::size_t>(u.pM), 0);
    std::vector<unsigned __int128> scratch;
    if (!u.ext.has_group) throw ResourceLimitError("frob_histogram_degree: field too large");
    const std::uint64_t Q = u.ext.group_order;
    const std::uint64_t q = static_cast<std::uint64_t>(spec.field.q());
    if (d == 1) {
        auto it0 = cv.find(0);
        std::uint64_t t0 = (it0 == cv.end()) ? 0 : trace_linear(u, it0->second);
        ++hist[t0];  // the point x = 0
    }
    FqkElem gen;
    gen.k = d;
    gen.c = u.ext.generator;
    UnramElem g = teichmuller(u, gen);
    UnramElem z = unram_from_int(u, 1), tmp;
    for (std::uint64_t nexp = 0; nexp < Q; ++nexp) {
        bool rep = true;
        long size = 0;
        std::uint64_t m = nexp;
        for (long l = 1; l <= d; ++l) {
            m = detail::mulmod_u64(m, q, Q);
            if (m == nexp) {
                size = l;
                break;
            }
            if (m < nexp) {
                rep = false;
                break;
            }
        }
        if (rep && size == d) ++hist[detail::frob_trace_of_lift(u, cv, z, scratch)];
        unram_mul_into(u, z, g, tmp, scratch);
        std::swap(z, tmp);
    }
    return hist;
}

// Residue histogram of Tr_{Z_{q^k}/Z_p}(f([x])) over ALL x in F_{q^k}^*.
inline std::vector<std::uint64_t> exp_sum_histogram(const TowerSpec& spec, long k, long m_target) {
    UnramCtx u = make_unram(spec.field, k, m_target);
    auto cv = detail::tower_c_values(spec, u);
    std::vector<std::uint64_t> hist(static_cast<std::size_t>(u.pM), 0);
    std::vector<unsigned __int128> scratch;
    if (!u.ext.has_group) throw ResourceLimitError("exp_sum_histogram: field too large");
    const std::uint64_t Q = u.ext.group_order;
    FqkElem gen;
    gen.k = k;
    gen.c = u.ext.generator;
    UnramElem g = teichmuller(u, gen);
    UnramElem z = unram_from_int(u, 1), tmp;
    for (std::uint64_t nexp = 0; nexp < Q; ++nexp) {
        ++hist[detail::frob_trace_of_lift(u, cv, z, scratch)];
        unram_mul_into(u, z, g, tmp, scratch);
        std::swap(z, tmp);
    }
    return hist;
}

// S*(k, chi) = sum_{x in F_{q^k}^*} chi(Tr f([x])), exact in O_m.
inline CycloElem exp_sum(const TowerSpec& spec, const Character& chi, long k) {
    auto hist = exp_sum_histogram(spec, k, chi.m_chi());
    CycloElem acc = cyclo_zero(*chi.cctx);
    for (std::size_t t = 0; t < hist.size(); ++t) {
        if (!hist[t]) continue;
        acc = acc + chi(Int(t)) * Int(hist[t]);
    }
    return acc;
}

inline CycloElem exp_sum(const TowerSpec& spec, const CycloCtx& cctx, long k) {
    return exp_sum(spec, Character{&cctx, 1}, k);
}

// chi(Frob(0)), the reciprocal root of the missing Euler factor at x = 0.
inline CycloElem chi_frob_zero(const TowerSpec& spec, const Character& chi) {
    UnramCtx u = make_unram(spec.field, 1, chi.m_chi());
    auto cv = detail::tower_c_values(spec, u);
    auto it = cv.find(0);
    Int t0 = (it == cv.end()) ? Int(0) : Int(trace_linear(u, it->second));
    return chi(t0);
}

// L(chi, s): the Euler product over closed points of degree <= D, cut mod
// s^{D+1}. Polynomiality makes the truncation exact. With extend_check the
// product is pushed to degree 2D and the upper tail must vanish.
inline LPolynomial l_full(const TowerSpec& spec, const Character& chi, bool extend_check = false) {
    const CycloCtx& cc = *chi.cctx;
    const long D = degree_L(spec, cc.m);
    const long cut = extend_check ? 2 * D : D;
    CycloElem zero = cyclo_zero(cc), one = cyclo_one(cc);
    TruncSeries<CycloElem> acc = series_one(cut + 1, zero, one);
    for (long d = 1; d <= cut; ++d) {
        const long L = cut / d;  // factor degrees needed in u = s^d
        auto hist = frob_histogram_degree(spec, d, cc.m);
        TruncSeries<CycloElem> pd = series_one(L + 1, zero, one);
        for (std::size_t t = 0; t < hist.size(); ++t) {
            if (!hist[t]) continue;
            // (1 - chi(t) u)^{n_t}: binomial expansion up to degree L
            CycloElem ct = chi(Int(t));
            TruncSeries<CycloElem> fac = series_zero(L + 1, zero);
            Int binom = 1;
            CycloElem pw = one;
            for (long l = 0; l <= L; ++l) {
                if (l > 0) {
                    binom = binom * (Int(hist[t]) - (l - 1)) / l;
                    pw = pw * ct;
                    if (binom == 0) break;
                }
                CycloElem term = pw * binom;
                fac[l] = (l % 2 == 0) ? term : (zero - term);
            }
            pd = series_mul(pd, fac, zero);
        }
        auto inv = series_inverse_one(pd, zero, one);
        acc = series_mul(acc, series_stretch(inv, d, cut + 1, zero), zero);
    }
    if (extend_check) {
        for (long k = D + 1; k <= cut; ++k)
            if (!acc[k].is_zero()) throw DegreeMismatchError("l_full: Euler tail does not vanish");
    }
    LPolynomial out;
    out.cctx = &cc;
    out.coeffs.assign(acc.c.begin(), acc.c.begin() + (D + 1));
    if (!(out.coeffs[0] == one)) throw InternalError("l_full: constant term is not 1");
    if (D >= 1 && out.coeffs[static_cast<std::size_t>(D)].is_zero())
        throw DegreeMismatchError("l_full: leading coefficient vanishes");
    return out;
}

inline LPolynomial l_full(const TowerSpec& spec, const CycloCtx& cctx) {
    return l_full(spec, Character{&cctx, 1});
}

// L*(chi, s) = (1 - chi(Frob(0)) s) L(chi, s), of degree deg L + 1.
inline LPolynomial l_star(const TowerSpec& spec, const Character& chi) {
    LPolynomial L = l_full(spec, chi);
    CycloElem root = chi_frob_zero(spec, chi);
    LPolynomial out;
    out.cctx = L.cctx;
    out.coeffs.assign(L.coeffs.size() + 1, cyclo_zero(*L.cctx));
    for (std::size_t k = 0; k < L.coeffs.size(); ++k) {
        out.coeffs[k] = out.coeffs[k] + L.coeffs[k];
        out.coeffs[k + 1] = out.coeffs[k + 1] - root * L.coeffs[k];
    }
    return out;
}

inline LPolynomial l_star(const TowerSpec& spec, const CycloCtx& cctx) {
    return l_star(spec, Character{&cctx, 1});
}

}  // namespace aswl
