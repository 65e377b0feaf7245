#pragma once

// Newton polygons with exact rational vertices, the Hodge/forced-vertex
// bounds, the slope structure theorem checks, the slope-stability multiset
// relation, functional-equation checks, the uniformity statistic, and the
// coefficient-irrelevance comparison between towers.

#include <algorithm>
#include <optional>
#include <vector>

#include "aswl/cyclo.hpp"
#include "aswl/lfun.hpp"
#include "aswl/numeric.hpp"
#include "aswl/tower.hpp"

namespace aswl {

struct PolygonPoint {
    long idx = 0;
    bool infinite = false;   // exact zero coefficient; excluded from the hull
    bool saturated = false;  // truncated-mode zero; poisons the polygon
    Rat val;
};

inline PolygonPoint poly_point(long idx, Rat v) { return PolygonPoint{idx, false, false, std::move(v)}; }

struct NewtonPolygon {
    std::vector<PolygonPoint> points;
    std::vector<std::pair<long, Rat>> vertices;  // strictly convex lower hull
    std::vector<Rat> slopes;                     // nondecreasing, one per unit of horizontal run

    long first_idx() const { return vertices.front().first; }
    long last_idx() const { return vertices.back().first; }

    // Piecewise-linear hull height at integer k in [first_idx, last_idx].
    Rat height(long k) const {
        for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
            auto [k1, v1] = vertices[i];
            auto [k2, v2] = vertices[i + 1];
            if (k >= k1 && k <= k2) return v1 + (v2 - v1) * (k - k1) / (k2 - k1);
        }
        if (vertices.size() == 1 && k == vertices[0].first) return vertices[0].second;
        throw InputError("NewtonPolygon::height: index outside the hull span");
    }
};

inline NewtonPolygon newton_polygon(const std::vector<PolygonPoint>& pts) {
    std::vector<PolygonPoint> finite;
    for (const auto& p : pts) {
        if (p.saturated)
            throw PrecisionHoleError("newton_polygon: point " + std::to_string(p.idx) +
                                     " is only known to vanish at working precision");
        if (!p.infinite) finite.push_back(p);
    }
    if (finite.empty()) throw InputError("newton_polygon: no finite points");
    std::sort(finite.begin(), finite.end(), [](const PolygonPoint& a, const PolygonPoint& b) { return a.idx < b.idx; });

    NewtonPolygon np;
    np.points = pts;
    // monotone chain, keeping strictly convex turns
    std::vector<std::pair<long, Rat>> hull;
    for (const auto& p : finite) {
        std::pair<long, Rat> cur{p.idx, p.val};
        while (hull.size() >= 2) {
            auto& b = hull[hull.size() - 1];
            auto& a = hull[hull.size() - 2];
            // pop b unless slope(a,b) < slope(b,cur)
            Rat lhs = (b.second - a.second) * (cur.first - b.first);
            Rat rhs = (cur.second - b.second) * (b.first - a.first);
            if (lhs < rhs) break;
            hull.pop_back();
        }
        if (hull.size() == 1 && hull[0].first == cur.first) continue;  // duplicate index
        hull.push_back(cur);
    }
    np.vertices = std::move(hull);
    for (std::size_t i = 0; i + 1 < np.vertices.size(); ++i) {
        auto [k1, v1] = np.vertices[i];
        auto [k2, v2] = np.vertices[i + 1];
        Rat s = (v2 - v1) / (k2 - k1);
        for (long t = 0; t < k2 - k1; ++t) np.slopes.push_back(s);
    }
    return np;
}

// Polygon with prescribed slope multiset: heights are partial sums.
inline NewtonPolygon polygon_from_slopes(std::vector<Rat> slopes) {
    std::sort(slopes.begin(), slopes.end());
    std::vector<PolygonPoint> pts;
    Rat h = 0;
    pts.push_back(poly_point(0, h));
    for (std::size_t i = 0; i < slopes.size(); ++i) {
        h += slopes[i];
        pts.push_back(poly_point(static_cast<long>(i) + 1, h));
    }
    return newton_polygon(pts);
}

// Points of an exact L-polynomial in v_q units.
inline std::vector<PolygonPoint> lpoly_points_vq(const LPolynomial& L, long a) {
    std::vector<PolygonPoint> pts;
    const CycloCtx& cc = *L.cctx;
    for (long k = 0; k <= L.deg(); ++k) {
        PiVal v = vpi(L.coeffs[static_cast<std::size_t>(k)]);
        PolygonPoint p;
        p.idx = k;
        p.infinite = v.infinite;
        p.saturated = v.saturated;
        if (v.finite()) p.val = vq_normalize(Rat(v.v), a, cc.p, cc.m);
        pts.push_back(std::move(p));
    }
    return pts;
}

inline NewtonPolygon np_of_lpoly_vq(const LPolynomial& L, long a) { return newton_polygon(lpoly_points_vq(L, a)); }

// ---- polygon bounds ----------------------------------------------------

// Hodge vertex value a(p-1)k(k-1)/(2 delta), in pi_chi-adic units.
inline Rat hodge_lower(const TowerSpec& spec, long k) {
    auto inv = invariants(spec);
    return Rat(spec.field.a) * (spec.field.p - 1) * k * (k - 1) / (2 * inv.delta);
}

// Forced upper vertices: k = 0, 1 mod d_m with the same vertex values.
inline std::vector<std::pair<long, Rat>> upper_vertices(const TowerSpec& spec, long kmax) {
    auto inv = invariants(spec);
    std::vector<std::pair<long, Rat>> out;
    for (long k = 0; k <= kmax; ++k)
        if (k % inv.d_m == 0 || k % inv.d_m == 1) out.emplace_back(k, hodge_lower(spec, k));
    return out;
}

// Upper bound at index k in pi_chi units: linear interpolation between the
// neighbouring forced vertices.
inline Rat upper_bound_pichi(const TowerSpec& spec, long k) {
    auto inv = invariants(spec);
    long lo = k;
    while (!(lo % inv.d_m == 0 || lo % inv.d_m == 1)) --lo;
    long hi = k;
    while (!(hi % inv.d_m == 0 || hi % inv.d_m == 1)) ++hi;
    if (lo == hi) return hodge_lower(spec, lo);
    return hodge_lower(spec, lo) + (hodge_lower(spec, hi) - hodge_lower(spec, lo)) * (k - lo) / (hi - lo);
}

struct BoundRow {
    long k = 0;
    Rat lower;                 // v_q units
    std::optional<Rat> upper;  // interpolated upper bound where defined
    Rat observed;              // hull height in v_q units
    bool lower_ok = true;
    bool upper_ok = true;
    bool forced = false;       // k is a forced vertex: observed must equal the bound
};

struct BoundReport {
    std::vector<BoundRow> rows;
    std::vector<long> forced_vertices;
    long checked_up_to = 0;  // last forced vertex inside the prefix
    Rat max_gap_pichi;       // max over k of upper - lower, pi_chi units
    bool gap_le_W = true;
    bool pass = true;
};

// Bound check for a C*-type polygon prefix in v_q units against the Hodge
// lower bound and the forced upper vertices. Statements about the full
// polygon are sound on [0, X] with X the last forced vertex in range, so the
// check stops there.
inline BoundReport check_bounds_cstar(const TowerSpec& spec, long m_chi, const NewtonPolygon& np_vq) {
    auto inv = invariants(spec);
    const long a = spec.field.a;
    const std::int64_t p = spec.field.p;
    long kmax = np_vq.last_idx();
    long X = kmax;
    while (X >= 0 && !(X % inv.d_m == 0 || X % inv.d_m == 1)) --X;
    BoundReport rep;
    rep.checked_up_to = X;
    rep.max_gap_pichi = 0;
    Rat denom = Rat(a) * (p - 1) * Int(int_pow(p, static_cast<std::uint64_t>(m_chi - 1)));
    auto forced_val = [&](long k) { return hodge_lower(spec, k) / denom; };
    // forced vertex indices within range
    for (long k = 0; k <= X; ++k)
        if (k % inv.d_m == 0 || k % inv.d_m == 1) rep.forced_vertices.push_back(k);
    for (long k = 0; k <= X; ++k) {
        BoundRow row;
        row.k = k;
        row.lower = forced_val(k);
        row.observed = np_vq.height(k);
        row.lower_ok = row.observed >= row.lower;
        Rat up = upper_bound_pichi(spec, k) / denom;
        row.upper = up;
        row.forced = (k % inv.d_m == 0 || k % inv.d_m == 1);
        row.upper_ok = row.observed <= up && (!row.forced || row.observed == up);
        Rat gap = (up - row.lower) * denom;
        if (gap > rep.max_gap_pichi) rep.max_gap_pichi = gap;
        rep.pass = rep.pass && row.lower_ok && row.upper_ok;
        rep.rows.push_back(std::move(row));
    }
    rep.gap_le_W = rep.max_gap_pichi <= inv.W;
    rep.pass = rep.pass && rep.gap_le_W;
    return rep;
}

// C*-slope prefix from the exact L* slopes: union of (w + i) over copies i.
inline std::vector<Rat> cstar_slopes_from_lstar(const std::vector<Rat>& lstar_slopes, long kmax) {
    std::vector<Rat> all;
    long copies = kmax / static_cast<long>(lstar_slopes.size()) + 2;
    for (long i = 0; i < copies; ++i)
        for (const auto& w : lstar_slopes) all.push_back(w + i);
    std::sort(all.begin(), all.end());
    all.resize(static_cast<std::size_t>(kmax));
    return all;
}

// ---- slope structure of L --------------------------------------------

struct SlopeStructureReport {
    bool applicable = false;  // needs m_chi > m
    bool points_ok = true;
    bool windows_ok = true;
    std::vector<std::pair<long, Rat>> forced_points;  // (index, required height)
    bool pass() const { return applicable && points_ok && windows_ok; }
};

inline SlopeStructureReport check_slope_structure(const TowerSpec& spec, long m_chi, const NewtonPolygon& np_vq) {
    auto inv = invariants(spec);
    SlopeStructureReport rep;
    if (m_chi <= inv.m) return rep;
    rep.applicable = true;
    const std::int64_t p = spec.field.p;
    const long P = ipow64(p, static_cast<unsigned>(m_chi - inv.m - 1));
    const long deg = np_vq.last_idx();
    for (long n = 1; n <= P; ++n) {
        long k1 = n * inv.d_m - 1;
        rep.forced_points.emplace_back(k1, Rat(n) * (n * inv.d_m - 1) / (2 * P));
        long k2 = n * inv.d_m;
        if (k2 <= deg) rep.forced_points.emplace_back(k2, Rat(n) * (n * inv.d_m + 1) / (2 * P));
    }
    for (const auto& [k, v] : rep.forced_points)
        if (np_vq.height(k) != v) rep.points_ok = false;
    // window structure: slopes partition into P windows of width 1/P; window i
    // carries one slope equal to (i-1)/P -- absent for i = 1 where the zero
    // was removed -- plus d_m - 1 slopes strictly inside.
    const auto& slopes = np_vq.slopes;
    std::size_t pos = 0;
    for (long i = 1; i <= P && rep.windows_ok; ++i) {
        Rat lo = Rat(i - 1) / P, hi = Rat(i) / P;
        long boundary = 0, interior = 0;
        while (pos < slopes.size() && slopes[pos] < hi) {
            if (slopes[pos] == lo)
                ++boundary;
            else if (slopes[pos] > lo)
                ++interior;
            else
                rep.windows_ok = false;
            ++pos;
        }
        long expect_boundary = (i == 1) ? 0 : 1;
        if (boundary != expect_boundary || interior != inv.d_m - 1) rep.windows_ok = false;
    }
    if (pos != slopes.size()) rep.windows_ok = false;  // a slope >= 1 escaped the windows
    return rep;
}

// ---- uniformity, stability, functional equation ------------------------

// Exact Kolmogorov-Smirnov distance between the slope multiset and the
// uniform distribution on [0,1].
inline Rat uniformity_stat(std::vector<Rat> slopes) {
    if (slopes.empty()) throw EmptySlopesError("uniformity_stat: empty slope multiset");
    std::sort(slopes.begin(), slopes.end());
    const long n = static_cast<long>(slopes.size());
    Rat best = 0;
    for (long i = 1; i <= n; ++i) {
        const Rat& s = slopes[static_cast<std::size_t>(i - 1)];
        Rat up = Rat(i) / n - s;        // F jumps to i/n at s
        Rat down = s - Rat(i - 1) / n;  // left limit
        if (up > best) best = up;
        if (down > best) best = down;
    }
    return best;
}

struct StabilityCheck {
    bool ok = false;
    std::vector<Rat> predicted;
    std::optional<std::pair<Rat, Rat>> first_mismatch;  // (predicted, actual)
};

// Predicted slope multiset at conductor exponent m_chi from the base slopes
// at m', and comparison with the actual multiset.
inline StabilityCheck check_stability(const std::vector<Rat>& base_slopes, const std::vector<Rat>& slopes,
                                      std::int64_t p, long levels) {
    StabilityCheck out;
    const Int P = int_pow(p, static_cast<std::uint64_t>(levels));
    for (Int i = 0; i < P; ++i) {
        out.predicted.push_back(Rat(i) / P);  // the 0 from the L*-factor, shifted
        for (const auto& u : base_slopes) out.predicted.push_back((u + Rat(i)) / P);
    }
    // "- {0}": remove exactly one occurrence of the slope 0
    auto it = std::find(out.predicted.begin(), out.predicted.end(), Rat(0));
    if (it != out.predicted.end()) out.predicted.erase(it);
    std::sort(out.predicted.begin(), out.predicted.end());
    std::vector<Rat> actual = slopes;
    std::sort(actual.begin(), actual.end());
    out.ok = (out.predicted == actual);
    if (!out.ok) {
        for (std::size_t i = 0; i < std::min(out.predicted.size(), actual.size()); ++i)
            if (out.predicted[i] != actual[i]) {
                out.first_mismatch = {out.predicted[i], actual[i]};
                break;
            }
        if (!out.first_mismatch && out.predicted.size() != actual.size())
            out.first_mismatch = {Rat(out.predicted.size()), Rat(actual.size())};
    }
    return out;
}

// Slope multiset invariant under v -> 1 - v, and total slope sum deg/2.
inline bool check_functional_eq(const NewtonPolygon& np, long deg) {
    const auto& s = np.slopes;
    if (static_cast<long>(s.size()) != deg) return false;
    Rat sum = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] + s[s.size() - 1 - i] != 1) return false;
        sum += s[i];
    }
    return sum == Rat(deg) / 2;
}

// ---- coefficient irrelevance (two-tower comparison) ---------------------

struct TowerComparison {
    bool identical = false;
    long compared_indices = 0;
};

inline TowerComparison compare_towers(const TowerSpec& specA, const TowerSpec& specB, long m_chi) {
    if (specA.field.p != specB.field.p || specA.field.a != specB.field.a)
        throw RelevantSetMismatchError("compare_towers: towers live over different fields");
    auto invA = invariants(specA), invB = invariants(specB);
    if (invA.delta != invB.delta || invA.m != invB.m)
        throw RelevantSetMismatchError("compare_towers: towers have different delta or m");
    if (m_chi <= invA.m) throw InputError("compare_towers: m_chi must exceed m");
    auto scA = stability_constants(specA), scB = stability_constants(specB);
    auto relevant_entries = [](const TowerSpec& s, const StabilityConstants& sc) {
        std::map<std::pair<long, long>, std::vector<std::uint8_t>> m;
        for (const auto& x : sc.relevant) m[x] = s.coeffs.at(x);
        return m;
    };
    if (relevant_entries(specA, scA) != relevant_entries(specB, scB))
        throw RelevantSetMismatchError("compare_towers: towers differ on a coefficient with Delta_x < W");

    auto ccx = make_cyclo(specA.field.p, m_chi);
    Character chi{&ccx, 1};
    auto npA = np_of_lpoly_vq(l_star(specA, chi), specA.field.a);
    auto npB = np_of_lpoly_vq(l_star(specB, chi), specB.field.a);
    long kmax = 2 * static_cast<long>(npA.slopes.size());
    auto slA = cstar_slopes_from_lstar(npA.slopes, kmax);
    auto slB = cstar_slopes_from_lstar(npB.slopes, kmax);
    TowerComparison res;
    res.compared_indices = kmax;
    res.identical = (slA == slB);
    return res;
}

}  // namespace aswl
