#pragma once

// Command dispatch and report assembly. Reports are JSON; every report
// embeds the spec hash and the precision/truncation parameters that
// produced it. Exit codes: 0 all checks pass, 1 check failure, 2 input
// error, 3 precision failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <string>

#include "aswl/dwork.hpp"
#include "aswl/render.hpp"
#include "aswl/spec_io.hpp"

namespace aswl {

struct RunConfig {
    std::string command;  // info | lfun | dwork | verify | compare | plot
    std::string spec_path;
    std::string other_path;        // compare
    long m_chi = 1;                // lfun, dwork, compare, plot
    long m_chi_max = 2;            // verify
    std::optional<long> dwork_D;   // truncation override
    std::optional<long> dwork_M;   // precision override
    std::string out_dir;           // write report (and plots) here if nonempty
    bool fmt_svg = true;
    bool fmt_ascii = true;
};

struct RunResult {
    nlohmann::json report;
    int exit_code = 0;
};

inline nlohmann::json rat_json(const Rat& r) {
    return nlohmann::json{{"num", rat_num(r).str()}, {"den", rat_den(r).str()}};
}

inline nlohmann::json pival_json(const PiVal& v) {
    if (v.saturated) return nlohmann::json{{"saturated", true}};
    if (v.infinite) return nlohmann::json{{"infinite", true}};
    return nlohmann::json{{"v", v.v}};
}

inline nlohmann::json polygon_json(const NewtonPolygon& np) {
    nlohmann::json j;
    j["vertices"] = nlohmann::json::array();
    for (const auto& [k, v] : np.vertices) j["vertices"].push_back(nlohmann::json{{"k", k}, {"val", rat_json(v)}});
    j["slopes"] = nlohmann::json::array();
    for (const auto& s : np.slopes) j["slopes"].push_back(rat_json(s));
    return j;
}

namespace cli_detail {

inline long env_threads() {
    const char* s = std::getenv("ASWL_THREADS");
    if (!s) return 1;
    long t = std::strtol(s, nullptr, 10);
    return t < 1 ? 1 : t;
}

inline nlohmann::json info_body(const TowerSpec& spec, bool& pass) {
    auto inv = invariants(spec);
    auto sc = stability_constants(spec);
    nlohmann::json j;
    j["p"] = spec.field.p;
    j["a"] = spec.field.a;
    j["q"] = spec.field.q().str();
    j["delta"] = rat_json(inv.delta);
    j["m"] = inv.m;
    j["d_m"] = inv.d_m;
    j["genus_stable"] = inv.genus_stable;
    j["W"] = rat_json(inv.W);
    j["stability_margin"] = rat_json(inv.stability_margin);
    j["level_degrees"] = nlohmann::json::object();
    for (const auto& [i, di] : level_degrees(spec)) j["level_degrees"][std::to_string(i)] = di;
    nlohmann::json cond = nlohmann::json::object();
    for (long mp = 1; mp <= std::max<long>(3, inv.m + 2); ++mp) cond[std::to_string(mp)] = conductor(spec, mp);
    j["conductor"] = cond;
    nlohmann::json degs = nlohmann::json::object();
    for (long mc = 1; mc <= 3; ++mc) degs[std::to_string(mc)] = degree_L(spec, mc);
    j["degree_L"] = degs;
    nlohmann::json st;
    st["Delta"] = nlohmann::json::array();
    for (const auto& [ij, dx] : sc.Delta)
        st["Delta"].push_back(nlohmann::json{{"i", ij.first}, {"j", ij.second}, {"value", rat_json(dx)}});
    st["relevant"] = nlohmann::json::array();
    for (const auto& ij : sc.relevant) st["relevant"].push_back(nlohmann::json{{"i", ij.first}, {"j", ij.second}});
    if (sc.N)
        st["N"] = *sc.N;
    else
        st["N"] = nullptr;
    if (sc.m_prime)
        st["m_prime"] = *sc.m_prime;
    else
        st["m_prime"] = nullptr;
    st["higher_levels_can_matter"] = sc.higher_levels_can_matter;
    st["tail_margin_ok"] = nlohmann::json::object();
    for (const auto& [i, ok] : sc.tail_margin_ok) st["tail_margin_ok"][std::to_string(i)] = ok;
    j["stability"] = st;
    pass = true;
    return j;
}

inline nlohmann::json bound_report_json(const BoundReport& rep) {
    nlohmann::json j;
    j["pass"] = rep.pass;
    j["gap_le_W"] = rep.gap_le_W;
    j["max_gap_pichi"] = rat_json(rep.max_gap_pichi);
    j["checked_up_to"] = rep.checked_up_to;
    j["forced_vertices"] = rep.forced_vertices;
    return j;
}

inline nlohmann::json lfun_body(const TowerSpec& spec, long m_chi, bool& pass) {
    auto inv = invariants(spec);
    auto sc = stability_constants(spec);
    auto cc = make_cyclo(spec.field.p, m_chi);
    Character chi{&cc, 1};
    auto L = l_full(spec, chi);
    auto Ls = l_star(spec, chi);
    auto npL = np_of_lpoly_vq(L, spec.field.a);
    auto npLs = np_of_lpoly_vq(Ls, spec.field.a);

    nlohmann::json j;
    j["m_chi"] = m_chi;
    j["degree"] = L.deg();
    nlohmann::json checks;

    checks["degree_formula"] = (L.deg() == degree_L(spec, m_chi));

    bool integral = true;
    nlohmann::json vals = nlohmann::json::array();
    for (const auto& c : L.coeffs) {
        PiVal v = vpi(c);
        vals.push_back(pival_json(v));
        if (v.finite() && v.v < 0) integral = false;
    }
    j["coefficient_valuations_pichi"] = vals;
    checks["integrality"] = integral;

    PiVal lead = vpi(L.coeffs.back());
    checks["leading_vq_half_degree"] =
        lead.finite() && vq_normalize(Rat(lead.v), spec.field.a, spec.field.p, m_chi) == Rat(L.deg(), 2);

    j["polygon_vq"] = polygon_json(npL);
    checks["functional_equation"] = check_functional_eq(npL, L.deg());

    if (m_chi > inv.m) {
        auto slope_rep = check_slope_structure(spec, m_chi, npL);
        checks["slope_structure"] = nlohmann::json{
            {"applicable", slope_rep.applicable}, {"points_ok", slope_rep.points_ok}, {"windows_ok", slope_rep.windows_ok}};
    } else {
        checks["slope_structure"] = nlohmann::json{{"applicable", false}};
    }

    // bounds on the assembled C*-prefix
    long kmax = 3 * static_cast<long>(npLs.slopes.size());
    if (kmax > 0 && m_chi > inv.m) {
        auto npC = polygon_from_slopes(cstar_slopes_from_lstar(npLs.slopes, kmax));
        auto brep = check_bounds_cstar(spec, m_chi, npC);
        checks["cstar_bounds"] = bound_report_json(brep);
    }

    if (!npL.slopes.empty() && m_chi > inv.m) {
        Rat stat = uniformity_stat(npL.slopes);
        Rat bound = Rat(2) / int_pow(spec.field.p, static_cast<std::uint64_t>(m_chi - inv.m - 1));
        checks["uniformity"] =
            nlohmann::json{{"stat", rat_json(stat)}, {"bound", rat_json(bound)}, {"ok", stat <= bound}};
    }

    if (sc.m_prime && m_chi >= *sc.m_prime) {
        auto cc0 = make_cyclo(spec.field.p, *sc.m_prime);
        auto base = np_of_lpoly_vq(l_full(spec, Character{&cc0, 1}), spec.field.a);
        auto st = check_stability(base.slopes, npL.slopes, spec.field.p, m_chi - *sc.m_prime);
        checks["slope_stability"] = nlohmann::json{{"m_prime", *sc.m_prime}, {"ok", st.ok}};
    }

    bool ok = checks["degree_formula"].get<bool>() && checks["integrality"].get<bool>() &&
              checks["leading_vq_half_degree"].get<bool>() && checks["functional_equation"].get<bool>();
    if (checks.contains("slope_structure") && checks["slope_structure"]["applicable"].get<bool>())
        ok = ok && checks["slope_structure"]["points_ok"].get<bool>() && checks["slope_structure"]["windows_ok"].get<bool>();
    if (checks.contains("cstar_bounds")) ok = ok && checks["cstar_bounds"]["pass"].get<bool>();
    if (checks.contains("uniformity")) ok = ok && checks["uniformity"]["ok"].get<bool>();
    if (checks.contains("slope_stability")) ok = ok && checks["slope_stability"]["ok"].get<bool>();
    j["checks"] = checks;
    j["pass"] = ok;
    pass = ok;
    return j;
}

inline nlohmann::json dwork_body(const TowerSpec& spec, long m_chi, std::optional<long> D_override,
                                 std::optional<long> M_override, bool& pass) {
    auto cc = make_cyclo(spec.field.p, m_chi);
    Character chi{&cc, 1};
    long K = degree_L(spec, m_chi) + 1;  // deg L* coefficients 0..K
    auto run = dwork_run(spec, chi, K, D_override, M_override);

    nlohmann::json j;
    j["m_chi"] = m_chi;
    j["parameters"] = nlohmann::json{{"K", K},
                                     {"D_initial", run.D_initial},
                                     {"D_final", run.D_final},
                                     {"doublings", run.doublings},
                                     {"M", run.M},
                                     {"stabilized", run.stabilized}};
    nlohmann::json checks;
    checks["stabilized"] = run.stabilized;

    nlohmann::json cvals = nlohmann::json::array();
    for (long k = 0; k < run.cstar.prec(); ++k) cvals.push_back(pival_json(dw_vpi(run.cstar[k])));
    j["cstar_valuations_pichi"] = cvals;

    // cross-oracle against the Euler product. Valuation reads from the
    // truncated matrix are exact strictly below the effective ceiling
    // min(M phi, (q-1) D / (p^{a-1} delta)); above it, both sides are only
    // compared as "at or beyond the ceiling" (an exact zero can never read
    // as anything else at finite precision).
    auto inv0 = invariants(spec);
    long phi0 = cc.phi;
    Rat tail0 = Rat(spec.field.q() - 1) * run.D_final /
                (Rat(int_pow(spec.field.p, static_cast<std::uint64_t>(spec.field.a - 1))) * inv0.delta);
    long ceil_tail = static_cast<long>((rat_num(tail0) + rat_den(tail0) - 1) / rat_den(tail0));
    const long ceiling = std::min<long>(run.M * phi0, ceil_tail);
    j["parameters"]["valuations_trusted_below"] = ceiling;
    auto Ls = l_star(spec, chi);
    bool cross_ok = true, saturation_free = true;
    nlohmann::json lvals = nlohmann::json::array();
    for (long k = 0; k <= K; ++k) {
        PiVal vd = dw_vpi(run.lstar[k]);
        PiVal ve = vpi(Ls.coeffs[static_cast<std::size_t>(k)]);
        lvals.push_back(pival_json(vd));
        if (vd.saturated) saturation_free = false;
        long cd = (!vd.finite() || vd.v >= ceiling) ? ceiling : vd.v;
        long ce = (!ve.finite() || ve.v >= ceiling) ? ceiling : ve.v;
        if (cd != ce) cross_ok = false;
    }
    j["lstar_valuations_pichi"] = lvals;
    checks["lstar_matches_euler_product"] = cross_ok;
    checks["saturation_free"] = saturation_free;

    // the polygon bounds are statements about conductors above m
    auto inv = invariants(spec);
    bool bounds_ok = true;
    if (m_chi > inv.m) {
        auto np = newton_polygon(cstar_polygon_points(spec, m_chi, run));
        j["polygon_vq"] = polygon_json(np);
        auto brep = check_bounds_cstar(spec, m_chi, np);
        checks["cstar_bounds"] = bound_report_json(brep);
        bounds_ok = brep.pass;
    }

    // trace formula at the final truncation
    const DworkCtx& d = *run.ctx;
    long phi = cc.phi;
    Rat tail = Rat(spec.field.q() - 1) * run.D_final /
               (Rat(int_pow(spec.field.p, static_cast<std::uint64_t>(spec.field.a - 1))) * inv.delta);
    long floor_digits = static_cast<long>(rat_num(tail) / rat_den(tail));
    long T = std::min<long>(run.M * phi, floor_digits);
    nlohmann::json traces = nlohmann::json::array();
    bool traces_ok = true;
    for (long k = 1; k <= 3; ++k) {
        DworkElem tr = matrix_power_trace(run.mat, k, d);
        Int scale = int_pow(spec.field.q(), static_cast<std::uint64_t>(k)) - 1;
        DworkElem diff = dw_scale_int(tr, scale) - dw_from_cyclo(d, exp_sum(spec, chi, k));
        PiVal v = dw_vpi(diff);
        bool ok = !v.finite() || v.v >= T;
        traces_ok = traces_ok && ok;
        traces.push_back(nlohmann::json{{"k", k}, {"ok", ok}, {"compared_digits", T}});
    }
    checks["trace_formula"] = traces;
    checks["trace_formula_ok"] = traces_ok;

    bool ok = run.stabilized && cross_ok && bounds_ok && traces_ok;
    j["checks"] = checks;
    j["pass"] = ok;
    pass = ok;
    return j;
}

inline nlohmann::json plot_body(const TowerSpec& spec, const RunConfig& cfg, bool& pass) {
    auto inv = invariants(spec);
    auto cc = make_cyclo(spec.field.p, cfg.m_chi);
    Character chi{&cc, 1};
    auto Ls = l_star(spec, chi);
    auto npLs = np_of_lpoly_vq(Ls, spec.field.a);
    long kmax = static_cast<long>(npLs.slopes.size());
    auto np = polygon_from_slopes(cstar_slopes_from_lstar(npLs.slopes, kmax));
    RenderBounds bounds;
    Rat denom = Rat(spec.field.a) * (spec.field.p - 1) *
                Int(int_pow(spec.field.p, static_cast<std::uint64_t>(cfg.m_chi - 1)));
    for (long k = 0; k <= kmax; ++k) bounds.lower.emplace_back(k, hodge_lower(spec, k) / denom);
    if (cfg.m_chi > inv.m)
        for (const auto& [k, v] : upper_vertices(spec, kmax)) bounds.upper.emplace_back(k, v / denom);
    nlohmann::json j;
    j["m_chi"] = cfg.m_chi;
    j["polygon_vq"] = polygon_json(np);
    if (cfg.fmt_svg) j["svg"] = render_polygon_svg(np, &bounds);
    if (cfg.fmt_ascii) j["ascii"] = render_polygon_ascii(np, &bounds);
    pass = true;
    return j;
}

}  // namespace cli_detail

inline RunResult run(const RunConfig& cfg) {
    RunResult res;
    nlohmann::json rep;
    rep["command"] = cfg.command;
    try {
        if (cfg.m_chi < 1 || cfg.m_chi_max < 1) throw InputError("m_chi must be >= 1");
        if ((cfg.dwork_D && *cfg.dwork_D < 1) || (cfg.dwork_M && *cfg.dwork_M < 1))
            throw InputError("dwork overrides must be positive");
        std::string sha;
        TowerSpec spec = parse_spec_file(cfg.spec_path, &sha);
        rep["spec_path"] = cfg.spec_path;
        rep["spec_sha256"] = sha;
        bool pass = true;

        if (cfg.command == "info") {
            rep["info"] = cli_detail::info_body(spec, pass);
        } else if (cfg.command == "lfun") {
            rep["lfun"] = cli_detail::lfun_body(spec, cfg.m_chi, pass);
        } else if (cfg.command == "dwork") {
            rep["dwork"] = cli_detail::dwork_body(spec, cfg.m_chi, cfg.dwork_D, cfg.dwork_M, pass);
        } else if (cfg.command == "verify") {
            auto inv = invariants(spec);
            long threads = cli_detail::env_threads();
            std::vector<nlohmann::json> parts(static_cast<std::size_t>(cfg.m_chi_max));
            std::vector<char> oks(static_cast<std::size_t>(cfg.m_chi_max), 1);  // not vector<bool>: parallel writes
            auto work = [&](long mc) {
                bool okL = true, okD = true;
                nlohmann::json part;
                part["lfun"] = cli_detail::lfun_body(spec, mc, okL);
                if (dwork_default_D(spec, mc) <= 32) {
                    part["dwork"] = cli_detail::dwork_body(spec, mc, std::nullopt, std::nullopt, okD);
                } else {
                    part["dwork"] = nlohmann::json{{"skipped", true}, {"reason", "truncation size beyond verify budget"}};
                }
                parts[static_cast<std::size_t>(mc - 1)] = std::move(part);
                oks[static_cast<std::size_t>(mc - 1)] = okL && okD;
            };
            if (threads <= 1) {
                for (long mc = 1; mc <= cfg.m_chi_max; ++mc) work(mc);
            } else {
                for (long base = 1; base <= cfg.m_chi_max; base += threads) {
                    std::vector<std::future<void>> futs;
                    for (long mc = base; mc <= std::min(cfg.m_chi_max, base + threads - 1); ++mc)
                        futs.push_back(std::async(std::launch::async, work, mc));
                    for (auto& f : futs) f.get();
                }
            }
            nlohmann::json arr = nlohmann::json::array();
            for (long mc = 1; mc <= cfg.m_chi_max; ++mc) {
                parts[static_cast<std::size_t>(mc - 1)]["m_chi"] = mc;
                arr.push_back(parts[static_cast<std::size_t>(mc - 1)]);
                pass = pass && oks[static_cast<std::size_t>(mc - 1)];
            }
            rep["conductors"] = arr;
            rep["m"] = inv.m;
        } else if (cfg.command == "compare") {
            std::string sha2;
            TowerSpec other = parse_spec_file(cfg.other_path, &sha2);
            rep["other_path"] = cfg.other_path;
            rep["other_sha256"] = sha2;
            auto r = compare_towers(spec, other, cfg.m_chi);
            rep["compare"] = nlohmann::json{
                {"m_chi", cfg.m_chi}, {"identical", r.identical}, {"compared_indices", r.compared_indices}};
            pass = r.identical;
        } else if (cfg.command == "plot") {
            rep["plot"] = cli_detail::plot_body(spec, cfg, pass);
        } else {
            throw InputError("unknown command: " + cfg.command);
        }

        rep["pass"] = pass;
        res.exit_code = pass ? 0 : 1;

        if (!cfg.out_dir.empty()) {
            std::filesystem::create_directories(cfg.out_dir);
            std::string stem = std::filesystem::path(cfg.spec_path).stem().string();
            auto outpath = std::filesystem::path(cfg.out_dir) / (stem + "_" + cfg.command + ".json");
            std::ofstream out(outpath);
            out << rep.dump(2) << "\n";
            if (cfg.command == "plot") {
                std::string base = stem + "_mchi" + std::to_string(cfg.m_chi);
                if (cfg.fmt_svg) {
                    std::ofstream svg(std::filesystem::path(cfg.out_dir) / (base + ".svg"));
                    svg << rep["plot"]["svg"].get<std::string>();
                }
                if (cfg.fmt_ascii) {
                    std::ofstream txt(std::filesystem::path(cfg.out_dir) / (base + ".txt"));
                    txt << rep["plot"]["ascii"].get<std::string>();
                }
            }
        }
    } catch (const InputError& e) {
        rep["error"] = nlohmann::json{{"type", "input"}, {"message", e.what()}};
        res.exit_code = 2;
    } catch (const PrecisionError& e) {
        rep["error"] = nlohmann::json{{"type", "precision"}, {"message", e.what()}};
        res.exit_code = 3;
    } catch (const Error& e) {
        rep["error"] = nlohmann::json{{"type", "internal"}, {"message", e.what()}};
        res.exit_code = 3;
    }
    res.report = rep;
    return res;
}

}  // namespace aswl
