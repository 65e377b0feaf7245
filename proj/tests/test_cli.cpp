#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "aswl/cli.hpp"

using namespace aswl;

namespace {

const std::string kSpecDir = std::string(ASWL_SOURCE_DIR) + "/specs";

nlohmann::json cubic_json() {
    return nlohmann::json::parse(R"({
        "p": 2, "a": 1, "field_modulus": [1, 1],
        "coeffs": [{"i": 0, "j": 3, "a_ij": [1]}]
    })");
}

std::string write_temp(const nlohmann::json& j, const std::string& name) {
    auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << j.dump(2);
    return path.string();
}

}  // namespace

TEST_CASE("spec parsing") {
    auto spec = parse_spec_json(cubic_json());
    CHECK(spec.field.p == 2);
    CHECK(spec.coeffs.size() == 1);
    CHECK(spec.coeffs.count({0, 3}) == 1);

    auto missing = cubic_json();
    missing.erase("coeffs");
    CHECK_THROWS_AS(parse_spec_json(missing), ParseError);

    auto badexp = cubic_json();
    badexp["coeffs"][0]["j"] = 4;
    CHECK_THROWS_AS(parse_spec_json(badexp), ForbiddenExponentError);
    try {
        parse_spec_json(badexp);
    } catch (const ForbiddenExponentError& e) {
        CHECK(std::string(e.what()).find("0,4") != std::string::npos);  // location is reported
    }

    auto zero = cubic_json();
    zero["coeffs"].push_back({{"i", 0}, {"j", 1}, {"a_ij", {0}}});
    CHECK_THROWS_AS(parse_spec_json(zero), ParseError);

    auto dup = cubic_json();
    dup["coeffs"].push_back(dup["coeffs"][0]);
    CHECK_THROWS_AS(parse_spec_json(dup), ParseError);
}

TEST_CASE("serialize round trip") {
    for (const char* name :
         {"cubic_f2.json", "cubic_plus_f2.json", "cubic_f4.json", "linear_f3.json", "b3_truncated_f2.json"}) {
        auto spec = parse_spec_file(kSpecDir + "/" + name);
        auto back = parse_spec_json(serialize_spec(spec));
        CHECK(specs_equal(spec, back));
    }
    // extension modulus overrides survive the round trip
    auto j = cubic_json();
    j["extension_moduli"]["2"] = {1, 1, 1};
    auto spec = parse_spec_json(j);
    CHECK(spec.field.ext_overrides.count(2) == 1);
    CHECK(specs_equal(spec, parse_spec_json(serialize_spec(spec))));
}

TEST_CASE("rendering is deterministic") {
    auto np = polygon_from_slopes({Rat(0), Rat(1, 4), Rat(1, 2), Rat(3, 4), Rat(1)});
    RenderBounds bounds;
    for (long k = 0; k <= 5; ++k) bounds.lower.emplace_back(k, Rat(k * (k - 1), 6));
    bounds.upper = {{0, Rat(0)}, {1, Rat(0)}, {3, Rat(1)}, {4, Rat(2)}};
    auto svg1 = render_polygon_svg(np, &bounds);
    auto svg2 = render_polygon_svg(np, &bounds);
    CHECK(svg1 == svg2);
    CHECK(std::count(svg1.begin(), svg1.end(), '\n') > 5);
    std::size_t polylines = 0;
    for (std::size_t pos = 0; (pos = svg1.find("<polyline", pos)) != std::string::npos; ++pos) ++polylines;
    CHECK(polylines == 3);  // hull plus two bound overlays
    CHECK(render_polygon_ascii(np, &bounds) == render_polygon_ascii(np, &bounds));

    // hull-only plot when no bounds are given
    std::size_t solo = 0;
    auto svg3 = render_polygon_svg(np, nullptr);
    for (std::size_t pos = 0; (pos = svg3.find("<polyline", pos)) != std::string::npos; ++pos) ++solo;
    CHECK(solo == 1);
}

TEST_CASE("decimal rendering of rationals") {
    CHECK(rat_decimal6(Rat(1, 2)) == "0.500000");
    CHECK(rat_decimal6(Rat(-5, 4)) == "-1.250000");
    CHECK(rat_decimal6(Rat(1, 3)) == "0.333333");
    CHECK(rat_decimal6(Rat(2, 3)) == "0.666667");
    CHECK(rat_decimal6(Rat(7)) == "7.000000");
}

TEST_CASE("run: info report carries the closed-form invariants") {
    RunConfig cfg;
    cfg.command = "info";
    cfg.spec_path = kSpecDir + "/cubic_f2.json";
    auto res = run(cfg);
    REQUIRE(res.exit_code == 0);
    const auto& info = res.report["info"];
    CHECK(info["delta"]["num"] == "3");
    CHECK(info["delta"]["den"] == "1");
    CHECK(info["m"] == 0);
    CHECK(info["W"]["num"] == "1");
    CHECK(info["W"]["den"] == "6");
    CHECK(info["stability"]["m_prime"] == 2);
    CHECK(info["degree_L"]["1"] == 2);
    CHECK(info["degree_L"]["2"] == 5);
    CHECK(info["degree_L"]["3"] == 11);
    CHECK(info["conductor"]["2"] == 7);
}

TEST_CASE("run: lfun and exit codes") {
    RunConfig cfg;
    cfg.command = "lfun";
    cfg.spec_path = kSpecDir + "/cubic_f2.json";
    cfg.m_chi = 1;
    auto res = run(cfg);
    CHECK(res.exit_code == 0);
    auto slopes = res.report["lfun"]["polygon_vq"]["slopes"];
    REQUIRE(slopes.size() == 2);
    CHECK(slopes[0]["num"] == "1");
    CHECK(slopes[0]["den"] == "2");

    RunConfig bad = cfg;
    bad.spec_path = "/nonexistent/path.json";
    CHECK(run(bad).exit_code == 2);

    auto broken = cubic_json();
    broken["coeffs"][0]["j"] = 4;
    RunConfig bad2 = cfg;
    bad2.spec_path = write_temp(broken, "aswl_bad_spec.json");
    auto res2 = run(bad2);
    CHECK(res2.exit_code == 2);
    CHECK(res2.report["error"]["type"] == "input");
    std::remove(bad2.spec_path.c_str());
}

TEST_CASE("run: verify passes on the cubic tower") {
    RunConfig cfg;
    cfg.command = "verify";
    cfg.spec_path = kSpecDir + "/cubic_f2.json";
    cfg.m_chi_max = 2;
    auto res = run(cfg);
    CHECK(res.exit_code == 0);
    CHECK(res.report["pass"].get<bool>());
    CHECK(res.report["conductors"].size() == 2);
    CHECK(res.report["spec_sha256"].get<std::string>().size() == 64);
}

TEST_CASE("run: verify passes across tower shapes") {
    for (const char* name : {"cubic_plus_f2.json", "quintic_f2.json", "cubic_f4.json", "linear_f3.json",
                             "b3_truncated_f2.json", "deep_f2.json"}) {
        RunConfig cfg;
        cfg.command = "verify";
        cfg.spec_path = kSpecDir + "/" + std::string(name);
        cfg.m_chi_max = 2;
        auto res = run(cfg);
        INFO(name << ": " << res.report.dump());
        CHECK(res.exit_code == 0);
    }
}

TEST_CASE("run: verify fan-out is deterministic") {
    RunConfig cfg;
    cfg.command = "verify";
    cfg.spec_path = kSpecDir + "/cubic_f2.json";
    cfg.m_chi_max = 2;
    auto serial = run(cfg);
    setenv("ASWL_THREADS", "2", 1);
    auto parallel = run(cfg);
    unsetenv("ASWL_THREADS");
    CHECK(parallel.exit_code == 0);
    CHECK(serial.report == parallel.report);
}

TEST_CASE("run: plot output is byte-identical across runs") {
    RunConfig cfg;
    cfg.command = "plot";
    cfg.spec_path = kSpecDir + "/cubic_f2.json";
    cfg.m_chi = 2;
    auto r1 = run(cfg);
    auto r2 = run(cfg);
    REQUIRE(r1.exit_code == 0);
    CHECK(r1.report["plot"]["svg"] == r2.report["plot"]["svg"]);
    CHECK(r1.report["plot"]["ascii"] == r2.report["plot"]["ascii"]);
}

TEST_CASE("run: starved precision exits with the precision code") {
    RunConfig cfg;
    cfg.command = "dwork";
    cfg.spec_path = kSpecDir + "/cubic_f2.json";
    cfg.m_chi = 2;
    cfg.dwork_M = 1;  // polygon cannot be resolved at one digit
    auto res = run(cfg);
    CHECK(res.exit_code == 3);
    CHECK(res.report["error"]["type"] == "precision");
}

TEST_CASE("run: compare matches the irrelevance theorem") {
    RunConfig cfg;
    cfg.command = "compare";
    cfg.spec_path = kSpecDir + "/cubic_f2.json";
    cfg.other_path = kSpecDir + "/cubic_plus_f2.json";
    cfg.m_chi = 2;
    auto res = run(cfg);
    CHECK(res.exit_code == 0);
    CHECK(res.report["compare"]["identical"].get<bool>());
}
