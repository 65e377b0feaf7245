// Command-line front end: tower-spec ingestion, L-function and Fredholm
// computations, verification matrices, comparisons and polygon plots.

#include <CLI11.hpp>

#include <iostream>

#include "aswl/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"L-functions and q-adic Newton polygons of Z_p-covers of the projective line"};
    app.require_subcommand(1);

    aswl::RunConfig cfg;
    std::string formats = "svg,ascii";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("spec", cfg.spec_path, "tower spec JSON file")->required();
        sub->add_option("-o,--out", cfg.out_dir, "output directory for report files");
    };

    auto* info = app.add_subcommand("info", "closed-form invariants, conductor and degree tables");
    add_common(info);

    auto* lfun = app.add_subcommand("lfun", "exact L-polynomial via the Euler product, with all checks");
    add_common(lfun);
    lfun->add_option("--m-chi", cfg.m_chi, "conductor exponent of the character")->required();

    auto* dwork = app.add_subcommand("dwork", "Fredholm-determinant path and cross-checks");
    add_common(dwork);
    dwork->add_option("--m-chi", cfg.m_chi, "conductor exponent of the character")->required();
    long dD = 0, dM = 0;
    dwork->add_option("--D", dD, "truncation dimension override");
    dwork->add_option("--M", dM, "p-adic precision override");

    auto* verify = app.add_subcommand("verify", "full check matrix across conductors");
    add_common(verify);
    verify->add_option("--m-chi-max", cfg.m_chi_max, "largest conductor exponent to check");

    auto* compare = app.add_subcommand("compare", "coefficient-irrelevance comparison of two towers");
    add_common(compare);
    compare->add_option("--other", cfg.other_path, "second tower spec JSON file")->required();
    compare->add_option("--m-chi", cfg.m_chi, "conductor exponent of the character")->required();

    auto* plot = app.add_subcommand("plot", "polygon plot with bound overlays (SVG + ASCII)");
    add_common(plot);
    plot->add_option("--m-chi", cfg.m_chi, "conductor exponent of the character")->required();
    plot->add_option("--formats", formats, "comma-separated subset of svg,ascii");

    CLI11_PARSE(app, argc, argv);

    cfg.command = app.get_subcommands().front()->get_name();
    if (dD > 0) cfg.dwork_D = dD;
    if (dM > 0) cfg.dwork_M = dM;
    cfg.fmt_svg = formats.find("svg") != std::string::npos;
    cfg.fmt_ascii = formats.find("ascii") != std::string::npos;

    aswl::RunResult res = aswl::run(cfg);
    std::cout << res.report.dump(2) << std::endl;
    return res.exit_code;
}
