#include "yamabe/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include <nlohmann/json.hpp>

#include "yamabe/bubble.hpp"
#include "yamabe/curvature.hpp"
#include "yamabe/errors.hpp"
#include "yamabe/harmonics.hpp"
#include "yamabe/pohozaev.hpp"
#include "yamabe/profile.hpp"
#include "yamabe/sphere_moments.hpp"
#include "yamabe/sturm_liouville.hpp"

namespace yamabe {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

SphericalPolynomial random_block(int n, int degree, std::mt19937_64& eng, int terms) {
    SphericalPolynomial p(n, degree);
    std::uniform_int_distribution<int> var(0, n - 1);
    std::uniform_int_distribution<int> coef(-9, 9);
    for (int t = 0; t < terms; ++t) {
        MultiIndex a(std::size_t(n), 0);
        for (int d = 0; d < degree; ++d) a[var(eng)] += 1;
        p.add_term(a, coef(eng));
    }
    return p;
}

} // namespace

bool Report::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string Report::to_json() const {
    nlohmann::json j;
    j["dim"] = options.dim;
    j["seed"] = options.seed;
    auto arr = nlohmann::json::array();
    for (const auto& c : checks) {
        nlohmann::json e;
        e["name"] = c.name;
        e["tag"] = c.tag;
        e["pass"] = c.pass;
        e["expected_fail"] = c.expected_fail;
        e["value"] = fmt(c.value);
        e["threshold"] = fmt(c.threshold);
        e["detail"] = c.detail;
        arr.push_back(e);
    }
    j["checks"] = arr;
    j["all_pass"] = all_pass();
    return j.dump(2);
}

std::string Report::to_markdown() const {
    std::string s = "# Verification report (n = " + std::to_string(options.dim) + ")\n\n";
    s += "| check | tag | status | value | threshold |\n";
    s += "|---|---|---|---|---|\n";
    for (const auto& c : checks) {
        s += "| " + c.name + " | " + c.tag + " | " +
             (c.pass ? (c.expected_fail ? "pass (expected fail)" : "pass") : "FAIL") + " | " +
             fmt(c.value) + " | " + fmt(c.threshold) + " |\n";
    }
    s += std::string("\nOverall: ") + (all_pass() ? "all checks pass" : "FAILURES present") + "\n";
    return s;
}

Report run_report(const ReportOptions& opt) {
    Report rep;
    rep.options = opt;
    const int n = opt.dim;
    auto add = [&](CheckResult c) { rep.checks.push_back(std::move(c)); };

    // 1-2: exact second/fourth moments across a dimension range
    {
        bool ok2 = true, ok4 = true;
        for (int m = 3; m <= 15; ++m) {
            MultiIndex a22(std::size_t(m), 0);
            a22[0] = 2;
            if (m > 1) a22[1] = 2;
            ok2 = ok2 && (sphere_monomial_average(m, a22) == rational(1, m * (m + 2)));
            MultiIndex a4(std::size_t(m), 0);
            a4[0] = 4;
            ok4 = ok4 && (sphere_monomial_average(m, a4) == rational(3, m * (m + 2)));
        }
        add({"moment_theta2_theta2", "sphere-moments", ok2, false, ok2 ? 1.0 : 0.0, 1.0,
             "avg theta_i^2 theta_j^2 == 1/(n(n+2)) for n=3..15, exact"});
        add({"moment_theta4", "sphere-moments", ok4, false, ok4 ? 1.0 : 0.0, 1.0,
             "avg theta_i^4 == 3/(n(n+2)) for n=3..15, exact"});
    }

    // 3: dual-path block averages on random polynomials
    {
        std::mt19937_64 eng(opt.seed);
        bool ok = true;
        double worst = 0.0;
        for (int k = 1; k <= 3 && ok; ++k)
            for (int t = 0; t < 20; ++t) {
                auto block = random_block(n, 2 * k, eng, 24);
                auto avg = taylor_block_average(k, block); // throws on mismatch
                worst = std::max(worst, std::abs(to_double(avg.moment_path - avg.ladder_path)));
            }
        add({"ladder_dual_path", "dec13e4", ok, false, worst, 1e-10,
             "moment contraction vs Delta^k ladder, k=1..3, 60 random blocks"});
    }

    // 4: odd-moment contraction identity
    {
        std::mt19937_64 eng(opt.seed + 1);
        bool ok = true;
        for (int k = 1; k <= 2; ++k)
            for (int t = 0; t < 20; ++t) {
                auto block = random_block(n, 2 * k + 1, eng, 24);
                for (int jdx : {0, n - 1}) {
                    auto chk = verify_odd_moment_identity(k, block, jdx);
                    ok = ok && chk.pass;
                }
            }
        add({"odd_moment_identity", "fact1", ok, false, ok ? 1.0 : 0.0, 1.0,
             "(2k+1)-block contraction against theta_j, k=1,2"});
    }

    // 5: square expansion of the degree-2 oscillation
    {
        std::mt19937_64 eng(opt.seed + 2);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        bool ok = true;
        for (int t = 0; t < 10; ++t) {
            std::vector<std::vector<double>> h(n, std::vector<double>(n, 0.0));
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) h[i][j] = h[j][i] = u(eng);
            ok = ok && expand_square_r2_block(h).consistent;
        }
        add({"square_expansion", "14-1new", ok, false, ok ? 1.0 : 0.0, 1.0,
             "moment contraction of the squared block vs closed form, exact"});
    }

    // 6: dimension gate, full table
    {
        bool table_ok = true;
        std::string detail;
        for (int m = 10; m <= 25; ++m) {
            auto g = dimension_gate(m);
            const bool expected = (m == 10 || m == 11);
            if (g.holds != expected) table_ok = false;
            if (m <= 12)
                detail += "n=" + std::to_string(m) + (g.holds ? " holds " : " fails ");
        }
        add({"dimension_gate_table", "gate-10-11", table_ok, false, table_ok ? 1.0 : 0.0, 1.0,
             detail + "(exact rational, eps=0)"});
        if (n >= 10) {
            auto g = dimension_gate(n);
            const bool expected = (n == 10 || n == 11);
            add({"dimension_gate_dim", "gate-10-11", g.holds == expected, !expected,
                 g.margin_value, 0.0,
                 std::string("margin rhs-lhs at the requested dimension") +
                     (expected ? "" : " (failure is the correct outcome here)")});
        }
    }

    const bool dim_supported = n >= 10;
    SolveOptions sopt;
    sopt.points_per_decade = opt.points_per_decade;

    std::optional<BvpSolution> f2sol, f3sol;
    if (dim_supported) {
        Dimension dim(n);
        f2sol = solve_f2(dim, sopt);
        f3sol = solve_f3(dim, sopt);

        // 7-8: f2 envelopes
        {
            auto repf2 = check_f2_bounds(*f2sol, dim);
            add({"f2_lower_envelope", "nov19e1", repf2.lower_ok, false,
                 repf2.worst_lower_margin, -repf2.tolerance,
                 "node-wise lower bound over the solve grid"});
            add({"f2_upper_fit", "nov19e1", std::isfinite(repf2.fitted_upper_C), false,
                 repf2.fitted_upper_C, 0.0, "smallest C with f2 <= C r^{3/2}(1+r)^{9/2-n}"});
        }
        // 9: f3 nonnegativity and upper fit
        {
            double C = 0.0;
            for (std::size_t i = 0; i < f3sol->profile.size(); ++i) {
                const double r = f3sol->profile.grid()[i];
                C = std::max(C, f3sol->profile.values()[i] /
                                    (std::pow(r, 2.5) * std::pow(1.0 + r, 4.5 - n)));
            }
            const bool nonneg = f3sol->min_value >= -1e-10;
            add({"f3_bounds", "aabb", nonneg && std::isfinite(C), false, C, 0.0,
                 "0 <= f3 <= C r^{5/2}(1+r)^{9/2-n}, fitted C"});
        }
        // 10: f2_lambda envelope for the lambda window
        {
            bool ok = true;
            double worst = 0.0;
            for (double lambda : {0.99, 1.0, 1.01}) {
                auto f = solve_f2_lambda(dim, lambda, sopt);
                auto r = check_f2lambda_bounds(f, dim, lambda, 0.1);
                ok = ok && r.lower_ok;
                worst = std::min(worst, r.worst_lower_margin);
            }
            add({"f2lambda_envelope", "mar10e2", ok, false, worst, 0.0,
                 "lambda in {0.99, 1.0, 1.01}, eps = 0.1"});
        }
        // 11-12: supersolution signs
        {
            auto grid = make_log_grid(1e-3, 1e3, 128);
            auto sr = check_supersolutions(dim, grid);
            add({"supersolution_phi1", "appC-phi1", sr.phi1_ok && sr.phi1_consistency < 1e-10,
                 false, sr.phi1_min_margin, 0.0, "T phi1 + r^2 U > 0 node-wise"});
            add({"supersolution_phi2", "appC-phi2", sr.phi2_ok && sr.phi2_consistency < 1e-10,
                 false, sr.phi2_min_margin, 0.0, "g exceeds the phi2 right-hand side node-wise"});
        }
    }

    // 13-16: curvature identities on seeded hypothesis jets
    if (dim_supported) {
        bool res_ok = true, margin_ok = true, hv2_ok = true, rbar2_ok = true;
        double worst_res = 0.0, worst_margin = 0.0;
        for (int s = 0; s < opt.hypothesis_samples; ++s) {
            auto jet = random_jet(n, opt.seed + 100 + s, JetClass::hypothesis);
            const double scale = std::max(1.0, weyl_norms(jet).hessRm2);
            const double res = rbar6_identity_residual(jet) / scale;
            worst_res = std::max(worst_res, res);
            res_ok = res_ok && res <= 1e-10;
            auto hv = check_hv_inequalities(jet);
            worst_margin = std::min(worst_margin, hv.norm_margin);
            margin_ok = margin_ok && hv.norm_margin >= -1e-12 * std::max(1.0, hv.norm_rhs);
            hv2_ok = hv2_ok && (hv.cross_holds || !hv.in_hypothesis_class);
            try {
                rbar2_weyl(jet);
            } catch (const ConsistencyError&) {
                rbar2_ok = false;
            }
        }
        {
            auto gen = random_jet(n, opt.seed + 50, JetClass::general);
            try {
                rbar2_weyl(gen);
            } catch (const ConsistencyError&) {
                rbar2_ok = false;
            }
        }
        add({"dec13e1_residual", "dec13e1", res_ok, false, worst_res, 1e-10,
             std::to_string(opt.hypothesis_samples) + " hypothesis jets, normalized residual"});
        add({"dec7e3_margin", "dec7e3", margin_ok, false, worst_margin, 0.0,
             "|rm2|^2 - (49/4n^2)|d^2R|^2 over hypothesis jets"});
        add({"dec7e2_report", "dec7e2", hv2_ok, false, hv2_ok ? 1.0 : 0.0, 1.0,
             "holds, or the sample is flagged outside the hypothesis class"});
        add({"rbar2_weyl_cross", "SS5", rbar2_ok, false, rbar2_ok ? 1.0 : 0.0, 1.0,
             "-|W|^2/(12n) vs ladder average of the degree-2 block"});
    }

    // 17: flat balance defect
    if (dim_supported) {
        Dimension dim(n);
        bool ok = true;
        double worst = 0.0;
        for (double R : {1.0, 2.0, 5.0, 10.0}) {
            PohozaevInput in{dim, nullptr, 1.0, R, bubble_field(dim), 1 << 12};
            auto pr = eval_pohozaev(in);
            worst = std::max(worst, std::abs(pr.defect_normalized));
            ok = ok && std::abs(pr.defect_normalized) <= 1e-8 && pr.I1 == 0.0 && pr.I2 == 0.0 &&
                 pr.I3 == 0.0;
        }
        add({"pohozaev_flat_defect", "poho", ok, false, worst, 1e-8,
             "v = U, flat background, R' in {1,2,5,10}, energy-normalized"});
    }

    // 18: log-divergence signature of the f2 cross moment
    if (dim_supported && f2sol) {
        Dimension dim(n);
        auto jet = random_jet(n, opt.seed + 7, JetClass::hypothesis);
        auto prof = build_profile(jet, dim, 1e3, *f2sol, *f3sol);
        PohozaevInput in{dim, &jet, 1e3, 10.0, &prof, 1 << 12};
        auto br = i2_breakdown(in, {1e2, 1e3, 1e4});
        if (n == 10) {
            const bool ok = std::abs(br.growth_ratio - 2.0) <= 0.3;
            add({"i2_log_signature", "dec17e3", ok, false, br.growth_ratio, 2.0,
                 "integral over r<=1e4 vs r<=1e2 doubles under the log law"});
        } else {
            double i3 = 0.0, i4 = 0.0;
            for (auto& [R, v] : br.moment_growth) {
                if (R == 1e3) i3 = v;
                if (R == 1e4) i4 = v;
            }
            const double drift = i3 != 0.0 ? std::abs(i4 - i3) / std::abs(i3) : 1.0;
            const bool ok = drift <= 0.01;
            add({"i2_convergent_moment", "dec17e3", ok, false, drift, 0.01,
                 "integral converges: <=1% drift between r<=1e3 and r<=1e4"});
        }
    }

    // 19: residual envelope fit stability for the composite profile
    if (dim_supported && opt.include_profile_residual) {
        Dimension dim(n);
        CurvatureJet raw(n);
        std::mt19937_64 eng(opt.seed + 11);
        auto uni = [&]() { return (double(eng() >> 11) + 0.5) * 0x1p-53 - 0.5; };
        for (auto& x : raw.rm2) x = uni();
        for (auto& x : raw.r3) x = uni();
        for (auto& x : raw.r4) x = uni();
        CurvatureJet jet = project_hypothesis(raw);
        // a fourth-order scalar block with nonzero average drives the leading
        // residual term; restore one after the hypothesis projection
        std::mt19937_64 eng2(opt.seed + 12);
        for (auto& x : jet.r4) x = (double(eng2() >> 11) + 0.5) * 0x1p-53 - 0.5;
        CurvatureJet jet2 = project_symmetries(jet);

        std::vector<double> fits;
        for (double M : {1e3, 1e4}) {
            for (int ppd : {opt.points_per_decade / 2, opt.points_per_decade}) {
                SolveOptions so;
                so.points_per_decade = ppd;
                auto p = build_profile(jet2, dim, M, solve_f2(dim, so), solve_f3(dim, so));
                ResidualOptions ro;
                auto rf = pde_residual(p, jet2, ro);
                fits.push_back(rf.fitted_C);
            }
        }
        double mean = 0.0;
        for (double f : fits) mean += f;
        mean /= double(fits.size());
        double rel = 0.0;
        for (double f : fits) rel = std::max(rel, std::abs(f - mean) / mean);
        add({"profile_residual_fit", "dec8e1", rel <= 0.3, false, rel, 0.3,
             "fitted envelope constant stable over M in {1e3,1e4} and two grids"});
    }

    // 20: external jet validation when requested
    if (opt.jet_path) {
        try {
            auto jet = CurvatureJet::load_json(*opt.jet_path);
            auto v = validate_jet(jet);
            add({"jet_validate", "jet", v.pass(), false, v.worst, 1e-12,
                 "constraint violations of the loaded jet"});
        } catch (const std::exception& e) {
            add({"jet_load", "jet", false, false, 0.0, 0.0, std::string("failed: ") + e.what()});
        }
    }

    return rep;
}

} // namespace yamabe
