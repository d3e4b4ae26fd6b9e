// Command-line front end: radial solves, bound checks, the dimension gate,
// exact sphere moments, jet generation/validation, profile assembly and the
// balance identity, plus the aggregated verification report.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "yamabe/bubble.hpp"
#include "yamabe/curvature.hpp"
#include "yamabe/errors.hpp"
#include "yamabe/harmonics.hpp"
#include "yamabe/pohozaev.hpp"
#include "yamabe/profile.hpp"
#include "yamabe/report.hpp"
#include "yamabe/sphere_moments.hpp"
#include "yamabe/sturm_liouville.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw yamabe::ConfigError("cannot open for write: " + path.string());
    out << content;
}

json envelope_json(const yamabe::EnvelopeReport& r) {
    json j;
    j["lower_bound_ok"] = r.lower_ok;
    j["worst_lower_margin"] = fmt(r.worst_lower_margin);
    j["tolerance"] = fmt(r.tolerance);
    j["fitted_upper_C"] = fmt(r.fitted_upper_C);
    auto viol = json::array();
    for (const auto& v : r.violations) viol.push_back({{"r", v.r}, {"margin", v.margin}});
    j["violations"] = viol;
    return j;
}

struct CustomSolveSpec {
    double delta0 = 0.0;
    std::string potential = "bubble"; // bubble | interpolated
    std::string rhs = "r2U";          // r2U | r3U | rlU:<l> | csv:<path>
    double tol = 1e-9;
    double beta = 2.0, alpha = 0.0, growth_p = 0.0; // 0 -> derived defaults
};

yamabe::BvpSolution solve_custom(const yamabe::Dimension& dim, double lambda,
                                 const yamabe::SolveOptions& sopt, const CustomSolveSpec& spec) {
    const int n = dim.n();
    yamabe::SturmLiouvilleProblem p{dim, spec.delta0};
    p.r_lo = sopt.r_lo;
    p.r_hi = sopt.r_hi;
    p.points_per_decade = sopt.points_per_decade;
    p.tol = spec.tol;
    if (spec.potential == "interpolated") {
        p.potential = yamabe::PotentialKind::interpolated;
        p.lambda = lambda;
    } else if (spec.potential != "bubble") {
        throw yamabe::ConfigError("potential must be 'bubble' or 'interpolated'");
    }

    double beta = spec.beta;
    if (spec.rhs.rfind("csv:", 0) == 0) {
        auto table = std::make_shared<yamabe::RadialFunction>(
            yamabe::RadialFunction::load_csv(spec.rhs.substr(4)));
        if (spec.alpha == 0.0)
            throw yamabe::ConfigError("tabulated rhs requires explicit alpha and beta keys");
        p.rhs = [table](double r) { return table->eval_extrapolated(r); };
    } else {
        int l = 2;
        if (spec.rhs == "r2U") l = 2;
        else if (spec.rhs == "r3U") l = 3;
        else if (spec.rhs.rfind("rlU:", 0) == 0) l = std::stoi(spec.rhs.substr(4));
        else throw yamabe::ConfigError("rhs must be r2U, r3U, rlU:<l> or csv:<path>");
        p.rhs = [dim, l](double r) { return std::pow(r, l) * yamabe::eval_bubble(dim, r); };
        beta = double(l);
    }
    const double alpha = spec.alpha > 0.0 ? spec.alpha : double(n) - beta - 2.0;
    const double root = yamabe::indicial_root(n, spec.delta0);
    const double growth =
        spec.growth_p > 0.0 ? spec.growth_p : std::min(root, beta + 2.0) - 0.5;
    p.bounds = {beta, alpha, 1.0, growth};
    p.inner_growth = std::min(root, beta + 2.0);
    return yamabe::solve_bvp(p);
}

int cmd_solve(const std::string& profile, int dim_n, double lambda, int l, double M,
              const yamabe::SolveOptions& sopt, const CustomSolveSpec& custom,
              const std::string& out_dir) {
    yamabe::Dimension dim(dim_n);
    yamabe::BvpSolution sol{yamabe::RadialFunction{}, {}, 0, 0.0, 0.0, 0.0, {}};
    json bounds;
    if (profile == "custom") {
        sol = solve_custom(dim, lambda, sopt, custom);
        bounds["delta0"] = custom.delta0;
        bounds["rhs"] = custom.rhs;
    } else if (profile == "f2") {
        sol = yamabe::solve_f2(dim, sopt);
        bounds = envelope_json(yamabe::check_f2_bounds(sol, dim));
    } else if (profile == "f3") {
        sol = yamabe::solve_f3(dim, sopt);
        double C = 0.0;
        for (std::size_t i = 0; i < sol.profile.size(); ++i) {
            const double r = sol.profile.grid()[i];
            C = std::max(C, sol.profile.values()[i] /
                                (std::pow(r, 2.5) * std::pow(1.0 + r, 4.5 - dim_n)));
        }
        bounds["nonnegative"] = sol.min_value >= -1e-10;
        bounds["fitted_upper_C"] = fmt(C);
    } else if (profile == "f2lambda") {
        sol = yamabe::solve_f2_lambda(dim, lambda, sopt);
        bounds = envelope_json(yamabe::check_f2lambda_bounds(sol, dim, lambda, 0.1));
        bounds["lambda"] = lambda;
    } else if (profile == "fpl") {
        sol = yamabe::solve_f_pl(dim, lambda, l, M, sopt.points_per_decade);
        bounds["lambda"] = lambda;
        bounds["l"] = l;
        bounds["outer_slope"] =
            fmt(sol.profile.loglog_slope(sol.profile.r_max() / 100.0, sol.profile.r_max() / 10.0));
        bounds["expected_outer_exponent"] = l + 4 - dim_n;
        double C = 0.0;
        for (std::size_t i = 0; i < sol.profile.size(); ++i)
            C = std::max(C, sol.profile.values()[i] /
                                std::pow(sol.profile.grid()[i], l + 4 - dim_n));
        bounds["fitted_upper_C"] = fmt(C);
    } else {
        throw yamabe::ConfigError("unknown profile '" + profile +
                                  "' (expected f2, f3, f2lambda, fpl or custom)");
    }
    bounds["residual_norm"] = fmt(sol.residual_norm);
    bounds["min_value"] = fmt(sol.min_value);
    if (sol.bound_C0) bounds["certificate_C0"] = fmt(*sol.bound_C0);

    const fs::path dir = out_dir;
    fs::create_directories(dir);
    sol.profile.save_csv((dir / (profile + ".csv")).string());
    write_file(dir / (profile + "_bounds.json"), bounds.dump(2) + "\n");
    std::cout << bounds.dump(2) << "\n";
    const bool pass = !bounds.contains("lower_bound_ok") || bounds["lower_bound_ok"].get<bool>();
    return pass ? 0 : kExitCheckFailure;
}

int cmd_gate(int from, int to, double eps, const std::string& out_csv) {
    std::string csv = "n,lhs,rhs,margin,holds\n";
    std::printf("%4s %14s %14s %14s %s\n", "n", "lhs", "rhs", "margin", "holds");
    int held = 0;
    for (int m = from; m <= to; ++m) {
        auto g = yamabe::dimension_gate(m, yamabe::Rational(eps));
        std::printf("%4d %14.6e %14.6e %14.6e %s\n", m, g.lhs_value, g.rhs_value,
                    g.margin_value, g.holds ? "true" : "false");
        csv += std::to_string(m) + "," + fmt(g.lhs_value) + "," + fmt(g.rhs_value) + "," +
               fmt(g.margin_value) + "," + (g.holds ? "true" : "false") + "\n";
        if (g.holds) ++held;
    }
    if (!out_csv.empty()) write_file(out_csv, csv);
    return 0;
}

int cmd_moments(int dim_n, const std::string& alpha_csv) {
    if (!alpha_csv.empty()) {
        yamabe::MultiIndex alpha;
        std::stringstream ss(alpha_csv);
        std::string cell;
        while (std::getline(ss, cell, ',')) alpha.push_back(std::uint8_t(std::stoi(cell)));
        while (int(alpha.size()) < dim_n) alpha.push_back(0);
        if (int(alpha.size()) != dim_n)
            throw yamabe::ConfigError("alpha has more entries than the dimension");
        auto avg = yamabe::sphere_monomial_average(dim_n, alpha);
        std::cout << "avg theta^" << yamabe::to_string(alpha) << " = " << yamabe::to_string(avg)
                  << " = " << fmt(yamabe::to_double(avg)) << "\n";
        return 0;
    }
    std::printf("%4s %18s %18s\n", "n", "theta_i^2theta_j^2", "theta_i^4");
    for (int m = 3; m <= 15; ++m) {
        yamabe::MultiIndex a22(std::size_t(m), 0), a4(std::size_t(m), 0);
        a22[0] = a22[1] = 2;
        a4[0] = 4;
        std::printf("%4d %18s %18s\n", m,
                    yamabe::to_string(yamabe::sphere_monomial_average(m, a22)).c_str(),
                    yamabe::to_string(yamabe::sphere_monomial_average(m, a4)).c_str());
    }
    return 0;
}

int cmd_jet_generate(int dim_n, std::uint64_t seed, const std::string& cls,
                     const std::string& out_path) {
    auto jet = yamabe::random_jet(dim_n, seed,
                                  cls == "hypothesis" ? yamabe::JetClass::hypothesis
                                                      : yamabe::JetClass::general);
    jet.save_json(out_path);
    auto v = yamabe::validate_jet(jet);
    std::cout << "jet written to " << out_path << ", worst constraint violation "
              << fmt(v.worst) << "\n";
    return v.pass() ? 0 : kExitCheckFailure;
}

int cmd_jet_validate(const std::string& path) {
    auto jet = yamabe::CurvatureJet::load_json(path);
    auto v = yamabe::validate_jet(jet);
    for (const auto& e : v.entries)
        std::printf("%-28s %12.3e\n", e.name.c_str(), e.max_violation);
    std::printf("worst: %.3e -> %s\n", v.worst, v.pass() ? "pass" : "FAIL");
    return v.pass() ? 0 : kExitCheckFailure;
}

int cmd_profile(const std::string& jet_path, int dim_n, double M, int ppd,
                const std::string& out_dir) {
    yamabe::Dimension dim(dim_n);
    auto jet = yamabe::CurvatureJet::load_json(jet_path);
    yamabe::SolveOptions sopt;
    sopt.points_per_decade = ppd;
    auto f2 = yamabe::solve_f2(dim, sopt);
    auto f3 = yamabe::solve_f3(dim, sopt);
    auto prof = yamabe::build_profile(jet, dim, M, f2, f3);

    auto rf = yamabe::pde_residual(prof, jet);
    const fs::path dir = out_dir;

    auto dirs = yamabe::sample_directions(dim_n, 8, 2024);
    auto radii = yamabe::make_log_grid(1e-2, rf.radii.back(), 16);
    auto sampled = yamabe::SampledSolution::from_profile(prof, radii, dirs);
    write_file(dir / "profile_grid.csv", sampled.to_csv());
    write_file(dir / "profile_directions.json", sampled.directions_json() + "\n");

    json j;
    j["M"] = M;
    j["dim"] = dim_n;
    j["fitted_envelope_C"] = fmt(rf.fitted_C);
    j["max_abs_residual"] = fmt(rf.max_abs);
    j["v3_low_degree_remainder"] = fmt(prof.v3_difference_norm());
    write_file(dir / "residual_report.json", j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_pohozaev(const std::string& jet_path, bool use_bubble, int dim_n, double radius,
                 double M, double mu, const std::string& profile_desc,
                 const std::string& out_path) {
    yamabe::Dimension dim(dim_n);
    json j;
    yamabe::PohozaevResult res;
    json breakdown = json::array();

    if (use_bubble) {
        yamabe::PohozaevInput in{dim, nullptr, std::max(M, 1.0), radius,
                                 mu == 1.0 ? yamabe::bubble_field(dim)
                                           : yamabe::bubble_field_rescaled(dim, mu),
                                 1 << 14};
        res = yamabe::eval_pohozaev(in);
    } else {
        auto jet = yamabe::CurvatureJet::load_json(jet_path);
        yamabe::SolveOptions sopt;
        yamabe::V3Mode mode = yamabe::V3Mode::eigen;
        if (!profile_desc.empty()) {
            // profile descriptor: {"M": .., "v3_mode": "eigen"|"full",
            //                      "points_per_decade": ..}
            std::ifstream in(profile_desc);
            if (!in) throw yamabe::ConfigError("cannot open profile descriptor: " + profile_desc);
            json pd = json::parse(in);
            if (pd.contains("M")) M = pd["M"].get<double>();
            if (pd.contains("points_per_decade"))
                sopt.points_per_decade = pd["points_per_decade"].get<int>();
            if (pd.contains("v3_mode") && pd["v3_mode"].get<std::string>() == "full")
                mode = yamabe::V3Mode::full;
        }
        auto f2 = yamabe::solve_f2(dim, sopt);
        auto f3 = yamabe::solve_f3(dim, sopt);
        auto prof = yamabe::build_profile(jet, dim, M, f2, f3, mode);
        yamabe::PohozaevInput in{dim, &jet, M, radius, &prof, 1 << 13};
        res = yamabe::eval_pohozaev(in);
        auto br = yamabe::i2_breakdown(in);
        for (const auto& t : br.terms)
            breakdown.push_back({{"label", t.label},
                                 {"prefactor", fmt(t.prefactor)},
                                 {"radial_moment", fmt(t.radial_moment)},
                                 {"value", fmt(t.value)}});
        j["i2_breakdown_total"] = fmt(br.total);
        j["f2_cross_prefactor"] = fmt(br.f2_cross_prefactor);
        j["f2_cross_moment"] = fmt(br.f2_cross_moment);
        j["moment_growth_ratio"] = fmt(br.growth_ratio);
    }
    j["I1"] = fmt(res.I1);
    j["I2"] = fmt(res.I2);
    j["I3"] = fmt(res.I3);
    j["I4"] = fmt(res.I4);
    j["I5"] = fmt(res.I5);
    j["defect"] = fmt(res.defect);
    j["defect_normalized"] = fmt(res.defect_normalized);
    j["u_energy"] = fmt(res.u_energy);
    j["breakdown"] = breakdown;
    if (!out_path.empty()) write_file(out_path, j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_report(int dim_n, std::uint64_t seed, int samples, bool skip_residual,
               const std::string& out_dir, const std::string& jet_path) {
    yamabe::ReportOptions opt;
    opt.dim = dim_n;
    opt.seed = seed;
    opt.hypothesis_samples = samples;
    opt.include_profile_residual = !skip_residual;
    if (!jet_path.empty()) opt.jet_path = jet_path;
    auto rep = yamabe::run_report(opt);
    const fs::path dir = out_dir;
    write_file(dir / "report.json", rep.to_json() + "\n");
    write_file(dir / "report.md", rep.to_markdown());
    std::cout << rep.to_markdown();
    return rep.all_pass() ? 0 : kExitCheckFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for three-term blow-up profiles of the Yamabe equation"};
    app.set_config("--config", "", "key=value config file; command-line flags take precedence");
    app.fallthrough(); // lets --config appear after the subcommand name
    app.require_subcommand(1);

    // solve
    auto* solve = app.add_subcommand("solve", "solve a radial boundary-value problem");
    std::string profile = "f2", out_dir = "out";
    int dim_n = 10, l = 3, ppd = 512;
    double lambda = 1.0, M = 1e9, r_lo = 1e-4, r_hi = 1e4;
    solve->add_option("--profile", profile, "f2 | f3 | f2lambda | fpl")->capture_default_str();
    solve->add_option("--dim", dim_n, "ambient dimension n")->capture_default_str();
    solve->add_option("--lambda", lambda, "inversion radius")->capture_default_str();
    solve->add_option("--l", l, "harmonic degree for fpl")->capture_default_str();
    solve->add_option("--M", M, "height scale fixing the fpl outer endpoint 2 M^{2/(n-2)}")
        ->capture_default_str();
    solve->add_option("--points-per-decade", ppd, "grid density")->capture_default_str();
    solve->add_option("--rmin", r_lo, "inner grid radius")->capture_default_str();
    solve->add_option("--rmax", r_hi, "outer grid radius")->capture_default_str();
    solve->add_option("--out", out_dir, "output directory")->capture_default_str();
    CustomSolveSpec custom;
    solve->add_option("--delta0", custom.delta0, "angular constant for --profile custom");
    solve->add_option("--potential", custom.potential, "bubble | interpolated (custom)")
        ->capture_default_str();
    solve->add_option("--rhs", custom.rhs, "r2U | r3U | rlU:<l> | csv:<path> (custom)")
        ->capture_default_str();
    solve->add_option("--tol", custom.tol, "residual certification tolerance (custom)")
        ->capture_default_str();
    solve->add_option("--beta", custom.beta, "rhs growth exponent (custom, csv rhs)");
    solve->add_option("--alpha", custom.alpha, "rhs decay exponent (custom, csv rhs)");
    solve->add_option("--growth-p", custom.growth_p, "certificate exponent (custom)");

    // bounds (re-check envelopes without writing the CSV)
    auto* bounds = app.add_subcommand("bounds", "envelope checks for a solved profile");
    std::string bprofile = "f2";
    int bdim = 10;
    double blambda = 1.0, beps = 0.1;
    bounds->add_option("--profile", bprofile, "f2 | f2lambda")->capture_default_str();
    bounds->add_option("--dim", bdim)->capture_default_str();
    bounds->add_option("--lambda", blambda)->capture_default_str();
    bounds->add_option("--eps", beps, "slack in the lower envelope")->capture_default_str();
    bool bscan = false;
    bounds->add_flag("--scan-window", bscan,
                     "also report the largest empirically admissible |lambda-1|");

    // gate
    auto* gate = app.add_subcommand("gate", "dimension-gate inequality table");
    int gfrom = 10, gto = 25;
    double geps = 0.0;
    std::string gate_csv;
    gate->add_option("--from", gfrom)->capture_default_str();
    gate->add_option("--to", gto)->capture_default_str();
    gate->add_option("--eps", geps, "slack added to the left side")->capture_default_str();
    gate->add_option("--csv", gate_csv, "also write the table as CSV");

    // moments
    auto* moments = app.add_subcommand("moments", "exact sphere monomial averages");
    int mdim = 10;
    std::string alpha_csv;
    moments->add_option("--dim", mdim)->capture_default_str();
    moments->add_option("--alpha", alpha_csv, "comma-separated exponents, e.g. 2,2");

    // jet
    auto* jet = app.add_subcommand("jet", "generate or validate curvature jets");
    jet->require_subcommand(1);
    auto* jgen = jet->add_subcommand("generate", "seeded random jet");
    int jdim = 10;
    std::uint64_t jseed = 1;
    std::string jclass = "hypothesis", jout = "jet.json";
    jgen->add_option("--dim", jdim)->capture_default_str();
    jgen->add_option("--seed", jseed, "bit-exact reproducible seed")->capture_default_str();
    jgen->add_option("--class", jclass, "general | hypothesis")->capture_default_str();
    jgen->add_option("--out", jout)->capture_default_str();
    auto* jval = jet->add_subcommand("validate", "constraint report for a jet file");
    std::string jpath;
    jval->add_option("file", jpath, "jet JSON path")->required();

    // profile
    auto* prof = app.add_subcommand("profile", "assemble the composite profile and its residual");
    std::string pjet;
    int pdim = 10, pppd = 512;
    double pM = 1e3;
    std::string pout = "out";
    prof->add_option("--jet", pjet, "jet JSON path")->required();
    prof->add_option("--dim", pdim)->capture_default_str();
    prof->add_option("--M", pM, "blow-up height")->capture_default_str();
    prof->add_option("--points-per-decade", pppd)->capture_default_str();
    prof->add_option("--out", pout)->capture_default_str();

    // pohozaev
    auto* poho = app.add_subcommand("pohozaev", "evaluate the balance identity");
    std::string qjet, qout, qprofile;
    bool qbubble = false;
    int qdim = 10;
    double qR = 1.0, qM = 1e3, qmu = 1.0;
    poho->add_option("--jet", qjet, "jet JSON path");
    poho->add_flag("--bubble", qbubble, "flat background with v = U");
    poho->add_option("--profile", qprofile,
                     "profile descriptor JSON {M, v3_mode, points_per_decade}");
    poho->add_option("--dim", qdim)->capture_default_str();
    poho->add_option("--radius", qR, "cutoff radius R'")->capture_default_str();
    poho->add_option("--M", qM)->capture_default_str();
    poho->add_option("--mu", qmu, "dilation of the bubble family")->capture_default_str();
    poho->add_option("--out", qout, "write the JSON result here");

    // report
    auto* report = app.add_subcommand("report", "aggregated verification report");
    int rdim = 10, rsamples = 10;
    std::uint64_t rseed = 1;
    bool rskip = false;
    std::string rout = "out", rjet;
    report->add_option("--dim", rdim)->capture_default_str();
    report->add_option("--seed", rseed)->capture_default_str();
    report->add_option("--samples", rsamples, "hypothesis jets per identity check")
        ->capture_default_str();
    report->add_flag("--skip-residual", rskip, "skip the slow residual-fit study");
    report->add_option("--out", rout)->capture_default_str();
    report->add_option("--jet", rjet, "validate this jet file inside the report");

    try {
        app.parse(argc, argv);
        if (solve->parsed()) {
            yamabe::SolveOptions sopt{r_lo, r_hi, ppd};
            return cmd_solve(profile, dim_n, lambda, l, M, sopt, custom, out_dir);
        }
        if (bounds->parsed()) {
            yamabe::Dimension dim(bdim);
            yamabe::SolveOptions sopt;
            json out;
            if (bprofile == "f2") {
                out = envelope_json(yamabe::check_f2_bounds(yamabe::solve_f2(dim, sopt), dim));
            } else if (bprofile == "f2lambda") {
                out = envelope_json(yamabe::check_f2lambda_bounds(
                    yamabe::solve_f2_lambda(dim, blambda, sopt), dim, blambda, beps));
                if (bscan)
                    out["admissible_window"] =
                        fmt(yamabe::f2lambda_admissible_window(dim, beps, sopt));
            } else {
                throw yamabe::ConfigError("bounds: profile must be f2 or f2lambda");
            }
            std::cout << out.dump(2) << "\n";
            return out["lower_bound_ok"].get<bool>() ? 0 : kExitCheckFailure;
        }
        if (gate->parsed()) return cmd_gate(gfrom, gto, geps, gate_csv);
        if (moments->parsed()) return cmd_moments(mdim, alpha_csv);
        if (jet->parsed()) {
            if (jgen->parsed()) return cmd_jet_generate(jdim, jseed, jclass, jout);
            return cmd_jet_validate(jpath);
        }
        if (prof->parsed()) return cmd_profile(pjet, pdim, pM, pppd, pout);
        if (poho->parsed()) {
            if (!qbubble && qjet.empty())
                throw yamabe::ConfigError("pohozaev: pass --bubble or --jet FILE");
            return cmd_pohozaev(qjet, qbubble, qdim, qR, qM, qmu, qprofile, qout);
        }
        if (report->parsed()) return cmd_report(rdim, rseed, rsamples, rskip, rout, rjet);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    } catch (const yamabe::PreconditionError& e) {
        std::cerr << "precondition violated: " << e.what() << "\n";
        return kExitUsage;
    } catch (const yamabe::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailure;
    }
    return 0;
}
