#include <doctest.h>

#include <cmath>

#include "yamabe/curvature.hpp"
#include "yamabe/errors.hpp"
#include "yamabe/harmonics.hpp"

using namespace yamabe;

namespace {

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double jet_scale(const CurvatureJet& j) {
    auto w = weyl_norms(j);
    return std::max({1.0, w.W2, w.gradRm2, w.hessRm2});
}

} // namespace

TEST_CASE("zero jet passes every constraint") {
    CurvatureJet j(10);
    auto rep = validate_jet(j);
    CHECK(rep.pass());
    CHECK(rep.worst == 0.0);
}

TEST_CASE("a single Riemann component breaks the Ricci-free constraint") {
    CurvatureJet j(10);
    // R_{1212} pattern with its symmetry completions (0-based indices 0,1)
    j.rm0[j.i4(0, 1, 0, 1)] = 1.0;
    j.rm0[j.i4(1, 0, 1, 0)] = 1.0;
    j.rm0[j.i4(0, 1, 1, 0)] = -1.0;
    j.rm0[j.i4(1, 0, 0, 1)] = -1.0;
    auto rep = validate_jet(j);
    CHECK(rep.find("rm0_antisym_ab")->max_violation == 0.0);
    CHECK(rep.find("rm0_pair_sym")->max_violation == 0.0);
    CHECK(rep.find("rm0_first_bianchi")->max_violation == 0.0);
    CHECK(rep.find("cnc_ricci_zero")->max_violation == 1.0);
    CHECK_FALSE(rep.pass());
}

TEST_CASE("projection produces valid jets and is idempotent") {
    for (int n : {6, 10}) {
        auto jet = random_jet(n, 42, JetClass::general);
        auto rep = validate_jet(jet);
        CHECK(rep.worst <= 1e-12 * jet_scale(jet));

        auto again = project_symmetries(jet);
        CHECK(max_diff(again.rm0, jet.rm0) <= 1e-14);
        CHECK(max_diff(again.rm1, jet.rm1) <= 1e-14);
        CHECK(max_diff(again.rm2, jet.rm2) <= 1e-14);
        CHECK(max_diff(again.r3, jet.r3) <= 1e-14);
        CHECK(max_diff(again.r4, jet.r4) <= 1e-14);
    }
    // zero raw input stays zero
    CurvatureJet z(8);
    auto pz = project_symmetries(z);
    CHECK(max_diff(pz.rm2, z.rm2) == 0.0);
}

TEST_CASE("seeded generation is reproducible") {
    auto a = random_jet(10, 777, JetClass::hypothesis);
    auto b = random_jet(10, 777, JetClass::hypothesis);
    CHECK(max_diff(a.rm2, b.rm2) == 0.0);
    CHECK(max_diff(a.r3, b.r3) == 0.0);
    auto c = random_jet(10, 778, JetClass::hypothesis);
    CHECK(max_diff(a.rm2, c.rm2) > 0.0);
}

TEST_CASE("projected general jets satisfy the trace link to the Weyl norm") {
    auto jet = random_jet(10, 5, JetClass::general);
    const double w2 = weyl_norms(jet).W2;
    CHECK(jet.scalar_laplacian() == doctest::Approx(-w2 / 6.0).epsilon(1e-10));
    CHECK_NOTHROW(rbar2_weyl(jet));
    // a broken trace is detected
    CurvatureJet broken = jet;
    broken.rm2[broken.i6(0, 1, 0, 1, 0, 0)] += 0.5;
    broken.rm2[broken.i6(1, 0, 1, 0, 0, 0)] += 0.5;
    broken.rm2[broken.i6(0, 1, 1, 0, 0, 0)] -= 0.5;
    broken.rm2[broken.i6(1, 0, 0, 1, 0, 0)] -= 0.5;
    CHECK_THROWS_AS(rbar2_weyl(broken), ConsistencyError);
}

TEST_CASE("inequalities hold with equality on the zero jet") {
    CurvatureJet j(10);
    j.flags.W0_zero = j.flags.gradW0_zero = true;
    auto hv = check_hv_inequalities(j);
    CHECK(hv.norm_lhs == 0.0);
    CHECK(hv.norm_rhs == 0.0);
    CHECK(hv.cross_holds);
    CHECK(hv.norm_holds);
    CHECK(hv.in_hypothesis_class);
}

TEST_CASE("hypothesis projection enforces the contraction identity") {
    for (int n : {10, 11}) {
        auto jet = random_jet(n, 1234 + n, JetClass::hypothesis);
        CHECK(jet.flags.W0_zero);
        CHECK(jet.flags.gradW0_zero);
        CHECK(validate_jet(jet).pass(1e-10 * jet_scale(jet)));
        CHECK(std::abs(jet.scalar_laplacian()) <= 1e-9);

        auto hv = check_hv_inequalities(jet);
        CHECK(hv.in_hypothesis_class);
        CHECK(hv.contraction_identity_violation <= 1e-9);
        // the completing-the-square route makes the norm inequality automatic
        CHECK(hv.norm_margin >= -1e-12 * std::max(1.0, hv.norm_rhs));
        CHECK(hv.square_route >= -1e-12 * std::max(1.0, hv.norm_lhs));
    }
}

TEST_CASE("sixth-order average formula") {
    SUBCASE("zero second derivatives give zero") {
        CurvatureJet j(10);
        j.flags.W0_zero = j.flags.gradW0_zero = true;
        CHECK(rbar6_formula(j) == 0.0);
    }
    SUBCASE("hypothesis flags are required") {
        CurvatureJet j(10);
        CHECK_THROWS_AS(rbar6_formula(j), PreconditionError);
    }
    SUBCASE("quadratic homogeneity under jet scaling") {
        auto jet = random_jet(10, 9, JetClass::hypothesis);
        auto scaled = jet;
        for (auto& x : scaled.rm2) x *= 3.0;
        for (auto& x : scaled.r3) x *= 3.0;
        for (auto& x : scaled.r4) x *= 3.0;
        CHECK(rbar6_formula(scaled) == doctest::Approx(9.0 * rbar6_formula(jet)).epsilon(1e-12));
        auto wn = weyl_norms(jet);
        auto ws = weyl_norms(scaled);
        CHECK(ws.hessRm2 == doctest::Approx(9.0 * wn.hessRm2).epsilon(1e-12));
    }
    SUBCASE("full-contraction identity residual") {
        for (int n : {10, 11})
            for (int s = 0; s < 20; ++s) {
                auto jet = random_jet(n, 100 + s, JetClass::hypothesis);
                CHECK(rbar6_identity_residual(jet) <= 1e-10 * jet_scale(jet));
            }
    }
}

TEST_CASE("degree blocks and their oscillation split") {
    SUBCASE("prescribed Hessian: d11 R = 2, rest zero") {
        CurvatureJet j(10);
        j.rm2[j.i6(0, 1, 0, 1, 0, 0)] = 1.0;
        j.rm2[j.i6(1, 0, 1, 0, 0, 0)] = 1.0;
        j.rm2[j.i6(0, 1, 1, 0, 0, 0)] = -1.0;
        j.rm2[j.i6(1, 0, 0, 1, 0, 0)] = -1.0;
        auto hess = j.scalar_hess();
        CHECK(hess[0] == 2.0);
        auto bt = build_R_bar_tilde(j, 2);
        CHECK(bt.bar == rational(1, 10)); // 2 * (1/(2n)) at n=10
        CHECK(bt.tilde.sphere_average() == 0);
        // tilde = x0^2 - |x|^2/10
        MultiIndex a(10, 0);
        a[0] = 2;
        CHECK(bt.tilde.coefficient(a) == rational(9, 10));
    }
    SUBCASE("odd block has zero mean automatically") {
        auto jet = random_jet(10, 21, JetClass::general);
        auto bt = build_R_bar_tilde(jet, 3);
        CHECK(bt.bar == 0);
        CHECK(bt.tilde.sphere_average() == 0);
    }
    SUBCASE("zero rm2 gives the zero degree-2 oscillation") {
        CurvatureJet j(10);
        auto bt = build_R_bar_tilde(j, 2);
        CHECK(bt.tilde.is_zero());
    }
    SUBCASE("the linear component of the degree-3 block is the trace vector over 2(n+2)") {
        // general jets keep a nonzero trace; its harmonic footprint is exactly
        // h1 = sum_c t_c x_c / (2(n+2)) with t_c = sum_a d^3R[a,a,c]
        const int n = 10;
        auto jet = random_jet(n, 61, JetClass::general);
        std::vector<double> t(n, 0.0);
        for (int c = 0; c < n; ++c)
            for (int a = 0; a < n; ++a) t[c] += jet.r3[jet.i3(a, a, c)];
        auto bt = build_R_bar_tilde(jet, 3);
        auto comps = decompose_harmonic(bt.tilde);
        bool found = false;
        for (const auto& c : comps) {
            if (c.degree != 1) continue;
            found = true;
            for (int i = 0; i < n; ++i) {
                MultiIndex e(std::size_t(n), 0);
                e[i] = 1;
                CHECK(to_double(c.polynomial.coefficient(e)) ==
                      doctest::Approx(t[i] / (2.0 * (n + 2))).epsilon(1e-12));
            }
        }
        CHECK(found);
    }
    SUBCASE("hypothesis-class degree-3 block is a pure 3(n+1)-eigenfunction") {
        for (int n : {10, 11}) {
            auto jet = random_jet(n, 31 + n, JetClass::hypothesis);
            auto bt = build_R_bar_tilde(jet, 3);
            REQUIRE_FALSE(bt.tilde.is_zero());
            auto comps = decompose_harmonic(bt.tilde);
            REQUIRE(comps.size() >= 1);
            CHECK(comps[0].degree == 3);
            CHECK(comps[0].eigenvalue == 3 * (n + 1));
            // the trace removal leaves at most rounding residue at degree one
            double top = 0.0, rest = 0.0;
            for (const auto& c : comps) {
                double scale = 0.0;
                for (const auto& [a, cf] : c.polynomial.terms())
                    scale = std::max(scale, std::abs(to_double(cf)));
                (c.degree == 3 ? top : rest) = std::max(c.degree == 3 ? top : rest, scale);
            }
            CHECK(rest <= 1e-13 * top);
        }
    }
}

TEST_CASE("dimension gate: exact rationals") {
    auto g10 = dimension_gate(10);
    CHECK(g10.holds);
    CHECK(g10.lhs == rational(451, 26880000));
    CHECK(g10.rhs == rational(1, 38880));
    CHECK(g10.margin_value == doctest::Approx(8.9419e-6).epsilon(1e-4));

    auto g11 = dimension_gate(11);
    CHECK(g11.holds);
    CHECK(g11.lhs == rational(2273, 124581600));
    CHECK(g11.rhs == rational(9, 480480));
    CHECK(g11.margin_value == doctest::Approx(4.862e-7).epsilon(1e-3));

    auto g12 = dimension_gate(12);
    CHECK_FALSE(g12.holds);
    CHECK(g12.lhs_value == doctest::Approx(1.781e-5).epsilon(1e-3));
    CHECK(g12.rhs_value == doctest::Approx(1.4092e-5).epsilon(1e-3));

    for (int n = 12; n <= 25; ++n) CHECK_FALSE(dimension_gate(n).holds);

    // the slack enters monotonically: even n=10 fails at eps = 1
    CHECK_FALSE(dimension_gate(10, Rational(1)).holds);
    CHECK_THROWS_AS(dimension_gate(9), PreconditionError);
}

TEST_CASE("jet JSON round trip") {
    auto jet = random_jet(5, 99, JetClass::general);
    jet.flags.W0_zero = false;
    auto text = jet.to_json();
    auto back = CurvatureJet::from_json(text);
    CHECK(back.n() == 5);
    CHECK(max_diff(back.rm0, jet.rm0) == 0.0);
    CHECK(max_diff(back.rm1, jet.rm1) == 0.0);
    CHECK(max_diff(back.rm2, jet.rm2) == 0.0);
    CHECK(max_diff(back.r3, jet.r3) == 0.0);
    CHECK(max_diff(back.r4, jet.r4) == 0.0);
    CHECK(back.flags.W0_zero == jet.flags.W0_zero);
}
