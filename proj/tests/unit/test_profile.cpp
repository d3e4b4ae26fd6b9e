#include <doctest.h>

#include <cmath>
#include <random>

#include "yamabe/profile.hpp"

using namespace yamabe;

namespace {

ProfileApprox make_profile(const CurvatureJet& jet, int n, double M, int ppd = 256,
                           V3Mode mode = V3Mode::eigen) {
    Dimension dim(n);
    SolveOptions so;
    so.points_per_decade = ppd;
    return build_profile(jet, dim, M, solve_f2(dim, so), solve_f3(dim, so), mode);
}

} // namespace

TEST_CASE("zero jet collapses the profile to the bubble") {
    const int n = 10;
    CurvatureJet jet(n);
    auto p = make_profile(jet, n, 1e3);
    Dimension dim(n);
    auto dirs = sample_directions(n, 6, 1);
    for (double r : {0.1, 1.0, 4.0})
        for (const auto& th : dirs)
            CHECK(p.eval(r, th) == doctest::Approx(eval_bubble(dim, r)).epsilon(1e-15));

    auto rf = pde_residual(p, jet);
    CHECK(rf.max_abs <= 1e-10);
}

TEST_CASE("bubble equation residual by differences converges at second order") {
    Dimension dim(10);
    const double coarse = bubble_residual_stencil(dim, 1e-2, 1e2, 128);
    const double fine = bubble_residual_stencil(dim, 1e-2, 1e2, 256);
    CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.15)); // factor in [3.5, 4.5]
}

TEST_CASE("composite profile structure") {
    const int n = 10;
    auto jet = random_jet(n, 1404, JetClass::hypothesis);
    auto p = make_profile(jet, n, 1e3);
    Dimension dim(n);

    SUBCASE("angular factors have zero sphere mean") {
        CHECK(p.v2_angular().sphere_average() == 0);
        CHECK(p.v3_full().sphere_average() == 0);
    }
    SUBCASE("hypothesis jets: the full and eigen degree-3 factors coincide") {
        CHECK(p.v3_difference_norm() <= 1e-12);
    }
    SUBCASE("gradient vanishes at the center") {
        auto dirs = sample_directions(n, 3, 2);
        for (const auto& th : dirs) {
            auto g = p.gradient(1e-6, th);
            double norm = 0.0;
            for (double v : g) norm = std::max(norm, std::abs(v));
            CHECK(norm <= 1e-4);
        }
    }
    SUBCASE("amplitude of the corrections scales like M^{-8/(n-2)}") {
        CurvatureJet jet2 = jet;
        std::fill(jet2.r3.begin(), jet2.r3.end(), 0.0); // keep only the f2 term
        auto pa = make_profile(jet2, n, 1e3);
        auto pb = make_profile(jet2, n, 1e4);
        std::vector<double> th(n, 0.0);
        th[0] = 1.0;
        const double da = pa.eval(1.0, th) - eval_bubble(dim, 1.0);
        const double db = pb.eval(1.0, th) - eval_bubble(dim, 1.0);
        REQUIRE(da != 0.0);
        CHECK(db / da == doctest::Approx(0.1).epsilon(1e-6)); // 10^{-8/(n-2)} per decade
    }
    SUBCASE("physical-scale form") {
        std::vector<double> x(n, 0.0);
        x[0] = 1e-3;
        const double M = p.M();
        std::vector<double> th(n, 0.0);
        th[0] = 1.0;
        const double r = std::pow(M, 2.0 / (n - 2)) * 1e-3;
        CHECK(p.eval_physical(x) == doctest::Approx(M * p.eval(r, th)).epsilon(1e-12));
    }
}

TEST_CASE("radial invariance and angular factorization of the correction operator") {
    const int n = 10;
    auto jet = random_jet(n, 77, JetClass::general);
    std::mt19937_64 eng(3);
    auto uniform = [&]() { return (double(eng() >> 11) + 0.5) * 0x1p-53; };

    for (int t = 0; t < 10; ++t) {
        // random radial profile b(r) = (1+r^2)^{-k} with closed-form derivatives
        const double k = 1.0 + 3.0 * uniform();
        auto b = [k](double r) { return std::pow(1.0 + r * r, -k); };
        auto bp = [k](double r) { return -2.0 * k * r * std::pow(1.0 + r * r, -k - 1); };
        auto bpp = [k](double r) {
            return -2.0 * k * std::pow(1.0 + r * r, -k - 1) +
                   4.0 * k * (k + 1) * r * r * std::pow(1.0 + r * r, -k - 2);
        };

        std::vector<double> x(n);
        double r2 = 0.0;
        for (double& v : x) {
            v = uniform() - 0.5;
            r2 += v * v;
        }
        const double r = std::sqrt(r2);
        auto ops = cnc_operator_coeffs(jet, x);

        // (b_i d_i + d_ij d_ij) applied to a radial function vanishes exactly
        double acc = 0.0, scale = 0.0;
        for (int i = 0; i < n; ++i) {
            acc += ops.b[i] * bp(r) * x[i] / r;
            for (int j = 0; j < n; ++j) {
                const double del = i == j ? 1.0 : 0.0;
                const double hess =
                    bpp(r) * x[i] * x[j] / r2 + bp(r) * (del - x[i] * x[j] / r2) / r;
                acc += ops.d[std::size_t(i) * n + j] * hess;
                scale = std::max(scale, std::abs(ops.d[std::size_t(i) * n + j] * hess));
            }
        }
        CHECK(std::abs(acc) <= 1e-12 * std::max(1.0, scale));

        // product rule: the correction of a(theta) b(r) is b(r) times the
        // correction of a(theta) alone
        SphericalPolynomial A(n, 2);
        MultiIndex m(std::size_t(n), 0);
        m[0] = 1;
        m[1] = 1;
        A.add_term(m, 3);
        // derivatives of a(theta) = A(x) r^{-2} (homogeneous of degree zero)
        auto correction_of = [&](auto value, auto grad, auto hess) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += ops.b[i] * grad(i);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) s += ops.d[std::size_t(i) * n + j] * hess(i, j);
            (void)value;
            return s;
        };
        const double A0 = A.eval(x);
        auto dA = [&](int i) { return A.partial(i).eval(x); };
        auto d2A = [&](int i, int j) { return A.partial(i).partial(j).eval(x); };
        // a = A r^{-2}: da_i = dA_i r^{-2} - 2 A x_i r^{-4}
        auto ga = [&](int i) { return dA(i) / r2 - 2.0 * A0 * x[i] / (r2 * r2); };
        auto ha = [&](int i, int j) {
            const double del = i == j ? 1.0 : 0.0;
            return d2A(i, j) / r2 - 2.0 * (dA(i) * x[j] + dA(j) * x[i]) / (r2 * r2) -
                   2.0 * A0 * del / (r2 * r2) + 8.0 * A0 * x[i] * x[j] / (r2 * r2 * r2);
        };
        const double corr_a = correction_of(A0 / r2, ga, ha);

        // product a(theta) b(r)
        auto gp = [&](int i) { return ga(i) * b(r) + (A0 / r2) * bp(r) * x[i] / r; };
        auto hp = [&](int i, int j) {
            const double del = i == j ? 1.0 : 0.0;
            return ha(i, j) * b(r) + ga(i) * bp(r) * x[j] / r + ga(j) * bp(r) * x[i] / r +
                   (A0 / r2) * (bpp(r) * x[i] * x[j] / r2 + bp(r) * (del - x[i] * x[j] / r2) / r);
        };
        const double corr_prod = correction_of(A0 / r2 * b(r), gp, hp);
        CHECK(corr_prod == doctest::Approx(corr_a * b(r)).epsilon(1e-10));
    }
}

TEST_CASE("residual envelope fit is positive and finite for a curved jet") {
    const int n = 10;
    auto jet = random_jet(n, 2712, JetClass::hypothesis);
    // restore a fourth-order block with nonzero average: it carries the
    // leading term of the residual envelope
    std::mt19937_64 eng(5);
    for (auto& v : jet.r4) v = (double(eng() >> 11) + 0.5) * 0x1p-53 - 0.5;
    auto jet2 = project_symmetries(jet);
    auto p = make_profile(jet2, n, 1e3);
    ResidualOptions ro;
    ro.directions = 6;
    auto rf = pde_residual(p, jet2, ro);
    CHECK(rf.fitted_C > 0.0);
    CHECK(std::isfinite(rf.fitted_C));
    CHECK(rf.max_abs > 0.0);
}

TEST_CASE("error envelope checks") {
    const int n = 10;
    auto jet = random_jet(n, 1404, JetClass::hypothesis);
    auto p = make_profile(jet, n, 1e3);
    auto radii = make_log_grid(0.1, 50.0, 16);
    auto dirs = sample_directions(n, 6, 4);

    SUBCASE("exact profile gives zero fitted constant") {
        auto v = SampledSolution::from_profile(p, radii, dirs);
        CHECK(error_envelope_check(v, p, EnvelopeRegime::improved).fitted_C == 0.0);
        CHECK(error_envelope_check(v, p, EnvelopeRegime::coarse).fitted_C == 0.0);
    }
    SUBCASE("a perturbation shaped like the improved envelope fits with C = 1") {
        const double M = p.M();
        const double amp = std::pow(M, -12.0 / (n - 2));
        auto v = SampledSolution::from_function(
            [&p, amp, n](double r, std::span<const double> th) {
                return p.eval(r, th) + amp * std::pow(1.0 + r, 8.0 - n);
            },
            "profile + improved-envelope perturbation", radii, dirs);
        auto chk = error_envelope_check(v, p, EnvelopeRegime::improved);
        CHECK(chk.fitted_C == doctest::Approx(1.0).epsilon(1e-9));
        // the coarse envelope is weaker, so its constant is smaller
        auto coarse = error_envelope_check(v, p, EnvelopeRegime::coarse, 1.0);
        CHECK(coarse.exponent == doctest::Approx(8.0 - n + 0.75).epsilon(1e-12));
        CHECK(coarse.fitted_C <= 1.0);
    }
    SUBCASE("a slower perturbation blows up the improved fit as M grows") {
        auto p4 = make_profile(jet, n, 1e4);
        auto fit_at = [&](const ProfileApprox& prof) {
            const double amp = std::pow(prof.M(), -10.0 / (n - 2));
            auto v = SampledSolution::from_function(
                [&prof, amp, n](double r, std::span<const double> th) {
                    return prof.eval(r, th) + amp * std::pow(1.0 + r, 8.0 - n);
                },
                "profile + slow bump", radii, dirs);
            return error_envelope_check(v, prof, EnvelopeRegime::improved).fitted_C;
        };
        const double c3 = fit_at(p);
        const double c4 = fit_at(p4);
        CHECK(c4 / c3 == doctest::Approx(std::pow(10.0, 2.0 / (n - 2))).epsilon(1e-6));
        CHECK(c4 > 1.5 * c3); // flagged as an envelope violation
    }
}

TEST_CASE("sampled solutions serialize to the product-grid CSV") {
    const int n = 10;
    CurvatureJet jet(n);
    auto p = make_profile(jet, n, 1e3);
    auto v = SampledSolution::from_profile(p, {0.5, 1.0}, sample_directions(n, 3, 9));
    auto csv = v.to_csv();
    CHECK(csv.rfind("r,theta_index,value\n", 0) == 0);
    int lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    CHECK(lines == 1 + 2 * 3);
    CHECK(v.directions_json().find("directions") != std::string::npos);
}
