#include <doctest.h>

#include <cmath>
#include <random>

#include "yamabe/cnc.hpp"
#include "yamabe/curvature.hpp"

using namespace yamabe;

namespace {

std::vector<double> random_point(int n, std::mt19937_64& eng, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    std::vector<double> x(n);
    for (double& v : x) v = u(eng);
    return x;
}

} // namespace

TEST_CASE("zero jet: identity metric, zero operator coefficients") {
    CurvatureJet j(10);
    std::mt19937_64 eng(1);
    auto x = random_point(10, eng, 0.2);
    auto g = cnc_metric_expansion(j, x);
    for (int p = 0; p < 10; ++p)
        for (int q = 0; q < 10; ++q)
            CHECK(g.g[std::size_t(p) * 10 + q] == (p == q ? 1.0 : 0.0));
    auto ops = cnc_operator_coeffs(j, x);
    for (double b : ops.b) CHECK(b == 0.0);
    for (double d : ops.d) CHECK(d == 0.0);
}

TEST_CASE("single-component curvature enters the metric quadratically") {
    const double kappa = 0.7;
    CurvatureJet j(10);
    // R_{1221} = kappa with its completions (0-based indices 0,1)
    j.rm0[j.i4(0, 1, 1, 0)] = kappa;
    j.rm0[j.i4(1, 0, 0, 1)] = kappa;
    j.rm0[j.i4(0, 1, 0, 1)] = -kappa;
    j.rm0[j.i4(1, 0, 1, 0)] = -kappa;
    std::vector<double> x(10, 0.0);
    x[1] = 0.3; // only the x2 direction
    // quadratic part R_{1221} x2^2 / 3 plus the quartic square 2/45 R_{1221}^2 x2^4
    auto g = cnc_metric_expansion(j, x);
    const double quad = kappa / 3.0 * 0.09;
    const double quart = 2.0 / 45.0 * kappa * kappa * 0.09 * 0.09;
    CHECK(g.g[0] == doctest::Approx(1.0 + quad + quart).epsilon(1e-15));
    auto g2 = cnc_metric_expansion(j, x, 2);
    CHECK(g2.g[0] == doctest::Approx(1.0 + quad).epsilon(1e-15));
}

TEST_CASE("metric truncation warning beyond |x| = 0.5") {
    CurvatureJet j(6);
    std::vector<double> x(6, 0.0);
    x[0] = 0.6;
    CHECK(cnc_metric_expansion(j, x).truncation_warning);
    CHECK(cnc_operator_coeffs(j, x).truncation_warning);
    x[0] = 0.3;
    CHECK_FALSE(cnc_metric_expansion(j, x).truncation_warning);
}

TEST_CASE("operator coefficients: symmetry and exact radial identities") {
    const int n = 10;
    auto jet = random_jet(n, 4, JetClass::general);
    std::mt19937_64 eng(2);
    for (int t = 0; t < 10; ++t) {
        auto x = random_point(n, eng, 0.3);
        double r2 = 0.0;
        for (double v : x) r2 += v * v;
        auto ops = cnc_operator_coeffs(jet, x);

        // d symmetric
        for (int i = 0; i < n; ++i)
            for (int k = i + 1; k < n; ++k)
                CHECK(ops.d[std::size_t(i) * n + k] ==
                      doctest::Approx(ops.d[std::size_t(k) * n + i]).epsilon(1e-12));

        // the truncated series keep d_ij x_j = 0 and b.x + tr d = 0 exactly,
        // which is what kills (Delta_g - Delta) on radial functions
        double scale = 0.0, bx = 0.0, trd = 0.0;
        for (int i = 0; i < n; ++i) {
            bx += ops.b[i] * x[i];
            trd += ops.d[std::size_t(i) * n + i];
            double dx = 0.0;
            for (int k = 0; k < n; ++k) {
                dx += ops.d[std::size_t(i) * n + k] * x[k];
                scale = std::max(scale, std::abs(ops.d[std::size_t(i) * n + k]));
            }
            CHECK(std::abs(dx) <= 1e-13 * std::max(1.0, scale) * std::sqrt(r2));
        }
        CHECK(std::abs(bx + trd) <= 1e-13 * std::max(1.0, scale));
    }
}

TEST_CASE("trace of d picks up the Ricci part when the jet is not trace-free") {
    const int n = 10;
    CurvatureJet j(n);
    // same R_{1212}-type block as in the validation test: Ric_{11} = Ric_{22} = 1
    j.rm0[j.i4(0, 1, 0, 1)] = 1.0;
    j.rm0[j.i4(1, 0, 1, 0)] = 1.0;
    j.rm0[j.i4(0, 1, 1, 0)] = -1.0;
    j.rm0[j.i4(1, 0, 0, 1)] = -1.0;
    auto ric = j.ricci0();
    std::vector<double> x(n, 0.0);
    x[0] = 0.1;
    x[1] = 0.2;
    auto ops = cnc_operator_coeffs(j, x);
    double trd = 0.0;
    for (int i = 0; i < n; ++i) trd += ops.d[std::size_t(i) * n + i];
    // Ricci part at second order plus the square contraction at fourth order
    double expect = 0.0;
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) expect += ric[std::size_t(p) * n + q] * x[p] * x[q] / 3.0;
    for (int i = 0; i < n; ++i)
        for (int m = 0; m < n; ++m) {
            double K = 0.0;
            for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q) K += j.rm0[j.i4(i, p, q, m)] * x[p] * x[q];
            expect += K * K / 15.0;
        }
    CHECK(trd == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("rescaled coefficient envelopes admit finite stable constants") {
    // jets normalized to the decay pattern: |Rm| ~ M^{-4/(n-2)}, |grad Rm| ~ M^{-2/(n-2)}
    const int n = 10;
    auto base = random_jet(n, 8, JetClass::general);
    std::vector<double> theta(n, 0.0);
    theta[0] = std::sqrt(0.5);
    theta[2] = -std::sqrt(0.5);

    auto fit = [&](double M) {
        CurvatureJet jet = base;
        const double s0 = std::pow(M, -4.0 / (n - 2));
        const double s1 = std::pow(M, -2.0 / (n - 2));
        for (auto& v : jet.rm0) v *= s0;
        for (auto& v : jet.rm1) v *= s1;
        // rm2, r3, r4 stay O(1)
        RescaledCnc rc(jet, theta, M);
        const double m8 = std::pow(M, -8.0 / (n - 2));
        double cb = 0.0, cd = 0.0;
        std::vector<double> b, d;
        for (double r = 0.5; r <= std::pow(M, 2.0 / (n - 2)); r *= 1.5) {
            rc.eval(r, b, d);
            double bmax = 0.0, dmax = 0.0;
            for (double v : b) bmax = std::max(bmax, std::abs(v));
            for (double v : d) dmax = std::max(dmax, std::abs(v));
            cb = std::max(cb, bmax / (m8 * (r * r + r * r * r)));
            cd = std::max(cd, dmax / (m8 * (std::pow(1.0 + r, 3) + std::pow(r, 4))));
        }
        return std::pair{cb, cd};
    };
    auto [cb3, cd3] = fit(1e3);
    auto [cb6, cd6] = fit(1e6);
    CHECK(std::isfinite(cb3));
    CHECK(std::isfinite(cd3));
    CHECK(cb3 > 0.0);
    // the fitted constants do not drift with M
    CHECK(cb6 <= 3.0 * cb3 + 1e-12);
    CHECK(cd6 <= 3.0 * cd3 + 1e-12);
}
