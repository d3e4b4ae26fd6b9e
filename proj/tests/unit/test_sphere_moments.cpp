#include <doctest.h>

#include <cmath>
#include <random>

#include "yamabe/sphere_moments.hpp"

using namespace yamabe;

namespace {

// independent oracle: the Gamma-product surface integral, evaluated in doubles
double moment_gamma_oracle(int n, const MultiIndex& alpha) {
    if (!all_even(alpha)) return 0.0;
    double num = 1.0;
    for (auto e : alpha) num *= std::tgamma(0.5 * (e + 1));
    const double total = degree(alpha);
    // normalized by the n=0 case: Gamma(n/2) / (pi^{n/2} Gamma((|a|+n)/2))
    return num * std::tgamma(0.5 * n) /
           (std::pow(M_PI, 0.5 * n) * std::tgamma(0.5 * (total + n)));
}

MultiIndex idx(int n, std::initializer_list<int> entries) {
    MultiIndex a(std::size_t(n), 0);
    int i = 0;
    for (int e : entries) a[i++] = std::uint8_t(e);
    return a;
}

} // namespace

TEST_CASE("second and fourth moments match the displayed values") {
    // n=10: avg theta_i^2 theta_j^2 = 1/120, avg theta_i^4 = 3/120
    CHECK(sphere_monomial_average(10, idx(10, {2, 2})) == rational(1, 120));
    CHECK(sphere_monomial_average(10, idx(10, {4})) == rational(1, 40));
    for (int n = 3; n <= 15; ++n) {
        CHECK(sphere_monomial_average(n, idx(n, {2, 2})) == rational(1, n * (n + 2)));
        CHECK(sphere_monomial_average(n, idx(n, {4})) == rational(3, n * (n + 2)));
    }
}

TEST_CASE("odd entries kill the moment exactly") {
    CHECK(sphere_monomial_average(10, idx(10, {1, 2})) == 0);
    CHECK(sphere_monomial_average(10, idx(10, {3})) == 0);
    std::mt19937_64 eng(7);
    for (int t = 0; t < 50; ++t) {
        const int n = 3 + int(eng() % 10);
        MultiIndex a(std::size_t(n), 0);
        for (int d = 0; d < 6; ++d) a[eng() % n] += 1;
        bool odd = !all_even(a);
        if (odd) CHECK(sphere_monomial_average(n, a) == 0);
    }
}

TEST_CASE("double-factorial rule agrees with the Gamma-product oracle") {
    std::mt19937_64 eng(11);
    for (int t = 0; t < 60; ++t) {
        const int n = 3 + int(eng() % 10);
        MultiIndex a(std::size_t(n), 0);
        const int pairs = 1 + int(eng() % 4);
        for (int d = 0; d < pairs; ++d) a[eng() % n] += 2;
        const double exact = to_double(sphere_monomial_average(n, a));
        const double oracle = moment_gamma_oracle(n, a);
        CHECK(exact == doctest::Approx(oracle).epsilon(1e-12));
    }
}

TEST_CASE("sphere area and the odd-moment constant") {
    // |S^9| = 2 pi^5 / Gamma(5) = pi^5 / 12
    CHECK(sphere_area(10) == doctest::Approx(std::pow(M_PI, 5) / 12.0).epsilon(1e-14));
    CHECK(sphere_area(10) == doctest::Approx(25.50164).epsilon(1e-6));

    // C(n,1) = 3|S^{n-1}|/(n(n+2)); n=10 gives |S^9|/40
    CHECK(odd_moment_constant_of_area(10, 1) == rational(1, 40));
    CHECK(odd_moment_constant(10, 1) ==
          doctest::Approx(std::pow(M_PI, 5) / 12.0 / 40.0).epsilon(1e-14));
    CHECK(odd_moment_constant(10, 1) == doctest::Approx(0.63754).epsilon(1e-5));

    // the k=1 constant written out: (2k+1)! / ((2k+n) 2 n)
    for (int n = 3; n <= 12; ++n)
        CHECK(odd_moment_constant_of_area(n, 1) == rational(6, (2 + n) * 2 * n));
}

TEST_CASE("ladder denominators") {
    CHECK(ladder_denominator(10, 1) == Rational(2 * 10));
    CHECK(ladder_denominator(10, 3) == Rational(48) * 10 * 12 * 14);
    CHECK(ladder_denominator(11, 2) == Rational(8) * 11 * 13);
}
