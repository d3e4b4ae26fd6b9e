#include <doctest.h>

#include <cmath>

#include "yamabe/errors.hpp"
#include "yamabe/radial_function.hpp"

using namespace yamabe;

TEST_CASE("log grid construction") {
    auto g = make_log_grid(1e-4, 1e4, 256);
    CHECK(g.size() == 8 * 256 + 1);
    CHECK(g.front() == 1e-4);
    CHECK(g.back() == 1e4);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
    // uniform in log r
    const double d0 = std::log(g[1]) - std::log(g[0]);
    const double d1 = std::log(g[g.size() - 1]) - std::log(g[g.size() - 2]);
    CHECK(d0 == doctest::Approx(d1).epsilon(1e-12));
}

TEST_CASE("construction rejects bad input") {
    CHECK_THROWS_AS(RadialFunction({1.0, 0.5}, {1.0, 1.0}), PreconditionError);
    CHECK_THROWS_AS(RadialFunction({-1.0, 0.5}, {1.0, 1.0}), PreconditionError);
    CHECK_THROWS_AS(RadialFunction({0.5, 1.0}, {1.0}), PreconditionError);
    CHECK_THROWS_AS(RadialFunction({0.5, 1.0}, {1.0, std::nan("")}), PreconditionError);
}

TEST_CASE("interpolation accuracy on a smooth profile") {
    auto g = make_log_grid(1e-2, 1e2, 256);
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = std::exp(-g[i]) * g[i];
    RadialFunction f(g, v);
    for (double r : {0.013, 0.7, 3.14, 42.0, 97.0}) {
        CHECK(f.eval(r) == doctest::Approx(std::exp(-r) * r).epsilon(1e-7));
    }
    CHECK_THROWS_AS(f.eval(1e-3), OutOfDomainError);
    CHECK_THROWS_AS(f.eval(1e3), OutOfDomainError);
}

TEST_CASE("derivative by fourth-order differences") {
    auto g = make_log_grid(1e-2, 1e2, 256);
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = std::pow(1.0 + g[i] * g[i], -2.0);
    RadialFunction f(g, v);
    auto fp = f.derivative();
    for (double r : {0.05, 1.0, 20.0}) {
        const double expect = -4.0 * r * std::pow(1.0 + r * r, -3.0);
        CHECK(fp.eval(r) == doctest::Approx(expect).epsilon(1e-7));
    }
}

TEST_CASE("power-law extrapolation uses the declared exponents") {
    auto g = make_log_grid(0.1, 10.0, 64);
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = g[i] * g[i];
    RadialFunction f(g, v);
    CHECK_THROWS_AS(f.eval_extrapolated(0.01), OutOfDomainError);
    f.set_inner_exponent(2.0);
    f.set_outer_exponent(2.0);
    CHECK(f.eval_extrapolated(0.01) == doctest::Approx(1e-4).epsilon(1e-12));
    CHECK(f.eval_extrapolated(100.0) == doctest::Approx(1e4).epsilon(1e-12));
}

TEST_CASE("validation checks slopes against the declared exponents") {
    auto g = make_log_grid(1e-3, 1e3, 128);
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        v[i] = g[i] * g[i] / std::pow(1.0 + g[i], 6.0); // ~ r^2 inner, r^{-4} outer
    RadialFunction f(g, v);
    f.set_inner_exponent(2.0);
    f.set_outer_exponent(-4.0);
    auto val = f.validate(0.05);
    CHECK(val.pass());
    f.set_inner_exponent(3.0);
    CHECK_FALSE(f.validate(0.05).pass());
}

TEST_CASE("CSV round trip is exact") {
    auto g = make_log_grid(0.5, 5.0, 16);
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = std::sin(g[i]) / 3.0;
    RadialFunction f(g, v);
    f.set_inner_exponent(1.25);
    auto back = RadialFunction::from_csv(f.to_csv());
    REQUIRE(back.size() == f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        CHECK(back.grid()[i] == f.grid()[i]);
        CHECK(back.values()[i] == f.values()[i]);
    }
    REQUIRE(back.inner_exponent().has_value());
    CHECK(*back.inner_exponent() == 1.25);
    CHECK_FALSE(back.outer_exponent().has_value());
}
