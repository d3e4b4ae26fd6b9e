#include <doctest.h>

#include <cmath>
#include <future>

#include "yamabe/bubble.hpp"
#include "yamabe/errors.hpp"
#include "yamabe/sturm_liouville.hpp"

using namespace yamabe;

namespace {

// manufactured solution a*(r) = r^2 (1+r)^{-n} with closed-form derivatives;
// the forcing H := -T a* is the test oracle
struct Manufactured {
    int n;
    double delta0;

    double a(double r) const { return r * r * std::pow(1.0 + r, -n); }
    double ap(double r) const {
        return 2.0 * r * std::pow(1.0 + r, -n) - n * r * r * std::pow(1.0 + r, -n - 1);
    }
    double app(double r) const {
        return 2.0 * std::pow(1.0 + r, -n) - 4.0 * n * r * std::pow(1.0 + r, -n - 1) +
               n * (n + 1) * r * r * std::pow(1.0 + r, -n - 2);
    }
    double H(double r) const {
        const double pot = n * (n + 2) * std::pow(1.0 + r * r, -2.0);
        const double Ta = app(r) + (n - 1) / r * ap(r) + (pot - delta0 / (r * r)) * a(r);
        return -Ta;
    }

    SturmLiouvilleProblem problem(int ppd) const {
        Dimension dim(n);
        SturmLiouvilleProblem p{dim, delta0};
        p.rhs = [*this](double r) { return H(r); };
        p.points_per_decade = ppd;
        p.bounds = {0.0, double(n), 1.0, 1.9}; // a ~ r^2 (1+r)^{-n}
        p.inner_growth = 2.0;
        return p;
    }
};

double max_rel_error(const BvpSolution& sol, const Manufactured& m, double r_lo, double r_hi) {
    double worst = 0.0;
    for (std::size_t i = 0; i < sol.profile.size(); ++i) {
        const double r = sol.profile.grid()[i];
        if (r < r_lo || r > r_hi) continue;
        worst = std::max(worst, std::abs(sol.profile.values()[i] - m.a(r)) / m.a(r));
    }
    return worst;
}

// the vendored doctest lacks Contains matchers; check messages by hand
template <class F>
bool throws_with(F&& f, const char* needle) {
    try {
        f();
    } catch (const PreconditionError& e) {
        return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
}

} // namespace

TEST_CASE("problem validation names the violated inequality") {
    Dimension dim(10);
    SturmLiouvilleProblem p{dim, 5.0}; // delta0 < n
    p.rhs = [](double) { return 0.0; };
    CHECK(throws_with([&] { validate_problem(p); }, "delta0 >= n"));

    p.delta0 = 20.0;
    p.bounds = {2.0, 6.0, 1.0, 4.0}; // p(p+n-2) = 48 >= 20
    CHECK(throws_with([&] { validate_problem(p); }, "p(p+n-2)"));
}

TEST_CASE("zero forcing gives the zero solution") {
    Dimension dim(10);
    SturmLiouvilleProblem p{dim, 20.0};
    p.rhs = [](double) { return 0.0; };
    p.bounds = {2.0, 6.0, 1.0, 1.5};
    p.inner_growth = 2.0;
    auto sol = solve_bvp(p);
    for (double v : sol.profile.values()) CHECK(v == 0.0);
}

TEST_CASE("manufactured solution: accuracy and second-order convergence") {
    Manufactured m{10, 300.0}; // large angular constant keeps H nonnegative
    // oracle sanity: H >= 0 across the domain
    for (double r = 1e-4; r < 1e4; r *= 1.7) CHECK(m.H(r) >= 0.0);

    auto coarse = solve_bvp(m.problem(2048));
    auto fine = solve_bvp(m.problem(4096));
    const double e_coarse = max_rel_error(coarse, m, 1e-2, 1e2);
    const double e_fine = max_rel_error(fine, m, 1e-2, 1e2);
    CHECK(e_fine <= 1e-6);
    const double order = std::log2(e_coarse / e_fine);
    CHECK(order > 1.8);
    CHECK(order < 2.2);
}

TEST_CASE("two closure strategies agree") {
    Manufactured m{10, 300.0};
    auto robin = solve_bvp(m.problem(8192));

    auto q = m.problem(8192);
    q.r_lo = 1e-6;
    q.r_hi = 1e6;
    q.left = EndClosure::dirichlet;
    q.right = EndClosure::dirichlet;
    auto dirichlet = solve_bvp(q);

    // compare on the inner two decades of the common domain, a few nodes
    // past the closure point (the Robin row carries a thin boundary layer
    // from the subleading O(r) term of the manufactured solution)
    for (double r = 4e-4; r <= 1e-2; r *= 1.9) {
        const double a = robin.profile.eval(r);
        const double b = dirichlet.profile.eval(r);
        CHECK(std::abs(a - b) / std::abs(a) <= 1e-6);
    }
}

TEST_CASE("linearity of the solve") {
    Dimension dim(10);
    auto mk = [&](std::function<double(double)> H) {
        SturmLiouvilleProblem p{dim, 20.0};
        p.rhs = std::move(H);
        p.bounds = {2.0, 6.0, 1.0, 1.5};
        p.inner_growth = 2.0;
        return solve_bvp(p);
    };
    auto h1 = [&](double r) { return r * r * eval_bubble(dim, r); };
    auto h2 = [&](double r) { return r * r * eval_bubble(dim, r) / (1.0 + r); };
    auto s1 = mk(h1);
    auto s2 = mk(h2);
    auto s12 = mk([&](double r) { return h1(r) + h2(r); });
    for (std::size_t i = 0; i < s12.profile.size(); ++i) {
        const double sum = s1.profile.values()[i] + s2.profile.values()[i];
        CHECK(s12.profile.values()[i] == doctest::Approx(sum).epsilon(1e-10));
    }
}

TEST_CASE("f2: hypotheses, envelopes, asymptotics") {
    CHECK(throws_with([] { solve_f2(Dimension(9)); }, "n >= 10"));

    for (int n : {10, 11}) {
        Dimension dim(n);
        auto f2 = solve_f2(dim);
        CHECK(f2.delta0 == 2.0 * n);
        CHECK(f2.min_value >= -1e-12);
        // interior positivity
        for (std::size_t i = 1; i + 1 < f2.profile.size(); ++i)
            CHECK(f2.profile.values()[i] > 0.0);

        auto rep = check_f2_bounds(f2, dim);
        CHECK(rep.lower_ok);
        CHECK(std::isfinite(rep.fitted_upper_C));
        CHECK(rep.fitted_upper_C > 0.0);
        CHECK(f2.bound_C0.has_value());

        // lower envelope spot value at r=1 for n=10: 4.25/576
        if (n == 10) {
            CHECK(f2_lower_envelope(dim, 1.0) == doctest::Approx(4.25 / 576.0).epsilon(1e-14));
            CHECK(f2_lower_envelope(dim, 1.0) == doctest::Approx(7.3785e-3).epsilon(1e-4));
            CHECK(f2.profile.eval(1.0) >= 4.25 / 576.0);
        }

        // inner exponent 2: the leading coefficient is (3n-4)/((n-2) 6(n-4))
        auto v = f2.profile.validate(0.05);
        CHECK(v.pass());
        CHECK(v.inner_slope == doctest::Approx(2.0).epsilon(0.02));
        // the quadratic coefficient dominates the envelope's (3n-4)/((n-2) 6(n-4))
        const double c_env = double(3 * n - 4) / ((n - 2) * 6.0 * (n - 4));
        CHECK(f2_lower_envelope(dim, 1e-3) / 1e-6 == doctest::Approx(c_env).epsilon(1e-4));
        CHECK(f2.profile.eval(1e-3) / 1e-6 >= c_env);

        // outer decay r^{6-n} for both the envelope and the solution
        const double slope = f2.profile.loglog_slope(1e2, 1e3);
        CHECK(slope == doctest::Approx(6.0 - n).epsilon(0.01));
    }
}

TEST_CASE("f3: hypotheses and bounds") {
    CHECK(throws_with([] { solve_f3(Dimension(7)); }, "n >= 8"));
    Dimension dim(10);
    auto f3 = solve_f3(dim);
    CHECK(f3.delta0 == 33.0);
    CHECK(f3.min_value >= -1e-12);
    auto v = f3.profile.validate(0.05);
    CHECK(v.pass());
    CHECK(v.inner_slope == doctest::Approx(3.0).epsilon(0.02));
    // upper envelope C r^{5/2}(1+r)^{9/2-n} admits a finite constant
    double C = 0.0;
    for (std::size_t i = 0; i < f3.profile.size(); ++i) {
        const double r = f3.profile.grid()[i];
        C = std::max(C, f3.profile.values()[i] / (std::pow(r, 2.5) * std::pow(1.0 + r, 4.5 - 10)));
    }
    CHECK(std::isfinite(C));
    CHECK(C > 0.0);
}

TEST_CASE("f2_lambda: Dirichlet end, positivity, envelope") {
    Dimension dim(10);
    CHECK_THROWS_AS(solve_f2_lambda(dim, 1.2), PreconditionError);

    for (double lambda : {0.99, 1.0, 1.01}) {
        auto f = solve_f2_lambda(dim, lambda);
        CHECK(f.profile.values().front() == 0.0);
        // nontrivial forcing gives a positive interior solution
        double interior_max = 0.0;
        for (std::size_t i = 5; i + 5 < f.profile.size(); ++i) {
            CHECK(f.profile.values()[i] >= -1e-12);
            interior_max = std::max(interior_max, f.profile.values()[i]);
        }
        CHECK(interior_max > 0.0);
        auto rep = check_f2lambda_bounds(f, dim, lambda, 0.1);
        CHECK(rep.lower_ok);
        CHECK(std::isfinite(rep.fitted_upper_C));
    }

    // both envelope sides vanish at r = lambda
    CHECK(f2lambda_lower_envelope(dim, 1.01, 0.1, 1.01) == 0.0);

    // the check refuses lambda outside the delta(eps) window
    CHECK(f2lambda_delta_window(0.1) == 0.02);
    auto fwide = solve_f2_lambda(dim, 1.03);
    CHECK_THROWS_AS(check_f2lambda_bounds(fwide, dim, 1.03, 0.1), PreconditionError);
    CHECK_NOTHROW(check_f2lambda_bounds(fwide, dim, 1.03, 0.1, std::nullopt, 0.05));

    // n=11, lambda=1.01: positive margin at r = 5
    Dimension d11(11);
    auto f = solve_f2_lambda(d11, 1.01);
    CHECK(f.profile.eval(5.0) > f2lambda_lower_envelope(d11, 1.01, 0.1, 5.0));
}

TEST_CASE("empirically admissible lambda window") {
    Dimension dim(10);
    SolveOptions so;
    so.points_per_decade = 256;
    const double window = f2lambda_admissible_window(dim, 0.1, so, 0.01, 0.05);
    // the whole scanned range clears the 10%-slack envelope comfortably
    CHECK(window >= 0.02);
}

TEST_CASE("f_pl family") {
    Dimension d11(11);
    CHECK_THROWS_AS(solve_f_pl(d11, 1.0, 2, 1e9), PreconditionError);
    CHECK_THROWS_AS(solve_f_pl(d11, 1.0, 8, 1e9), PreconditionError);
    CHECK_THROWS_AS(solve_f_pl(Dimension(10), 1.0, 7, 1e9), PreconditionError);
    CHECK(max_harmonic_degree(10) == 6);
    CHECK(max_harmonic_degree(11) == 7);

    auto f = solve_f_pl(d11, 1.0, 3, 1e9);
    CHECK(f.delta0 == 3.0 * (3 + 11 - 2));
    CHECK(f.profile.values().front() == 0.0);
    CHECK(f.profile.values().back() == 0.0);
    CHECK(f.min_value >= -1e-12);

    // the rest of the family: nonnegative Dirichlet solutions with finite
    // fitted constants in C r^{l+4-n}
    for (int n : {10, 11}) {
        Dimension dim(n);
        for (int l = 3; l <= max_harmonic_degree(n); ++l) {
            auto g = solve_f_pl(dim, 1.01, l, 1e9);
            CHECK(g.min_value >= -1e-12);
            CHECK(g.profile.values().front() == 0.0);
            CHECK(g.profile.values().back() == 0.0);
            double Cl = 0.0;
            for (std::size_t i = 0; i < g.profile.size(); ++i)
                Cl = std::max(Cl, g.profile.values()[i] /
                                      std::pow(g.profile.grid()[i], l + 4 - n));
            CHECK(std::isfinite(Cl));
        }
    }
    // outer exponent near l+4-n = -4 away from the Dirichlet cap
    const double slope = f.profile.loglog_slope(2.0, 20.0);
    CHECK(std::abs(slope - (-4.0)) < 0.3);
    // 0 <= f <= C r^{l+4-n}
    double C = 0.0;
    for (std::size_t i = 0; i < f.profile.size(); ++i)
        C = std::max(C, f.profile.values()[i] / std::pow(f.profile.grid()[i], -4.0));
    CHECK(std::isfinite(C));
}

TEST_CASE("supersolution signs and closed-form residuals") {
    for (int n : {10, 11}) {
        Dimension dim(n);
        auto grid = make_log_grid(1e-3, 1e3, 64);
        auto rep = check_supersolutions(dim, grid);
        CHECK(rep.phi1_ok);
        CHECK(rep.phi2_ok);
        CHECK(rep.phi1_consistency <= 1e-12);
        CHECK(rep.phi2_consistency <= 1e-12);
        CHECK(rep.phi1_min_margin > 0.0);
        CHECK(rep.phi2_min_margin > 0.0);
    }

    // spot value: T phi1 + r^2 U = g at r=1, n=10 equals 7/96
    Dimension d10(10);
    CHECK(supersolution_g(d10, 1.0) == doctest::Approx(7.0 / 96.0).epsilon(1e-14));
    // g -> 0 like r^2 at the origin
    CHECK(supersolution_g(d10, 1e-4) / 1e-8 ==
          doctest::Approx(4.0 * 8.0 / 18.0).epsilon(1e-3));

    // large-r limit: both sides approach 2(3n-4)/(3(n-4)) U
    Dimension d11(11);
    const double r = 100.0;
    const double norm = 2.0 * (3 * 11 - 4) / (3.0 * (11 - 4)) * eval_bubble(d11, r);
    CHECK(supersolution_g(d11, r) / norm == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(phi2_rhs(d11, r) / norm == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(supersolution_g(d11, r) > phi2_rhs(d11, r));
}

TEST_CASE("independent solves are safe to run concurrently") {
    Dimension dim(10);
    auto serial = solve_f2(dim);
    std::vector<std::future<BvpSolution>> futs;
    for (int t = 0; t < 4; ++t)
        futs.push_back(std::async(std::launch::async, [&] { return solve_f2(dim); }));
    for (auto& fu : futs) {
        auto sol = fu.get();
        REQUIRE(sol.profile.size() == serial.profile.size());
        for (std::size_t i = 0; i < sol.profile.size(); ++i)
            CHECK(sol.profile.values()[i] == serial.profile.values()[i]);
    }
}
