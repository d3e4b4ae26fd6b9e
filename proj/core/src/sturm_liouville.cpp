#include "yamabe/sturm_liouville.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "yamabe/bubble.hpp"
#include "yamabe/errors.hpp"

namespace yamabe {

double indicial_root(int n, double delta0) {
    return 0.5 * (-(n - 2) + std::sqrt(double(n - 2) * (n - 2) + 4.0 * delta0));
}

void validate_problem(const SturmLiouvilleProblem& p) {
    const int n = p.dim.n();
    const double d0 = p.delta0, a = p.bounds.alpha, b = p.bounds.beta, gp = p.bounds.growth_p;
    if (!(d0 >= n))
        throw PreconditionError("delta0 >= n violated: delta0=" + std::to_string(d0));
    // a finite domain with a Dirichlet cap does not need decay at infinity
    if (p.right == EndClosure::robin && !(a > 2.0))
        throw PreconditionError("alpha > 2 violated: alpha=" + std::to_string(a));
    if (!(d0 + (a - 2.0) * (n - a) > 0.0))
        throw PreconditionError("delta0 + (alpha-2)(n-alpha) > 0 violated");
    if (!(gp > 0.0 && gp <= b + 2.0))
        throw PreconditionError("0 < p <= beta+2 violated: p=" + std::to_string(gp));
    if (!(gp * (gp + n - 2) < d0))
        throw PreconditionError("p(p+n-2) >= delta0: p=" + std::to_string(gp) +
                                ", delta0=" + std::to_string(d0));
    if (!(p.r_lo > 0.0 && p.r_hi > p.r_lo))
        throw PreconditionError("0 < r_lo < r_hi violated");
    if (!p.rhs) throw PreconditionError("rhs H not set");
}

namespace {

void thomas_solve(std::vector<double>& sub, std::vector<double>& diag,
                  std::vector<double>& sup, std::vector<double>& rhs) {
    const std::size_t N = diag.size();
    for (std::size_t i = 1; i < N; ++i) {
        if (diag[i - 1] == 0.0) throw SolveError("solve_bvp: singular tridiagonal system");
        const double m = sub[i] / diag[i - 1];
        diag[i] -= m * sup[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    if (diag[N - 1] == 0.0) throw SolveError("solve_bvp: singular tridiagonal system");
    rhs[N - 1] /= diag[N - 1];
    for (std::size_t i = N - 1; i-- > 0;) rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
}

} // namespace

BvpSolution solve_bvp(const SturmLiouvilleProblem& p) {
    validate_problem(p);
    const int n = p.dim.n();
    auto grid = make_log_grid(p.r_lo, p.r_hi, p.points_per_decade);
    const std::size_t N = grid.size();
    const double dx = (std::log(grid.back()) - std::log(grid.front())) / double(N - 1);

    std::vector<double> pot(N), Hv(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double r = grid[i];
        pot[i] = p.potential == PotentialKind::bubble
                     ? n * (n + 2) * std::pow(1.0 + r * r, -2.0)
                     : eval_V_lambda(p.dim, KelvinParams(p.lambda), r);
        Hv[i] = p.rhs(r);
        if (Hv[i] < 0.0)
            throw PreconditionError("H >= 0 violated at r=" + std::to_string(r) +
                                    ": H=" + std::to_string(Hv[i]));
    }

    // In x = log r the equation reads
    //   a_xx + (n-2) a_x + (r^2 pot - delta0) a = -r^2 H.
    std::vector<double> sub(N, 0.0), diag(N, 0.0), sup(N, 0.0), rhs(N, 0.0);
    auto interior_row = [&](std::size_t i) {
        const double r2 = grid[i] * grid[i];
        sub[i] = 1.0 / (dx * dx) - (n - 2) / (2.0 * dx);
        diag[i] = -2.0 / (dx * dx) + r2 * pot[i] - p.delta0;
        sup[i] = 1.0 / (dx * dx) + (n - 2) / (2.0 * dx);
        rhs[i] = -r2 * Hv[i];
    };
    for (std::size_t i = 1; i + 1 < N; ++i) interior_row(i);

    // Closures eliminate the ghost node through a_x = s a with the asymptotic
    // slope s, keeping the scheme tridiagonal and second order.
    if (p.left == EndClosure::dirichlet) {
        diag[0] = 1.0;
        sup[0] = 0.0;
        rhs[0] = 0.0;
    } else {
        const double s = p.inner_growth;
        const double r2 = grid[0] * grid[0];
        diag[0] = -2.0 * (1.0 + dx * s) / (dx * dx) + (n - 2) * s + r2 * pot[0] - p.delta0;
        sup[0] = 2.0 / (dx * dx);
        rhs[0] = -r2 * Hv[0];
    }
    if (p.right == EndClosure::dirichlet) {
        diag[N - 1] = 1.0;
        sub[N - 1] = 0.0;
        rhs[N - 1] = 0.0;
    } else {
        const double s = 2.0 - p.bounds.alpha;
        const double r2 = grid[N - 1] * grid[N - 1];
        diag[N - 1] = -2.0 * (1.0 - dx * s) / (dx * dx) + (n - 2) * s + r2 * pot[N - 1] - p.delta0;
        sub[N - 1] = 2.0 / (dx * dx);
        rhs[N - 1] = -r2 * Hv[N - 1];
    }

    std::vector<double> sub_c = sub, diag_c = diag, sup_c = sup, a = rhs;
    thomas_solve(sub_c, diag_c, sup_c, a);

    // certified residual of the discrete system, reported in the r variables;
    // the attainable floor is set by cancellation in the 1/dx^2-sized rows
    double residual = 0.0;
    bool certified = true;
    const double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t i = 1; i + 1 < N; ++i) {
        const double lhs = sub[i] * a[i - 1] + diag[i] * a[i] + sup[i] * a[i + 1];
        const double weight = std::pow(1.0 + grid[i], p.bounds.alpha) / (grid[i] * grid[i]);
        const double res_w = std::abs(lhs - rhs[i]) * weight;
        residual = std::max(residual, res_w);
        const double floor = 32.0 * eps * weight *
                             (std::abs(sub[i] * a[i - 1]) + std::abs(diag[i] * a[i]) +
                              std::abs(sup[i] * a[i + 1]) + std::abs(rhs[i]));
        if (res_w > std::max(p.tol, floor)) certified = false;
    }
    if (!certified) {
        char msg[128];
        std::snprintf(msg, sizeof msg,
                      "solve_bvp: weighted residual %.3e exceeds tol %.3e and the roundoff floor",
                      residual, p.tol);
        throw SolveError(msg);
    }

    BvpSolution out{RadialFunction(grid, a), std::move(pot), n, p.delta0, residual, 0.0, {}};
    out.min_value = *std::min_element(a.begin(), a.end());

    if (p.left == EndClosure::robin) out.profile.set_inner_exponent(p.inner_growth);
    out.profile.set_outer_exponent(2.0 - p.bounds.alpha);

    double C0 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double env = std::pow(grid[i], p.bounds.growth_p) *
                           std::pow(1.0 + grid[i], -p.bounds.growth_p + 2.0 - p.bounds.alpha);
        C0 = std::max(C0, a[i] / env);
    }
    out.bound_C0 = C0;
    return out;
}

RadialFunction BvpSolution::first_derivative() const { return profile.derivative(); }

RadialFunction BvpSolution::second_derivative(const std::function<double(double)>& rhs) const {
    // a'' recovered through the equation itself: one differentiation cheaper
    // and one order more accurate than differencing twice
    const auto& g = profile.grid();
    const auto& a = profile.values();
    RadialFunction ap = profile.derivative();
    std::vector<double> a2(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double r = g[i];
        a2[i] = -rhs(r) - (n - 1) * ap.values()[i] / r -
                (potential_values[i] - delta0 / (r * r)) * a[i];
    }
    RadialFunction out(g, std::move(a2));
    if (profile.inner_exponent()) out.set_inner_exponent(*profile.inner_exponent() - 2);
    if (profile.outer_exponent()) out.set_outer_exponent(*profile.outer_exponent() - 2);
    return out;
}

int max_harmonic_degree(int n) {
    if (n < 10) throw PreconditionError("max_harmonic_degree: n >= 10 required");
    return n == 10 ? 6 : 7;
}

BvpSolution solve_f2(const Dimension& dim, const SolveOptions& opt) {
    const int n = dim.n();
    if (n < 10) throw PreconditionError("solve_f2: hypothesis n >= 10 violated, got n=" +
                                        std::to_string(n));
    SturmLiouvilleProblem p{dim, 2.0 * n};
    p.rhs = [dim](double r) { return r * r * eval_bubble(dim, r); };
    p.r_lo = opt.r_lo;
    p.r_hi = opt.r_hi;
    p.points_per_decade = opt.points_per_decade;
    p.bounds = {2.0, double(n - 4), 1.0, 1.5};
    p.inner_growth = std::min(indicial_root(n, p.delta0), p.bounds.beta + 2.0); // = 2
    return solve_bvp(p);
}

BvpSolution solve_f3(const Dimension& dim, const SolveOptions& opt) {
    const int n = dim.n();
    if (n < 8) throw PreconditionError("solve_f3: hypothesis n >= 8 violated, got n=" +
                                       std::to_string(n));
    SturmLiouvilleProblem p{dim, 3.0 * (n + 1)};
    p.rhs = [dim](double r) { return r * r * r * eval_bubble(dim, r); };
    p.r_lo = opt.r_lo;
    p.r_hi = opt.r_hi;
    p.points_per_decade = opt.points_per_decade;
    p.bounds = {3.0, double(n - 5), 1.0, 2.5};
    p.inner_growth = std::min(indicial_root(n, p.delta0), p.bounds.beta + 2.0); // = 3
    return solve_bvp(p);
}

BvpSolution solve_f2_lambda(const Dimension& dim, double lambda, const SolveOptions& opt,
                            double lambda_window) {
    const int n = dim.n();
    if (n < 10) throw PreconditionError("solve_f2_lambda: hypothesis n >= 10 violated");
    if (std::abs(lambda - 1.0) > lambda_window)
        throw PreconditionError("solve_f2_lambda: |lambda-1| <= " + std::to_string(lambda_window) +
                                " violated, lambda=" + std::to_string(lambda));
    SturmLiouvilleProblem p{dim, 2.0 * n};
    p.potential = PotentialKind::interpolated;
    p.lambda = lambda;
    p.rhs = [dim, lambda](double r) {
        const double cut = 1.0 - std::pow(lambda / r, 8);
        return r * r * eval_bubble_kelvin(dim, lambda, r) * std::max(cut, 0.0);
    };
    p.r_lo = lambda;
    p.r_hi = opt.r_hi;
    p.points_per_decade = opt.points_per_decade;
    p.bounds = {2.0, double(n - 4), 1.0, 1.5};
    p.left = EndClosure::dirichlet;
    return solve_bvp(p);
}

BvpSolution solve_f_pl(const Dimension& dim, double lambda, int l, double M,
                       int points_per_decade, double lambda_window) {
    const int n = dim.n();
    if (n < 10) throw PreconditionError("solve_f_pl: hypothesis n >= 10 violated");
    if (l < 3 || l > max_harmonic_degree(n))
        throw PreconditionError("solve_f_pl: 3 <= l <= " + std::to_string(max_harmonic_degree(n)) +
                                " violated, l=" + std::to_string(l));
    if (std::abs(lambda - 1.0) > lambda_window)
        throw PreconditionError("solve_f_pl: |lambda-1| <= " + std::to_string(lambda_window) +
                                " violated");
    if (!(M >= 1.0)) throw PreconditionError("solve_f_pl: M >= 1 required");
    SturmLiouvilleProblem p{dim, double(l) * (l + n - 2)};
    p.potential = PotentialKind::interpolated;
    p.lambda = lambda;
    p.rhs = [dim, lambda, l](double r) {
        const double cut = 1.0 - std::pow(lambda / r, 2 * l + 4);
        return std::pow(r, l) * eval_bubble_kelvin(dim, lambda, r) * std::max(cut, 0.0);
    };
    p.r_lo = lambda;
    p.r_hi = 2.0 * std::pow(M, 2.0 / (n - 2));
    p.points_per_decade = points_per_decade;
    p.bounds = {double(l), double(n - l - 2), 1.0, std::min(double(l), indicial_root(n, p.delta0)) - 0.5};
    p.left = EndClosure::dirichlet;
    p.right = EndClosure::dirichlet;
    return solve_bvp(p);
}

double f2_lower_envelope(const Dimension& dim, double r) {
    const int n = dim.n();
    return eval_bubble(dim, r) / (6.0 * (n - 4)) *
           (std::pow(r, 4) + double(3 * n - 4) / (n - 2) * r * r);
}

EnvelopeReport check_f2_bounds(const BvpSolution& f2, const Dimension& dim,
                               std::optional<double> tolerance) {
    const int n = dim.n();
    EnvelopeReport rep;
    rep.tolerance = tolerance.value_or(10.0 * f2.residual_norm);
    rep.lower_ok = true;
    rep.worst_lower_margin = 0.0;
    const auto& g = f2.profile.grid();
    const auto& v = f2.profile.values();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double env = f2_lower_envelope(dim, g[i]);
        const double margin = v[i] - env;
        rep.worst_lower_margin = std::min(rep.worst_lower_margin, margin);
        if (margin < -rep.tolerance) {
            rep.lower_ok = false;
            rep.violations.push_back({g[i], -margin});
        }
        rep.fitted_upper_C = std::max(
            rep.fitted_upper_C, v[i] / (std::pow(g[i], 1.5) * std::pow(1.0 + g[i], 4.5 - n)));
    }
    return rep;
}

double f2lambda_lower_envelope(const Dimension& dim, double lambda, double eps, double r) {
    const int n = dim.n();
    if (r <= lambda) return 0.0;
    const double ul = eval_bubble_kelvin(dim, lambda, r);
    return (1.0 - eps) / (6.0 * (n - 4)) * ul *
           (std::pow(r, 4) * (1.0 - std::pow(lambda / r, 8)) +
            double(3 * n - 4) / (n - 2) * r * r * (1.0 - std::pow(lambda / r, 4)));
}

double f2lambda_delta_window(double eps) {
    if (!(eps > 0.0)) throw PreconditionError("f2lambda_delta_window: eps > 0 required");
    return 0.02 * (eps / 0.1);
}

EnvelopeReport check_f2lambda_bounds(const BvpSolution& f, const Dimension& dim,
                                     double lambda, double eps,
                                     std::optional<double> tolerance,
                                     std::optional<double> delta_window) {
    const double window = delta_window.value_or(f2lambda_delta_window(eps));
    if (std::abs(lambda - 1.0) > window)
        throw PreconditionError("check_f2lambda_bounds: |lambda-1| <= " + std::to_string(window) +
                                " violated, lambda=" + std::to_string(lambda));
    const int n = dim.n();
    EnvelopeReport rep;
    rep.tolerance = tolerance.value_or(10.0 * f.residual_norm);
    rep.lower_ok = true;
    const auto& g = f.profile.grid();
    const auto& v = f.profile.values();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double env = f2lambda_lower_envelope(dim, lambda, eps, g[i]);
        const double margin = v[i] - env;
        rep.worst_lower_margin = std::min(rep.worst_lower_margin, margin);
        if (margin < -rep.tolerance) {
            rep.lower_ok = false;
            rep.violations.push_back({g[i], -margin});
        }
        rep.fitted_upper_C = std::max(rep.fitted_upper_C, v[i] / std::pow(g[i], 6 - n));
    }
    return rep;
}

double f2lambda_admissible_window(const Dimension& dim, double eps, const SolveOptions& opt,
                                  double step, double scan_limit) {
    double best = 0.0;
    const double slack = scan_limit + step; // keep accumulated rounding inside the gate
    for (double d = step; d <= scan_limit + 1e-15; d += step) {
        bool ok = true;
        for (double lambda : {1.0 - d, 1.0 + d}) {
            auto f = solve_f2_lambda(dim, lambda, opt, slack);
            if (!check_f2lambda_bounds(f, dim, lambda, eps, std::nullopt, slack).lower_ok) {
                ok = false;
                break;
            }
        }
        if (!ok) break;
        best = d;
    }
    return best;
}

double supersolution_g(const Dimension& dim, double r) {
    const int n = dim.n();
    const double U = eval_bubble(dim, r);
    const double U4 = std::pow(1.0 + r * r, -2.0); // U^{4/(n-2)}
    return r * r * U *
           (4.0 * (n - 2) / (3.0 * (n - 4)) / (1.0 + r * r) +
            2.0 * n / (3.0 * (n - 4)) * r * r * U4);
}

double phi2_rhs(const Dimension& dim, double r) {
    const int n = dim.n();
    const double U = eval_bubble(dim, r);
    const double U4 = std::pow(1.0 + r * r, -2.0);
    return 2.0 * (3 * n - 4) / (3.0 * (n - 4)) * U *
           (r * r / (1.0 + r * r) - double(n) / (n - 2) * r * r * U4);
}

namespace {

// T phi with delta0 = 2n for phi = r^k U / c, derivatives in closed form
double apply_T_rkU(const Dimension& dim, int k, double scale, double r) {
    const int n = dim.n();
    const double U = eval_bubble(dim, r);
    const double Up = bubble_dr(dim, r);
    const double Upp = bubble_d2r(dim, r);
    const double rk = std::pow(r, k);
    const double phi = rk * U * scale;
    const double dphi = (k * std::pow(r, k - 1) * U + rk * Up) * scale;
    const double d2phi = (k * (k - 1) * std::pow(r, k - 2) * U + 2.0 * k * std::pow(r, k - 1) * Up +
                          rk * Upp) * scale;
    const double pot = n * (n + 2) * std::pow(1.0 + r * r, -2.0);
    return d2phi + (n - 1) / r * dphi + (pot - 2.0 * n / (r * r)) * phi;
}

} // namespace

SupersolutionReport check_supersolutions(const Dimension& dim, const std::vector<double>& grid) {
    const int n = dim.n();
    if (n < 10) throw PreconditionError("check_supersolutions: hypothesis n >= 10 violated");
    SupersolutionReport rep;
    rep.phi1_ok = rep.phi2_ok = true;
    rep.phi1_min_margin = rep.phi2_min_margin = std::numeric_limits<double>::infinity();
    const double c1 = 1.0 / (6.0 * (n - 4));
    const double c2 = double(3 * n - 4) / (6.0 * (n - 4) * (n - 2));
    for (double r : grid) {
        const double U = eval_bubble(dim, r);
        const double t1 = apply_T_rkU(dim, 4, c1, r) + r * r * U;
        rep.phi1_min_margin = std::min(rep.phi1_min_margin, t1);
        if (!(t1 > 0.0)) rep.phi1_ok = false;
        rep.phi1_consistency = std::max(rep.phi1_consistency, std::abs(t1 - supersolution_g(dim, r)));

        const double t2 = apply_T_rkU(dim, 2, c2, r);
        rep.phi2_consistency = std::max(rep.phi2_consistency, std::abs(t2 + phi2_rhs(dim, r)));
        const double m2 = supersolution_g(dim, r) - phi2_rhs(dim, r);
        rep.phi2_min_margin = std::min(rep.phi2_min_margin, m2);
        if (!(m2 > 0.0)) rep.phi2_ok = false;
    }
    return rep;
}

} // namespace yamabe
