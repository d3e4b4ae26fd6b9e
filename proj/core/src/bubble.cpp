#include "yamabe/bubble.hpp"

#include <cmath>

#include "yamabe/quadrature.hpp"

namespace yamabe {

double eval_bubble(const Dimension& dim, double r) {
    if (!(r >= 0.0)) throw PreconditionError("eval_bubble: r >= 0 required");
    return std::pow(1.0 + r * r, -0.5 * (dim.n() - 2));
}

double bubble_dr(const Dimension& dim, double r) {
    const int n = dim.n();
    return -(n - 2) * r * std::pow(1.0 + r * r, -0.5 * n);
}

double bubble_d2r(const Dimension& dim, double r) {
    const int n = dim.n();
    return -(n - 2) * std::pow(1.0 + r * r, -0.5 * n) +
           n * (n - 2) * r * r * std::pow(1.0 + r * r, -0.5 * (n + 2));
}

double eval_bubble_kelvin(const Dimension& dim, double lambda, double r) {
    const int n = dim.n();
    return std::pow(lambda, n - 2) * std::pow(r * r + std::pow(lambda, 4), -0.5 * (n - 2));
}

double bubble_kelvin_dr(const Dimension& dim, double lambda, double r) {
    const int n = dim.n();
    return -(n - 2) * r * std::pow(lambda, n - 2) * std::pow(r * r + std::pow(lambda, 4), -0.5 * n);
}

double bubble_kelvin_d2r(const Dimension& dim, double lambda, double r) {
    const int n = dim.n();
    const double s = r * r + std::pow(lambda, 4);
    return std::pow(lambda, n - 2) *
           (-(n - 2) * std::pow(s, -0.5 * n) + n * (n - 2) * r * r * std::pow(s, -0.5 * (n + 2)));
}

double kelvin_transform(const std::function<double(double)>& f, const Dimension& dim,
                        const KelvinParams& kp, double r) {
    if (!(r > 0.0)) throw PreconditionError("kelvin_transform: r > 0 required");
    return std::pow(kp.lambda / r, dim.n() - 2) * f(kp.lambda * kp.lambda / r);
}

double kelvin_transform(const RadialFunction& f, const Dimension& dim,
                        const KelvinParams& kp, double r) {
    if (!(r > 0.0)) throw PreconditionError("kelvin_transform: r > 0 required");
    const double image = kp.lambda * kp.lambda / r;
    if (!f.covers(image))
        throw OutOfDomainError("kelvin_transform: image radius " + std::to_string(image) +
                               " outside profile grid");
    return std::pow(kp.lambda / r, dim.n() - 2) * f.eval(image);
}

RadialFunction kelvin_transform_grid(const RadialFunction& f, const Dimension& dim,
                                     const KelvinParams& kp) {
    std::vector<double> g, v;
    for (double r : f.grid()) {
        const double image = kp.lambda * kp.lambda / r;
        if (!f.covers(image)) continue;
        g.push_back(r);
        v.push_back(std::pow(kp.lambda / r, dim.n() - 2) * f.eval(image));
    }
    if (g.size() < 2)
        throw OutOfDomainError("kelvin_transform_grid: no grid nodes with in-grid images");
    RadialFunction out(std::move(g), std::move(v));
    // r^p inner behavior maps to r^{2-n-p} outer behavior and vice versa
    if (f.outer_exponent()) out.set_inner_exponent(2 - dim.n() - *f.outer_exponent());
    if (f.inner_exponent()) out.set_outer_exponent(2 - dim.n() - *f.inner_exponent());
    return out;
}

double eval_V_lambda(const Dimension& dim, const KelvinParams& kp, double r,
                     const VLambdaOptions& opt) {
    if (!(r > 0.0)) throw PreconditionError("eval_V_lambda: r > 0 required");
    const int n = dim.n();
    const double a = eval_bubble(dim, r);
    const double b = eval_bubble_kelvin(dim, kp.lambda, r);
    const double q = 4.0 / (n - 2);
    auto integrand = [&](double t) {
        const double u = opt.swap_integrand ? t * b + (1.0 - t) * a : t * a + (1.0 - t) * b;
        return std::pow(u, q);
    };
    auto res = adaptive_gauss_kronrod(integrand, 0.0, 1.0, opt.rel_tol, 1e-300, opt.max_nodes);
    return n * (n + 2) * res.value;
}

double eval_V_lambda_closed_form(const Dimension& dim, const KelvinParams& kp, double r) {
    const int n = dim.n();
    const double a = eval_bubble(dim, r);
    const double b = eval_bubble_kelvin(dim, kp.lambda, r);
    const double q = 4.0 / (n - 2);
    // \int_0^1 (ta + (1-t)b)^q dt = (a^{q+1} - b^{q+1}) / ((q+1)(a-b))
    double integral;
    if (std::abs(a - b) < 1e-12 * (a + b))
        integral = std::pow(0.5 * (a + b), q);
    else
        integral = (std::pow(a, q + 1) - std::pow(b, q + 1)) / ((q + 1) * (a - b));
    return n * (n + 2) * integral;
}

namespace {
double dist(std::span<const double> Q, std::span<const double> P) {
    if (Q.size() != P.size()) throw PreconditionError("eval_xi: point dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < Q.size(); ++i) s += (P[i] - Q[i]) * (P[i] - Q[i]);
    return std::sqrt(s);
}
} // namespace

double eval_xi(const Dimension& dim, std::span<const double> Q, double mu,
               std::span<const double> P) {
    if (!(mu > 0.0)) throw PreconditionError("eval_xi: mu > 0 required");
    const double d = dist(Q, P);
    return std::pow(mu / (1.0 + mu * mu * d * d), 0.5 * (dim.n() - 2));
}

double eval_xi_tilde(const Dimension& dim, std::span<const double> Q, double mu,
                     std::span<const double> P,
                     const SphericalPolynomial& Rt2, const SphericalPolynomial& Rt3,
                     const RadialFunction& f2, const RadialFunction& f3) {
    const double xi = eval_xi(dim, Q, mu, P);
    const double d = dist(Q, P);
    if (d == 0.0) return xi; // corrections vanish with f2(0)=f3(0)=0

    std::vector<double> theta(P.size());
    for (std::size_t i = 0; i < P.size(); ++i) theta[i] = (P[i] - Q[i]) / d;

    const double s = mu * d;
    if (!f2.covers(s) || !f3.covers(s))
        throw OutOfDomainError("eval_xi_tilde: mu*d = " + std::to_string(s) +
                               " outside the f2/f3 grid");
    const int n = dim.n();
    const double c = dim.conformal_constant();
    return xi - c * Rt2.eval(theta) * f2.eval(s) * std::pow(mu, 0.5 * (n - 10)) -
           c * Rt3.eval(theta) * f3.eval(s) * std::pow(mu, 0.5 * (n - 12));
}

} // namespace yamabe
