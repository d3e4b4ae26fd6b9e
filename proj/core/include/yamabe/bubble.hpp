#pragma once

#include <functional>
#include <span>

#include "yamabe/dimension.hpp"
#include "yamabe/radial_function.hpp"
#include "yamabe/spherical_polynomial.hpp"

namespace yamabe {

/// Standard bubble U(r) = (1+r^2)^{-(n-2)/2}, the entire solution of
/// Delta U + n(n-2) U^{(n+2)/(n-2)} = 0.
double eval_bubble(const Dimension& dim, double r);
double bubble_dr(const Dimension& dim, double r);
double bubble_d2r(const Dimension& dim, double r);

/// Kelvin transform U^lambda in closed form,
/// U^lambda(r) = lambda^{n-2} (r^2 + lambda^4)^{-(n-2)/2}.
double eval_bubble_kelvin(const Dimension& dim, double lambda, double r);
double bubble_kelvin_dr(const Dimension& dim, double lambda, double r);
double bubble_kelvin_d2r(const Dimension& dim, double lambda, double r);

struct KelvinParams {
    double lambda = 1.0;
    explicit KelvinParams(double l) : lambda(l) {
        if (!(l > 0.0)) throw PreconditionError("KelvinParams: lambda > 0 required");
    }
};

// (lambda/r)^{n-2} f(lambda^2 / r) for a callable radial profile.
double kelvin_transform(const std::function<double(double)>& f, const Dimension& dim,
                        const KelvinParams& kp, double r);

// Same for a tabulated profile; throws OutOfDomainError naming the image
// radius lambda^2/r when it leaves the grid.
double kelvin_transform(const RadialFunction& f, const Dimension& dim,
                        const KelvinParams& kp, double r);

// Grid-to-grid Kelvin transform, restricted to the nodes whose images stay
// inside f's grid. Declared end exponents transform accordingly.
RadialFunction kelvin_transform_grid(const RadialFunction& f, const Dimension& dim,
                                     const KelvinParams& kp);

struct VLambdaOptions {
    double rel_tol = 1e-12;
    long max_nodes = 1 << 16;
    bool swap_integrand = false; // integrate (t U^lambda + (1-t) U)^{4/(n-2)} instead
};

/// Interpolated potential V_lambda(r) = n(n+2) \int_0^1 (tU + (1-t)U^lambda)^{4/(n-2)} dt
/// by adaptive Gauss-Kronrod quadrature.
double eval_V_lambda(const Dimension& dim, const KelvinParams& kp, double r,
                     const VLambdaOptions& opt = {});

// Closed form of the same integral (the integrand is a power of a linear
// function of t); used as an independent cross-check.
double eval_V_lambda_closed_form(const Dimension& dim, const KelvinParams& kp, double r);

/// xi_{Q,mu}(P) = (mu / (1 + mu^2 d^2))^{(n-2)/2} with d = |P-Q| (single chart,
/// Euclidean distance).
double eval_xi(const Dimension& dim, std::span<const double> Q, double mu,
               std::span<const double> P);

/// xi with the two profile corrections subtracted:
///   xi - c(n) Rt2(theta) f2(mu d) mu^{(n-10)/2} - c(n) Rt3(theta) f3(mu d) mu^{(n-12)/2}.
/// Throws OutOfDomainError when mu d leaves the f2/f3 grids (d = 0 is exact).
double eval_xi_tilde(const Dimension& dim, std::span<const double> Q, double mu,
                     std::span<const double> P,
                     const SphericalPolynomial& Rt2, const SphericalPolynomial& Rt3,
                     const RadialFunction& f2, const RadialFunction& f3);

} // namespace yamabe
