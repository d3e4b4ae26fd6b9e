#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "yamabe/dimension.hpp"
#include "yamabe/radial_function.hpp"

namespace yamabe {

// Radial operator around the bubble with angular constant delta0:
//   T a = a'' + (n-1)/r a' + (potential(r) - delta0/r^2) a.
// solve_bvp solves T a = -H on a log grid with second-order central
// differences and asymptotic closures.

enum class PotentialKind { bubble, interpolated };
enum class EndClosure { robin, dirichlet };

struct BoundParams {
    double beta = 0.0;    // H <= C r^beta (1+r)^{-beta-alpha}
    double alpha = 3.0;   // alpha > 2
    double C = 1.0;
    double growth_p = 1.0; // certificate exponent, 0 < p <= beta+2, p(p+n-2) < delta0
};

struct SturmLiouvilleProblem {
    SturmLiouvilleProblem(Dimension d, double angular_constant)
        : dim(d), delta0(angular_constant) {}

    Dimension dim;
    double delta0;
    PotentialKind potential = PotentialKind::bubble;
    double lambda = 1.0; // inversion radius for the interpolated potential
    std::function<double(double)> rhs; // H(r) >= 0
    double r_lo = 1e-4;
    double r_hi = 1e4;
    int points_per_decade = 256;
    BoundParams bounds;
    // closure exponents: a ~ r^inner_growth at r_lo, a ~ r^{2-alpha} at r_hi
    double inner_growth = 1.0;
    EndClosure left = EndClosure::robin;
    EndClosure right = EndClosure::robin;
    double tol = 1e-9;
};

// Throws PreconditionError naming the first violated inequality.
void validate_problem(const SturmLiouvilleProblem& p);

// Largest indicial root of s(s+n-2) = delta0, the generic growth at r -> 0.
double indicial_root(int n, double delta0);

struct BvpSolution {
    RadialFunction profile;
    std::vector<double> potential_values; // potential(r) on the grid
    int n = 0;
    double delta0 = 0.0;
    double residual_norm = 0.0; // max |Ta + H| (1+r)^alpha over interior nodes
    double min_value = 0.0;
    std::optional<double> bound_C0; // fitted C0 with 0 <= a <= C0 r^p (1+r)^{-p+2-alpha}

    // a' by high-order differences, a'' recovered through the ODE itself
    RadialFunction first_derivative() const;
    RadialFunction second_derivative(const std::function<double(double)>& rhs) const;
};

BvpSolution solve_bvp(const SturmLiouvilleProblem& problem);

struct SolveOptions {
    double r_lo = 1e-4;
    double r_hi = 1e4;
    int points_per_decade = 256;
};

// f2: delta0 = 2n, H = r^2 U, requires n >= 10.
BvpSolution solve_f2(const Dimension& dim, const SolveOptions& opt = {});
// f3: delta0 = 3(n+1), H = r^3 U, requires n >= 8.
BvpSolution solve_f3(const Dimension& dim, const SolveOptions& opt = {});
// f2_lambda: potential V_lambda on (lambda, r_hi), H = r^2 U^lambda (1-(lambda/r)^8),
// Dirichlet at lambda. The admissible window |lambda-1| <= lambda_window is configurable.
BvpSolution solve_f2_lambda(const Dimension& dim, double lambda, const SolveOptions& opt = {},
                            double lambda_window = 0.05);
// f_{p lambda l}: delta0 = l(l+n-2), domain (lambda, 2 M^{2/(n-2)}),
// H = r^l U^lambda (1-(lambda/r)^{2l+4}), Dirichlet at both ends.
BvpSolution solve_f_pl(const Dimension& dim, double lambda, int l, double M,
                       int points_per_decade = 256, double lambda_window = 0.05);

int max_harmonic_degree(int n); // 6 for n=10, 7 for n>=11

struct NodeViolation {
    double r;
    double margin; // envelope - value (positive means violated)
};

struct EnvelopeReport {
    bool lower_ok = false;
    double worst_lower_margin = 0.0; // most negative value of (f - envelope)
    std::vector<NodeViolation> violations;
    double fitted_upper_C = 0.0;
    double tolerance = 0.0;
};

// Lower bound f2 >= U/(6(n-4)) (r^4 + (3n-4)/(n-2) r^2) at every node, and the
// smallest C with f2 <= C r^{3/2}(1+r)^{9/2-n}. Violation tolerance defaults to
// 10x the solver residual norm.
EnvelopeReport check_f2_bounds(const BvpSolution& f2, const Dimension& dim,
                               std::optional<double> tolerance = std::nullopt);
double f2_lower_envelope(const Dimension& dim, double r);

// Admissible |lambda-1| window per slack eps. The default table carries the
// single configured entry {eps = 0.1 -> delta = 0.02}; unlisted eps values
// scale linearly in eps.
double f2lambda_delta_window(double eps);

// (1-eps)/(6(n-4)) U^lambda (r^4 (1-(lambda/r)^8) + (3n-4)/(n-2) r^2 (1-(lambda/r)^4))
// <= f_{2,lambda}, plus fitted C with f <= C r^{6-n}. Requires
// |lambda-1| <= delta_window (defaults to f2lambda_delta_window(eps)).
EnvelopeReport check_f2lambda_bounds(const BvpSolution& f, const Dimension& dim,
                                     double lambda, double eps,
                                     std::optional<double> tolerance = std::nullopt,
                                     std::optional<double> delta_window = std::nullopt);
double f2lambda_lower_envelope(const Dimension& dim, double lambda, double eps, double r);

// Scans lambda away from 1 in steps and reports the largest |lambda-1| whose
// solved profile still clears the envelope on both sides of 1.
double f2lambda_admissible_window(const Dimension& dim, double eps,
                                  const SolveOptions& opt = {}, double step = 0.005,
                                  double scan_limit = 0.05);

struct SupersolutionReport {
    bool phi1_ok = false;         // T phi1 + r^2 U > 0 at every node
    double phi1_min_margin = 0.0; // min over nodes of T phi1 + r^2 U
    double phi1_consistency = 0.0; // max |T phi1 + r^2 U - g(r)|
    bool phi2_ok = false;          // g(r) > phi2 right-hand side at every node
    double phi2_min_margin = 0.0;
    double phi2_consistency = 0.0; // max |T phi2 + stated right-hand side|
};

// phi1 = r^4 U / (6(n-4)) and phi2 = (3n-4)/(6(n-4)(n-2)) r^2 U with delta0 = 2n,
// both differentiated in closed form and compared against their stated residuals.
SupersolutionReport check_supersolutions(const Dimension& dim,
                                         const std::vector<double>& grid);
double supersolution_g(const Dimension& dim, double r);
double phi2_rhs(const Dimension& dim, double r);

} // namespace yamabe
