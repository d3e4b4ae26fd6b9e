#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "yamabe/bubble.hpp"
#include "yamabe/cnc.hpp"
#include "yamabe/curvature.hpp"
#include "yamabe/dimension.hpp"
#include "yamabe/harmonics.hpp"
#include "yamabe/sturm_liouville.hpp"

namespace yamabe {

enum class V3Mode {
    eigen, // pure 3(n+1)-eigencomponent of the degree-3 oscillation
    full   // the whole degree-3 oscillation
};

/// Three-term blow-up profile
///   v = U + M^{-8/(n-2)} v2 + M^{-10/(n-2)} v3,
///   v2 = -c(n) Rt2(theta) f2(r),  v3 = -c(n) Rt3(theta) f3(r).
class ProfileApprox {
public:
    ProfileApprox(Dimension dim, double M, SphericalPolynomial v2_angular,
                  SphericalPolynomial v3_full, SphericalPolynomial v3_eigen,
                  BvpSolution f2, BvpSolution f3, V3Mode mode);

    const Dimension& dim() const { return dim_; }
    double M() const { return M_; }
    V3Mode mode() const { return mode_; }
    const SphericalPolynomial& v2_angular() const { return v2_angular_; }
    const SphericalPolynomial& v3_full() const { return v3_full_; }
    const SphericalPolynomial& v3_eigen() const { return v3_eigen_; }
    const SphericalPolynomial& v3_active() const {
        return mode_ == V3Mode::eigen ? v3_eigen_ : v3_full_;
    }
    const BvpSolution& f2() const { return f2_; }
    const BvpSolution& f3() const { return f3_; }

    // max |v3_full - v3_eigen| coefficient gap, the separately reported
    // low-degree remainder of the degree-3 oscillation
    double v3_difference_norm() const;

    double eval(double r, std::span<const double> theta) const;

    // physical-scale form u(x) = M v(M^{2/(n-2)} x)
    double eval_physical(std::span<const double> x) const;

    // gradient of the composite at y = r theta (analytic in the angular
    // factors, solver-grid derivatives in the radial ones)
    std::vector<double> gradient(double r, std::span<const double> theta) const;

private:
    Dimension dim_;
    double M_;
    SphericalPolynomial v2_angular_;
    SphericalPolynomial v3_full_;
    SphericalPolynomial v3_eigen_;
    BvpSolution f2_;
    BvpSolution f3_;
    V3Mode mode_;
};

// Assembles the profile from a validated jet and the two solved radial
// problems. Throws when the solver outputs are missing or inconsistent.
ProfileApprox build_profile(const CurvatureJet& jet, const Dimension& dim, double M,
                            const BvpSolution& f2, const BvpSolution& f3,
                            V3Mode mode = V3Mode::eigen);

struct ResidualOptions {
    double r_lo = 1e-2;
    double r_hi = 0.0;   // 0 -> M^{(16-eps_range)/(n-2)^2}
    double eps_range = 1.0;
    int radial_points = 64;
    int directions = 12;
    std::uint64_t direction_seed = 2024;
};

struct ResidualField {
    std::vector<double> radii;
    std::vector<std::vector<double>> directions;
    std::vector<std::vector<double>> values; // residual at [radius][direction]
    double fitted_C = 0.0; // max |res| M^{12/(n-2)} (1+r)^{n-6}
    double max_abs = 0.0;
};

// (Delta_{g_k} - cbar)(v) + n(n-2) v^{(n+2)/(n-2)} on a product grid, with the
// rescaled operator coefficients and cbar assembled from the jet blocks
// (l = 2, 3, 4). All derivatives are evaluated analytically in the angular
// factors and through the solver grid in the radial ones.
ResidualField pde_residual(const ProfileApprox& profile, const CurvatureJet& jet,
                           const ResidualOptions& opt = {});

// Radial finite-difference residual of the bare bubble on a log grid; the
// discrete route whose error shrinks at second order under refinement.
double bubble_residual_stencil(const Dimension& dim, double r_lo, double r_hi,
                               int points_per_decade);

// deterministic unit directions: coordinate axes first, then seeded Gaussians
std::vector<std::vector<double>> sample_directions(int n, int count, std::uint64_t seed);

/// Values on a product grid (radii x directions) with an optional exact
/// generator used by quadrature and envelope checks.
struct SampledSolution {
    std::vector<double> radii;
    std::vector<std::vector<double>> directions;
    std::vector<std::vector<double>> values; // [radius][direction]
    std::function<double(double, std::span<const double>)> generator; // may be empty
    std::string description;

    static SampledSolution from_profile(const ProfileApprox& p, std::vector<double> radii,
                                        std::vector<std::vector<double>> directions);
    static SampledSolution from_function(std::function<double(double, std::span<const double>)> f,
                                         std::string description, std::vector<double> radii,
                                         std::vector<std::vector<double>> directions);

    std::string to_csv() const; // r,theta_index,value
    std::string directions_json() const;
};

enum class EnvelopeRegime { coarse, improved };

struct EnvelopeCheck {
    double fitted_C = 0.0;
    double exponent = 0.0; // the (1+r)-power used
    std::vector<NodeViolation> worst_nodes;
};

// E = v - profile against C M^{-12/(n-2)} (1+r)^{8-n+abar} (coarse,
// abar = (3/4)(n-10+sqrt(eps))) or C M^{-12/(n-2)} (1+r)^{8-n} (improved).
EnvelopeCheck error_envelope_check(const SampledSolution& v, const ProfileApprox& profile,
                                   EnvelopeRegime regime, double eps = 1.0);

} // namespace yamabe
