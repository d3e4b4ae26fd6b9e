#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "yamabe/profile.hpp"

namespace yamabe {

// Radial field with closed-form derivatives (the bubble, its dilates, or any
// radial test function).
struct RadialField {
    std::function<double(double)> value;
    std::function<double(double)> dr;
    std::function<double(double)> d2r;
    std::string description;
};

RadialField bubble_field(const Dimension& dim);
// v_mu(y) = mu^{-(n-2)/2} U(y/mu), the dilation family solving the same equation
RadialField bubble_field_rescaled(const Dimension& dim, double mu);

struct PohozaevInput {
    Dimension dim;
    const CurvatureJet* jet = nullptr; // null = flat background
    double M = 1.0;
    double R_prime = 1.0;              // cutoff radius of the identity
    std::variant<RadialField, const ProfileApprox*> field;
    int radial_intervals = 1 << 14;
};

struct PohozaevResult {
    double I1 = 0, I2 = 0, I3 = 0, I4 = 0, I5 = 0;
    double defect = 0;            // I1+I2+I3+I4-I5
    double u_energy = 0;          // \int_{|y|<R'} |grad v|^2
    double defect_normalized = 0; // defect / max(u_energy, |I5|)
    double refinement_order = 0;  // observed order from an N/2 comparison
    double nonlinear_truncation = 0; // bound on the dropped quartic term of v^{2n/(n-2)}
};

// Volume and boundary terms of the dilation-pairing balance
//   I1 + I2 + I3 + I4 = I5,
// with polynomial angular factors integrated by exact sphere moments and the
// radial factors by a composite rule on [0, R'].
PohozaevResult eval_pohozaev(const PohozaevInput& input);

struct I2Term {
    std::string label;   // e.g. "l=2 avg x U^2", "l=2 osc x 2U f2"
    int block_degree = 0;
    double prefactor = 0;      // curvature x M-power x combinatorial weight
    double radial_moment = 0;  // the 1-D integral carrying the r-powers
    double value = 0;          // full contribution to I2
};

struct I2Breakdown {
    std::vector<I2Term> terms;
    double total = 0;            // sum of terms (equals I2 of eval_pohozaev)
    double f2_cross_prefactor = 0; // 2 c(n)^2/(n(n+2)) [sum_{i<j} 2 (d_ij R)^2 + sum_i (d_ii R)^2]
    double f2_cross_moment = 0;    // \int_0^{R'} r^2 U f2 r^{n-1} dr
    // the same moment on growing balls, the log-divergence diagnostic for n=10
    std::vector<std::pair<double, double>> moment_growth; // (R, integral)
    double growth_ratio = 0;     // I(R=1e4)/I(R=1e2)
    std::optional<double> rbar6_estimate; // hypothesis-class jets only
};

I2Breakdown i2_breakdown(const PohozaevInput& input,
                         const std::vector<double>& growth_radii = {1e2, 1e3, 1e4});

struct RateEntry {
    double M = 0;
    double W2 = 0;       // |W|^2
    double gradRm2 = 0;  // |grad Rm|^2
    double hessRm2 = 0;  // |grad^2 Rm|^2
};

struct RateSequence {
    std::vector<RateEntry> entries; // strictly increasing M
};

struct RateReport {
    double fitted_C = 0;
    std::vector<double> per_entry; // combination / M^{-2} per entry
    std::vector<std::size_t> flagged; // entries exceeding the median fit by 3x
};

// Fits C in |W|^2 M^{-8/(n-2)} + |grad Rm|^2 M^{-12/(n-2)}
//           + |grad^2 Rm|^2 M^{-16/(n-2)} (log M if n = 10)  <=  C M^{-2}.
RateReport weyl_rate_check(const RateSequence& seq, const Dimension& dim);

} // namespace yamabe
