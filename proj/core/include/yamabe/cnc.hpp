#pragma once

#include <span>
#include <vector>

#include "yamabe/curvature.hpp"

namespace yamabe {

// Conformal-normal-coordinate expansions around the origin. The metric and
// the Laplacian correction coefficients are the displayed polynomial
// truncations; past |x| ~ 0.5 the dropped O(r^5) tail may dominate.

struct MetricExpansion {
    std::vector<double> g; // n x n, row-major
    bool truncation_warning = false;
};

// g_pq = delta_pq + (1/3) R_{pijq} x^i x^j + (1/6) R_{pijq,k} x^i x^j x^k
//      + (1/20 R_{pijq,kl} + 2/45 R_{pijm} R_{qklm}) x^i x^j x^k x^l,
// truncated to the requested order (2, 3 or 4).
MetricExpansion cnc_metric_expansion(const CurvatureJet& jet, std::span<const double> x,
                                     int order = 4);

// Homogeneous pieces of b_i and d_ij along a fixed unit direction:
//   b_i(s theta) = s^2 b2[i] + s^3 b3[i]
//   d_ij(s theta) = s^2 d2[ij] + s^3 d3[ij] + s^4 d4[ij]
struct CncDirectionCoeffs {
    int n = 0;
    std::vector<double> b2, b3;     // n
    std::vector<double> d2, d3, d4; // n*n

    void eval(double s, std::vector<double>& b, std::vector<double>& d) const;
};

CncDirectionCoeffs cnc_direction_coeffs(const CurvatureJet& jet, std::span<const double> theta);

struct OperatorCoeffs {
    std::vector<double> b; // n
    std::vector<double> d; // n x n, symmetric
    bool truncation_warning = false;
};

// Laplace-Beltrami correction Delta_g = Delta + b_i d_i + d_ij d_ij at x.
OperatorCoeffs cnc_operator_coeffs(const CurvatureJet& jet, std::span<const double> x);

/// Coefficients of the rescaled operator Delta_{g_k} = Delta + bbar_i d_i + dbar_ij d_ij
/// at y = r theta, where bbar_i(y) = M^{-2/(n-2)} b_i(M^{-2/(n-2)} y) and
/// dbar_ij(y) = d_ij(M^{-2/(n-2)} y).
class RescaledCnc {
public:
    RescaledCnc(const CurvatureJet& jet, std::span<const double> theta, double M);

    void eval(double r, std::vector<double>& bbar, std::vector<double>& dbar) const;
    int n() const { return coeffs_.n; }

private:
    CncDirectionCoeffs coeffs_;
    double scale_; // M^{-2/(n-2)}
};

} // namespace yamabe
