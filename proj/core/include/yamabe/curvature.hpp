#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "yamabe/dimension.hpp"
#include "yamabe/rational.hpp"
#include "yamabe/spherical_polynomial.hpp"

namespace yamabe {

struct HypothesisFlags {
    bool W0_zero = false;     // |W(0)| = 0
    bool gradW0_zero = false; // |grad W(0)| = 0
};

/// Curvature data at the center of conformal normal coordinates:
/// the Riemann tensor with two covariant derivatives (rm0, rm1, rm2)
/// plus the third- and fourth-order Taylor blocks of scalar curvature
/// (r3, r4), which are independent jet data at this order.
class CurvatureJet {
public:
    explicit CurvatureJet(int n);

    int n() const { return n_; }
    HypothesisFlags flags;

    // dense storage, row-major over the listed indices
    std::vector<double> rm0; // [a][b][c][d]          R_{abcd}
    std::vector<double> rm1; // [a][b][c][d][e]       R_{abcd,e}
    std::vector<double> rm2; // [a][b][c][d][e][f]    R_{abcd,ef}
    std::vector<double> r3;  // [a][b][c]             d^3 R(0), symmetric
    std::vector<double> r4;  // [a][b][c][d]          d^4 R(0), symmetric

    std::size_t i4(int a, int b, int c, int d) const {
        return ((std::size_t(a) * n_ + b) * n_ + c) * n_ + d;
    }
    std::size_t i5(int a, int b, int c, int d, int e) const { return i4(a, b, c, d) * n_ + e; }
    std::size_t i6(int a, int b, int c, int d, int e, int f) const {
        return i5(a, b, c, d, e) * n_ + f;
    }
    std::size_t i3(int a, int b, int c) const { return (std::size_t(a) * n_ + b) * n_ + c; }

    // derived blocks
    std::vector<double> ricci0() const;       // n^2      Ric_{ab}
    std::vector<double> ricci1() const;       // n^3      Ric_{ab,c}
    std::vector<double> ricci2() const;       // n^4      Ric_{ab,cd}
    std::vector<double> scalar_grad() const;  // n        R_{,a}
    std::vector<double> scalar_hess() const;  // n^2      d^2 R(0)
    double scalar_laplacian() const;          // Delta R(0)

    std::string to_json() const;
    static CurvatureJet from_json(const std::string& text);
    void save_json(const std::string& path) const;
    static CurvatureJet load_json(const std::string& path);

private:
    int n_;
};

struct ConstraintReport {
    struct Entry {
        std::string name;
        double max_violation;
    };
    std::vector<Entry> entries;
    double worst = 0.0;
    bool pass(double tol = 1e-12) const { return worst <= tol; }
    const Entry* find(const std::string& name) const;
};

// Checks every stored invariant: antisymmetries, pair symmetry, first Bianchi
// for rm0/rm1/rm2, derivative-index symmetry of rm2, Ric(0)=0, the contracted
// second Bianchi Ric_{ab,b} = R_{,a}/2, symmetry of r3/r4, and flag consistency.
ConstraintReport validate_jet(const CurvatureJet& jet);

// Orbit-averages the raw arrays over the Riemann symmetry group, projects onto
// the first-Bianchi subspace, removes the Ricci part of rm0, restores the
// contracted second Bianchi on rm1 by least squares, and pins the rm2 double
// trace to Delta R(0) = -|W|^2/6. Idempotent.
CurvatureJet project_symmetries(const CurvatureJet& raw);

// Hypothesis class for the sixth-order average formula: rm0 = rm1 = 0, rm2
// least-squares projected onto { R_{ikmj,km} = (7/2) R_{,ij} } and
// { Delta R(0) = 0 } inside the symmetry subspace; r3 made trace-free and r4
// double-trace-free.
CurvatureJet project_hypothesis(const CurvatureJet& raw);

// Deterministic Gaussian jet from a seed (bit-exact for a fixed binary).
enum class JetClass { general, hypothesis };
CurvatureJet random_jet(int n, std::uint64_t seed, JetClass cls = JetClass::general,
                        double amplitude = 1.0);

struct WeylNorms {
    double W2 = 0.0;      // |W|^2 = |rm0|^2 (rm0 is trace-free at a CNC center)
    double gradRm2 = 0.0; // |rm1|^2
    double hessRm2 = 0.0; // |rm2|^2
};
WeylNorms weyl_norms(const CurvatureJet& jet);

// Degree-l Taylor block of scalar curvature as a polynomial,
// sum_{|alpha|=l} (d_alpha R / alpha!) x^alpha, for l in {2, 3, 4}.
SphericalPolynomial scalar_block(const CurvatureJet& jet, int l);

struct BarTilde {
    Rational bar;                // sphere mean of the block
    SphericalPolynomial tilde;   // block - bar |x|^l (exactly mean-zero), homogeneous
};
BarTilde build_R_bar_tilde(const CurvatureJet& jet, int l);

// -|W|^2/(12n), cross-checked against the ladder average of the degree-2 block.
double rbar2_weyl(const CurvatureJet& jet, double cross_check_tol = 1e-10);

// Sixth-order sphere average from the second-derivative contractions; requires
// the validated hypothesis flags.
double rbar6_formula(const CurvatureJet& jet);

// Delta^3 R(0) recovered from the full-contraction identity
//   Delta^3 R + (6/5)|rm2|^2 + 6 Ric-cross - 6 |d^2R|^2 = 0,
// with contractions computed by an independent code path.
double delta3R_from_identity(const CurvatureJet& jet);

// |48(n+4)(n+2)n * rbar6_formula - delta3R_from_identity|
double rbar6_identity_residual(const CurvatureJet& jet);

struct HvReport {
    double cross_lhs = 0.0;  // Ric_{,2} cross contraction
    double cross_rhs = 0.0;  // (6/(n-2)) |d^2R|^2
    double cross_margin = 0.0;
    bool cross_holds = false;
    double norm_lhs = 0.0;   // |rm2|^2
    double norm_rhs = 0.0;   // (49/(4n^2)) |d^2R|^2
    double norm_margin = 0.0;
    bool norm_holds = false;
    double square_route = 0.0; // |rm2|^2 + (alpha^2 n^2 - 7 alpha)|d^2R|^2 at alpha = 7/(2n^2)
    double contraction_identity_violation = 0.0; // max |R_{ikmj,km} - (7/2) R_{,ij}|
    bool in_hypothesis_class = false;
};
HvReport check_hv_inequalities(const CurvatureJet& jet, double class_tol = 1e-9);

struct GateResult {
    bool holds = false;
    Rational lhs;
    Rational rhs;
    Rational margin; // rhs - lhs
    double lhs_value = 0.0;
    double rhs_value = 0.0;
    double margin_value = 0.0;
};

// Exact rational evaluation of
//   (1/(8(n+4)(n+2)n)) ((n-8)/(n-2) - 49/(20 n^2) + eps) <= (c(n)/(2n(n+2))) (1/(6(n-4))).
GateResult dimension_gate(int n, const Rational& eps = Rational(0));

} // namespace yamabe
