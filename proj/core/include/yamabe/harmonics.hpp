#pragma once

#include <vector>

#include "yamabe/spherical_polynomial.hpp"

namespace yamabe {

/// One piece of a spherical-harmonic decomposition: a harmonic homogeneous
/// polynomial of the stated degree. Restricted to S^{n-1} it is an
/// eigenfunction of -Delta_{S^{n-1}} with eigenvalue d(d+n-2).
struct HarmonicComponent {
    int degree = 0;
    SphericalPolynomial polynomial;
    long eigenvalue = 0; // d(d+n-2)

    HarmonicComponent(int d, SphericalPolynomial p)
        : degree(d), polynomial(std::move(p)),
          eigenvalue(long(d) * (d + polynomial.n() - 2)) {}
};

// Splits a homogeneous P of degree l into P = sum_j |x|^{2j} h_{l-2j}
// with each h exactly harmonic (flat Laplacian zero in rational arithmetic).
// Components are returned highest degree first; zero components are omitted.
// Degrees above max_degree are rejected.
std::vector<HarmonicComponent> decompose_harmonic(const SphericalPolynomial& P,
                                                  int max_degree = 8);

// Reassembles sum_j |x|^{2j} h_{l-2j} as a homogeneous polynomial of degree l.
SphericalPolynomial reconstruct_from_harmonics(const std::vector<HarmonicComponent>& comps,
                                               int n, int l);

// Projection of P onto its pure degree-l harmonic top component.
SphericalPolynomial harmonic_top_component(const SphericalPolynomial& P);

struct BlockAverage {
    Rational moment_path;  // exact monomial-moment contraction
    Rational ladder_path;  // Delta^k P(0) / (2^k k! prod(n+2i))
    double value = 0.0;
};

// Sphere average of a degree-2k Taylor block computed two independent ways.
// Throws ConsistencyError if the exact values differ.
BlockAverage taylor_block_average(int k, const SphericalPolynomial& block);

struct OddMomentCheck {
    Rational lhs_of_area;  // (2k+1)! * avg(B * theta_j), coefficient of |S^{n-1}|
    Rational rhs_of_area;  // C(n,k)-coefficient * d_j(Delta^k B)(0)
    bool pass = false;
};

// Verifies the degree-(2k+1) odd-moment contraction identity for index j.
OddMomentCheck verify_odd_moment_identity(int k, const SphericalPolynomial& block, int j);

struct SquareExpansion {
    Rational average;            // exact sphere mean of the squared block
    Rational main_term;          // (1/(2n(n+2))) [sum_{i<j} 2 h_ij^2 + sum_i h_ii^2]
    Rational trace_term;         // (sum_i h_ii)^2 / (4n(n+2))
    bool consistent = false;     // average == main_term + trace_term, exactly
};

// Sphere mean of (sum_{i<j} h_ij t_i t_j + (1/2) sum_i h_ii t_i^2)^2 for a
// symmetric matrix h, cross-checked against the closed form.
SquareExpansion expand_square_r2_block(const std::vector<std::vector<double>>& hessian);

} // namespace yamabe
