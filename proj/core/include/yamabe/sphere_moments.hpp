#pragma once

#include "yamabe/multi_index.hpp"
#include "yamabe/rational.hpp"

namespace yamabe {

// Normalized monomial average over the unit sphere,
//   (1/|S^{n-1}|) \int_{S^{n-1}} theta^alpha dsigma.
// Zero when any entry of alpha is odd; otherwise the exact rational
//   prod_i (alpha_i - 1)!! / prod_{i=0}^{k-1} (n + 2i),   k = |alpha|/2,
// which is the half-integer Gamma-product rule fully reduced.
Rational sphere_monomial_average(int n, const MultiIndex& alpha);

// Unnormalized moment: |S^{n-1}| * average. Returned as the rational
// coefficient of |S^{n-1}| (the area itself is irrational).
inline Rational sphere_monomial_moment_of_area(int n, const MultiIndex& alpha) {
    return sphere_monomial_average(n, alpha);
}

// Surface area |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2), in double precision.
double sphere_area(int n);

// C(n,k) from the odd-moment contraction identity, as the exact rational
// multiple of |S^{n-1}|:
//   C(n,k) = (2k+1)! |S^{n-1}| / ((2k+n) 2^k k! prod_{i=0}^{k-1}(n+2i)).
Rational odd_moment_constant_of_area(int n, int k);

// Same constant as a double, with |S^{n-1}| substituted.
double odd_moment_constant(int n, int k);

// Denominator of the Laplacian-ladder average formula:
//   avg of a degree-2k Taylor block = Delta^k(block)(0) / ladder_denominator(n,k),
//   ladder_denominator = 2^k k! prod_{i=0}^{k-1}(n+2i).
Rational ladder_denominator(int n, int k);

} // namespace yamabe
