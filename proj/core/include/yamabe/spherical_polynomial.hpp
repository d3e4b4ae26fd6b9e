#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "yamabe/multi_index.hpp"
#include "yamabe/rational.hpp"

namespace yamabe {

/// Homogeneous polynomial in n ambient variables with exact rational
/// coefficients, used as the extension of a function on S^{n-1}.
/// Every stored multi-index has |alpha| == degree().
class SphericalPolynomial {
public:
    SphericalPolynomial(int n, int degree);

    int n() const { return n_; }
    int degree() const { return degree_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<MultiIndex, Rational>& terms() const { return terms_; }

    // Adds c * x^alpha. Throws if |alpha| != degree or alpha.size() != n.
    void add_term(const MultiIndex& alpha, const Rational& c);
    Rational coefficient(const MultiIndex& alpha) const;

    SphericalPolynomial& operator+=(const SphericalPolynomial& other);
    SphericalPolynomial& operator-=(const SphericalPolynomial& other);
    SphericalPolynomial& operator*=(const Rational& c);
    friend SphericalPolynomial operator+(SphericalPolynomial a, const SphericalPolynomial& b) { return a += b; }
    friend SphericalPolynomial operator-(SphericalPolynomial a, const SphericalPolynomial& b) { return a -= b; }
    friend SphericalPolynomial operator*(const Rational& c, SphericalPolynomial p) { return p *= c; }

    SphericalPolynomial multiply(const SphericalPolynomial& other) const;
    SphericalPolynomial partial(int i) const;     // d/dx_i, degree drops by one
    SphericalPolynomial laplacian() const;        // flat Laplacian, degree drops by two
    SphericalPolynomial times_r2() const;         // multiply by |x|^2, degree rises by two

    double eval(std::span<const double> x) const;
    Rational eval_rational(const std::vector<Rational>& x) const;

    // Exact sphere mean (1/|S^{n-1}|) \int P dsigma.
    Rational sphere_average() const;

    // Exact sphere mean of P*Q (the unnormalized inner product divided by area).
    Rational sphere_inner_average(const SphericalPolynomial& other) const;

    std::string to_json() const;
    static SphericalPolynomial from_json(const std::string& text);
    friend bool operator==(const SphericalPolynomial&, const SphericalPolynomial&) = default;

private:
    int n_;
    int degree_;
    std::map<MultiIndex, Rational> terms_;
};

} // namespace yamabe
