#include "yamabe/sphere_moments.hpp"

#include <cmath>

#include "yamabe/errors.hpp"

namespace yamabe {

Rational sphere_monomial_average(int n, const MultiIndex& alpha) {
    if (n < 1) throw PreconditionError("sphere_monomial_average: n >= 1 required");
    if (!all_even(alpha)) return 0;

    Rational num = 1;
    for (auto e : alpha) {
        // (e-1)!! for even e
        for (int m = int(e) - 1; m >= 2; m -= 2) num *= m;
    }
    Rational den = 1;
    const int k = degree(alpha) / 2;
    for (int i = 0; i < k; ++i) den *= (n + 2 * i);
    Rational q = num / den;
    q.canonicalize();
    return q;
}

double sphere_area(int n) {
    // 2 pi^{n/2} / Gamma(n/2)
    return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

Rational ladder_denominator(int n, int k) {
    if (k < 0) throw PreconditionError("ladder_denominator: k >= 0 required");
    Rational d = 1;
    for (int i = 1; i <= k; ++i) d *= 2 * i; // 2^k k!
    for (int i = 0; i < k; ++i) d *= (n + 2 * i);
    return d;
}

Rational odd_moment_constant_of_area(int n, int k) {
    if (k < 1) throw PreconditionError("odd_moment_constant: k >= 1 required");
    Rational num = 1;
    for (int i = 2; i <= 2 * k + 1; ++i) num *= i; // (2k+1)!
    Rational den = (2 * k + n) * ladder_denominator(n, k);
    Rational q = num / den;
    q.canonicalize();
    return q;
}

double odd_moment_constant(int n, int k) {
    return to_double(odd_moment_constant_of_area(n, k)) * sphere_area(n);
}

} // namespace yamabe
