#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

#include "yamabe/errors.hpp"

namespace yamabe {

// Exact rational scalar. All sphere-moment and harmonic-decomposition
// arithmetic runs on these; doubles appear only at the final evaluation step.
using Rational = mpq_class;

inline Rational rational(long num, long den = 1) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline double to_double(const Rational& q) { return q.get_d(); }

inline std::string to_string(const Rational& q) { return q.get_str(); }

// num/den as int64, for JSON emission. Throws if the value does not fit.
inline std::int64_t num_i64(const Rational& q) {
    if (!q.get_num().fits_slong_p())
        throw ConsistencyError("rational numerator exceeds int64 range: " + q.get_str());
    return q.get_num().get_si();
}
inline std::int64_t den_i64(const Rational& q) {
    if (!q.get_den().fits_slong_p())
        throw ConsistencyError("rational denominator exceeds int64 range: " + q.get_str());
    return q.get_den().get_si();
}

inline Rational pow_int(Rational base, unsigned k) {
    Rational r = 1;
    while (k--) r *= base;
    return r;
}

} // namespace yamabe
