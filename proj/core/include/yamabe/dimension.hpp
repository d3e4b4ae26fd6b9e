#pragma once

#include "yamabe/errors.hpp"

namespace yamabe {

/// Ambient dimension n >= 3 together with the conformal constant
/// c(n) = (n-2)/(4(n-1)).
class Dimension {
public:
    explicit Dimension(int n) : n_(n) {
        if (n < 3) throw PreconditionError("Dimension: n >= 3 required, got n=" + std::to_string(n));
    }

    int n() const { return n_; }
    double conformal_constant() const { return (n_ - 2) / (4.0 * (n_ - 1)); }

    // critical exponent (n+2)/(n-2)
    double critical_exponent() const { return double(n_ + 2) / (n_ - 2); }

private:
    int n_;
};

} // namespace yamabe
