#pragma once

#include <functional>

namespace yamabe {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long nodes_used = 0;
};

// Adaptive Gauss-Kronrod (G7,K15) with recursive bisection. Throws SolveError
// with the achieved tolerance when the node cap is hit before convergence.
QuadratureResult adaptive_gauss_kronrod(const std::function<double(double)>& f,
                                        double a, double b,
                                        double rel_tol = 1e-12,
                                        double abs_tol = 1e-300,
                                        long max_nodes = 1 << 16);

double composite_simpson(const std::function<double(double)>& f, double a, double b, int intervals);

} // namespace yamabe
