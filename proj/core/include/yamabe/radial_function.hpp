#pragma once

#include <optional>
#include <string>
#include <vector>

namespace yamabe {

// Geometric (log-spaced) grid, points_per_decade nodes per factor of 10.
std::vector<double> make_log_grid(double r_lo, double r_hi, int points_per_decade);

/// Values of a radial profile on a strictly increasing positive grid,
/// with optional power-law exponents at both ends: f ~ r^p as r->0 and
/// f ~ r^q as r->infinity.
class RadialFunction {
public:
    RadialFunction() = default;
    RadialFunction(std::vector<double> grid, std::vector<double> values);

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return grid_.size(); }
    double r_min() const { return grid_.front(); }
    double r_max() const { return grid_.back(); }

    std::optional<double> inner_exponent() const { return inner_exponent_; }
    std::optional<double> outer_exponent() const { return outer_exponent_; }
    void set_inner_exponent(double p) { inner_exponent_ = p; }
    void set_outer_exponent(double q) { outer_exponent_ = q; }

    // Cubic interpolation in log r. Throws OutOfDomainError outside the grid.
    double eval(double r) const;

    // Power-law continuation past the grid ends using the declared exponents.
    double eval_extrapolated(double r) const;

    bool covers(double r) const;

    // d/dr by fourth-order finite differences on the log grid.
    RadialFunction derivative() const;

    // Least-squares log-log slope of the samples with grid in [r_a, r_b].
    double loglog_slope(double r_a, double r_b) const;

    struct Validation {
        bool grid_ok = false;
        bool values_finite = false;
        bool inner_slope_ok = true;  // vacuously true when no exponent declared
        bool outer_slope_ok = true;
        double inner_slope = 0.0;
        double outer_slope = 0.0;
        bool pass() const { return grid_ok && values_finite && inner_slope_ok && outer_slope_ok; }
    };
    Validation validate(double slope_tol = 0.1) const;

    // CSV with header r,value,inner_exponent,outer_exponent (exponent columns
    // repeated on every row, empty when undeclared).
    std::string to_csv() const;
    static RadialFunction from_csv(const std::string& text);
    void save_csv(const std::string& path) const;
    static RadialFunction load_csv(const std::string& path);

private:
    std::vector<double> grid_;
    std::vector<double> values_;
    std::optional<double> inner_exponent_;
    std::optional<double> outer_exponent_;

    std::size_t locate(double r) const;
};

} // namespace yamabe
