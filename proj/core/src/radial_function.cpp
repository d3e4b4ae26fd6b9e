#include "yamabe/radial_function.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "yamabe/errors.hpp"

namespace yamabe {

std::vector<double> make_log_grid(double r_lo, double r_hi, int points_per_decade) {
    if (!(r_lo > 0.0) || !(r_hi > r_lo))
        throw PreconditionError("make_log_grid: need 0 < r_lo < r_hi");
    if (points_per_decade < 2)
        throw PreconditionError("make_log_grid: points_per_decade >= 2 required");
    const double x_lo = std::log10(r_lo), x_hi = std::log10(r_hi);
    const int N = int(std::lround((x_hi - x_lo) * points_per_decade));
    std::vector<double> g(N + 1);
    for (int i = 0; i <= N; ++i)
        g[i] = std::pow(10.0, x_lo + (x_hi - x_lo) * double(i) / N);
    g.front() = r_lo;
    g.back() = r_hi;
    return g;
}

RadialFunction::RadialFunction(std::vector<double> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (grid_.size() != values_.size() || grid_.size() < 2)
        throw PreconditionError("RadialFunction: grid/value size mismatch or too short");
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        if (!(grid_[i] > 0.0) || (i && !(grid_[i] > grid_[i - 1])))
            throw PreconditionError("RadialFunction: grid must be strictly increasing and positive");
        if (!std::isfinite(values_[i]))
            throw PreconditionError("RadialFunction: non-finite value at r=" + std::to_string(grid_[i]));
    }
}

bool RadialFunction::covers(double r) const {
    const double slack = 1.0 + 1e-12;
    return r >= grid_.front() / slack && r <= grid_.back() * slack;
}

std::size_t RadialFunction::locate(double r) const {
    auto it = std::upper_bound(grid_.begin(), grid_.end(), r);
    std::size_t i = it == grid_.begin() ? 0 : std::size_t(it - grid_.begin()) - 1;
    return std::min(i, grid_.size() - 2);
}

double RadialFunction::eval(double r) const {
    if (!covers(r))
        throw OutOfDomainError("RadialFunction::eval: r=" + std::to_string(r) + " outside grid [" +
                               std::to_string(grid_.front()) + ", " + std::to_string(grid_.back()) + "]");
    r = std::clamp(r, grid_.front(), grid_.back());
    const std::size_t i = locate(r);
    const double x = std::log(r);
    const double x0 = std::log(grid_[i]), x1 = std::log(grid_[i + 1]);
    const double h = x1 - x0;
    const double t = (x - x0) / h;
    const double f0 = values_[i], f1 = values_[i + 1];

    // Catmull-Rom slopes in x = log r, one-sided at the ends
    auto slope = [&](std::size_t j) {
        if (j == 0)
            return (values_[1] - values_[0]) / (std::log(grid_[1]) - std::log(grid_[0]));
        if (j + 1 == grid_.size())
            return (values_[j] - values_[j - 1]) / (std::log(grid_[j]) - std::log(grid_[j - 1]));
        return (values_[j + 1] - values_[j - 1]) / (std::log(grid_[j + 1]) - std::log(grid_[j - 1]));
    };
    const double m0 = slope(i) * h, m1 = slope(i + 1) * h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * m0 +
           (-2 * t3 + 3 * t2) * f1 + (t3 - t2) * m1;
}

double RadialFunction::eval_extrapolated(double r) const {
    if (covers(r)) return eval(r);
    if (r < grid_.front()) {
        if (!inner_exponent_)
            throw OutOfDomainError("RadialFunction: r below grid and no inner exponent declared");
        return values_.front() * std::pow(r / grid_.front(), *inner_exponent_);
    }
    if (!outer_exponent_)
        throw OutOfDomainError("RadialFunction: r above grid and no outer exponent declared");
    return values_.back() * std::pow(r / grid_.back(), *outer_exponent_);
}

RadialFunction RadialFunction::derivative() const {
    const std::size_t N = grid_.size();
    std::vector<double> x(N), d(N);
    for (std::size_t i = 0; i < N; ++i) x[i] = std::log(grid_[i]);
    const double h = (x[N - 1] - x[0]) / double(N - 1);
    auto f = [&](std::size_t i) { return values_[i]; };
    for (std::size_t i = 0; i < N; ++i) {
        double fx;
        if (i >= 2 && i + 2 < N)
            fx = (-f(i + 2) + 8 * f(i + 1) - 8 * f(i - 1) + f(i - 2)) / (12 * h);
        else if (i == 0)
            fx = (-3 * f(0) + 4 * f(1) - f(2)) / (2 * h);
        else if (i + 1 == N)
            fx = (3 * f(N - 1) - 4 * f(N - 2) + f(N - 3)) / (2 * h);
        else
            fx = (f(i + 1) - f(i - 1)) / (2 * h);
        d[i] = fx / grid_[i]; // df/dr = (df/dx)/r
    }
    RadialFunction out(grid_, std::move(d));
    if (inner_exponent_) out.set_inner_exponent(*inner_exponent_ - 1);
    if (outer_exponent_) out.set_outer_exponent(*outer_exponent_ - 1);
    return out;
}

double RadialFunction::loglog_slope(double r_a, double r_b) const {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        if (grid_[i] < r_a || grid_[i] > r_b) continue;
        if (!(std::abs(values_[i]) > 0.0)) continue;
        const double lx = std::log(grid_[i]), ly = std::log(std::abs(values_[i]));
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++m;
    }
    if (m < 2) throw PreconditionError("loglog_slope: fewer than two usable samples in window");
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

RadialFunction::Validation RadialFunction::validate(double slope_tol) const {
    Validation v;
    v.grid_ok = true;
    for (std::size_t i = 1; i < grid_.size(); ++i)
        if (!(grid_[i] > grid_[i - 1]) || !(grid_[i - 1] > 0)) v.grid_ok = false;
    v.values_finite = true;
    for (double val : values_)
        if (!std::isfinite(val)) v.values_finite = false;

    if (inner_exponent_) {
        v.inner_slope = loglog_slope(grid_.front(), grid_.front() * 10.0);
        v.inner_slope_ok = std::abs(v.inner_slope - *inner_exponent_) <= slope_tol;
    }
    if (outer_exponent_) {
        v.outer_slope = loglog_slope(grid_.back() / 10.0, grid_.back());
        v.outer_slope_ok = std::abs(v.outer_slope - *outer_exponent_) <= slope_tol;
    }
    return v;
}

namespace {
std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
} // namespace

std::string RadialFunction::to_csv() const {
    std::string s = "r,value,inner_exponent,outer_exponent\n";
    const std::string pin = inner_exponent_ ? fmt17(*inner_exponent_) : "";
    const std::string qout = outer_exponent_ ? fmt17(*outer_exponent_) : "";
    for (std::size_t i = 0; i < grid_.size(); ++i)
        s += fmt17(grid_[i]) + "," + fmt17(values_[i]) + "," + pin + "," + qout + "\n";
    return s;
}

RadialFunction RadialFunction::from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("RadialFunction CSV: empty input");
    std::vector<double> g, v;
    std::optional<double> p, q;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        while (cells.size() < 4) cells.push_back("");
        g.push_back(std::stod(cells[0]));
        v.push_back(std::stod(cells[1]));
        if (!cells[2].empty()) p = std::stod(cells[2]);
        if (!cells[3].empty()) q = std::stod(cells[3]);
    }
    RadialFunction f(std::move(g), std::move(v));
    if (p) f.set_inner_exponent(*p);
    if (q) f.set_outer_exponent(*q);
    return f;
}

void RadialFunction::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for write: " + path);
    out << to_csv();
}

RadialFunction RadialFunction::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open for read: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_csv(ss.str());
}

} // namespace yamabe
