#include "yamabe/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include <nlohmann/json.hpp>

#include "yamabe/errors.hpp"

namespace yamabe {

ProfileApprox::ProfileApprox(Dimension dim, double M, SphericalPolynomial v2_angular,
                             SphericalPolynomial v3_full, SphericalPolynomial v3_eigen,
                             BvpSolution f2, BvpSolution f3, V3Mode mode)
    : dim_(dim), M_(M), v2_angular_(std::move(v2_angular)), v3_full_(std::move(v3_full)),
      v3_eigen_(std::move(v3_eigen)), f2_(std::move(f2)), f3_(std::move(f3)), mode_(mode) {
    if (!(M >= 1.0)) throw PreconditionError("ProfileApprox: M >= 1 required");
    if (v2_angular_.sphere_average() != 0 || v3_full_.sphere_average() != 0)
        throw PreconditionError("ProfileApprox: angular factors must have zero sphere mean");
}

double ProfileApprox::v3_difference_norm() const {
    SphericalPolynomial diff = v3_full_;
    diff -= v3_eigen_;
    double m = 0.0;
    for (const auto& [a, c] : diff.terms()) m = std::max(m, std::abs(to_double(c)));
    return m;
}

namespace {

struct RadialTriple {
    double f, fp, fpp;
};

// f, f', f'' on the solve grid; f'' recovered through the ODE
struct SolvedRadial {
    const BvpSolution* sol;
    RadialFunction deriv;
    RadialFunction second;

    SolvedRadial(const BvpSolution& s, const std::function<double(double)>& rhs)
        : sol(&s), deriv(s.first_derivative()), second(s.second_derivative(rhs)) {}

    RadialTriple at(double r) const {
        return {sol->profile.eval_extrapolated(r), deriv.eval_extrapolated(r),
                second.eval_extrapolated(r)};
    }
};

// angular polynomial data frozen at one direction
struct AngularData {
    int l = 0;
    double P0 = 0.0;
    std::vector<double> P1;      // d_i A (theta)
    std::vector<double> P2;      // d_ij A (theta), n x n
    double Plap = 0.0;           // (Delta A)(theta)

    AngularData(const SphericalPolynomial& A, std::span<const double> theta) {
        const int n = A.n();
        l = A.degree();
        P0 = A.eval(theta);
        P1.resize(n);
        P2.assign(std::size_t(n) * n, 0.0);
        for (int i = 0; i < n; ++i) {
            auto Ai = A.partial(i);
            P1[i] = Ai.eval(theta);
            for (int j = i; j < n; ++j) {
                const double v = Ai.partial(j).eval(theta);
                P2[std::size_t(i) * n + j] = v;
                P2[std::size_t(j) * n + i] = v;
            }
        }
        Plap = 0.0;
        for (int i = 0; i < n; ++i) Plap += P2[std::size_t(i) * n + i];
    }
};

struct PointDerivatives {
    double value = 0.0;
    std::vector<double> grad;
    std::vector<double> hess; // n x n
    double lap = 0.0;

    explicit PointDerivatives(int n) : grad(n, 0.0), hess(std::size_t(n) * n, 0.0) {}

    void add_radial(int n, std::span<const double> theta, double r, double u, double up,
                    double upp) {
        value += u;
        lap += upp + (n - 1) * up / r;
        for (int i = 0; i < n; ++i) {
            grad[i] += up * theta[i];
            for (int j = 0; j < n; ++j) {
                const double del = i == j ? 1.0 : 0.0;
                hess[std::size_t(i) * n + j] +=
                    upp * theta[i] * theta[j] + up * (del - theta[i] * theta[j]) / r;
            }
        }
    }

    // weight * A(y) * B(r) with A homogeneous of degree l and B = f/r^l
    void add_product(int n, std::span<const double> theta, double r, const AngularData& a,
                     const RadialTriple& f, double weight) {
        const int l = a.l;
        const double rl = std::pow(r, l);
        const double B = f.f / rl;
        const double Bp = f.fp / rl - l * f.f / (rl * r);
        const double Bpp = f.fpp / rl - 2.0 * l * f.fp / (rl * r) + l * (l + 1) * f.f / (rl * r * r);
        const double rl1 = rl / r, rl2 = rl / (r * r);

        value += weight * a.P0 * f.f;
        double p1theta = 0.0;
        for (int i = 0; i < n; ++i) p1theta += a.P1[i] * theta[i];
        lap += weight * (rl2 * a.Plap * B + 2.0 * rl1 * Bp * p1theta +
                         rl * a.P0 * (Bpp + (n - 1) * Bp / r));
        for (int i = 0; i < n; ++i) {
            grad[i] += weight * (rl1 * a.P1[i] * B + rl * a.P0 * Bp * theta[i]);
            for (int j = 0; j < n; ++j) {
                const double del = i == j ? 1.0 : 0.0;
                hess[std::size_t(i) * n + j] +=
                    weight * (rl2 * a.P2[std::size_t(i) * n + j] * B +
                              rl1 * Bp * (a.P1[i] * theta[j] + a.P1[j] * theta[i]) +
                              rl * a.P0 * (Bpp * theta[i] * theta[j] +
                                           Bp * (del - theta[i] * theta[j]) / r));
            }
        }
    }
};

} // namespace

double ProfileApprox::eval(double r, std::span<const double> theta) const {
    const int n = dim_.n();
    const double c = dim_.conformal_constant();
    const double w2 = -c * std::pow(M_, -8.0 / (n - 2));
    const double w3 = -c * std::pow(M_, -10.0 / (n - 2));
    double v = eval_bubble(dim_, r);
    if (r > 0.0) {
        v += w2 * v2_angular_.eval(theta) * f2_.profile.eval_extrapolated(r);
        v += w3 * v3_active().eval(theta) * f3_.profile.eval_extrapolated(r);
    }
    return v;
}

double ProfileApprox::eval_physical(std::span<const double> x) const {
    const int n = dim_.n();
    double r = 0.0;
    for (double xi : x) r += xi * xi;
    r = std::sqrt(r) * std::pow(M_, 2.0 / (n - 2));
    if (r == 0.0) return M_ * eval(0.0, std::vector<double>(x.size(), 0.0));
    std::vector<double> theta(x.size());
    const double d = r * std::pow(M_, -2.0 / (n - 2));
    for (std::size_t i = 0; i < x.size(); ++i) theta[i] = x[i] / d;
    return M_ * eval(r, theta);
}

std::vector<double> ProfileApprox::gradient(double r, std::span<const double> theta) const {
    const int n = dim_.n();
    PointDerivatives pd(n);
    pd.add_radial(n, theta, r, eval_bubble(dim_, r), bubble_dr(dim_, r), bubble_d2r(dim_, r));
    const double c = dim_.conformal_constant();
    const double w2 = -c * std::pow(M_, -8.0 / (n - 2));
    const double w3 = -c * std::pow(M_, -10.0 / (n - 2));
    SolvedRadial s2(f2_, [this](double rr) { return rr * rr * eval_bubble(dim_, rr); });
    SolvedRadial s3(f3_, [this](double rr) { return rr * rr * rr * eval_bubble(dim_, rr); });
    AngularData a2(v2_angular_, theta);
    AngularData a3(v3_active(), theta);
    pd.add_product(n, theta, r, a2, s2.at(r), w2);
    pd.add_product(n, theta, r, a3, s3.at(r), w3);
    return pd.grad;
}

ProfileApprox build_profile(const CurvatureJet& jet, const Dimension& dim, double M,
                            const BvpSolution& f2, const BvpSolution& f3, V3Mode mode) {
    if (jet.n() != dim.n()) throw PreconditionError("build_profile: jet dimension mismatch");
    if (f2.profile.size() == 0 || f3.profile.size() == 0)
        throw PreconditionError("build_profile: missing solver outputs for f2/f3");
    if (f2.n != dim.n() || f3.n != dim.n())
        throw PreconditionError("build_profile: solver outputs solved for a different dimension");
    auto bt2 = build_R_bar_tilde(jet, 2);
    auto bt3 = build_R_bar_tilde(jet, 3);
    SphericalPolynomial eigen = harmonic_top_component(bt3.tilde);
    return ProfileApprox(dim, M, bt2.tilde, bt3.tilde, eigen, f2, f3, mode);
}

std::vector<std::vector<double>> sample_directions(int n, int count, std::uint64_t seed) {
    std::vector<std::vector<double>> dirs;
    for (int i = 0; i < std::min(n, count); ++i) {
        std::vector<double> e(n, 0.0);
        e[i] = 1.0;
        dirs.push_back(std::move(e));
    }
    std::mt19937_64 eng(seed);
    auto uniform = [&]() { return (double(eng() >> 11) + 0.5) * 0x1p-53; };
    while (int(dirs.size()) < count) {
        std::vector<double> v(n);
        double norm2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double u1 = uniform(), u2 = uniform();
            v[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
            norm2 += v[i] * v[i];
        }
        const double norm = std::sqrt(norm2);
        if (norm < 1e-8) continue;
        for (double& x : v) x /= norm;
        dirs.push_back(std::move(v));
    }
    return dirs;
}

ResidualField pde_residual(const ProfileApprox& profile, const CurvatureJet& jet,
                           const ResidualOptions& opt) {
    const Dimension& dim = profile.dim();
    const int n = dim.n();
    if (jet.n() != n) throw PreconditionError("pde_residual: jet dimension mismatch");
    const double M = profile.M();
    const double c = dim.conformal_constant();
    const double p = dim.critical_exponent();

    ResidualField out;
    const double r_hi =
        opt.r_hi > 0.0 ? opt.r_hi
                       : std::pow(M, (16.0 - opt.eps_range) / double((n - 2) * (n - 2)));
    out.radii = make_log_grid(opt.r_lo, r_hi,
                              std::max(2, int(opt.radial_points / std::log10(r_hi / opt.r_lo))));
    out.directions = sample_directions(n, opt.directions, opt.direction_seed);

    SolvedRadial s2(profile.f2(), [&dim](double rr) { return rr * rr * eval_bubble(dim, rr); });
    SolvedRadial s3(profile.f3(), [&dim](double rr) { return rr * rr * rr * eval_bubble(dim, rr); });

    const double w2 = -c * std::pow(M, -8.0 / (n - 2));
    const double w3 = -c * std::pow(M, -10.0 / (n - 2));
    const double m8 = c * std::pow(M, -8.0 / (n - 2));
    const double m10 = c * std::pow(M, -10.0 / (n - 2));
    const double m12c = c * std::pow(M, -12.0 / (n - 2));

    SphericalPolynomial B2 = scalar_block(jet, 2);
    SphericalPolynomial B3 = scalar_block(jet, 3);
    SphericalPolynomial B4 = scalar_block(jet, 4);

    out.values.assign(out.radii.size(), std::vector<double>(out.directions.size(), 0.0));
    const double fitw = std::pow(M, 12.0 / (n - 2));

    std::vector<double> bbar, dbar;
    for (std::size_t s = 0; s < out.directions.size(); ++s) {
        const auto& theta = out.directions[s];
        AngularData a2(profile.v2_angular(), theta);
        AngularData a3(profile.v3_active(), theta);
        RescaledCnc rc(jet, theta, M);
        const double b2t = B2.eval(theta), b3t = B3.eval(theta), b4t = B4.eval(theta);

        for (std::size_t ir = 0; ir < out.radii.size(); ++ir) {
            const double r = out.radii[ir];
            PointDerivatives pd(n);
            pd.add_radial(n, theta, r, eval_bubble(dim, r), bubble_dr(dim, r),
                          bubble_d2r(dim, r));
            pd.add_product(n, theta, r, a2, s2.at(r), w2);
            pd.add_product(n, theta, r, a3, s3.at(r), w3);

            rc.eval(r, bbar, dbar);
            double op = pd.lap;
            for (int i = 0; i < n; ++i) op += bbar[i] * pd.grad[i];
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    op += dbar[std::size_t(i) * n + j] * pd.hess[std::size_t(i) * n + j];

            const double cbar =
                m8 * b2t * r * r + m10 * b3t * r * r * r + m12c * b4t * r * r * r * r;
            if (!(pd.value > 0.0))
                throw SolveError("pde_residual: composite profile non-positive at r=" +
                                 std::to_string(r));
            const double res = op - cbar * pd.value + n * (n - 2) * std::pow(pd.value, p);
            out.values[ir][s] = res;
            out.max_abs = std::max(out.max_abs, std::abs(res));
            out.fitted_C = std::max(out.fitted_C, std::abs(res) * fitw * std::pow(1.0 + r, n - 6));
        }
    }
    return out;
}

double bubble_residual_stencil(const Dimension& dim, double r_lo, double r_hi,
                               int points_per_decade) {
    const int n = dim.n();
    auto grid = make_log_grid(r_lo, r_hi, points_per_decade);
    const std::size_t N = grid.size();
    const double dx = (std::log(grid.back()) - std::log(grid.front())) / double(N - 1);
    std::vector<double> u(N);
    for (std::size_t i = 0; i < N; ++i) u[i] = eval_bubble(dim, grid[i]);
    double worst = 0.0;
    const double p = dim.critical_exponent();
    for (std::size_t i = 1; i + 1 < N; ++i) {
        const double uxx = (u[i + 1] - 2 * u[i] + u[i - 1]) / (dx * dx);
        const double ux = (u[i + 1] - u[i - 1]) / (2 * dx);
        const double lap = (uxx + (n - 2) * ux) / (grid[i] * grid[i]);
        worst = std::max(worst, std::abs(lap + n * (n - 2) * std::pow(u[i], p)));
    }
    return worst;
}

SampledSolution SampledSolution::from_profile(const ProfileApprox& p, std::vector<double> radii,
                                              std::vector<std::vector<double>> directions) {
    SampledSolution out;
    out.radii = std::move(radii);
    out.directions = std::move(directions);
    out.description = "exact profile";
    out.generator = [pc = p](double r, std::span<const double> theta) { return pc.eval(r, theta); };
    out.values.assign(out.radii.size(), std::vector<double>(out.directions.size(), 0.0));
    for (std::size_t i = 0; i < out.radii.size(); ++i)
        for (std::size_t s = 0; s < out.directions.size(); ++s)
            out.values[i][s] = p.eval(out.radii[i], out.directions[s]);
    return out;
}

SampledSolution SampledSolution::from_function(
    std::function<double(double, std::span<const double>)> f, std::string description,
    std::vector<double> radii, std::vector<std::vector<double>> directions) {
    SampledSolution out;
    out.radii = std::move(radii);
    out.directions = std::move(directions);
    out.description = std::move(description);
    out.generator = std::move(f);
    out.values.assign(out.radii.size(), std::vector<double>(out.directions.size(), 0.0));
    for (std::size_t i = 0; i < out.radii.size(); ++i)
        for (std::size_t s = 0; s < out.directions.size(); ++s)
            out.values[i][s] = out.generator(out.radii[i], out.directions[s]);
    return out;
}

std::string SampledSolution::to_csv() const {
    std::string s = "r,theta_index,value\n";
    char buf[96];
    for (std::size_t i = 0; i < radii.size(); ++i)
        for (std::size_t k = 0; k < directions.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.17g,%zu,%.17g\n", radii[i], k, values[i][k]);
            s += buf;
        }
    return s;
}

std::string SampledSolution::directions_json() const {
    nlohmann::json j;
    j["directions"] = directions;
    return j.dump();
}

EnvelopeCheck error_envelope_check(const SampledSolution& v, const ProfileApprox& profile,
                                   EnvelopeRegime regime, double eps) {
    const int n = profile.dim().n();
    const double M = profile.M();
    EnvelopeCheck out;
    const double abar = regime == EnvelopeRegime::coarse
                            ? 0.75 * (n - 10 + std::sqrt(eps))
                            : 0.0;
    out.exponent = 8.0 - n + abar;
    const double scale = std::pow(M, -12.0 / (n - 2));
    for (std::size_t i = 0; i < v.radii.size(); ++i) {
        const double r = v.radii[i];
        const double env = scale * std::pow(1.0 + r, out.exponent);
        for (std::size_t s = 0; s < v.directions.size(); ++s) {
            const double E = v.values[i][s] - profile.eval(r, v.directions[s]);
            out.fitted_C = std::max(out.fitted_C, std::abs(E) / env);
        }
    }
    return out;
}

} // namespace yamabe
