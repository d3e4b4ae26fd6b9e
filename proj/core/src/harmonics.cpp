#include "yamabe/harmonics.hpp"

#include <map>

#include "yamabe/errors.hpp"
#include "yamabe/sphere_moments.hpp"

namespace yamabe {

namespace {

// decompose_harmonic worker returning components keyed by degree
std::map<int, SphericalPolynomial> decompose_by_degree(const SphericalPolynomial& P) {
    const int n = P.n();
    const int l = P.degree();
    std::map<int, SphericalPolynomial> out;
    if (P.is_zero()) return out;
    if (l <= 1) {
        out.emplace(l, P);
        return out;
    }
    // Delta(|x|^{2j} h_m) = 2j(2m + n + 2j - 2) |x|^{2(j-1)} h_m for harmonic h_m,
    // so the sub-decomposition of Delta P recovers every component below the top.
    auto sub = decompose_by_degree(P.laplacian());
    SphericalPolynomial top = P;
    for (auto& [m, g] : sub) {
        const int j = (l - m) / 2;
        Rational cj = Rational(2 * j) * Rational(2 * m + n + 2 * j - 2);
        SphericalPolynomial h = g;
        h *= Rational(1) / cj;
        SphericalPolynomial lifted = h;
        for (int t = 0; t < j; ++t) lifted = lifted.times_r2();
        top -= lifted;
        out.emplace(m, std::move(h));
    }
    if (!top.is_zero()) out.emplace(l, std::move(top));
    return out;
}

} // namespace

std::vector<HarmonicComponent> decompose_harmonic(const SphericalPolynomial& P, int max_degree) {
    if (P.degree() > max_degree)
        throw PreconditionError("decompose_harmonic: degree " + std::to_string(P.degree()) +
                                " exceeds supported cap " + std::to_string(max_degree));
    auto by_degree = decompose_by_degree(P);
    std::vector<HarmonicComponent> comps;
    for (auto it = by_degree.rbegin(); it != by_degree.rend(); ++it) {
        if (!it->second.laplacian().is_zero())
            throw ConsistencyError("decompose_harmonic: component of degree " +
                                   std::to_string(it->first) + " is not harmonic");
        comps.emplace_back(it->first, it->second);
    }
    return comps;
}

SphericalPolynomial reconstruct_from_harmonics(const std::vector<HarmonicComponent>& comps,
                                               int n, int l) {
    SphericalPolynomial sum(n, l);
    for (const auto& c : comps) {
        const int j = (l - c.degree) / 2;
        if (2 * j + c.degree != l)
            throw PreconditionError("reconstruct_from_harmonics: degree parity mismatch");
        SphericalPolynomial lifted = c.polynomial;
        for (int t = 0; t < j; ++t) lifted = lifted.times_r2();
        sum += lifted;
    }
    return sum;
}

SphericalPolynomial harmonic_top_component(const SphericalPolynomial& P) {
    for (const auto& c : decompose_harmonic(P))
        if (c.degree == P.degree()) return c.polynomial;
    return SphericalPolynomial(P.n(), P.degree());
}

BlockAverage taylor_block_average(int k, const SphericalPolynomial& block) {
    if (k < 1) throw PreconditionError("taylor_block_average: k >= 1 required");
    if (block.degree() != 2 * k)
        throw PreconditionError("taylor_block_average: block degree must equal 2k");
    const int n = block.n();

    BlockAverage out;
    out.moment_path = block.sphere_average();

    SphericalPolynomial iter = block;
    for (int i = 0; i < k; ++i) iter = iter.laplacian();
    Rational delta_k = iter.coefficient(MultiIndex(std::size_t(n), 0));
    out.ladder_path = delta_k / ladder_denominator(n, k);

    if (out.moment_path != out.ladder_path)
        throw ConsistencyError("taylor_block_average: moment path " + to_string(out.moment_path) +
                               " != ladder path " + to_string(out.ladder_path));
    out.value = to_double(out.moment_path);
    return out;
}

OddMomentCheck verify_odd_moment_identity(int k, const SphericalPolynomial& block, int j) {
    if (k < 1) throw PreconditionError("verify_odd_moment_identity: k >= 1 required");
    if (block.degree() != 2 * k + 1)
        throw PreconditionError("verify_odd_moment_identity: block degree must equal 2k+1");
    const int n = block.n();
    if (j < 0 || j >= n) throw PreconditionError("verify_odd_moment_identity: bad index j");

    Rational fact = 1;
    for (int i = 2; i <= 2 * k + 1; ++i) fact *= i;

    SphericalPolynomial xj(n, 1);
    MultiIndex e(std::size_t(n), 0);
    e[j] = 1;
    xj.add_term(e, 1);

    OddMomentCheck out;
    out.lhs_of_area = fact * block.sphere_inner_average(xj);

    SphericalPolynomial iter = block;
    for (int i = 0; i < k; ++i) iter = iter.laplacian();
    // iter is degree 1; its x_j coefficient is d_j(Delta^k block)(0)
    out.rhs_of_area = odd_moment_constant_of_area(n, k) * iter.coefficient(e);
    out.pass = (out.lhs_of_area == out.rhs_of_area);
    return out;
}

SquareExpansion expand_square_r2_block(const std::vector<std::vector<double>>& hessian) {
    const int n = int(hessian.size());
    for (const auto& row : hessian)
        if (int(row.size()) != n)
            throw PreconditionError("expand_square_r2_block: hessian must be square");

    // exact binary->rational conversion keeps the identity exact for any input
    std::vector<std::vector<Rational>> h(n, std::vector<Rational>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            h[i][j] = Rational(hessian[i][j]);
            if (hessian[i][j] != hessian[j][i])
                throw PreconditionError("expand_square_r2_block: hessian must be symmetric");
        }

    SphericalPolynomial block(n, 2);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            MultiIndex a(std::size_t(n), 0);
            a[i] += 1;
            a[j] += 1;
            block.add_term(a, i == j ? h[i][i] / 2 : h[i][j]);
        }
    }

    SquareExpansion out;
    out.average = block.multiply(block).sphere_average();

    Rational sum_sq_off = 0, sum_sq_diag = 0, trace = 0;
    for (int i = 0; i < n; ++i) {
        trace += h[i][i];
        sum_sq_diag += h[i][i] * h[i][i];
        for (int j = i + 1; j < n; ++j) sum_sq_off += h[i][j] * h[i][j];
    }
    out.main_term = (2 * sum_sq_off + sum_sq_diag) / (Rational(2) * n * (n + 2));
    out.trace_term = trace * trace / (Rational(4) * n * (n + 2));
    out.consistent = (out.average == out.main_term + out.trace_term);
    if (!out.consistent)
        throw ConsistencyError("expand_square_r2_block: moment contraction disagrees with closed form");
    return out;
}

} // namespace yamabe
