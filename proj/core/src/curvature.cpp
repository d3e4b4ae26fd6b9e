#include "yamabe/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "yamabe/errors.hpp"
#include "yamabe/harmonics.hpp"

namespace yamabe {

CurvatureJet::CurvatureJet(int n) : n_(n) {
    if (n < 3) throw PreconditionError("CurvatureJet: n >= 3 required");
    const std::size_t N = std::size_t(n);
    rm0.assign(N * N * N * N, 0.0);
    rm1.assign(N * N * N * N * N, 0.0);
    rm2.assign(N * N * N * N * N * N, 0.0);
    r3.assign(N * N * N, 0.0);
    r4.assign(N * N * N * N, 0.0);
}

std::vector<double> CurvatureJet::ricci0() const {
    std::vector<double> ric(std::size_t(n_) * n_, 0.0);
    for (int b = 0; b < n_; ++b)
        for (int d = 0; d < n_; ++d) {
            double s = 0.0;
            for (int a = 0; a < n_; ++a) s += rm0[i4(a, b, a, d)];
            ric[std::size_t(b) * n_ + d] = s;
        }
    return ric;
}

std::vector<double> CurvatureJet::ricci1() const {
    std::vector<double> ric(std::size_t(n_) * n_ * n_, 0.0);
    for (int b = 0; b < n_; ++b)
        for (int d = 0; d < n_; ++d)
            for (int e = 0; e < n_; ++e) {
                double s = 0.0;
                for (int a = 0; a < n_; ++a) s += rm1[i5(a, b, a, d, e)];
                ric[(std::size_t(b) * n_ + d) * n_ + e] = s;
            }
    return ric;
}

std::vector<double> CurvatureJet::ricci2() const {
    std::vector<double> ric(std::size_t(n_) * n_ * n_ * n_, 0.0);
    for (int b = 0; b < n_; ++b)
        for (int d = 0; d < n_; ++d)
            for (int e = 0; e < n_; ++e)
                for (int f = 0; f < n_; ++f) {
                    double s = 0.0;
                    for (int a = 0; a < n_; ++a) s += rm2[i6(a, b, a, d, e, f)];
                    ric[i4(b, d, e, f)] = s;
                }
    return ric;
}

std::vector<double> CurvatureJet::scalar_grad() const {
    std::vector<double> g(n_, 0.0);
    for (int e = 0; e < n_; ++e) {
        double s = 0.0;
        for (int a = 0; a < n_; ++a)
            for (int b = 0; b < n_; ++b) s += rm1[i5(a, b, a, b, e)];
        g[e] = s;
    }
    return g;
}

std::vector<double> CurvatureJet::scalar_hess() const {
    std::vector<double> h(std::size_t(n_) * n_, 0.0);
    for (int e = 0; e < n_; ++e)
        for (int f = 0; f < n_; ++f) {
            double s = 0.0;
            for (int a = 0; a < n_; ++a)
                for (int b = 0; b < n_; ++b) s += rm2[i6(a, b, a, b, e, f)];
            h[std::size_t(e) * n_ + f] = s;
        }
    return h;
}

double CurvatureJet::scalar_laplacian() const {
    double s = 0.0;
    for (int a = 0; a < n_; ++a)
        for (int b = 0; b < n_; ++b)
            for (int e = 0; e < n_; ++e) s += rm2[i6(a, b, a, b, e, e)];
    return s;
}

// ---------------------------------------------------------------------------
// symmetry passes (each an orthogonal projector, applied in place)
// ---------------------------------------------------------------------------
namespace {

// trailing block size per combination of the first four indices
void antisymmetrize_ab(std::vector<double>& t, int n, std::size_t rest) {
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (a > b) continue;
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    const std::size_t base_ab = (((std::size_t(a) * n + b) * n + c) * n + d) * rest;
                    const std::size_t base_ba = (((std::size_t(b) * n + a) * n + c) * n + d) * rest;
                    for (std::size_t k = 0; k < rest; ++k) {
                        if (a == b) {
                            t[base_ab + k] = 0.0;
                        } else {
                            const double v = 0.5 * (t[base_ab + k] - t[base_ba + k]);
                            t[base_ab + k] = v;
                            t[base_ba + k] = -v;
                        }
                    }
                }
        }
}

void antisymmetrize_cd(std::vector<double>& t, int n, std::size_t rest) {
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = c; d < n; ++d) {
                    const std::size_t base_cd = (((std::size_t(a) * n + b) * n + c) * n + d) * rest;
                    const std::size_t base_dc = (((std::size_t(a) * n + b) * n + d) * n + c) * rest;
                    for (std::size_t k = 0; k < rest; ++k) {
                        if (c == d) {
                            t[base_cd + k] = 0.0;
                        } else {
                            const double v = 0.5 * (t[base_cd + k] - t[base_dc + k]);
                            t[base_cd + k] = v;
                            t[base_dc + k] = -v;
                        }
                    }
                }
}

void pair_symmetrize(std::vector<double>& t, int n, std::size_t rest) {
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    if (std::size_t(a) * n + b > std::size_t(c) * n + d) continue;
                    const std::size_t x = (((std::size_t(a) * n + b) * n + c) * n + d) * rest;
                    const std::size_t y = (((std::size_t(c) * n + d) * n + a) * n + b) * rest;
                    for (std::size_t k = 0; k < rest; ++k) {
                        const double v = 0.5 * (t[x + k] + t[y + k]);
                        t[x + k] = v;
                        t[y + k] = v;
                    }
                }
}

// first Bianchi projector: T -= (1/3)(T_{abcd} + T_{acdb} + T_{adbc})
void bianchi_project(std::vector<double>& t, int n, std::size_t rest) {
    std::vector<double> out(t.size());
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    const std::size_t abcd = (((std::size_t(a) * n + b) * n + c) * n + d) * rest;
                    const std::size_t acdb = (((std::size_t(a) * n + c) * n + d) * n + b) * rest;
                    const std::size_t adbc = (((std::size_t(a) * n + d) * n + b) * n + c) * rest;
                    for (std::size_t k = 0; k < rest; ++k)
                        out[abcd + k] =
                            t[abcd + k] - (t[abcd + k] + t[acdb + k] + t[adbc + k]) / 3.0;
                }
    t.swap(out);
}

void ef_symmetrize(std::vector<double>& t, int n) {
    const std::size_t n4 = std::size_t(n) * n * n * n;
    for (std::size_t q = 0; q < n4; ++q)
        for (int e = 0; e < n; ++e)
            for (int f = e + 1; f < n; ++f) {
                const std::size_t x = (q * n + e) * n + f;
                const std::size_t y = (q * n + f) * n + e;
                const double v = 0.5 * (t[x] + t[y]);
                t[x] = v;
                t[y] = v;
            }
}

void riemann_symmetrize(std::vector<double>& t, int n, std::size_t rest) {
    antisymmetrize_ab(t, n, rest);
    antisymmetrize_cd(t, n, rest);
    pair_symmetrize(t, n, rest);
    bianchi_project(t, n, rest);
}

void symmetrize_full3(std::vector<double>& t, int n) {
    auto idx = [n](int a, int b, int c) { return (std::size_t(a) * n + b) * n + c; };
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b)
            for (int c = b; c < n; ++c) {
                const int per[6][3] = {{a, b, c}, {a, c, b}, {b, a, c},
                                       {b, c, a}, {c, a, b}, {c, b, a}};
                double s = 0.0;
                for (auto& p : per) s += t[idx(p[0], p[1], p[2])];
                s /= 6.0;
                for (auto& p : per) t[idx(p[0], p[1], p[2])] = s;
            }
}

void symmetrize_full4(std::vector<double>& t, int n) {
    auto idx = [n](int a, int b, int c, int d) {
        return ((std::size_t(a) * n + b) * n + c) * n + d;
    };
    int perm[4] = {0, 1, 2, 3};
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b)
            for (int c = b; c < n; ++c)
                for (int d = c; d < n; ++d) {
                    int v[4] = {a, b, c, d};
                    double s = 0.0;
                    int count = 0;
                    std::sort(perm, perm + 4);
                    do {
                        s += t[idx(v[perm[0]], v[perm[1]], v[perm[2]], v[perm[3]])];
                        ++count;
                    } while (std::next_permutation(perm, perm + 4));
                    s /= count;
                    std::sort(perm, perm + 4);
                    do {
                        t[idx(v[perm[0]], v[perm[1]], v[perm[2]], v[perm[3]])] = s;
                    } while (std::next_permutation(perm, perm + 4));
                }
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void gauss_solve(std::vector<std::vector<double>>& A, std::vector<double>& b) {
    const std::size_t m = A.size();
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < m; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (std::abs(A[piv][col]) < 1e-12)
            throw SolveError("jet projection: singular constraint system");
        std::swap(A[col], A[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = 0; r < m; ++r) {
            if (r == col) continue;
            const double f = A[r][col] / A[col][col];
            for (std::size_t c = col; c < m; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t i = 0; i < m; ++i) b[i] /= A[i][i];
}

// constant-curvature pattern with a delta in the derivative slots; lies in the
// symmetry subspace and has nonzero double trace
std::vector<double> trace_basis_rm2(int n) {
    CurvatureJet tmp(n);
    std::vector<double> B(tmp.rm2.size(), 0.0);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int e = 0; e < n; ++e) {
                B[tmp.i6(a, b, a, b, e, e)] += 1.0;
                B[tmp.i6(a, b, b, a, e, e)] -= 1.0;
            }
    return B;
}

struct HypothesisLS {
    std::vector<std::vector<double>> basis; // P_S L^*(e_k)
    std::vector<std::vector<double>> A;     // L P_S L^*
};

// rows: (i<=j) of R_{ikmj,km} - (7/2) R_{,ij}, then one Delta R row
std::vector<double> hypothesis_row_values(const CurvatureJet& j) {
    const int n = j.n();
    auto hess = j.scalar_hess();
    std::vector<double> vals;
    for (int i = 0; i < n; ++i)
        for (int jj = i; jj < n; ++jj) {
            double s = 0.0;
            for (int k = 0; k < n; ++k)
                for (int m = 0; m < n; ++m) s += j.rm2[j.i6(i, k, m, jj, k, m)];
            vals.push_back(s - 3.5 * hess[std::size_t(i) * n + jj]);
        }
    vals.push_back(j.scalar_laplacian());
    return vals;
}

const HypothesisLS& hypothesis_system(int n) {
    static std::mutex mu;
    static std::map<int, HypothesisLS> cache;
    std::scoped_lock lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    HypothesisLS sys;
    CurvatureJet probe(n);
    const std::size_t m = std::size_t(n) * (n + 1) / 2 + 1;
    sys.basis.reserve(m);
    // adjoint images of the unit row functionals
    std::size_t row = 0;
    for (int i = 0; i < n; ++i)
        for (int jj = i; jj < n; ++jj, ++row) {
            std::vector<double> u(probe.rm2.size(), 0.0);
            for (int k = 0; k < n; ++k)
                for (int mm = 0; mm < n; ++mm) u[probe.i6(i, k, mm, jj, k, mm)] += 1.0;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) u[probe.i6(a, b, a, b, i, jj)] -= 3.5;
            riemann_symmetrize(u, n, std::size_t(n) * n);
            ef_symmetrize(u, n);
            sys.basis.push_back(std::move(u));
        }
    {
        std::vector<double> u(probe.rm2.size(), 0.0);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int e = 0; e < n; ++e) u[probe.i6(a, b, a, b, e, e)] += 1.0;
        riemann_symmetrize(u, n, std::size_t(n) * n);
        ef_symmetrize(u, n);
        sys.basis.push_back(std::move(u));
    }

    sys.A.assign(sys.basis.size(), std::vector<double>(sys.basis.size(), 0.0));
    CurvatureJet tmp(n);
    for (std::size_t k = 0; k < sys.basis.size(); ++k) {
        tmp.rm2 = sys.basis[k];
        auto col = hypothesis_row_values(tmp);
        for (std::size_t r = 0; r < col.size(); ++r) sys.A[r][k] = col[r];
    }
    return cache.emplace(n, std::move(sys)).first->second;
}

} // namespace

const ConstraintReport::Entry* ConstraintReport::find(const std::string& name) const {
    for (const auto& e : entries)
        if (e.name == name) return &e;
    return nullptr;
}

ConstraintReport validate_jet(const CurvatureJet& j) {
    const int n = j.n();
    ConstraintReport rep;
    auto push = [&](const std::string& name, double v) {
        rep.entries.push_back({name, v});
        rep.worst = std::max(rep.worst, v);
    };

    auto scan4 = [&](const std::vector<double>& t, std::size_t rest, const std::string& tag) {
        double anti_ab = 0, anti_cd = 0, pair = 0, bianchi = 0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    for (int d = 0; d < n; ++d) {
                        const std::size_t abcd = (((std::size_t(a) * n + b) * n + c) * n + d) * rest;
                        const std::size_t bacd = (((std::size_t(b) * n + a) * n + c) * n + d) * rest;
                        const std::size_t abdc = (((std::size_t(a) * n + b) * n + d) * n + c) * rest;
                        const std::size_t cdab = (((std::size_t(c) * n + d) * n + a) * n + b) * rest;
                        const std::size_t acdb = (((std::size_t(a) * n + c) * n + d) * n + b) * rest;
                        const std::size_t adbc = (((std::size_t(a) * n + d) * n + b) * n + c) * rest;
                        for (std::size_t k = 0; k < rest; ++k) {
                            anti_ab = std::max(anti_ab, std::abs(t[abcd + k] + t[bacd + k]));
                            anti_cd = std::max(anti_cd, std::abs(t[abcd + k] + t[abdc + k]));
                            pair = std::max(pair, std::abs(t[abcd + k] - t[cdab + k]));
                            bianchi = std::max(
                                bianchi, std::abs(t[abcd + k] + t[acdb + k] + t[adbc + k]));
                        }
                    }
        push(tag + "_antisym_ab", anti_ab);
        push(tag + "_antisym_cd", anti_cd);
        push(tag + "_pair_sym", pair);
        push(tag + "_first_bianchi", bianchi);
    };
    scan4(j.rm0, 1, "rm0");
    scan4(j.rm1, std::size_t(n), "rm1");
    scan4(j.rm2, std::size_t(n) * n, "rm2");

    double efv = 0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d)
                    for (int e = 0; e < n; ++e)
                        for (int f = e + 1; f < n; ++f)
                            efv = std::max(efv, std::abs(j.rm2[j.i6(a, b, c, d, e, f)] -
                                                         j.rm2[j.i6(a, b, c, d, f, e)]));
    push("rm2_deriv_sym", efv);

    push("cnc_ricci_zero", max_abs(j.ricci0()));

    // contracted second Bianchi: sum_b Ric_{ab,b} = R_{,a}/2
    auto ric1 = j.ricci1();
    auto grad = j.scalar_grad();
    double c2b = 0;
    for (int a = 0; a < n; ++a) {
        double s = 0.0;
        for (int b = 0; b < n; ++b) s += ric1[(std::size_t(a) * n + b) * n + b];
        c2b = std::max(c2b, std::abs(s - 0.5 * grad[a]));
    }
    push("contracted_second_bianchi", c2b);

    double s3 = 0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                s3 = std::max(s3, std::abs(j.r3[j.i3(a, b, c)] - j.r3[j.i3(b, a, c)]));
                s3 = std::max(s3, std::abs(j.r3[j.i3(a, b, c)] - j.r3[j.i3(a, c, b)]));
            }
    push("r3_symmetric", s3);

    double s4 = 0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    s4 = std::max(s4, std::abs(j.r4[j.i4(a, b, c, d)] - j.r4[j.i4(b, a, c, d)]));
                    s4 = std::max(s4, std::abs(j.r4[j.i4(a, b, c, d)] - j.r4[j.i4(a, c, b, d)]));
                    s4 = std::max(s4, std::abs(j.r4[j.i4(a, b, c, d)] - j.r4[j.i4(a, b, d, c)]));
                }
    push("r4_symmetric", s4);

    push("flag_W0_zero", j.flags.W0_zero ? max_abs(j.rm0) : 0.0);
    push("flag_gradW0_zero", j.flags.gradW0_zero ? max_abs(j.rm1) : 0.0);
    return rep;
}

CurvatureJet project_symmetries(const CurvatureJet& raw) {
    const int n = raw.n();
    CurvatureJet out = raw;

    riemann_symmetrize(out.rm0, n, 1);
    // remove the Ricci part: subtract the Kulkarni-Nomizu product h (x) delta
    // with h chosen so the result is trace-free
    {
        auto ric = out.ricci0();
        double tr = 0.0;
        for (int i = 0; i < n; ++i) tr += ric[std::size_t(i) * n + i];
        std::vector<double> h(ric.size());
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                h[std::size_t(i) * n + k] =
                    (ric[std::size_t(i) * n + k] -
                     (i == k ? tr / (2.0 * (n - 1)) : 0.0)) / (n - 2);
        auto H = [&](int i, int k) { return h[std::size_t(i) * n + k]; };
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    for (int d = 0; d < n; ++d) {
                        double kn = 0.0;
                        if (b == d) kn += H(a, c);
                        if (a == c) kn += H(b, d);
                        if (b == c) kn -= H(a, d);
                        if (a == d) kn -= H(b, c);
                        out.rm0[out.i4(a, b, c, d)] -= kn;
                    }
    }

    riemann_symmetrize(out.rm1, n, std::size_t(n));
    // contracted second Bianchi by one least-squares step inside the subspace
    {
        std::vector<std::vector<double>> basis;
        for (int a = 0; a < n; ++a) {
            std::vector<double> u(out.rm1.size(), 0.0);
            for (int m = 0; m < n; ++m)
                for (int b = 0; b < n; ++b) u[out.i5(m, a, m, b, b)] += 1.0;
            for (int m = 0; m < n; ++m)
                for (int i = 0; i < n; ++i) u[out.i5(m, i, m, i, a)] -= 0.5;
            riemann_symmetrize(u, n, std::size_t(n));
            basis.push_back(std::move(u));
        }
        auto rows = [&](const std::vector<double>& t) {
            CurvatureJet tmp(n);
            tmp.rm1 = t;
            auto ric1 = tmp.ricci1();
            auto grad = tmp.scalar_grad();
            std::vector<double> v(n);
            for (int a = 0; a < n; ++a) {
                double s = 0.0;
                for (int b = 0; b < n; ++b) s += ric1[(std::size_t(a) * n + b) * n + b];
                v[a] = s - 0.5 * grad[a];
            }
            return v;
        };
        std::vector<std::vector<double>> A(n, std::vector<double>(n));
        for (int k = 0; k < n; ++k) {
            auto col = rows(basis[k]);
            for (int r = 0; r < n; ++r) A[r][k] = col[r];
        }
        auto b = rows(out.rm1);
        if (max_abs(b) > 0.0) {
            gauss_solve(A, b);
            for (int k = 0; k < n; ++k)
                for (std::size_t i = 0; i < out.rm1.size(); ++i)
                    out.rm1[i] -= b[k] * basis[k][i];
        }
    }

    riemann_symmetrize(out.rm2, n, std::size_t(n) * n);
    ef_symmetrize(out.rm2, n);
    // pin Delta R(0) = -|W|^2 / 6
    {
        const double w2 = dot(out.rm0, out.rm0);
        const double target = -w2 / 6.0;
        const double current = out.scalar_laplacian();
        if (current != target) {
            auto B = trace_basis_rm2(n);
            CurvatureJet tmp(n);
            tmp.rm2 = B;
            const double lapB = tmp.scalar_laplacian();
            const double c = (current - target) / lapB;
            for (std::size_t i = 0; i < out.rm2.size(); ++i) out.rm2[i] -= c * B[i];
        }
    }

    symmetrize_full3(out.r3, n);
    symmetrize_full4(out.r4, n);
    return out;
}

CurvatureJet project_hypothesis(const CurvatureJet& raw) {
    const int n = raw.n();
    CurvatureJet out = raw;
    std::fill(out.rm0.begin(), out.rm0.end(), 0.0);
    std::fill(out.rm1.begin(), out.rm1.end(), 0.0);
    out.flags.W0_zero = true;
    out.flags.gradW0_zero = true;

    riemann_symmetrize(out.rm2, n, std::size_t(n) * n);
    ef_symmetrize(out.rm2, n);
    const auto& sys = hypothesis_system(n);
    auto b = hypothesis_row_values(out);
    if (max_abs(b) > 0.0) {
        auto A = sys.A;
        gauss_solve(A, b);
        for (std::size_t k = 0; k < sys.basis.size(); ++k) {
            if (b[k] == 0.0) continue;
            const auto& u = sys.basis[k];
            for (std::size_t i = 0; i < out.rm2.size(); ++i) out.rm2[i] -= b[k] * u[i];
        }
    }

    // r3 trace-free so the degree-3 block has no linear harmonic component
    symmetrize_full3(out.r3, n);
    {
        std::vector<double> t(n, 0.0);
        for (int c = 0; c < n; ++c)
            for (int a = 0; a < n; ++a) t[c] += out.r3[out.i3(a, a, c)];
        for (double& x : t) x /= (n + 2);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c) {
                    double s = 0.0;
                    if (a == b) s += t[c];
                    if (b == c) s += t[a];
                    if (c == a) s += t[b];
                    out.r3[out.i3(a, b, c)] -= s;
                }
    }

    // r4 double-trace-free: the fourth-order average vanishes in this class
    symmetrize_full4(out.r4, n);
    {
        double d2 = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) d2 += out.r4[out.i4(a, a, b, b)];
        const double mu = d2 / (double(n) * (n + 2));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    for (int d = 0; d < n; ++d) {
                        double s = 0.0;
                        if (a == b && c == d) s += 1.0;
                        if (a == c && b == d) s += 1.0;
                        if (a == d && b == c) s += 1.0;
                        out.r4[out.i4(a, b, c, d)] -= mu * s;
                    }
    }
    return out;
}

namespace {
struct GaussianRng {
    std::mt19937_64 eng;
    explicit GaussianRng(std::uint64_t seed) : eng(seed) {}
    double uniform() { return (double(eng() >> 11) + 0.5) * 0x1p-53; }
    double operator()() {
        const double u1 = uniform(), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
};
} // namespace

CurvatureJet random_jet(int n, std::uint64_t seed, JetClass cls, double amplitude) {
    GaussianRng g(seed);
    CurvatureJet raw(n);
    auto fill = [&](std::vector<double>& v) {
        for (double& x : v) x = amplitude * g();
    };
    if (cls == JetClass::general) {
        fill(raw.rm0);
        fill(raw.rm1);
    }
    fill(raw.rm2);
    fill(raw.r3);
    fill(raw.r4);
    return cls == JetClass::general ? project_symmetries(raw) : project_hypothesis(raw);
}

WeylNorms weyl_norms(const CurvatureJet& j) {
    return {dot(j.rm0, j.rm0), dot(j.rm1, j.rm1), dot(j.rm2, j.rm2)};
}

SphericalPolynomial scalar_block(const CurvatureJet& j, int l) {
    const int n = j.n();
    SphericalPolynomial p(n, l);
    if (l == 2) {
        auto h = j.scalar_hess();
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                MultiIndex m(std::size_t(n), 0);
                m[a] += 1;
                m[b] += 1;
                p.add_term(m, Rational(h[std::size_t(a) * n + b]) / 2);
            }
    } else if (l == 3) {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c) {
                    MultiIndex m(std::size_t(n), 0);
                    m[a] += 1;
                    m[b] += 1;
                    m[c] += 1;
                    p.add_term(m, Rational(j.r3[j.i3(a, b, c)]) / 6);
                }
    } else if (l == 4) {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    for (int d = 0; d < n; ++d) {
                        MultiIndex m(std::size_t(n), 0);
                        m[a] += 1;
                        m[b] += 1;
                        m[c] += 1;
                        m[d] += 1;
                        p.add_term(m, Rational(j.r4[j.i4(a, b, c, d)]) / 24);
                    }
    } else {
        throw PreconditionError("scalar_block: l in {2,3,4} required");
    }
    return p;
}

BarTilde build_R_bar_tilde(const CurvatureJet& j, int l) {
    if (l != 2 && l != 3) throw PreconditionError("build_R_bar_tilde: l in {2,3} required");
    SphericalPolynomial block = scalar_block(j, l);
    Rational bar = block.sphere_average();
    SphericalPolynomial tilde = block;
    if (l % 2 == 0 && bar != 0) {
        SphericalPolynomial unit(j.n(), 0);
        unit.add_term(MultiIndex(std::size_t(j.n()), 0), bar);
        for (int t = 0; t < l / 2; ++t) unit = unit.times_r2();
        tilde -= unit;
    }
    if (tilde.sphere_average() != 0)
        throw ConsistencyError("build_R_bar_tilde: oscillation part has nonzero mean");
    return {bar, tilde};
}

double rbar2_weyl(const CurvatureJet& j, double cross_check_tol) {
    const int n = j.n();
    const double w2 = dot(j.rm0, j.rm0);
    const double direct = -w2 / (12.0 * n);
    const double ladder = taylor_block_average(1, scalar_block(j, 2)).value;
    const double scale = std::max({1.0, std::abs(direct), std::abs(ladder)});
    if (std::abs(direct - ladder) > cross_check_tol * scale)
        throw ConsistencyError("rbar2_weyl: -|W|^2/(12n) = " + std::to_string(direct) +
                               " disagrees with ladder average " + std::to_string(ladder) +
                               " (broken CNC trace constraints)");
    return direct;
}

namespace {
void require_hypothesis(const CurvatureJet& j, const char* who) {
    if (!j.flags.W0_zero || !j.flags.gradW0_zero)
        throw PreconditionError(std::string(who) + ": hypothesis flags W0_zero and gradW0_zero required");
    if (max_abs(j.rm0) > 1e-12 || max_abs(j.rm1) > 1e-12)
        throw PreconditionError(std::string(who) + ": flags set but rm0/rm1 are not zero");
}
} // namespace

double rbar6_formula(const CurvatureJet& j) {
    require_hypothesis(j, "rbar6_formula");
    const int n = j.n();
    const double K = double(n + 4) * (n + 2) * n;

    double rr = 0.0;
    for (double x : j.rm2) rr += x * x;

    // Ricci second-derivative cross contraction, written with explicit loops
    double cross = 0.0, h2 = 0.0;
    {
        const auto ric2 = j.ricci2();
        auto R2 = [&](int p1, int p2, int p3, int p4) { return ric2[j.i4(p1, p2, p3, p4)]; };
        for (int p1 = 0; p1 < n; ++p1)
            for (int p2 = 0; p2 < n; ++p2)
                for (int p3 = 0; p3 < n; ++p3)
                    for (int p4 = 0; p4 < n; ++p4)
                        cross += R2(p1, p2, p3, p4) * (R2(p1, p2, p3, p4) + R2(p3, p4, p1, p2));
        auto hess = j.scalar_hess();
        for (double x : hess) h2 += x * x;
    }
    return -rr / (40.0 * K) - cross / (8.0 * K) + h2 / (8.0 * K);
}

double delta3R_from_identity(const CurvatureJet& j) {
    require_hypothesis(j, "delta3R_from_identity");
    const int n = j.n();
    // independent contraction path: raw six-index loops, no cached blocks
    double rr = 0.0;
    for (double x : j.rm2) rr += x * x;

    std::vector<double> ric2(std::size_t(n) * n * n * n, 0.0);
    for (int b = 0; b < n; ++b)
        for (int d = 0; d < n; ++d)
            for (int e = 0; e < n; ++e)
                for (int f = 0; f < n; ++f) {
                    double s = 0.0;
                    for (int a = 0; a < n; ++a) s += j.rm2[j.i6(a, b, a, d, e, f)];
                    ric2[((std::size_t(b) * n + d) * n + e) * n + f] = s;
                }
    double cross = 0.0;
    for (int p1 = 0; p1 < n; ++p1)
        for (int p2 = 0; p2 < n; ++p2)
            for (int p3 = 0; p3 < n; ++p3)
                for (int p4 = 0; p4 < n; ++p4) {
                    const double x = ric2[((std::size_t(p1) * n + p2) * n + p3) * n + p4];
                    const double y = ric2[((std::size_t(p3) * n + p4) * n + p1) * n + p2];
                    cross += x * (x + y);
                }
    double h2 = 0.0;
    for (int e = 0; e < n; ++e)
        for (int f = 0; f < n; ++f) {
            double s = 0.0;
            for (int b = 0; b < n; ++b) s += ric2[((std::size_t(b) * n + b) * n + e) * n + f];
            h2 += s * s;
        }
    return 6.0 * h2 - 6.0 * cross - 1.2 * rr;
}

double rbar6_identity_residual(const CurvatureJet& j) {
    const int n = j.n();
    const double K = double(n + 4) * (n + 2) * n;
    return std::abs(48.0 * K * rbar6_formula(j) - delta3R_from_identity(j));
}

HvReport check_hv_inequalities(const CurvatureJet& j, double class_tol) {
    require_hypothesis(j, "check_hv_inequalities");
    const int n = j.n();
    HvReport rep;

    const auto ric2 = j.ricci2();
    auto R2 = [&](int a, int b, int c, int d) { return ric2[j.i4(a, b, c, d)]; };
    for (int p1 = 0; p1 < n; ++p1)
        for (int p2 = 0; p2 < n; ++p2)
            for (int p3 = 0; p3 < n; ++p3)
                for (int p4 = 0; p4 < n; ++p4)
                    rep.cross_lhs += R2(p1, p2, p3, p4) * (R2(p1, p2, p3, p4) + R2(p3, p4, p1, p2));

    auto hess = j.scalar_hess();
    double h2 = 0.0;
    for (double x : hess) h2 += x * x;
    rep.cross_rhs = 6.0 / (n - 2) * h2;
    rep.cross_margin = rep.cross_lhs - rep.cross_rhs;
    rep.cross_holds = rep.cross_margin >= -1e-12 * std::max(1.0, rep.cross_rhs);

    for (double x : j.rm2) rep.norm_lhs += x * x;
    rep.norm_rhs = 49.0 / (4.0 * n * n) * h2;
    rep.norm_margin = rep.norm_lhs - rep.norm_rhs;
    rep.norm_holds = rep.norm_margin >= -1e-12 * std::max(1.0, rep.norm_rhs);

    const double alpha = 3.5 / (n * n);
    rep.square_route = rep.norm_lhs + (alpha * alpha * n * n - 7.0 * alpha) * h2;

    for (int i = 0; i < n; ++i)
        for (int jj = 0; jj < n; ++jj) {
            double s = 0.0;
            for (int k = 0; k < n; ++k)
                for (int m = 0; m < n; ++m) s += j.rm2[j.i6(i, k, m, jj, k, m)];
            rep.contraction_identity_violation = std::max(
                rep.contraction_identity_violation,
                std::abs(s - 3.5 * hess[std::size_t(i) * n + jj]));
        }
    rep.in_hypothesis_class = rep.contraction_identity_violation <= class_tol;
    return rep;
}

GateResult dimension_gate(int n, const Rational& eps) {
    if (n < 10) throw PreconditionError("dimension_gate: n >= 10 required");
    GateResult out;
    Rational K = Rational(8) * (n + 4) * (n + 2) * n;
    out.lhs = (rational(n - 8, n - 2) + eps - rational(49, 20 * n * n)) / K;
    Rational cn = rational(n - 2, 4 * (n - 1));
    out.rhs = cn / (Rational(2) * n * (n + 2)) / (Rational(6) * (n - 4));
    out.margin = out.rhs - out.lhs;
    out.holds = (out.lhs <= out.rhs);
    out.lhs_value = to_double(out.lhs);
    out.rhs_value = to_double(out.rhs);
    out.margin_value = to_double(out.margin);
    return out;
}

// ---------------------------------------------------------------------------
// JSON io
// ---------------------------------------------------------------------------
namespace {

nlohmann::json to_nested(const std::vector<double>& flat, const std::vector<int>& dims,
                         std::size_t& pos, std::size_t level) {
    nlohmann::json arr = nlohmann::json::array();
    if (level + 1 == dims.size()) {
        for (int i = 0; i < dims[level]; ++i) arr.push_back(flat[pos++]);
        return arr;
    }
    for (int i = 0; i < dims[level]; ++i) arr.push_back(to_nested(flat, dims, pos, level + 1));
    return arr;
}

void from_nested(const nlohmann::json& arr, std::vector<double>& flat) {
    if (arr.is_number()) {
        flat.push_back(arr.get<double>());
        return;
    }
    for (const auto& el : arr) from_nested(el, flat);
}

} // namespace

std::string CurvatureJet::to_json() const {
    nlohmann::json j;
    j["n"] = n_;
    j["hypothesis_flags"] = {{"W0_zero", flags.W0_zero}, {"gradW0_zero", flags.gradW0_zero}};
    std::size_t pos = 0;
    j["rm0"] = to_nested(rm0, std::vector<int>(4, n_), pos, 0);
    pos = 0;
    j["rm1"] = to_nested(rm1, std::vector<int>(5, n_), pos, 0);
    pos = 0;
    j["rm2"] = to_nested(rm2, std::vector<int>(6, n_), pos, 0);
    pos = 0;
    j["r3"] = to_nested(r3, std::vector<int>(3, n_), pos, 0);
    pos = 0;
    j["r4"] = to_nested(r4, std::vector<int>(4, n_), pos, 0);
    return j.dump();
}

CurvatureJet CurvatureJet::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    CurvatureJet jet(j.at("n").get<int>());
    jet.flags.W0_zero = j.at("hypothesis_flags").at("W0_zero").get<bool>();
    jet.flags.gradW0_zero = j.at("hypothesis_flags").at("gradW0_zero").get<bool>();
    auto read = [&](const char* key, std::vector<double>& dst, std::size_t expect) {
        std::vector<double> flat;
        flat.reserve(expect);
        from_nested(j.at(key), flat);
        if (flat.size() != expect)
            throw ConfigError(std::string("jet JSON: field ") + key + " has wrong shape");
        dst = std::move(flat);
    };
    const std::size_t N = std::size_t(jet.n());
    read("rm0", jet.rm0, N * N * N * N);
    read("rm1", jet.rm1, N * N * N * N * N);
    read("rm2", jet.rm2, N * N * N * N * N * N);
    read("r3", jet.r3, N * N * N);
    read("r4", jet.r4, N * N * N * N);
    return jet;
}

void CurvatureJet::save_json(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for write: " + path);
    out << to_json();
}

CurvatureJet CurvatureJet::load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open for read: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

} // namespace yamabe
