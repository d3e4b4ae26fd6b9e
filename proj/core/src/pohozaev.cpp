#include "yamabe/pohozaev.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

#include "yamabe/errors.hpp"
#include "yamabe/sphere_moments.hpp"

namespace yamabe {

RadialField bubble_field(const Dimension& dim) {
    return {[dim](double r) { return eval_bubble(dim, r); },
            [dim](double r) { return bubble_dr(dim, r); },
            [dim](double r) { return bubble_d2r(dim, r); },
            "bubble"};
}

RadialField bubble_field_rescaled(const Dimension& dim, double mu) {
    const double amp = std::pow(mu, -0.5 * (dim.n() - 2));
    return {[dim, mu, amp](double r) { return amp * eval_bubble(dim, r / mu); },
            [dim, mu, amp](double r) { return amp / mu * bubble_dr(dim, r / mu); },
            [dim, mu, amp](double r) { return amp / (mu * mu) * bubble_d2r(dim, r / mu); },
            "bubble dilated mu=" + std::to_string(mu)};
}

namespace {

// one angular-polynomial x radial-function term of an integrand
struct ARTerm {
    SphericalPolynomial ang;
    std::function<double(double)> rad;
};
using ARSum = std::vector<ARTerm>;

double poly_scale(const SphericalPolynomial& p) {
    double m = 0.0;
    for (const auto& [a, c] : p.terms()) m = std::max(m, std::abs(to_double(c)));
    return m;
}

void push_term(ARSum& sum, SphericalPolynomial ang, std::function<double(double)> rad,
               double prune_below) {
    if (poly_scale(ang) <= prune_below) return;
    sum.push_back({std::move(ang), std::move(rad)});
}

// composite Simpson over [0, R] with integrand forced to zero at r = 0
double simpson0(const std::function<double(double)>& f, double R, int intervals) {
    if (intervals % 2) ++intervals;
    const double h = R / intervals;
    double s = f(R);
    for (int i = 1; i < intervals; ++i) s += f(i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// pairing \int_0^{R} (sum_1)(sum_2) r^{n-1} dr integrated with exact angular
// moments and a 1-D composite rule
double pair_sums(const ARSum& F, const ARSum& G, int n, double R, int intervals) {
    const double area = sphere_area(n);
    double total = 0.0;
    for (const auto& t1 : F)
        for (const auto& t2 : G) {
            const Rational avg = t1.ang.sphere_inner_average(t2.ang);
            if (avg == 0) continue;
            const double a = to_double(avg);
            auto integrand = [&](double r) {
                return r == 0.0 ? 0.0 : t1.rad(r) * t2.rad(r) * std::pow(r, n - 1);
            };
            total += a * area * simpson0(integrand, R, intervals);
        }
    return total;
}

// boundary pairing at r = R: |S| R^{n-1} avg(sum_1 sum_2)
double pair_boundary(const ARSum& F, const ARSum& G, int n, double R) {
    const double area = sphere_area(n);
    double total = 0.0;
    for (const auto& t1 : F)
        for (const auto& t2 : G) {
            const Rational avg = t1.ang.sphere_inner_average(t2.ang);
            if (avg == 0) continue;
            total += to_double(avg) * area * std::pow(R, n - 1) * t1.rad(R) * t2.rad(R);
        }
    return total;
}

SphericalPolynomial unit_poly(int n) {
    SphericalPolynomial p(n, 0);
    p.add_term(MultiIndex(std::size_t(n), 0), 1);
    return p;
}

// one piece of the composite profile: weight * A(theta) f(r)
struct Piece {
    SphericalPolynomial A;
    int l = 0;
    double weight = 1.0;
    std::function<double(double)> f, fp, fpp;
};

std::vector<Piece> profile_pieces(const ProfileApprox& p) {
    const Dimension& dim = p.dim();
    const int n = dim.n();
    const double c = dim.conformal_constant();
    std::vector<Piece> pieces;
    pieces.push_back({unit_poly(n), 0, 1.0,
                      [dim](double r) { return eval_bubble(dim, r); },
                      [dim](double r) { return bubble_dr(dim, r); },
                      [dim](double r) { return bubble_d2r(dim, r); }});

    struct Solved {
        RadialFunction f, fp, fpp;
    };
    auto wrap = [&](const BvpSolution& s, int l) {
        auto rhs = [dim, l](double r) { return std::pow(r, l) * eval_bubble(dim, r); };
        auto fp = s.first_derivative();
        auto fpp = s.second_derivative(rhs);
        auto sh = std::make_shared<Solved>(Solved{s.profile, std::move(fp), std::move(fpp)});
        return sh;
    };
    auto s2 = wrap(p.f2(), 2);
    pieces.push_back({p.v2_angular(), 2, -c * std::pow(p.M(), -8.0 / (n - 2)),
                      [s2](double r) { return s2->f.eval_extrapolated(r); },
                      [s2](double r) { return s2->fp.eval_extrapolated(r); },
                      [s2](double r) { return s2->fpp.eval_extrapolated(r); }});
    auto s3 = wrap(p.f3(), 3);
    pieces.push_back({p.v3_active(), 3, -c * std::pow(p.M(), -10.0 / (n - 2)),
                      [s3](double r) { return s3->f.eval_extrapolated(r); },
                      [s3](double r) { return s3->fp.eval_extrapolated(r); },
                      [s3](double r) { return s3->fpp.eval_extrapolated(r); }});
    return pieces;
}

std::vector<Piece> radial_pieces(const Dimension& dim, const RadialField& f) {
    return {{unit_poly(dim.n()), 0, 1.0, f.value, f.dr, f.d2r}};
}

// symbolic homogeneous components of b_i and d_ij assembled from the jet
struct OperatorPolys {
    // beta[k][i], k = 2,3 : degree-k polynomials
    std::map<int, std::vector<SphericalPolynomial>> beta;
    // delta[k][i*n+j], k = 2,3,4
    std::map<int, std::vector<SphericalPolynomial>> delta;
    std::map<int, SphericalPolynomial> beta_dot_x;  // degree k+1
    std::map<int, SphericalPolynomial> tr_delta;    // degree k
    std::map<int, SphericalPolynomial> delta_xx;    // degree k+2
    std::map<int, std::vector<SphericalPolynomial>> delta_row_x; // degree k+1
};

SphericalPolynomial mul_x(const SphericalPolynomial& p, int i) {
    SphericalPolynomial out(p.n(), p.degree() + 1);
    for (const auto& [a, c] : p.terms()) {
        MultiIndex b(a);
        b[i] += 1;
        out.add_term(b, c);
    }
    return out;
}

OperatorPolys build_operator_polys(const CurvatureJet& jet) {
    const int n = jet.n();
    OperatorPolys out;
    const auto ric1 = jet.ricci1();
    const auto ric2 = jet.ricci2();

    auto mono2 = [n](int a, int b) {
        MultiIndex m(std::size_t(n), 0);
        m[a] += 1;
        m[b] += 1;
        return m;
    };
    auto mono3 = [n](int a, int b, int c) {
        MultiIndex m(std::size_t(n), 0);
        m[a] += 1;
        m[b] += 1;
        m[c] += 1;
        return m;
    };
    auto mono4 = [n](int a, int b, int c, int d) {
        MultiIndex m(std::size_t(n), 0);
        m[a] += 1;
        m[b] += 1;
        m[c] += 1;
        m[d] += 1;
        return m;
    };

    // beta^2_i = -(1/6)(Ric_{ia,b} + R_{iabp,p}) x^a x^b
    out.beta[2] = std::vector<SphericalPolynomial>(n, SphericalPolynomial(n, 2));
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                double div = 0.0;
                for (int p = 0; p < n; ++p) div += jet.rm1[jet.i5(i, a, b, p, p)];
                const double v = ric1[(std::size_t(i) * n + a) * n + b] + div;
                if (v != 0.0) out.beta[2][i].add_term(mono2(a, b), Rational(v) / -6);
            }

    // beta^3_i = -(1/20 Ric_{ia,bc} - 1/15 (R_{ipad}+R_{iapd}) R_{pbcd} + 1/10 R_{iabp,pc}) x^a x^b x^c
    out.beta[3] = std::vector<SphericalPolynomial>(n, SphericalPolynomial(n, 3));
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c) {
                    double quad = 0.0;
                    for (int p = 0; p < n; ++p)
                        for (int d = 0; d < n; ++d)
                            quad += (jet.rm0[jet.i4(i, p, a, d)] + jet.rm0[jet.i4(i, a, p, d)]) *
                                    jet.rm0[jet.i4(p, b, c, d)];
                    double hdiv = 0.0;
                    for (int p = 0; p < n; ++p) hdiv += jet.rm2[jet.i6(i, a, b, p, p, c)];
                    const double v =
                        ric2[jet.i4(i, a, b, c)] / 20.0 - quad / 15.0 + hdiv / 10.0;
                    if (v != 0.0) out.beta[3][i].add_term(mono3(a, b, c), Rational(-v));
                }

    // delta^2_{ij} = -(1/3) R_{ipqj} x^p x^q
    out.delta[2] = std::vector<SphericalPolynomial>(std::size_t(n) * n, SphericalPolynomial(n, 2));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q) {
                    const double v = jet.rm0[jet.i4(i, p, q, j)];
                    if (v != 0.0)
                        out.delta[2][std::size_t(i) * n + j].add_term(mono2(p, q), Rational(v) / -3);
                }

    // delta^3_{ij} = -(1/6) R_{ipqj,k} x^p x^q x^k
    out.delta[3] = std::vector<SphericalPolynomial>(std::size_t(n) * n, SphericalPolynomial(n, 3));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q)
                    for (int k = 0; k < n; ++k) {
                        const double v = jet.rm1[jet.i5(i, p, q, j, k)];
                        if (v != 0.0)
                            out.delta[3][std::size_t(i) * n + j].add_term(mono3(p, q, k),
                                                                          Rational(v) / -6);
                    }

    // delta^4_{ij} = -(1/20 R_{ipqj,kl} - 1/15 R_{ipqm} R_{jklm}) x^p x^q x^k x^l
    out.delta[4] = std::vector<SphericalPolynomial>(std::size_t(n) * n, SphericalPolynomial(n, 4));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q)
                    for (int k = 0; k < n; ++k)
                        for (int l = 0; l < n; ++l) {
                            double rr = 0.0;
                            for (int m = 0; m < n; ++m)
                                rr += jet.rm0[jet.i4(i, p, q, m)] * jet.rm0[jet.i4(j, k, l, m)];
                            const double v = jet.rm2[jet.i6(i, p, q, j, k, l)] / 20.0 - rr / 15.0;
                            if (v != 0.0)
                                out.delta[4][std::size_t(i) * n + j].add_term(mono4(p, q, k, l),
                                                                              Rational(-v));
                        }

    for (int k : {2, 3}) {
        SphericalPolynomial bx(n, k + 1);
        for (int i = 0; i < n; ++i) bx += mul_x(out.beta[k][i], i);
        out.beta_dot_x.emplace(k, std::move(bx));
    }
    for (int k : {2, 3, 4}) {
        SphericalPolynomial tr(n, k);
        SphericalPolynomial dxx(n, k + 2);
        std::vector<SphericalPolynomial> rows(n, SphericalPolynomial(n, k + 1));
        for (int i = 0; i < n; ++i) {
            tr += out.delta[k][std::size_t(i) * n + i];
            for (int j = 0; j < n; ++j) rows[i] += mul_x(out.delta[k][std::size_t(i) * n + j], j);
            dxx += mul_x(rows[i], i);
        }
        out.tr_delta.emplace(k, std::move(tr));
        out.delta_xx.emplace(k, std::move(dxx));
        out.delta_row_x.emplace(k, std::move(rows));
    }
    return out;
}

// (bbar_i d_i + dbar_ij d_ij) applied to the composite, as angular x radial terms
ARSum apply_rescaled_operator(const CurvatureJet& jet, const std::vector<Piece>& pieces,
                              double M, int n) {
    const OperatorPolys op = build_operator_polys(jet);
    const double sigma = std::pow(M, -2.0 / (n - 2));
    double scale = 0.0;
    for (const auto& [k, polys] : op.delta)
        for (const auto& p : polys) scale = std::max(scale, poly_scale(p));
    const double prune = scale * 1e-13;

    ARSum F;
    for (const auto& pc : pieces) {
        const int l = pc.l;
        const double w = pc.weight;
        auto f = pc.f;
        auto fp = pc.fp;
        auto fpp = pc.fpp;

        // derivative polynomials of the angular factor
        std::vector<SphericalPolynomial> dA;
        for (int i = 0; i < n; ++i) dA.push_back(pc.A.partial(i));

        for (int k : {2, 3}) {
            const double amp = w * std::pow(sigma, k + 1);
            if (l > 0) {
                SphericalPolynomial t1(n, op.beta.at(k)[0].degree() + l - 1);
                for (int i = 0; i < n; ++i) t1 += op.beta.at(k)[i].multiply(dA[i]);
                push_term(F, std::move(t1),
                          [amp, k, f](double r) { return amp * std::pow(r, k - 1) * f(r); },
                          prune);
            }
            push_term(F, op.beta_dot_x.at(k).multiply(pc.A),
                      [amp, k, l, f, fp](double r) {
                          return amp * (std::pow(r, k) * fp(r) - l * std::pow(r, k - 1) * f(r));
                      },
                      prune);
        }
        for (int k : {2, 3, 4}) {
            const double amp = w * std::pow(sigma, k);
            if (l > 1) {
                SphericalPolynomial d1(n, k + l - 2);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        d1 += op.delta.at(k)[std::size_t(i) * n + j].multiply(dA[i].partial(j));
                push_term(F, std::move(d1),
                          [amp, k, f](double r) { return amp * std::pow(r, k - 2) * f(r); },
                          prune);
            }
            if (l > 0) {
                SphericalPolynomial d2(n, k + l);
                for (int i = 0; i < n; ++i)
                    d2 += op.delta_row_x.at(k)[i].multiply(dA[i]);
                d2 *= Rational(2);
                push_term(F, std::move(d2),
                          [amp, k, l, f, fp](double r) {
                              return amp * (std::pow(r, k - 1) * fp(r) -
                                            l * std::pow(r, k - 2) * f(r));
                          },
                          prune);
            }
            // radial Hessian part: B'' theta theta + B' (delta - theta theta)/r
            push_term(F, op.delta_xx.at(k).multiply(pc.A),
                      [amp, k, l, f, fp, fpp](double r) {
                          return amp * (std::pow(r, k) * fpp(r) - 2.0 * l * std::pow(r, k - 1) * fp(r) +
                                        double(l) * (l + 1) * std::pow(r, k - 2) * f(r));
                      },
                      prune);
            push_term(F, op.tr_delta.at(k).multiply(pc.A),
                      [amp, k, l, f, fp](double r) {
                          return amp * (std::pow(r, k - 1) * fp(r) - l * std::pow(r, k - 2) * f(r));
                      },
                      prune);
            push_term(F, op.delta_xx.at(k).multiply(pc.A),
                      [amp, k, l, f, fp](double r) {
                          return -amp * (std::pow(r, k - 1) * fp(r) - l * std::pow(r, k - 2) * f(r));
                      },
                      prune);
        }
    }
    return F;
}

ARSum dilation_sum(const std::vector<Piece>& pieces, int n) {
    ARSum G;
    for (const auto& pc : pieces) {
        const double w = pc.weight;
        auto f = pc.f;
        auto fp = pc.fp;
        G.push_back({pc.A, [w, f, fp, n](double r) {
                         return w * (r * fp(r) + 0.5 * (n - 2) * f(r));
                     }});
    }
    return G;
}

struct VolumeTerms {
    double I1 = 0, I2 = 0;
};

VolumeTerms volume_terms(const PohozaevInput& in, const std::vector<Piece>& pieces,
                         int intervals) {
    const int n = in.dim.n();
    VolumeTerms out;
    if (!in.jet) return out;

    ARSum dil = dilation_sum(pieces, n);
    ARSum opv = apply_rescaled_operator(*in.jet, pieces, in.M, n);
    out.I1 = -pair_sums(opv, dil, n, in.R_prime, intervals);

    const double c = in.dim.conformal_constant();
    for (int l : {2, 3, 4}) {
        SphericalPolynomial Bl = scalar_block(*in.jet, l);
        if (Bl.is_zero()) continue;
        const double weight = -0.5 * c * (l + 2) * std::pow(in.M, -(4.0 + 2 * l) / (n - 2));
        ARSum blocked;
        for (const auto& pc : pieces) {
            auto f = pc.f;
            const double w = pc.weight;
            blocked.push_back({Bl.multiply(pc.A), [w, f, l](double r) {
                                   return w * std::pow(r, l) * f(r);
                               }});
        }
        ARSum plain;
        for (const auto& pc : pieces) {
            auto f = pc.f;
            const double w = pc.weight;
            plain.push_back({pc.A, [w, f](double r) { return w * f(r); }});
        }
        out.I2 += weight * pair_sums(blocked, plain, n, in.R_prime, intervals);
    }
    return out;
}

} // namespace

PohozaevResult eval_pohozaev(const PohozaevInput& input) {
    const Dimension& dim = input.dim;
    const int n = dim.n();
    if (!(input.R_prime > 0.0)) throw PreconditionError("eval_pohozaev: R_prime > 0 required");
    if (!(input.M >= 1.0)) throw PreconditionError("eval_pohozaev: M >= 1 required");

    std::vector<Piece> pieces;
    if (std::holds_alternative<RadialField>(input.field))
        pieces = radial_pieces(dim, std::get<RadialField>(input.field));
    else
        pieces = profile_pieces(*std::get<const ProfileApprox*>(input.field));

    PohozaevResult res;
    const double R = input.R_prime;
    const double area = sphere_area(n);
    const double q = 2.0 * n / (n - 2);

    auto volume_at = [&](int intervals) { return volume_terms(input, pieces, intervals); };
    VolumeTerms vt = volume_at(input.radial_intervals);
    res.I1 = vt.I1;
    res.I2 = vt.I2;

    // I3: boundary scalar-curvature weight
    if (input.jet) {
        const double c = dim.conformal_constant();
        for (int l : {2, 3, 4}) {
            SphericalPolynomial Bl = scalar_block(*input.jet, l);
            if (Bl.is_zero()) continue;
            const double weight = 0.5 * c * R * std::pow(input.M, -(4.0 + 2 * l) / (n - 2));
            ARSum blocked, plain;
            for (const auto& pc : pieces) {
                auto f = pc.f;
                const double w = pc.weight;
                blocked.push_back({Bl.multiply(pc.A), [w, f, l](double r) {
                                       return w * std::pow(r, l) * f(r);
                                   }});
                plain.push_back({pc.A, [w, f](double r) { return w * f(r); }});
            }
            res.I3 += weight * pair_boundary(blocked, plain, n, R);
        }
    }

    // I4: -(n-2)^2/2 R surface integral of v^{2n/(n-2)}
    {
        const Piece& base = pieces[0];
        const double U = base.f(R);
        double avg_pow = std::pow(U, q); // radial exact value
        if (pieces.size() > 1) {
            // expand (U + w)^q with the mean-zero angular remainder w
            SphericalPolynomial wt2 = pieces[1].A, wt3 = pieces[2].A;
            const double a2 = pieces[1].weight * pieces[1].f(R) / U;
            const double a3 = pieces[2].weight * pieces[2].f(R) / U;
            // avg(wtilde^2) and avg(wtilde^3) from exact moments
            const Rational m22 = wt2.sphere_inner_average(wt2);
            const Rational m33 = wt3.sphere_inner_average(wt3);
            const Rational m23 = wt2.sphere_inner_average(wt3);
            const Rational m222 = wt2.multiply(wt2).sphere_inner_average(wt2);
            const Rational m223 = wt2.multiply(wt2).sphere_inner_average(wt3);
            const Rational m233 = wt2.multiply(wt3).sphere_inner_average(wt3);
            const Rational m333 = wt3.multiply(wt3).sphere_inner_average(wt3);
            const double avg_w2 = a2 * a2 * to_double(m22) + 2 * a2 * a3 * to_double(m23) +
                                  a3 * a3 * to_double(m33);
            const double avg_w3 = a2 * a2 * a2 * to_double(m222) +
                                  3 * a2 * a2 * a3 * to_double(m223) +
                                  3 * a2 * a3 * a3 * to_double(m233) +
                                  a3 * a3 * a3 * to_double(m333);
            avg_pow = std::pow(U, q) *
                      (1.0 + 0.5 * q * (q - 1) * avg_w2 + q * (q - 1) * (q - 2) / 6.0 * avg_w3);
            double wmax = 0.0;
            for (const auto& [a, cf] : wt2.terms()) wmax += std::abs(to_double(cf)) * std::abs(a2);
            for (const auto& [a, cf] : wt3.terms()) wmax += std::abs(to_double(cf)) * std::abs(a3);
            res.nonlinear_truncation = std::abs(q * (q - 1) * (q - 2) * (q - 3) / 24.0) *
                                       std::pow(wmax, 4) * std::pow(U, q) * area *
                                       std::pow(R, n - 1) * 0.5 * (n - 2) * (n - 2) * R;
        }
        res.I4 = -0.5 * (n - 2) * (n - 2) * R * area * std::pow(R, n - 1) * avg_pow;
    }

    // I5: boundary energy
    {
        ARSum vsum, dnu;
        for (const auto& pc : pieces) {
            auto f = pc.f;
            auto fp = pc.fp;
            const double w = pc.weight;
            vsum.push_back({pc.A, [w, f](double r) { return w * f(r); }});
            dnu.push_back({pc.A, [w, fp](double r) { return w * fp(r); }});
        }
        const double dn2 = pair_boundary(dnu, dnu, n, R);
        const double vdn = pair_boundary(vsum, dnu, n, R);
        // tangential part of |grad v|^2
        double tang = 0.0;
        for (std::size_t s = 0; s < pieces.size(); ++s)
            for (std::size_t t = 0; t < pieces.size(); ++t) {
                const auto& ps = pieces[s];
                const auto& pt = pieces[t];
                if (ps.l == 0 || pt.l == 0) continue;
                SphericalPolynomial gg(n, ps.l + pt.l - 2);
                for (int i = 0; i < n; ++i) gg += ps.A.partial(i).multiply(pt.A.partial(i));
                Rational avg = gg.sphere_average() -
                               Rational(ps.l) * pt.l * ps.A.sphere_inner_average(pt.A);
                if (avg == 0) continue;
                tang += to_double(avg) * area * std::pow(R, n - 1) * ps.weight * pt.weight *
                        ps.f(R) * pt.f(R) / (R * R);
            }
        const double grad2 = dn2 + tang;
        res.I5 = (dn2 - 0.5 * grad2) * R + 0.5 * (n - 2) * vdn;
    }

    res.defect = res.I1 + res.I2 + res.I3 + res.I4 - res.I5;

    // energy normalization
    {
        ARSum dnu;
        for (const auto& pc : pieces) {
            auto fp = pc.fp;
            const double w = pc.weight;
            dnu.push_back({pc.A, [w, fp](double r) { return w * fp(r); }});
        }
        double energy = pair_sums(dnu, dnu, n, R, input.radial_intervals);
        for (std::size_t s = 0; s < pieces.size(); ++s)
            for (std::size_t t = 0; t < pieces.size(); ++t) {
                const auto& ps = pieces[s];
                const auto& pt = pieces[t];
                if (ps.l == 0 || pt.l == 0) continue;
                SphericalPolynomial gg(n, ps.l + pt.l - 2);
                for (int i = 0; i < n; ++i) gg += ps.A.partial(i).multiply(pt.A.partial(i));
                Rational avg = gg.sphere_average() -
                               Rational(ps.l) * pt.l * ps.A.sphere_inner_average(pt.A);
                if (avg == 0) continue;
                auto fs = ps.f;
                auto ft = pt.f;
                auto integrand = [&](double r) {
                    return r == 0.0 ? 0.0
                                    : fs(r) * ft(r) * std::pow(r, n - 3);
                };
                energy += to_double(avg) * area * ps.weight * pt.weight *
                          simpson0(integrand, R, input.radial_intervals);
            }
        res.u_energy = energy;
        res.defect_normalized = res.defect / std::max(std::abs(energy), std::abs(res.I5));
    }

    // observed refinement order of the volume quadrature
    if (input.jet) {
        VolumeTerms c2 = volume_at(input.radial_intervals / 2);
        VolumeTerms c4 = volume_at(input.radial_intervals / 4);
        const double d1 = std::abs((c4.I1 + c4.I2) - (c2.I1 + c2.I2));
        const double d2 = std::abs((c2.I1 + c2.I2) - (vt.I1 + vt.I2));
        if (d2 > 0.0 && d1 > 0.0) res.refinement_order = std::log2(d1 / d2);
        const double scale = std::max({1.0, std::abs(res.I2), std::abs(res.I5)});
        if (d2 > 1e-6 * scale && res.refinement_order < 1.0) {
            char msg[128];
            std::snprintf(msg, sizeof msg,
                          "eval_pohozaev: volume quadrature not converging, achieved order %.2f",
                          res.refinement_order);
            throw SolveError(msg);
        }
    }
    return res;
}

I2Breakdown i2_breakdown(const PohozaevInput& input, const std::vector<double>& growth_radii) {
    const Dimension& dim = input.dim;
    const int n = dim.n();
    if (!input.jet) {
        I2Breakdown empty;
        empty.total = 0.0;
        return empty;
    }
    const CurvatureJet& jet = *input.jet;
    std::vector<Piece> pieces;
    if (std::holds_alternative<RadialField>(input.field))
        pieces = radial_pieces(dim, std::get<RadialField>(input.field));
    else
        pieces = profile_pieces(*std::get<const ProfileApprox*>(input.field));

    const double c = dim.conformal_constant();
    const double area = sphere_area(n);
    I2Breakdown out;

    const char* names[] = {"U", "f2", "f3"};
    for (int l : {2, 3, 4}) {
        SphericalPolynomial Bl = scalar_block(jet, l);
        if (Bl.is_zero()) continue;
        const double weight = -0.5 * c * (l + 2) * std::pow(input.M, -(4.0 + 2 * l) / (n - 2));
        for (std::size_t a = 0; a < pieces.size(); ++a)
            for (std::size_t b = a; b < pieces.size(); ++b) {
                const Rational avg =
                    Bl.multiply(pieces[a].A).sphere_inner_average(pieces[b].A);
                if (avg == 0) continue;
                const double sym = (a == b) ? 1.0 : 2.0;
                auto fa = pieces[a].f;
                auto fb = pieces[b].f;
                auto integrand = [&](double r) {
                    return r == 0.0 ? 0.0
                                    : fa(r) * fb(r) * std::pow(r, l + n - 1);
                };
                const double moment = simpson0(integrand, input.R_prime, input.radial_intervals);
                I2Term term;
                term.label = std::string("l=") + std::to_string(l) + " x " + names[std::min(a, std::size_t(2))] +
                             "*" + names[std::min(b, std::size_t(2))];
                term.block_degree = l;
                term.prefactor = weight * sym * to_double(avg) * area * pieces[a].weight *
                                 pieces[b].weight;
                term.radial_moment = moment;
                term.value = term.prefactor * moment;
                out.total += term.value;
                out.terms.push_back(std::move(term));
            }
    }

    // closed-form prefactor of the f2 cross term
    {
        auto hess = jet.scalar_hess();
        double sum = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double h = hess[std::size_t(i) * n + j];
                sum += (i == j ? 1.0 : 1.0) * h * h; // sum_{i<j} 2 h_ij^2 + sum_i h_ii^2
            }
        out.f2_cross_prefactor = 2.0 * c * c / (double(n) * (n + 2)) * sum;
    }

    // log-divergence diagnostic: \int_0^R r^2 U f2 r^{n-1} dr on growing balls
    if (pieces.size() > 1) {
        auto f2 = pieces[1].f;
        auto moment_to = [&](double R) {
            auto grid = make_log_grid(1e-4, R, 256);
            auto g = [&](double r) {
                return r * r * eval_bubble(dim, r) * f2(r) * std::pow(r, n - 1);
            };
            double s = 0.0;
            for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
                const double rm = std::sqrt(grid[i] * grid[i + 1]);
                s += (g(grid[i]) + 4.0 * g(rm) + g(grid[i + 1])) / 6.0 * (grid[i + 1] - grid[i]);
            }
            return s;
        };
        for (double R : growth_radii) out.moment_growth.emplace_back(R, moment_to(R));
        out.f2_cross_moment = moment_to(input.R_prime);
        if (out.moment_growth.size() >= 2) {
            const double lo = out.moment_growth.front().second;
            const double hi = out.moment_growth.back().second;
            out.growth_ratio = lo != 0.0 ? hi / lo : 0.0;
        }
    }

    if (jet.flags.W0_zero && jet.flags.gradW0_zero) out.rbar6_estimate = rbar6_formula(jet);
    return out;
}

RateReport weyl_rate_check(const RateSequence& seq, const Dimension& dim) {
    const int n = dim.n();
    if (seq.entries.size() < 3)
        throw PreconditionError("weyl_rate_check: at least 3 entries required");
    RateReport rep;
    double prevM = 0.0;
    for (const auto& e : seq.entries) {
        if (!(e.M > prevM)) throw PreconditionError("weyl_rate_check: M must be strictly increasing");
        if (e.W2 < 0 || e.gradRm2 < 0 || e.hessRm2 < 0)
            throw PreconditionError("weyl_rate_check: norms must be nonnegative");
        prevM = e.M;
        const double combo = e.W2 * std::pow(e.M, -8.0 / (n - 2)) +
                             e.gradRm2 * std::pow(e.M, -12.0 / (n - 2)) +
                             e.hessRm2 * std::pow(e.M, -16.0 / (n - 2)) *
                                 (n == 10 ? std::log(e.M) : 1.0);
        rep.per_entry.push_back(combo * e.M * e.M);
        rep.fitted_C = std::max(rep.fitted_C, rep.per_entry.back());
    }
    std::vector<double> sorted = rep.per_entry;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    for (std::size_t i = 0; i < rep.per_entry.size(); ++i)
        if (median > 0.0 && rep.per_entry[i] > 3.0 * median) rep.flagged.push_back(i);
    return rep;
}

} // namespace yamabe
