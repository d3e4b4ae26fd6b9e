#include "yamabe/cnc.hpp"

#include <cmath>

#include "yamabe/errors.hpp"

namespace yamabe {

MetricExpansion cnc_metric_expansion(const CurvatureJet& jet, std::span<const double> x,
                                     int order) {
    const int n = jet.n();
    if (int(x.size()) != n) throw PreconditionError("cnc_metric_expansion: point size != n");
    if (order < 2 || order > 4)
        throw PreconditionError("cnc_metric_expansion: order in {2,3,4} supported");

    MetricExpansion out;
    out.g.assign(std::size_t(n) * n, 0.0);
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    out.truncation_warning = std::sqrt(r2) > 0.5;

    for (int p = 0; p < n; ++p) out.g[std::size_t(p) * n + p] = 1.0;

    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double xij = x[i] * x[j];
                    if (xij == 0.0) continue;
                    acc += jet.rm0[jet.i4(p, i, j, q)] / 3.0 * xij;
                    if (order >= 3)
                        for (int k = 0; k < n; ++k)
                            acc += jet.rm1[jet.i5(p, i, j, q, k)] / 6.0 * xij * x[k];
                    if (order >= 4)
                        for (int k = 0; k < n; ++k) {
                            if (x[k] == 0.0) continue;
                            for (int l = 0; l < n; ++l) {
                                if (x[l] == 0.0) continue;
                                double quad = jet.rm2[jet.i6(p, i, j, q, k, l)] / 20.0;
                                double rr = 0.0;
                                for (int m = 0; m < n; ++m)
                                    rr += jet.rm0[jet.i4(p, i, j, m)] * jet.rm0[jet.i4(q, k, l, m)];
                                quad += 2.0 / 45.0 * rr;
                                acc += quad * xij * x[k] * x[l];
                            }
                        }
                }
            out.g[std::size_t(p) * n + q] += acc;
        }
    return out;
}

void CncDirectionCoeffs::eval(double s, std::vector<double>& b, std::vector<double>& d) const {
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
    b.assign(n, 0.0);
    d.assign(std::size_t(n) * n, 0.0);
    for (int i = 0; i < n; ++i) b[i] = s2 * b2[i] + s3 * b3[i];
    for (std::size_t ij = 0; ij < d.size(); ++ij) d[ij] = s2 * d2[ij] + s3 * d3[ij] + s4 * d4[ij];
}

CncDirectionCoeffs cnc_direction_coeffs(const CurvatureJet& jet, std::span<const double> theta) {
    const int n = jet.n();
    if (int(theta.size()) != n) throw PreconditionError("cnc_direction_coeffs: direction size != n");

    CncDirectionCoeffs out;
    out.n = n;
    out.b2.assign(n, 0.0);
    out.b3.assign(n, 0.0);
    out.d2.assign(std::size_t(n) * n, 0.0);
    out.d3.assign(std::size_t(n) * n, 0.0);
    out.d4.assign(std::size_t(n) * n, 0.0);

    const auto ric1 = jet.ricci1();
    const auto ric2 = jet.ricci2();

    // b quadratic: -(1/6) (Ric_{ia,b} + R_{iabp,p}) theta^a theta^b
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                const double ta = theta[a] * theta[b];
                if (ta == 0.0) continue;
                double div = 0.0;
                for (int p = 0; p < n; ++p) div += jet.rm1[jet.i5(i, a, b, p, p)];
                acc += (ric1[(std::size_t(i) * n + a) * n + b] + div) * ta;
            }
        out.b2[i] = -acc / 6.0;
    }

    // contractions against theta reused by the cubic terms
    std::vector<double> K(std::size_t(n) * n, 0.0);  // K_{pd} = R_{pbcd} t^b t^c
    std::vector<double> E1(std::size_t(n) * n * n, 0.0); // E1_{ipd} = R_{ipad} t^a
    std::vector<double> E2(std::size_t(n) * n * n, 0.0); // E2_{ipd} = R_{iapd} t^a
    for (int p = 0; p < n; ++p)
        for (int d = 0; d < n; ++d) {
            double acc = 0.0;
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c) acc += jet.rm0[jet.i4(p, b, c, d)] * theta[b] * theta[c];
            K[std::size_t(p) * n + d] = acc;
        }
    for (int i = 0; i < n; ++i)
        for (int p = 0; p < n; ++p)
            for (int d = 0; d < n; ++d) {
                double a1 = 0.0, a2 = 0.0;
                for (int a = 0; a < n; ++a) {
                    a1 += jet.rm0[jet.i4(i, p, a, d)] * theta[a];
                    a2 += jet.rm0[jet.i4(i, a, p, d)] * theta[a];
                }
                E1[(std::size_t(i) * n + p) * n + d] = a1;
                E2[(std::size_t(i) * n + p) * n + d] = a2;
            }

    // b cubic: -(1/20 Ric_{ia,bc} - 1/15 R_{ipad}R_{pbcd} - 1/15 R_{iapd}R_{pbcd}
    //           + 1/10 R_{iabp,pc}) theta^a theta^b theta^c
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c) {
                    const double t3 = theta[a] * theta[b] * theta[c];
                    if (t3 == 0.0) continue;
                    double term = ric2[jet.i4(i, a, b, c)] / 20.0;
                    double hdiv = 0.0;
                    for (int p = 0; p < n; ++p) hdiv += jet.rm2[jet.i6(i, a, b, p, p, c)];
                    term += hdiv / 10.0;
                    acc += term * t3;
                }
        double quad = 0.0;
        for (int p = 0; p < n; ++p)
            for (int d = 0; d < n; ++d)
                quad += (E1[(std::size_t(i) * n + p) * n + d] + E2[(std::size_t(i) * n + p) * n + d]) *
                        K[std::size_t(p) * n + d];
        out.b3[i] = -(acc - quad / 15.0);
    }

    // d quadratic/cubic/quartic
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double q2 = 0.0, q3 = 0.0, q4 = 0.0;
            for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q) {
                    const double t2 = theta[p] * theta[q];
                    if (t2 == 0.0) continue;
                    q2 += jet.rm0[jet.i4(i, p, q, j)] * t2;
                    for (int k = 0; k < n; ++k) {
                        const double t3 = t2 * theta[k];
                        if (t3 == 0.0) continue;
                        q3 += jet.rm1[jet.i5(i, p, q, j, k)] * t3;
                        for (int l = 0; l < n; ++l)
                            q4 += jet.rm2[jet.i6(i, p, q, j, k, l)] * t3 * theta[l];
                    }
                }
            double rr = 0.0; // sum_m K'_{im} K'_{jm} with K' = K by pair symmetry
            for (int m = 0; m < n; ++m)
                rr += K[std::size_t(i) * n + m] * K[std::size_t(j) * n + m];
            out.d2[std::size_t(i) * n + j] = -q2 / 3.0;
            out.d3[std::size_t(i) * n + j] = -q3 / 6.0;
            out.d4[std::size_t(i) * n + j] = -(q4 / 20.0 - rr / 15.0);
        }
    return out;
}

OperatorCoeffs cnc_operator_coeffs(const CurvatureJet& jet, std::span<const double> x) {
    const int n = jet.n();
    if (int(x.size()) != n) throw PreconditionError("cnc_operator_coeffs: point size != n");
    double r = 0.0;
    for (double xi : x) r += xi * xi;
    r = std::sqrt(r);

    OperatorCoeffs out;
    out.truncation_warning = r > 0.5;
    if (r == 0.0) {
        out.b.assign(n, 0.0);
        out.d.assign(std::size_t(n) * n, 0.0);
        return out;
    }
    std::vector<double> theta(n);
    for (int i = 0; i < n; ++i) theta[i] = x[i] / r;
    auto coeffs = cnc_direction_coeffs(jet, theta);
    coeffs.eval(r, out.b, out.d);
    return out;
}

RescaledCnc::RescaledCnc(const CurvatureJet& jet, std::span<const double> theta, double M)
    : coeffs_(cnc_direction_coeffs(jet, theta)),
      scale_(std::pow(M, -2.0 / (jet.n() - 2))) {
    if (!(M >= 1.0)) throw PreconditionError("RescaledCnc: M >= 1 required");
}

void RescaledCnc::eval(double r, std::vector<double>& bbar, std::vector<double>& dbar) const {
    coeffs_.eval(scale_ * r, bbar, dbar);
    for (double& v : bbar) v *= scale_;
}

} // namespace yamabe
