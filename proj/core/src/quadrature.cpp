#include "yamabe/quadrature.hpp"

#include <cmath>
#include <string>

#include "yamabe/errors.hpp"

namespace yamabe {

namespace {

// 15-point Kronrod nodes/weights on [-1,1] with the embedded 7-point Gauss rule
const double kron_x[15] = {
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.0,
    0.207784955007898467600689403773245,  0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,  0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,  0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};
const double kron_w[15] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};
const double gauss_w[7] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
    0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};

struct Panel {
    double value;
    double error;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double k = 0.0, g = 0.0;
    for (int i = 0; i < 15; ++i) {
        const double fx = f(c + h * kron_x[i]);
        k += kron_w[i] * fx;
        if (i % 2 == 1) g += gauss_w[i / 2] * fx;
    }
    k *= h;
    g *= h;
    const double diff = std::abs(k - g);
    return {k, std::pow(200.0 * diff, 1.5) < diff ? std::pow(200.0 * diff, 1.5) : diff};
}

void refine(const std::function<double(double)>& f, double a, double b, const Panel& p,
            double tol_per_width, long max_nodes, long& nodes, double& sum, double& err) {
    const double width = b - a;
    if (p.error <= tol_per_width * width || width < 1e-15 * (std::abs(a) + std::abs(b) + 1.0)) {
        sum += p.value;
        err += p.error;
        return;
    }
    if (nodes + 30 > max_nodes)
        throw SolveError("adaptive_gauss_kronrod: node cap " + std::to_string(max_nodes) +
                         " reached, panel error " + std::to_string(p.error));
    const double m = 0.5 * (a + b);
    Panel left = gk15(f, a, m);
    Panel right = gk15(f, m, b);
    nodes += 30;
    refine(f, a, m, left, tol_per_width, max_nodes, nodes, sum, err);
    refine(f, m, b, right, tol_per_width, max_nodes, nodes, sum, err);
}

} // namespace

QuadratureResult adaptive_gauss_kronrod(const std::function<double(double)>& f,
                                        double a, double b,
                                        double rel_tol, double abs_tol, long max_nodes) {
    QuadratureResult out;
    Panel whole = gk15(f, a, b);
    out.nodes_used = 15;
    const double scale = std::max(std::abs(whole.value), abs_tol);
    const double tol_per_width = std::max(rel_tol * scale, abs_tol) / (b - a);
    double sum = 0.0, err = 0.0;
    refine(f, a, b, whole, tol_per_width, max_nodes, out.nodes_used, sum, err);
    out.value = sum;
    out.error_estimate = err;
    return out;
}

double composite_simpson(const std::function<double(double)>& f, double a, double b, int intervals) {
    if (intervals < 2) throw PreconditionError("composite_simpson: need >= 2 intervals");
    if (intervals % 2) ++intervals;
    const double h = (b - a) / intervals;
    double sum = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

} // namespace yamabe
