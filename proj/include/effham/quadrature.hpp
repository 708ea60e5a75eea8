#ifndef EFFHAM_QUADRATURE_HPP
#define EFFHAM_QUADRATURE_HPP

#include <cmath>
#include <complex>
#include <stdexcept>

namespace effham {
namespace quad {

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1].
constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
void gk15(const F& f, double a, double b, std::complex<double>& result, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    std::complex<double> res_g = 0.0, res_k = 0.0;
    const std::complex<double> f_c = f(c);
    res_k = wgk[7] * f_c;
    res_g = wg[3] * f_c;
    for (int j = 0; j < 7; ++j) {
        const std::complex<double> fsum = f(c - h * xgk[j]) + f(c + h * xgk[j]);
        res_k += wgk[j] * fsum;
        if (j % 2 == 1) res_g += wg[j / 2] * fsum;
    }
    result = res_k * h;
    err = std::abs((res_k - res_g) * h);
}

template <typename F>
std::complex<double> adapt(const F& f, double a, double b, double tol, int depth) {
    std::complex<double> whole;
    double err;
    gk15(f, a, b, whole, err);
    if (err <= tol || depth > 48) {
        if (depth > 48 && err > 64 * tol)
            throw std::runtime_error("adaptive quadrature failed to converge");
        return whole;
    }
    const double c = 0.5 * (a + b);
    return adapt(f, a, c, 0.5 * tol, depth + 1) + adapt(f, c, b, 0.5 * tol, depth + 1);
}

}  // namespace detail

// Adaptive Gauss-Kronrod integration of a complex-valued function on [a, b].
// Tolerance is relative to the first whole-interval estimate, with abs_floor
// as an absolute fallback near zero.
template <typename F>
std::complex<double> integrate(const F& f, double a, double b, double rel_tol = 1e-10,
                               double abs_floor = 1e-14) {
    if (a == b) return 0.0;
    std::complex<double> first;
    double err;
    detail::gk15(f, a, b, first, err);
    const double tol = std::max(abs_floor, rel_tol * std::abs(first));
    if (err <= tol) return first;
    const double c = 0.5 * (a + b);
    return detail::adapt(f, a, c, 0.5 * tol, 1) + detail::adapt(f, c, b, 0.5 * tol, 1);
}

// Composite trapezoid weight on a uniform grid 0..n (integral over [0, n*h]).
inline double trapezoid_weight(long i, long n, double h) {
    if (n <= 0) return 0.0;
    return (i == 0 || i == n) ? 0.5 * h : h;
}

}  // namespace quad
}  // namespace effham

#endif
