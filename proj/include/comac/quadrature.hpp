#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace comac {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
};

namespace detail {

inline void adaptive_simpson(const std::function<double(double)>& f, double a,
                             double b, double fa, double fm, double fb,
                             double whole, double tol, int depth,
                             QuadratureResult& out) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        out.value += left + right + delta / 15.0;
        out.error += std::abs(delta) / 15.0;
        return;
    }
    adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, out);
    adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, out);
}

}  // namespace detail

// Adaptive Simpson quadrature on [a, b] to absolute tolerance tol. The
// interval is pre-split into fixed panels so narrow features are never missed
// by the first coarse samples of the adaptive recursion.
inline QuadratureResult integrate(const std::function<double(double)>& f,
                                  double a, double b, double tol = 1e-12,
                                  int max_depth = 48, int panels = 32) {
    if (!(b >= a)) throw std::invalid_argument("integrate: b < a");
    QuadratureResult out;
    if (a == b) return out;
    const double width = (b - a) / panels;
    const double panel_tol = tol / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * width;
        const double hi = p + 1 == panels ? b : lo + width;
        const double flo = f(lo), fhi = f(hi), fm = f(0.5 * (lo + hi));
        const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
        detail::adaptive_simpson(f, lo, hi, flo, fm, fhi, whole, panel_tol,
                                 max_depth, out);
    }
    return out;
}

// Semi-infinite integral of an exponentially decaying integrand. The tail is
// truncated where it is certain to fall below tol: the integrands here are all
// bounded by e^{-(y - a)} times their scale near a.
inline QuadratureResult integrate_tail(const std::function<double(double)>& f,
                                       double a, double tol = 1e-14,
                                       double tail_length = 80.0) {
    return integrate(f, a, a + tail_length, tol);
}

}  // namespace comac
