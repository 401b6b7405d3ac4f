#ifndef OMC_TESTS_QUADRATURE_REF_HPP
#define OMC_TESTS_QUADRATURE_REF_HPP

// Test-side integrators, kept independent of the library's adaptive
// trapezoid so quadrature-based checks exercise a second code path.

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace omc_test {

namespace detail {

inline double simpson_panel(const std::function<double(double)>& f, double a, double fa, double b,
                            double fb, double m, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double fa,
                                   double b, double fb, double m, double fm, double whole,
                                   double tol, double abs_floor, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson_panel(f, a, fa, m, fm, lm, flm);
    const double right = simpson_panel(f, m, fm, b, fb, rm, frm);
    const double err = (left + right - whole) / 15.0;
    const double width_floor =
        64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
    if (std::abs(err) <= tol * std::abs(left + right) + abs_floor || b - a <= width_floor) {
        return left + right + err;
    }
    if (depth > 60) {
        throw std::runtime_error("adaptive_simpson: depth limit");
    }
    return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, tol, abs_floor, depth + 1) +
           adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, tol, abs_floor, depth + 1);
}

}  // namespace detail

/// Adaptive Simpson with relative tolerance and an absolute floor for
/// negligible panels.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double rel_tol = 1e-10, double abs_floor = 1e-300) {
    if (a == b) {
        return 0.0;
    }
    // Seed with a handful of panels so narrow features are not missed.
    const int seed = 16;
    const double h = (b - a) / seed;
    double total = 0.0;
    for (int i = 0; i < seed; ++i) {
        const double x0 = a + i * h;
        const double x1 = (i + 1 == seed) ? b : x0 + h;
        const double m = 0.5 * (x0 + x1);
        const double f0 = f(x0), f1 = f(x1), fm = f(m);
        const double whole = detail::simpson_panel(f, x0, f0, x1, f1, m, fm);
        total += detail::adaptive_simpson_rec(f, x0, f0, x1, f1, m, fm, whole, rel_tol, abs_floor,
                                              0);
    }
    return total;
}

/// Composite Simpson on a uniform grid (n even panels).
inline double simpson_uniform(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2 != 0) {
        ++n;
    }
    const double h = (b - a) / n;
    double sum = f(a) + f(b);
    for (int i = 1; i < n; ++i) {
        sum += f(a + i * h) * (i % 2 == 0 ? 2.0 : 4.0);
    }
    return sum * h / 3.0;
}

}  // namespace omc_test

#endif  // OMC_TESTS_QUADRATURE_REF_HPP
