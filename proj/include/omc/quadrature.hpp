#ifndef OMC_QUADRATURE_HPP
#define OMC_QUADRATURE_HPP

#include <functional>

namespace omc {

struct QuadratureOptions {
    double rel_tol = 1e-8;     // per-panel relative acceptance
    double abs_floor = 1e-30;  // panels below this absolute estimate are accepted
    int max_depth = 48;        // bisection depth before giving up
};

/// Adaptive interval-halving trapezoid rule on [a, b].
///
/// Each panel is accepted once the halved estimate agrees with the whole-panel
/// estimate to rel_tol, or once its magnitude falls under abs_floor. Throws
/// NumericalError with diagnostics if a panel cannot converge within max_depth
/// halvings.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          const QuadratureOptions& opts = {});

/// Fixed 5-point Gauss-Legendre rule on [a, b]. Intended for averaging smooth
/// integrands over small cells; no error control.
double gauss5(const std::function<double(double)>& f, double a, double b);

}  // namespace omc

#endif  // OMC_QUADRATURE_HPP
