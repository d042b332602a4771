#pragma once

// Reference computations used by the tests. Nothing here calls into the
// library: quadrature rules, kernels and profile integrals are re-derived so a
// shared mistake cannot cancel out.

#include <functional>
#include <utility>
#include <vector>

namespace oracle {

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
std::pair<std::vector<double>, std::vector<double>> legendre(int n);

/// ∫_a^b f with `panels` uniform panels of an n-point Gauss rule.
double composite(const std::function<double(double)>& f, double a, double b, int panels, int n = 8);

/// ∫_0^b f for f with an integrable endpoint singularity at 0: geometric
/// panels [b·2^{-k-1}, b·2^{-k}] down to b·2^{-levels}, n-point Gauss on each.
double graded(const std::function<double(double)>& f, double b, int levels = 60, int n = 10);

/// ∬_{R×R} (u(x)-u(y))² |x-y|^{-1-2s} dx dy for the tent u = (1-|x|)⁺,
/// through D(z) = ∫(u(x+z)-u(x))² dx. `resolution` panels per unit length.
double tent_form_1d(double s, int resolution);

/// Same form in 2D for u = (1-|x|)⁺(1-|y|)⁺, polar coordinates in z.
double tent_form_2d(double s, int resolution);

/// κ(x) on (a, b) in 1D: ∫_{|y-x| outside} |x-y|^{-1-2s}, closed form.
double kappa_interval(double a, double b, double x, double s);

/// κ(x) on a rectangle by brute force: polar integral of r^{-1-2s} beyond the
/// distance to the boundary along each direction.
double kappa_rectangle(double ax, double bx, double ay, double by, double x, double y, double s, int angles);

/// Step profile helper: values[j] on [breaks[j], breaks[j+1]).
struct Step {
  std::vector<double> breaks;
  std::vector<double> values;
  double operator()(double s) const;
  double primitive(double r) const;  ///< ∫_0^r
};

/// v*(τ) = K ∫_τ^V r^{-2+2/n} F(r) dr by graded composite quadrature.
double comparison_quadrature(const Step& f, int n, double tau);

/// ω_n from the high-precision table (n = 1..6).
double omega_table(int n);

}  // namespace oracle
