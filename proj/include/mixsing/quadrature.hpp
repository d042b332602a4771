#pragma once

#include <Eigen/Dense>

namespace mixsing::quad {

struct Rule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// n-point Gauss-Legendre rule on [lo, hi].
Rule gauss_legendre(int n, double lo = -1.0, double hi = 1.0);

/// n-point Gauss rule for ∫_0^1 u^alpha p(u) du, alpha > -1 (Golub-Welsch on
/// the Jacobi recurrence). The weight u^alpha is absorbed into the weights.
Rule gauss_jacobi_unit(int n, double alpha);

}  // namespace mixsing::quad
