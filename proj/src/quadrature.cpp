#include "mixsing/quadrature.hpp"

#include "mixsing/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace mixsing::quad {
namespace {

// Gauss-Jacobi on [-1, 1] with weight (1-x)^a (1+x)^b.
Rule golub_welsch_jacobi(int n, double a, double b) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "quadrature needs at least one node");
  if (!(a > -1.0) || !(b > -1.0)) throw Error(ErrorKind::invalid_argument, "Jacobi exponents must exceed -1");

  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  const double ab = a + b;
  for (int k = 0; k < n; ++k) {
    const double two_k_ab = 2.0 * k + ab;
    jacobi(k, k) = k == 0 ? (b - a) / (ab + 2.0)
                          : (b * b - a * a) / (two_k_ab * (two_k_ab + 2.0));
    if (k >= 1) {
      const double num = 4.0 * k * (k + a) * (k + b) * (k + ab);
      const double den = two_k_ab * two_k_ab * (two_k_ab + 1.0) * (two_k_ab - 1.0);
      const double off = std::sqrt(num / den);
      jacobi(k, k - 1) = off;
      jacobi(k - 1, k) = off;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                              std::lgamma(b + 1.0) - std::lgamma(ab + 2.0));
  Rule rule;
  rule.nodes = eig.eigenvalues();
  rule.weights = mu0 * eig.eigenvectors().row(0).transpose().array().square();
  return rule;
}

}  // namespace

Rule gauss_legendre(int n, double lo, double hi) {
  Rule rule = golub_welsch_jacobi(n, 0.0, 0.0);
  const double half = 0.5 * (hi - lo);
  rule.nodes = (rule.nodes.array() + 1.0) * half + lo;
  rule.weights *= half;
  return rule;
}

Rule gauss_jacobi_unit(int n, double alpha) {
  Rule rule = golub_welsch_jacobi(n, 0.0, alpha);
  rule.nodes = 0.5 * (rule.nodes.array() + 1.0);
  rule.weights /= std::pow(2.0, alpha + 1.0);
  return rule;
}

}  // namespace mixsing::quad
