#include "mixsing/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>

using mixsing::quad::gauss_jacobi_unit;
using mixsing::quad::gauss_legendre;

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  for (int n : {1, 2, 5, 8, 12, 32}) {
    const auto r = gauss_legendre(n, 0.5, 2.0);
    for (int k = 0; k < 2 * n; ++k) {
      double got = 0.0;
      for (Eigen::Index i = 0; i < r.nodes.size(); ++i) got += r.weights[i] * std::pow(r.nodes[i], k);
      const double want = (std::pow(2.0, k + 1) - std::pow(0.5, k + 1)) / (k + 1);
      EXPECT_NEAR(got, want, 1e-13 * std::max(1.0, want)) << "n=" << n << " k=" << k;
    }
  }
}

TEST(GaussLegendre, NodesInsideAndWeightsPositive) {
  const auto r = gauss_legendre(20);
  EXPECT_GT(r.weights.minCoeff(), 0.0);
  EXPECT_GT(r.nodes.minCoeff(), -1.0);
  EXPECT_LT(r.nodes.maxCoeff(), 1.0);
  EXPECT_NEAR(r.weights.sum(), 2.0, 1e-14);
}

// ∫_0^1 u^α u^k du = 1/(α+k+1)
TEST(GaussJacobi, MomentsMatchClosedForm) {
  for (double alpha : {-0.5, 0.0, 0.5, 0.9}) {
    for (int n : {3, 5, 8}) {
      const auto r = gauss_jacobi_unit(n, alpha);
      for (int k = 0; k < 2 * n; ++k) {
        double got = 0.0;
        for (Eigen::Index i = 0; i < r.nodes.size(); ++i) got += r.weights[i] * std::pow(r.nodes[i], k);
        EXPECT_NEAR(got, 1.0 / (alpha + k + 1.0), 1e-13) << "alpha=" << alpha << " n=" << n << " k=" << k;
      }
    }
  }
}
