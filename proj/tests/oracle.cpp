#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace oracle {

std::pair<std::vector<double>, std::vector<double>> legendre(int n) {
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double step = p1 / dp;
      t -= step;
      if (std::abs(step) < 1e-16) break;
    }
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  return {x, w};
}

namespace {

const std::pair<std::vector<double>, std::vector<double>>& cached(int n) {
  static thread_local std::vector<std::pair<std::vector<double>, std::vector<double>>> table(64);
  if (n <= 0 || n >= 64) throw std::invalid_argument("rule size");
  if (table[n].first.empty()) table[n] = legendre(n);
  return table[n];
}

double tent(double x) { return std::max(0.0, 1.0 - std::abs(x)); }

// ∫ f over [a, b] where f is a polynomial of degree ≤ 5 between the given
// breakpoints (exact with 3-point Gauss per piece).
double piecewise_exact(const std::function<double(double)>& f, std::vector<double> br, double a, double b) {
  br.push_back(a);
  br.push_back(b);
  std::sort(br.begin(), br.end());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    const double lo = std::max(a, br[i]), hi = std::min(b, br[i + 1]);
    if (hi > lo) acc += composite(f, lo, hi, 1, 3);
  }
  return acc;
}

// D(z) = ∫ (u(x+z) - u(x))² dx for the 1D tent, z ≥ 0.
double tent_difference(double z) {
  z = std::abs(z);
  if (z >= 2.0) return 4.0 / 3.0;
  const auto f = [z](double x) {
    const double d = tent(x + z) - tent(x);
    return d * d;
  };
  return piecewise_exact(f, {-1.0, 0.0, 1.0, -1.0 - z, -z, 1.0 - z}, -1.0 - z, 1.0);
}

// a(t) = ∫ u(x+t) u(x) dx for the 1D tent.
double tent_correlation(double t) {
  t = std::abs(t);
  if (t >= 2.0) return 0.0;
  const auto f = [t](double x) { return tent(x + t) * tent(x); };
  return piecewise_exact(f, {-1.0, 0.0, 1.0, -1.0 - t, -t, 1.0 - t}, -1.0, 1.0);
}

// ∫_a^b f split at the interior breakpoints, graded towards 0 when a == 0.
double split_integral(const std::function<double(double)>& f, std::vector<double> br, double a, double b,
                      int panels_per_unit) {
  br.push_back(a);
  br.push_back(b);
  std::sort(br.begin(), br.end());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    const double lo = std::max(a, br[i]), hi = std::min(b, br[i + 1]);
    if (!(hi > lo)) continue;
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) * panels_per_unit)));
    if (lo == 0.0) {
      // first uniform panel refined geometrically; deep enough that the dropped
      // piece is below roundoff for integrands up to r^{-0.6}
      const double first = hi / panels;
      acc += graded(f, first, 160, 10) + (panels > 1 ? composite(f, first, hi, panels - 1, 8) : 0.0);
    } else {
      acc += composite(f, lo, hi, panels, 8);
    }
  }
  return acc;
}

}  // namespace

double composite(const std::function<double(double)>& f, double a, double b, int panels, int n) {
  const auto& [x, w] = cached(n);
  const double width = (b - a) / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width, mid = lo + 0.5 * width;
    double part = 0.0;
    for (int i = 0; i < n; ++i) part += w[i] * f(mid + 0.5 * width * x[i]);
    acc += 0.5 * width * part;
  }
  return acc;
}

double graded(const std::function<double(double)>& f, double b, int levels, int n) {
  double acc = 0.0, hi = b;
  for (int k = 0; k < levels; ++k) {
    acc += composite(f, 0.5 * hi, hi, 1, n);
    hi *= 0.5;
  }
  return acc;
}

double tent_form_1d(double s, int resolution) {
  const auto integrand = [s](double z) { return tent_difference(z) * std::pow(z, -1.0 - 2.0 * s); };
  const double near = split_integral(integrand, {1.0}, 0.0, 2.0, resolution);
  // D(z) = 2∫u² = 4/3 once the supports are disjoint
  const double far = (4.0 / 3.0) * std::pow(2.0, -2.0 * s) / (2.0 * s);
  return 2.0 * (near + far);
}

double tent_form_2d(double s, int resolution) {
  const double a0 = 2.0 / 3.0;
  // integrand symmetric under the 8 reflections of the square; θ ∈ (0, π/4)
  const auto radial = [&](double theta) {
    const double c = std::cos(theta), sn = std::sin(theta);
    const double reach = 2.0 / c;  // beyond this a(r cosθ) = 0
    // 2(a0² - a(u)a(v)) = a0·D(v) + a(v)·D(u) since D = 2(a0 - a); this form
    // keeps full relative accuracy as r → 0
    const auto f = [&](double r) {
      const double u = r * c, v = r * sn;
      return (a0 * tent_difference(v) + tent_correlation(v) * tent_difference(u)) * std::pow(r, -1.0 - 2.0 * s);
    };
    std::vector<double> br{1.0 / c};
    if (sn > 0.0) {
      br.push_back(1.0 / sn);
      br.push_back(2.0 / sn);
    }
    const double near = split_integral(f, br, 0.0, reach, resolution);
    return near + 2.0 * a0 * a0 * std::pow(reach, -2.0 * s) / (2.0 * s);
  };
  const double kink = std::atan(0.5);
  const int panels = std::max(2, resolution / 4);
  return 8.0 * (composite(radial, 0.0, kink, panels, 8) + composite(radial, kink, std::numbers::pi / 4.0, panels, 8));
}

double kappa_interval(double a, double b, double x, double s) {
  return (std::pow(x - a, -2.0 * s) + std::pow(b - x, -2.0 * s)) / (2.0 * s);
}

double kappa_rectangle(double ax, double bx, double ay, double by, double x, double y, double s, int angles) {
  // exit distance along direction θ, integrated between corner directions
  const auto exit = [&](double theta) {
    const double c = std::cos(theta), sn = std::sin(theta);
    double r = std::numeric_limits<double>::infinity();
    if (c > 0) r = std::min(r, (bx - x) / c);
    if (c < 0) r = std::min(r, (ax - x) / c);
    if (sn > 0) r = std::min(r, (by - y) / sn);
    if (sn < 0) r = std::min(r, (ay - y) / sn);
    return std::pow(r, -2.0 * s) / (2.0 * s);
  };
  std::vector<double> corners{std::atan2(by - y, bx - x), std::atan2(by - y, ax - x), std::atan2(ay - y, ax - x),
                              std::atan2(ay - y, bx - x)};
  for (double& t : corners)
    if (t < 0) t += 2.0 * std::numbers::pi;
  std::sort(corners.begin(), corners.end());
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double lo = corners[i], hi = i == 3 ? corners[0] + 2.0 * std::numbers::pi : corners[i + 1];
    acc += composite(exit, lo, hi, angles, 16);
  }
  return acc;
}

double Step::operator()(double s) const {
  for (std::size_t j = 0; j + 1 < breaks.size(); ++j)
    if (s >= breaks[j] && s < breaks[j + 1]) return values[j];
  return 0.0;
}

double Step::primitive(double r) const {
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < breaks.size(); ++j) {
    const double hi = std::min(r, breaks[j + 1]);
    if (hi > breaks[j]) acc += values[j] * (hi - breaks[j]);
  }
  return acc;
}

double omega_table(int n) {
  static const double table[] = {2.0,
                                 3.1415926535897932385,
                                 4.1887902047863909846,
                                 4.9348022005446793094,
                                 5.2637890139143245967,
                                 5.1677127800499700292};
  if (n < 1 || n > 6) throw std::invalid_argument("omega table covers n = 1..6");
  return table[n - 1];
}

double comparison_quadrature(const Step& f, int n, double tau) {
  const double volume = f.breaks.back();
  if (tau >= volume) return 0.0;
  const double beta = -2.0 + 2.0 / n;
  const double k = 1.0 / (n * n * std::pow(omega_table(n), 2.0 / n));
  const auto g = [&](double r) { return std::pow(r, beta) * f.primitive(r); };
  std::vector<double> inner(f.breaks.begin() + 1, f.breaks.end() - 1);
  const double whole = split_integral(g, inner, 0.0, volume, 64);
  const double head = tau > 0.0 ? split_integral(g, inner, 0.0, tau, 64) : 0.0;
  return k * (whole - head);
}

}  // namespace oracle
