#pragma once

#include "mixsing/domain_grid.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mixsing {

// Truncations --------------------------------------------------------------

template <class Scalar>
Scalar truncate_k(Scalar k, Scalar s) {
  return std::max(-k, std::min(s, k));
}

template <class Scalar>
Scalar remainder_k(Scalar k, Scalar s) {
  using std::abs;
  const Scalar excess = abs(s) - k;
  if (!(excess > Scalar(0))) return Scalar(0);
  return s > Scalar(0) ? excess : -excess;
}

/// V_{δ,k}: 1 below k, linear down to 0 on [k, k+δ], 0 above.
template <class Scalar>
Scalar v_delta_k(Scalar delta, Scalar k, Scalar s) {
  if (s <= k) return Scalar(1);
  if (s >= k + delta) return Scalar(0);
  return (k + delta - s) / delta;
}

template <class Scalar>
Scalar s_delta_k(Scalar delta, Scalar k, Scalar s) {
  return Scalar(1) - v_delta_k(delta, k, s);
}

/// Derivative of S_{δ,k}: 1/δ on (k, k+δ), 0 elsewhere.
template <class Scalar>
Scalar s_delta_k_slope(Scalar delta, Scalar k, Scalar s) {
  return (s > k && s < k + delta) ? Scalar(1) / delta : Scalar(0);
}

/// Level-set test function G_{t,h}(θ) = min(h, (θ - t)^+).
template <class Scalar>
Scalar level_test(Scalar t, Scalar h, Scalar theta) {
  if (theta <= t) return Scalar(0);
  if (theta <= t + h) return theta - t;
  return h;
}

// Nonlinearities -------------------------------------------------------------

/// Scalar function descriptor used for custom g and h: c·(t + shift)^exponent,
/// or identically zero.
struct ScalarFunction {
  enum class Kind { zero, power };
  Kind kind = Kind::zero;
  double coefficient = 1.0;
  double exponent = 0.0;
  double shift = 0.0;

  double operator()(double t) const;
  double derivative(double t) const;
};

struct ScalarMap {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

enum class Mode { model, custom };

/// Form of the regularized singular coefficient at level n.
enum class HRegularization {
  shifted,    ///< (t⁺ + 1/n)^{-γ}; model mode only
  truncated,  ///< T_n(h(t))
};

struct NonlinearitySpec {
  double gamma = 0.5;
  double q = 1.0;
  std::optional<double> theta;  ///< defaults to gamma
  Mode mode = Mode::model;
  ScalarFunction g;             ///< custom mode
  ScalarFunction h;             ///< custom mode
  bool singular_at_zero = true; ///< custom mode: h(0) = +∞ declared by the user
  bool absorption_off = false;  ///< test hook: g ≡ 0
  double c_lower = 1.0;
  double c_upper = 1.0;
  double s_lower = 1.0;
  double s_upper = 2.0;
  double nu = 1.0;
  double s1 = 1.0;

  double theta_value() const { return theta.value_or(gamma); }
  /// The untruncated g(t) for t ≥ 0.
  double g_value(double t) const;
  double g_derivative(double t) const;
  /// The untruncated h(t) for t > 0.
  double h_value(double t) const;
  double h_derivative(double t) const;
};

struct SourceSpec {
  enum class Kind { constant, polynomial, gaussian, radial_power, samples };
  Kind kind = Kind::constant;
  double value = 1.0;                ///< constant / amplitude
  std::vector<double> coefficients;  ///< polynomial in |x|: Σ c_k |x|^k
  std::vector<double> center;        ///< gaussian centre (defaults to origin)
  double width = 1.0;                ///< gaussian standard deviation
  double power = 0.0;                ///< radial power: value·|x|^{-power}
  std::string path;                  ///< samples: gridfunction CSV
};

struct Schedule {
  std::vector<int> n_levels{1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
  double k_initial = 10.0;
};

struct Tolerances {
  double residual = 1e-10;
  double level = 1e-8;
  int max_newton = 50;
};

struct ProblemSpec {
  Domain domain = Domain::interval(-1.0, 1.0);
  double s = 0.5;
  NonlinearitySpec nonlinearity;
  SourceSpec f;
  double m = 2.0;
  Schedule schedule;
  Tolerances tolerances;
  HRegularization h_form = HRegularization::shifted;
};

PointFunction make_source(const SourceSpec& source);
/// Samples f at the interior nodes with the nonnegativity check.
GridFunction sample_source(const GridPtr& grid, const SourceSpec& source);

struct TruncatedData {
  GridFunction f_n;
  ScalarMap g_k;
  ScalarMap h_reg;
  double n_level = 1.0;
  double k_level = 1.0;
};

TruncatedData build_truncated_data(const ProblemSpec& spec, const GridFunction& f, double n_level,
                                   double k_level);
/// Convenience overload sampling f on the grid first.
TruncatedData build_truncated_data(const ProblemSpec& spec, const GridPtr& grid, double n_level,
                                   double k_level);

// Hypotheses -----------------------------------------------------------------

enum class CheckStatus { pass, fail, sampled_pass, waived, not_applicable };

std::string to_string(CheckStatus status);

struct HypothesisCheck {
  std::string name;
  CheckStatus status;
  std::string detail;
};

struct ValidationReport {
  std::vector<HypothesisCheck> checks;

  bool ok() const;
  const HypothesisCheck* find(const std::string& name) const;
};

ValidationReport validate_hypotheses(const ProblemSpec& spec);

// Regime -----------------------------------------------------------------------

enum class SummabilityCase { i, ii, iii };

std::string to_string(SummabilityCase c);

struct RegimeReport {
  double q_threshold = 0.0;
  std::optional<double> m_threshold;  ///< none when the defining denominator is ≤ 0
  SummabilityCase summability_case = SummabilityCase::i;
  bool genuine_gain = false;
  std::optional<double> p_exponent;
  bool q_admissible = true;           ///< q ≥ max(0, q_threshold)
};

RegimeReport classify_regime(double gamma, double m, int n, double q);

}  // namespace mixsing
