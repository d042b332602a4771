#include "mixsing/talenti.hpp"

#include "mixsing/quadrature.hpp"

#include <cmath>
#include <limits>

namespace mixsing {
namespace {

std::vector<double> union_breaks(const RearrangedProfile<double>& a, const RearrangedProfile<double>& b) {
  std::vector<double> out;
  std::merge(a.breaks().begin(), a.breaks().end(), b.breaks().begin(), b.breaks().end(), std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void require_same_total(const RearrangedProfile<double>& a, const RearrangedProfile<double>& b) {
  if (std::abs(a.total_measure() - b.total_measure()) > 1e-12 * std::max(1.0, a.total_measure()))
    throw Error(ErrorKind::measure_mismatch, "profiles live on different measure intervals");
}

}  // namespace

RearrangedProfile<double> comparison_profile(const RearrangedProfile<double>& f_star, int n, double volume,
                                             const std::vector<double>& extra_breaks) {
  const ComparisonSolution<double> v(f_star, n, volume);
  return v.sample(v.tau_grid(extra_breaks));
}

RearrangedProfile<double> bound_profile(const RearrangedProfile<double>& v_star, double gamma) {
  std::vector<double> vals(v_star.values().size());
  for (std::size_t i = 0; i < vals.size(); ++i)
    vals[i] = std::pow((gamma + 1.0) * v_star.values()[i], 1.0 / (gamma + 1.0));
  return RearrangedProfile<double>(v_star.kind(), v_star.breaks(), std::move(vals), v_star.total_measure());
}

ComparisonReport talenti_margin(const RearrangedProfile<double>& u_star, const RearrangedProfile<double>& v_star,
                                double gamma, double tol) {
  require_same_total(u_star, v_star);
  ComparisonReport rep;
  rep.tolerance = tol;
  const double e = 1.0 / (gamma + 1.0);
  auto bound = [&](double t) { return std::pow((gamma + 1.0) * std::max(0.0, v_star(t)), e); };

  rep.tau = union_breaks(u_star, v_star);
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (double t : rep.tau) {
    const double b = bound(t);
    // U is continuous; u* may jump at t, so both one-sided values count.
    const double left = t > 0.0 ? u_star.left_limit(t) : u_star(t);
    const double right = u_star(t);
    const double m = std::min(b - left, b - right);
    rep.u_star.push_back(left);
    rep.bound.push_back(b);
    rep.margin.push_back(m);
    rep.min_margin = std::min(rep.min_margin, m);
  }

  static const quad::Rule rule = quad::gauss_legendre(8, 0.0, 1.0);
  double integral_bound = 0.0;
  for (std::size_t j = 0; j + 1 < rep.tau.size(); ++j) {
    const double a = rep.tau[j], len = rep.tau[j + 1] - a;
    for (Eigen::Index k = 0; k < rule.nodes.size(); ++k) integral_bound += len * rule.weights[k] * bound(a + len * rule.nodes[k]);
  }
  rep.integrated_margin = integral_bound - profile_lp_norm(u_star, 1.0);
  rep.pass = rep.min_margin >= -tol;
  return rep;
}

double levelset_inequality_check(const RearrangedProfile<double>& u_star, const RearrangedProfile<double>& f_star,
                                 double gamma, int n) {
  const ComparisonSolution<double> v(f_star, n, u_star.total_measure());
  double worst = std::numeric_limits<double>::infinity();
  for (double t : u_star.breaks()) {
    const double rhs = (gamma + 1.0) * v(t);
    const double left = t > 0.0 ? u_star.left_limit(t) : u_star(t);
    worst = std::min(worst, rhs - std::pow(std::max(left, u_star(t)), gamma + 1.0));
  }
  return worst;
}

double bliss_constant(int n, double m) {
  if (n < 3 || !(m > 1.0) || !(m < n / 2.0))
    throw Error(ErrorKind::out_of_case, "the Bliss constant needs n >= 3 and 1 < m < n/2");
  const double a = n * (m - 1.0) / (n - 2.0 * m);
  const double ratio = std::tgamma(n / 2.0) / (std::tgamma(n / (2.0 * m)) * std::tgamma(n * (m - 1.0) / (2.0 * m) + 1.0));
  return std::pow(a, a) * std::pow(ratio, 2.0 * m / (n - 2.0 * m));
}

std::string to_string(BoundCase c) {
  switch (c) {
    case BoundCase::i: return "i";
    case BoundCase::ii: return "ii";
    case BoundCase::iii: return "iii";
  }
  return "unknown";
}

void BoundReport::check(double lhs) {
  lhs_value = lhs;
  pass = bound_case == BoundCase::i ? lhs < rhs_value : lhs <= rhs_value;
}

BoundReport summability_bounds(int n, double m, double gamma, double volume, double f_norm_m) {
  if (n < 1 || !(m > 1.0) || !(gamma >= 0.0 && gamma <= 1.0))
    throw Error(ErrorKind::out_of_case, "need n >= 1, m > 1 and gamma in [0, 1]");
  if (!(f_norm_m > 0.0) || !(volume > 0.0)) throw Error(ErrorKind::invalid_argument, "norm and volume must be positive");

  BoundReport r;
  const double g1 = gamma + 1.0;
  const double omega = unit_ball_volume<double>(n);
  const double k = g1 / (n * n * std::pow(omega, 2.0 / n));
  const double hardy = m / (m - 1.0);
  r.constants["omega_n"] = omega;
  r.constants["K"] = k;
  r.constants["hardy_factor"] = hardy;

  const double half = n / 2.0;
  if (m < half) {
    r.bound_case = BoundCase::i;
    const double p = n * m * g1 / (n - 2.0 * m);
    r.p = p;
    const double c = bliss_constant(n, m);
    r.constants["bliss"] = c;
    r.constants["gamma(n/2)"] = std::tgamma(n / 2.0);
    r.constants["gamma(n/(2m))"] = std::tgamma(n / (2.0 * m));
    r.constants["gamma(n(m-1)/(2m)+1)"] = std::tgamma(n * (m - 1.0) / (2.0 * m) + 1.0);
    r.rhs_value = std::pow(k, 1.0 / g1) * std::pow(c, 1.0 / p) * std::pow(f_norm_m, 1.0 / g1);
    const double ratio = r.constants["gamma(n/2)"] / (r.constants["gamma(n/(2m))"] * r.constants["gamma(n(m-1)/(2m)+1)"]);
    r.statement_rhs = std::pow(k, g1) * std::pow(n * (m - 1.0) / (n - 2.0 * m), (p - 1.0) / (p * g1)) *
                      std::pow(ratio, 2.0 / (n * g1)) * std::pow(f_norm_m, 1.0 / g1);
    r.hardy_rhs = r.rhs_value * std::pow(hardy, 1.0 / g1);
  } else if (m > half) {
    r.bound_case = BoundCase::ii;
    const double bracket = hardy * std::pow(n * (m - 1.0) / (2.0 * m - n), (m - 1.0) / m);
    r.constants["bracket"] = bracket;
    r.rhs_value = std::pow(k * bracket * std::pow(volume, (2.0 * m - n) / (n * m)) * f_norm_m, 1.0 / g1);
    r.statement_rhs = r.rhs_value;
    r.hardy_rhs = r.rhs_value;
  } else {
    if (n < 3) throw Error(ErrorKind::out_of_case, "m = n/2 needs n >= 3");
    r.bound_case = BoundCase::iii;
    r.rhs_value = std::pow(k * f_norm_m, 1.0 / g1);
    r.statement_rhs = r.rhs_value;
    r.hardy_rhs = r.rhs_value * std::pow(hardy, 1.0 / g1);
  }
  return r;
}

OrliczResult orlicz_sup(const RearrangedProfile<double>& u_star, int n, double gamma, double volume) {
  if (n < 3) throw Error(ErrorKind::out_of_case, "the Orlicz bound needs n >= 3");
  if (std::abs(u_star.total_measure() - volume) > 1e-12 * std::max(1.0, volume))
    throw Error(ErrorKind::measure_mismatch, "profile measure differs from the volume");
  const double e = (n - 2.0) / (n * (gamma + 1.0));
  const double cap = (1.0 - 1e-6) * volume;
  auto ratio = [&](double s, double value) { return value / std::pow(std::log(volume / s), e); };

  OrliczResult out;
  const auto& br = u_star.breaks();
  const auto& v = u_star.values();
  if (u_star.kind() == ProfileKind::step) {
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] <= 0.0) continue;
      double right = br[j + 1];
      if (right > cap) {
        out.diverges = true;
        right = cap;
        if (right <= br[j]) continue;
      }
      out.value = std::max(out.value, ratio(right, v[j]));
    }
  } else {
    for (std::size_t j = 1; j + 1 < br.size(); ++j) {
      if (br[j] > cap) {
        if (v[j] > 0.0) out.diverges = true;
        break;
      }
      out.value = std::max(out.value, ratio(br[j], v[j]));
    }
    if (v.back() > 0.0) {
      out.diverges = true;
      out.value = std::max(out.value, ratio(cap, u_star(cap)));
    }
  }
  return out;
}

double comparison_bound_lp_norm(const ComparisonSolution<double>& v, double gamma, double p) {
  const auto tau = v.tau_grid({}, 1024);
  static const quad::Rule rule = quad::gauss_legendre(10, 0.0, 1.0);
  const double expo = p / (gamma + 1.0);
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < tau.size(); ++j) {
    const double a = tau[j], len = tau[j + 1] - a;
    for (Eigen::Index k = 0; k < rule.nodes.size(); ++k)
      acc += len * rule.weights[k] * std::pow((gamma + 1.0) * v(a + len * rule.nodes[k]), expo);
  }
  return std::pow(acc, 1.0 / p);
}

}  // namespace mixsing
