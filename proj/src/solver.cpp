#include "mixsing/solver.hpp"

#include <Eigen/Cholesky>

#include <array>
#include <cmath>
#include <limits>

namespace mixsing {
namespace {

struct Evaluated {
  Eigen::VectorXd g;
  Eigen::VectorXd hf;  // h_reg(U) ⊙ f_n
};

Evaluated evaluate(const TruncatedData& data, const Eigen::VectorXd& u) {
  Evaluated e{Eigen::VectorXd(u.size()), Eigen::VectorXd(u.size())};
  const Eigen::VectorXd& f = data.f_n.values();
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    e.g[i] = data.g_k.value(u[i]);
    e.hf[i] = f[i] == 0.0 ? 0.0 : data.h_reg.value(u[i]) * f[i];
  }
  return e;
}

Eigen::VectorXd clamp_nonnegative(Eigen::VectorXd u, int& clamps) {
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (u[i] < 0.0) {
      u[i] = 0.0;
      ++clamps;
    }
  }
  return u;
}

// d/dt g_k, replaced by the secant g_k(t)/t where the derivative is unbounded.
double g_slope(const TruncatedData& data, double t) {
  const double d = data.g_k.derivative(t);
  if (std::isfinite(d)) return d;
  return t > 0.0 ? data.g_k.value(t) / t : 0.0;
}

double h_slope(const TruncatedData& data, double t) {
  const double d = data.h_reg.derivative(t);
  return std::isfinite(d) ? d : 0.0;
}

}  // namespace

Eigen::VectorXd residual(const DiscreteMixedOperator& op, const TruncatedData& data, const Eigen::VectorXd& u) {
  const Evaluated e = evaluate(data, u);
  return op.combined() * u + op.lumped_mass() * (e.g - e.hf);
}

SolveResult solve_truncated(const DiscreteMixedOperator& op, const TruncatedData& data,
                            const std::optional<Eigen::VectorXd>& start, const SolveOptions& options) {
  if (data.f_n.grid() != op.grid()) throw Error(ErrorKind::grid_mismatch, "data and operator grids differ");
  const Eigen::Index m = op.grid()->size();
  const double mu = op.lumped_mass();
  SolveReport rep;
  rep.n_level = data.n_level;
  rep.k_level = data.k_level;

  Eigen::VectorXd u = start ? *start : Eigen::VectorXd::Zero(m);
  if (u.size() != m) throw Error(ErrorKind::grid_mismatch, "initial guess has the wrong size");
  u = clamp_nonnegative(std::move(u), rep.clamp_count);

  Eigen::VectorXd f = residual(op, data, u);
  int failures = 0;
  for (int it = 0; it < options.max_iterations; ++it) {
    if (f.lpNorm<Eigen::Infinity>() <= options.tolerance) {
      rep.converged = true;
      break;
    }
    Eigen::VectorXd next;
    bool accepted = false;
    if (failures < options.line_search_failures_before_picard) {
      Eigen::MatrixXd jac = op.combined();
      for (Eigen::Index i = 0; i < m; ++i)
        jac(i, i) += mu * (g_slope(data, u[i]) - h_slope(data, u[i]) * data.f_n[i]);
      Eigen::LLT<Eigen::MatrixXd> llt(jac);
      if (llt.info() != Eigen::Success)
        throw Error(ErrorKind::monotonicity_violation, "Jacobian is not symmetric positive definite");
      const Eigen::VectorXd step = llt.solve(-f);
      const double f0 = f.norm();
      double alpha = 1.0;
      for (int ls = 0; ls < 30; ++ls, alpha *= 0.5) {
        int clamps = 0;
        Eigen::VectorXd trial = clamp_nonnegative(u + alpha * step, clamps);
        Eigen::VectorXd ft = residual(op, data, trial);
        if (ft.norm() <= (1.0 - 1e-4 * alpha) * f0) {
          rep.clamp_count += clamps;
          next = std::move(trial);
          f = std::move(ft);
          accepted = true;
          break;
        }
      }
      ++rep.newton_iterations;
      if (!accepted) ++failures;
    }
    if (!accepted) {
      // Picard: (A + μ diag(g(U)/U)) U_new = μ h_reg(U) f_n with lagged coefficients.
      const Evaluated e = evaluate(data, u);
      Eigen::MatrixXd lhs = op.combined();
      for (Eigen::Index i = 0; i < m; ++i) lhs(i, i) += mu * (u[i] > 0.0 ? e.g[i] / u[i] : g_slope(data, 0.0));
      Eigen::LLT<Eigen::MatrixXd> llt(lhs);
      if (llt.info() != Eigen::Success)
        throw Error(ErrorKind::monotonicity_violation, "Picard matrix is not symmetric positive definite");
      next = clamp_nonnegative(llt.solve(mu * e.hf), rep.clamp_count);
      f = residual(op, data, next);
      ++rep.picard_steps;
    }
    u = std::move(next);
  }
  rep.final_residual_maxnorm = f.lpNorm<Eigen::Infinity>();
  rep.converged = rep.final_residual_maxnorm <= options.tolerance;
  rep.min_value = m > 0 ? u.minCoeff() : 0.0;
  rep.max_value = m > 0 ? u.maxCoeff() : 0.0;
  if (!rep.converged)
    throw SolveFailure("no convergence within " + std::to_string(options.max_iterations) + " steps", rep);
  return {GridFunction(op.grid(), std::move(u)), rep};
}

double apriori_constant(const ProblemSpec& spec, const GridFunction& f) {
  const NonlinearitySpec& nl = spec.nonlinearity;
  const double mu = f.grid()->cell_measure();
  const double f1 = f.values().cwiseAbs().sum() * mu;
  const double gamma = nl.gamma, theta = nl.theta_value();

  double hmax = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double s = nl.s_lower + (nl.s_upper - nl.s_lower) * i / 200.0;
    hmax = std::max(hmax, nl.h_value(s) * s);
  }
  double c = (nl.c_lower * std::pow(nl.s_lower, 1.0 - gamma) + hmax + nl.c_upper * std::pow(nl.s_upper, 1.0 - theta)) * f1;
  if (theta < 1.0) {
    const double m = spec.m;
    const double fm = f.values().cwiseAbs().array().pow(m).sum() * mu;
    const double conj = m / (m - 1.0);
    const double eps = nl.nu / 2.0;
    const double c_eps = std::pow(eps * conj, -(m - 1.0)) / m;
    c += c_eps * std::pow(nl.c_upper, m) * fm;
    const double q_thr = (1.0 - m * theta) / (m - 1.0);
    if (nl.q > q_thr) {
      const double r = (1.0 - theta) * m / (m - 1.0);
      c += eps * (1.0 - r / (nl.q + 1.0)) * spec.domain.volume();
    }
  }
  return c;
}

void energy_diagnostics(const DiscreteMixedOperator& op, const GridFunction& u, const ProblemSpec& spec,
                        const GridFunction& f, SolveReport& report) {
  const double mu = op.lumped_mass();
  report.energy_rho_sq = bilinear_form(op, u, u);
  double absorption = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) absorption += spec.nonlinearity.g_value(u[i]) * u[i];
  report.absorption_mass = absorption * mu;
  report.apriori_constant = apriori_constant(spec, f);
  report.apriori_satisfied = report.energy_rho_sq + report.absorption_mass <= 3.0 * report.apriori_constant;
}

LimitResult solve_limit(const DiscreteMixedOperator& op, const ProblemSpec& spec, const GridFunction& f,
                        const std::optional<Eigen::VectorXd>& start) {
  if (spec.schedule.n_levels.empty()) throw Error(ErrorKind::invalid_argument, "empty n schedule");
  SolveOptions opts;
  opts.tolerance = spec.tolerances.residual;
  opts.max_iterations = spec.tolerances.max_newton;

  LimitResult out;
  std::optional<Eigen::VectorXd> guess = start;
  double k = spec.schedule.k_initial;
  for (int n_level : spec.schedule.n_levels) {
    SolveResult res;
    for (;;) {
      const TruncatedData data = build_truncated_data(spec, f, n_level, k);
      res = solve_truncated(op, data, guess, opts);
      double gmax = 0.0;
      for (Eigen::Index i = 0; i < res.u.size(); ++i) gmax = std::max(gmax, spec.nonlinearity.g_value(res.u[i]));
      if (gmax < k / 2.0) break;
      k *= 2.0;
      guess = res.u.values();
    }
    energy_diagnostics(op, res.u, spec, f, res.report);

    if (!out.iterates.empty()) {
      const Eigen::VectorXd& prev = out.iterates.back().values();
      const Eigen::VectorXd diff = res.u.values() - prev;
      out.report.successive_sup_diffs.push_back(diff.lpNorm<Eigen::Infinity>());
      out.report.monotonicity_violation = std::max(out.report.monotonicity_violation, (-diff).maxCoeff());
    }
    out.report.n_levels.push_back(n_level);
    out.report.levels.push_back(res.report);
    guess = res.u.values();
    out.iterates.push_back(res.u);

    if (spec.nonlinearity.mode == Mode::model && out.report.monotonicity_violation > 1e-6)
      throw Error(ErrorKind::scheme_fidelity, "regularized solutions are not nondecreasing in n");
    if (!out.report.successive_sup_diffs.empty() && out.report.successive_sup_diffs.back() <= spec.tolerances.level) {
      out.report.converged = true;
      break;
    }
  }
  out.report.final_k = k;
  out.u = out.iterates.back();
  return out;
}

UniquenessReport uniqueness_probe(const DiscreteMixedOperator& op, const ProblemSpec& spec, const GridFunction& f,
                                  const std::vector<GridFunction>& starts) {
  UniquenessReport rep;
  for (const GridFunction& s : starts) rep.solutions.push_back(solve_limit(op, spec, f, s.values()).u);
  const double mu = op.lumped_mass();
  rep.identity_minimum = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < rep.solutions.size(); ++a) {
    for (std::size_t b = a + 1; b < rep.solutions.size(); ++b) {
      const Eigen::VectorXd& u1 = rep.solutions[a].values();
      const Eigen::VectorXd& u2 = rep.solutions[b].values();
      rep.max_difference = std::max(rep.max_difference, (u1 - u2).lpNorm<Eigen::Infinity>());
      for (double k : {0.1, 1.0, 10.0}) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < u1.size(); ++i)
          acc += (spec.nonlinearity.g_value(u1[i]) - spec.nonlinearity.g_value(u2[i])) * truncate_k(k, u1[i] - u2[i]);
        rep.identity_minimum = std::min(rep.identity_minimum, acc * mu);
      }
    }
  }
  if (rep.solutions.size() < 2) rep.identity_minimum = 0.0;
  return rep;
}

double equiintegrability_check(const DiscreteMixedOperator& op, const GridFunction& u, const ProblemSpec& spec,
                               const GridFunction& f_n, double eta, double k) {
  if (!(eta > 0.0) || !(k > 0.0)) throw Error(ErrorKind::invalid_argument, "eta and k must be positive");
  require_same_grid(u, f_n);
  const Grid& grid = *op.grid();
  const NonlinearitySpec& nl = spec.nonlinearity;
  const double mu = grid.cell_measure();
  auto S = [&](double t) { return s_delta_k(eta, k, t); };
  auto chord = [&](double lo, double hi) {
    return hi > lo ? (S(hi) - S(lo)) / (hi - lo) : s_delta_k_slope(eta, k, lo);
  };

  double gradient = 0.0;
  const int n = grid.subdivisions();
  if (grid.dimension() == 1) {
    const double h = grid.spacing()[0];
    for (int c = 0; c < n; ++c) {
      const Eigen::Index i0 = grid.interior_index(c), i1 = grid.interior_index(c + 1);
      const double a = i0 < 0 ? 0.0 : u[i0], b = i1 < 0 ? 0.0 : u[i1];
      gradient += (b - a) * (b - a) / h * chord(std::min(a, b), std::max(a, b));
    }
  } else {
    const Eigen::Matrix4d ke = q1_element_stiffness(grid.spacing()[0], grid.spacing()[1]);
    for (int cx = 0; cx < n; ++cx) {
      for (int cy = 0; cy < n; ++cy) {
        Eigen::Vector4d loc;
        for (int p = 0; p < 4; ++p) {
          const Eigen::Index idx = grid.interior_index(cx + p / 2, cy + p % 2);
          loc[p] = idx < 0 ? 0.0 : u[idx];
        }
        gradient += loc.dot(ke * loc) * chord(loc.minCoeff(), loc.maxCoeff());
      }
    }
  }

  double absorption = 0.0, source = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double s = S(u[i]);
    absorption += nl.g_value(u[i]) * s;
    source += f_n[i] * s;
  }
  // h is nonincreasing in every admissible configuration, so its sup over [k, ∞) sits at k
  double hsup = nl.h_value(k);
  if (nl.mode == Mode::custom)
    for (int i = 1; i <= 400; ++i) hsup = std::max(hsup, nl.h_value(k * std::pow(10.0, 16.0 * i / 400.0)));
  return hsup * source * mu - (gradient + absorption * mu);
}

}  // namespace mixsing
