#pragma once

#include "mixsing/error.hpp"
#include "mixsing/operators.hpp"
#include "mixsing/problem_data.hpp"

#include <optional>
#include <vector>

namespace mixsing {

struct SolveOptions {
  double tolerance = 1e-10;
  int max_iterations = 50;
  int line_search_failures_before_picard = 3;
};

struct SolveReport {
  int newton_iterations = 0;
  int picard_steps = 0;
  int clamp_count = 0;
  bool converged = false;
  double final_residual_maxnorm = 0.0;
  double energy_rho_sq = 0.0;
  double absorption_mass = 0.0;
  double apriori_constant = 0.0;
  bool apriori_satisfied = false;
  double min_value = 0.0;
  double max_value = 0.0;
  double n_level = 0.0;
  double k_level = 0.0;
};

/// Raised when Newton/Picard does not reach the tolerance; carries the report.
class SolveFailure : public Error {
public:
  SolveFailure(const std::string& what, SolveReport report)
      : Error(ErrorKind::nonconvergence, what), report_(report) {}
  const SolveReport& report() const noexcept { return report_; }

private:
  SolveReport report_;
};

struct SolveResult {
  GridFunction u;
  SolveReport report;
};

/// F(U) = A U + μ (g_k(U) - h_reg(U) ⊙ f_n), μ the lumped mass.
Eigen::VectorXd residual(const DiscreteMixedOperator& op, const TruncatedData& data, const Eigen::VectorXd& u);

/// Damped Newton with Armijo backtracking on ‖F‖₂, Picard fallback and a
/// nonnegativity clamp. Starts from `start` (zero when absent).
SolveResult solve_truncated(const DiscreteMixedOperator& op, const TruncatedData& data,
                            const std::optional<Eigen::VectorXd>& start = std::nullopt, const SolveOptions& options = {});

/// Constant C of the uniform bound ρ(u_n)² + ‖g(u_n)u_n‖₁ ≤ 3C, with lumped
/// norms of the (untruncated) source samples.
double apriori_constant(const ProblemSpec& spec, const GridFunction& f);

/// Fills energy_rho_sq, absorption_mass, apriori_constant and apriori_satisfied.
void energy_diagnostics(const DiscreteMixedOperator& op, const GridFunction& u, const ProblemSpec& spec,
                        const GridFunction& f, SolveReport& report);

struct LimitReport {
  std::vector<int> n_levels;
  std::vector<SolveReport> levels;
  std::vector<double> successive_sup_diffs;
  double monotonicity_violation = 0.0;
  bool converged = false;
  double final_k = 0.0;
};

struct LimitResult {
  GridFunction u;
  LimitReport report;
  std::vector<GridFunction> iterates;  ///< solution at each level
};

/// Runs the n-schedule with adaptive k. `start` seeds the first level.
LimitResult solve_limit(const DiscreteMixedOperator& op, const ProblemSpec& spec, const GridFunction& f,
                        const std::optional<Eigen::VectorXd>& start = std::nullopt);

struct UniquenessReport {
  double max_difference = 0.0;
  /// min over start pairs and k ∈ {0.1, 1, 10} of Σ (g(U₁) - g(U₂)) T_k(U₁ - U₂) μ
  double identity_minimum = 0.0;
  std::vector<GridFunction> solutions;
};

UniquenessReport uniqueness_probe(const DiscreteMixedOperator& op, const ProblemSpec& spec, const GridFunction& f,
                                  const std::vector<GridFunction>& starts);

/// RHS - LHS of ∫|∇u|² S'(u) + ∫ g(u) S(u) ≤ sup_{[k,∞)} h · ∫ f_n S(u) with
/// S = S_{η,k}. The gradient term uses the chord slope of S over each cell.
double equiintegrability_check(const DiscreteMixedOperator& op, const GridFunction& u, const ProblemSpec& spec,
                               const GridFunction& f_n, double eta, double k);

}  // namespace mixsing
