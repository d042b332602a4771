#pragma once

#include "mixsing/domain_grid.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <iosfwd>
#include <span>

namespace mixsing {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Largest interior node count for which the dense nonlocal matrix is stored.
inline constexpr Eigen::Index max_dense_nodes = 10000;

/// Test hooks; production assembly uses the defaults.
struct OperatorOptions {
  bool zero_fractional = false;       ///< drop the nonlocal part entirely
  bool flip_fractional_entry = false; ///< negate A_frac(0, 1) only (breaks symmetry)
};

/// Discrete realization of B(u, v) = ∫∇u·∇v + ∬(u(x)-u(y))(v(x)-v(y))/|x-y|^{n+2s}
/// on conforming P1 (1D) / Q1 (2D) elements. The nonlocal kernel carries no
/// normalization constant.
class DiscreteMixedOperator {
public:
  DiscreteMixedOperator(GridPtr grid, double s, SparseMatrix local, Eigen::MatrixXd fractional,
                        Eigen::VectorXd tail);

  const GridPtr& grid() const noexcept { return grid_; }
  double order() const noexcept { return s_; }
  const SparseMatrix& local() const noexcept { return local_; }
  /// Interior-interior nonlocal form including the exterior interaction
  /// 2∫φ_i φ_j κ.
  const Eigen::MatrixXd& fractional() const noexcept { return fractional_; }
  /// Nodal values of κ(x) = ∫_{R^n \ Ω} |x-y|^{-n-2s} dy.
  const Eigen::VectorXd& tail() const noexcept { return tail_; }
  double lumped_mass() const noexcept { return grid_->cell_measure(); }
  /// Dense A_loc + A_frac.
  const Eigen::MatrixXd& combined() const noexcept { return combined_; }

private:
  GridPtr grid_;
  double s_;
  SparseMatrix local_;
  Eigen::MatrixXd fractional_;
  Eigen::VectorXd tail_;
  Eigen::MatrixXd combined_;
};

/// Q1 stiffness of one hx × hy cell, local node order (a, b) -> 2a + b.
Eigen::Matrix4d q1_element_stiffness(double hx, double hy);

/// Conforming stiffness matrix of -Δ with homogeneous Dirichlet data.
SparseMatrix assemble_local(const Grid& grid);

struct FractionalAssembly {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd tail;
};

FractionalAssembly assemble_fractional(const Grid& grid, double s);

DiscreteMixedOperator assemble_operator(const GridPtr& grid, double s, OperatorOptions options = {});

/// κ(x) = ∫_{R^n \ Ω} |x-y|^{-n-2s} dy for x inside an interval or rectangle.
double exterior_kernel_integral(const Domain& domain, std::span<const double> x, double s);

/// uᵀ(A_loc + A_frac)v, the discrete ρ-form.
double bilinear_form(const DiscreteMixedOperator& op, const GridFunction& u, const GridFunction& v);
double local_energy(const DiscreteMixedOperator& op, const GridFunction& u);
double fractional_energy(const DiscreteMixedOperator& op, const GridFunction& u);

/// max over samples of [u]²_{s,h} / ‖∇u‖²_h: an empirical lower bound for the
/// embedding constant β in [u]_s² ≤ β ∫|∇u|².
double fit_embedding_constant(const DiscreteMixedOperator& op, std::span<const GridFunction> samples);
double fit_embedding_constant(const GridPtr& grid, double s, std::span<const GridFunction> samples);

/// Debug dumps: A_loc as (row, col, value) triplets and the tail vector.
void write_local_triplets(std::ostream& out, const DiscreteMixedOperator& op);
void write_tail(std::ostream& out, const DiscreteMixedOperator& op);

}  // namespace mixsing
