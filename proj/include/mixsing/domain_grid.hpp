#pragma once

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <variant>

namespace mixsing {

struct Interval {
  double a;
  double b;
};

struct Rectangle {
  double ax;
  double bx;
  double ay;
  double by;
};

/// Abstract measure space used by rearrangement-only workflows (any n).
struct MeasureOnly {
  int n;
  double volume;
};

class Domain {
public:
  using Kind = std::variant<Interval, Rectangle, MeasureOnly>;

  static Domain interval(double a, double b);
  static Domain rectangle(double ax, double bx, double ay, double by);
  static Domain measure_only(int n, double volume);

  const Kind& kind() const noexcept { return kind_; }
  int dimension() const noexcept;
  double volume() const noexcept;
  bool is_measure_only() const noexcept { return std::holds_alternative<MeasureOnly>(kind_); }

  /// Side lengths per axis (empty for MeasureOnly).
  Eigen::VectorXd sides() const;
  /// Lower corner per axis (empty for MeasureOnly).
  Eigen::VectorXd lower() const;

private:
  explicit Domain(Kind kind) : kind_(kind) {}
  Kind kind_;
};

using NodeMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Uniform tensor grid on an interval or rectangle. Only interior nodes carry
/// unknowns; boundary and exterior values are identically zero.
class Grid {
public:
  Grid(Domain domain, int subdivisions);

  const Domain& domain() const noexcept { return domain_; }
  int dimension() const noexcept { return domain_.dimension(); }
  int subdivisions() const noexcept { return subdivisions_; }
  /// Largest spacing over the axes.
  double h() const noexcept { return spacing_.maxCoeff(); }
  const Eigen::VectorXd& spacing() const noexcept { return spacing_; }
  double cell_measure() const noexcept { return cell_measure_; }

  Eigen::Index size() const noexcept { return nodes_.rows(); }
  /// Interior nodes per axis (N - 1).
  int nodes_per_axis() const noexcept { return subdivisions_ - 1; }
  const NodeMatrix& interior_nodes() const noexcept { return nodes_; }
  std::span<const double> node(Eigen::Index i) const {
    return {nodes_.data() + i * nodes_.cols(), static_cast<std::size_t>(nodes_.cols())};
  }

  /// Interior index of the lattice node with per-axis indices in [1, N-1],
  /// or -1 when the lattice node lies on the boundary.
  Eigen::Index interior_index(int ix, int iy = 1) const noexcept;

private:
  Domain domain_;
  int subdivisions_;
  Eigen::VectorXd spacing_;
  double cell_measure_;
  NodeMatrix nodes_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr build_grid(const Domain& domain, int subdivisions);

/// Nodal values on a grid; the represented function is the nodal interpolant
/// inside the domain and zero outside.
class GridFunction {
public:
  GridFunction() = default;
  explicit GridFunction(GridPtr grid);
  GridFunction(GridPtr grid, Eigen::VectorXd values);

  const GridPtr& grid() const noexcept { return grid_; }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  Eigen::VectorXd& values() noexcept { return values_; }
  Eigen::Index size() const noexcept { return values_.size(); }
  double operator[](Eigen::Index i) const { return values_[i]; }

private:
  GridPtr grid_;
  Eigen::VectorXd values_;
};

/// Throws grid-mismatch unless both functions live on the same grid object.
void require_same_grid(const GridFunction& u, const GridFunction& v);

using PointFunction = std::function<double(std::span<const double>)>;

enum class SampleCheck { any_sign, nonnegative };

GridFunction sample_function(const GridPtr& grid, const PointFunction& f,
                             SampleCheck check = SampleCheck::any_sign);

/// CSV with header `# mixsing gridfunction v1, n=<n>, N=<N>`, then one row per
/// interior node: coordinates followed by the value.
void write_csv(std::ostream& out, const GridFunction& u);
GridFunction read_csv(std::istream& in, const GridPtr& grid);

}  // namespace mixsing
