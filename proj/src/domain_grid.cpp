#include "mixsing/domain_grid.hpp"

#include "mixsing/error.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace mixsing {

Domain Domain::interval(double a, double b) {
  if (!(b > a)) throw Error(ErrorKind::unsupported_domain, "interval needs b > a");
  return Domain(Interval{a, b});
}

Domain Domain::rectangle(double ax, double bx, double ay, double by) {
  if (!(bx > ax) || !(by > ay))
    throw Error(ErrorKind::unsupported_domain, "rectangle needs positive side lengths");
  return Domain(Rectangle{ax, bx, ay, by});
}

Domain Domain::measure_only(int n, double volume) {
  if (n < 1 || !(volume > 0.0) || !std::isfinite(volume))
    throw Error(ErrorKind::unsupported_domain, "measure-only domain needs n >= 1 and volume > 0");
  return Domain(MeasureOnly{n, volume});
}

int Domain::dimension() const noexcept {
  if (std::holds_alternative<Interval>(kind_)) return 1;
  if (std::holds_alternative<Rectangle>(kind_)) return 2;
  return std::get<MeasureOnly>(kind_).n;
}

double Domain::volume() const noexcept {
  if (const auto* i = std::get_if<Interval>(&kind_)) return i->b - i->a;
  if (const auto* r = std::get_if<Rectangle>(&kind_)) return (r->bx - r->ax) * (r->by - r->ay);
  return std::get<MeasureOnly>(kind_).volume;
}

Eigen::VectorXd Domain::sides() const {
  if (const auto* i = std::get_if<Interval>(&kind_)) return Eigen::VectorXd::Constant(1, i->b - i->a);
  if (const auto* r = std::get_if<Rectangle>(&kind_)) {
    Eigen::VectorXd s(2);
    s << r->bx - r->ax, r->by - r->ay;
    return s;
  }
  return {};
}

Eigen::VectorXd Domain::lower() const {
  if (const auto* i = std::get_if<Interval>(&kind_)) return Eigen::VectorXd::Constant(1, i->a);
  if (const auto* r = std::get_if<Rectangle>(&kind_)) {
    Eigen::VectorXd s(2);
    s << r->ax, r->ay;
    return s;
  }
  return {};
}

Grid::Grid(Domain domain, int subdivisions) : domain_(domain), subdivisions_(subdivisions) {
  if (subdivisions < 2) throw Error(ErrorKind::invalid_subdivision, "need N >= 2");
  if (domain.is_measure_only())
    throw Error(ErrorKind::unsupported_domain, "measure-only domains cannot be discretized");

  const int dim = domain.dimension();
  spacing_ = domain.sides() / static_cast<double>(subdivisions);
  cell_measure_ = spacing_.prod();
  const Eigen::VectorXd lo = domain.lower();
  const int m = subdivisions - 1;

  if (dim == 1) {
    nodes_.resize(m, 1);
    for (int i = 0; i < m; ++i) nodes_(i, 0) = lo[0] + (i + 1) * spacing_[0];
  } else {
    // x-major lexicographic order
    nodes_.resize(static_cast<Eigen::Index>(m) * m, 2);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const Eigen::Index k = static_cast<Eigen::Index>(i) * m + j;
        nodes_(k, 0) = lo[0] + (i + 1) * spacing_[0];
        nodes_(k, 1) = lo[1] + (j + 1) * spacing_[1];
      }
    }
  }
}

Eigen::Index Grid::interior_index(int ix, int iy) const noexcept {
  const int m = nodes_per_axis();
  if (ix < 1 || ix > m) return -1;
  if (dimension() == 1) return ix - 1;
  if (iy < 1 || iy > m) return -1;
  return static_cast<Eigen::Index>(ix - 1) * m + (iy - 1);
}

GridPtr build_grid(const Domain& domain, int subdivisions) {
  return std::make_shared<const Grid>(domain, subdivisions);
}

GridFunction::GridFunction(GridPtr grid)
    : grid_(std::move(grid)), values_(Eigen::VectorXd::Zero(grid_->size())) {}

GridFunction::GridFunction(GridPtr grid, Eigen::VectorXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size())
    throw Error(ErrorKind::grid_mismatch, "value count does not match interior node count");
}

void require_same_grid(const GridFunction& u, const GridFunction& v) {
  if (!u.grid() || u.grid() != v.grid())
    throw Error(ErrorKind::grid_mismatch, "functions live on different grids");
}

GridFunction sample_function(const GridPtr& grid, const PointFunction& f, SampleCheck check) {
  Eigen::VectorXd values(grid->size());
  for (Eigen::Index i = 0; i < grid->size(); ++i) {
    const double v = f(grid->node(i));
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "non-finite value at node " << i;
      throw Error(ErrorKind::invalid_sample, msg.str());
    }
    if (check == SampleCheck::nonnegative && v < 0.0) {
      std::ostringstream msg;
      msg << "source datum must be nonnegative, got " << v << " at node " << i;
      throw Error(ErrorKind::hypothesis_violation, msg.str());
    }
    values[i] = v;
  }
  return GridFunction(grid, std::move(values));
}

void write_csv(std::ostream& out, const GridFunction& u) {
  const Grid& g = *u.grid();
  out << "# mixsing gridfunction v1, n=" << g.dimension() << ", N=" << g.subdivisions() << '\n';
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    for (double c : g.node(i)) out << c << ',';
    out << u[i] << '\n';
  }
}

GridFunction read_csv(std::istream& in, const GridPtr& grid) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# mixsing gridfunction v1", 0) != 0)
    throw Error(ErrorKind::io_error, "missing gridfunction header");
  const int dim = grid->dimension();
  Eigen::VectorXd values(grid->size());
  Eigen::Index row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (row >= grid->size()) throw Error(ErrorKind::grid_mismatch, "too many rows in gridfunction csv");
    std::istringstream fields(line);
    std::string cell;
    int col = 0;
    double value = 0.0;
    while (std::getline(fields, cell, ',')) {
      const double x = std::stod(cell);
      if (col < dim) {
        if (std::abs(x - grid->node(row)[col]) > 1e-9 * (1.0 + std::abs(x)))
          throw Error(ErrorKind::grid_mismatch, "csv coordinates do not match the grid");
      } else {
        value = x;
      }
      ++col;
    }
    if (col != dim + 1) throw Error(ErrorKind::io_error, "malformed gridfunction row");
    values[row++] = value;
  }
  if (row != grid->size()) throw Error(ErrorKind::grid_mismatch, "too few rows in gridfunction csv");
  return GridFunction(grid, std::move(values));
}

}  // namespace mixsing
