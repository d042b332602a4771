#include "mixsing/operators.hpp"

#include "mixsing/error.hpp"
#include "mixsing/parallel.hpp"
#include "mixsing/quadrature.hpp"

#include <array>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <vector>

namespace mixsing {
namespace {

void require_order(double s) {
  if (!(s > 0.0 && s < 1.0)) throw Error(ErrorKind::invalid_order, "fractional order must lie in (0, 1)");
}

// ---------------------------------------------------------------------------
// 1D: the full-space form of two P1 hats equals
//   c ∫∫ φ_i'(x) φ_j'(y) W(x - y),  W(r) = -|r|^{1-2s} / (s(1-2s))  (-2 log|r| at s = 1/2),
// which collapses to a Toeplitz matrix a(|i-j|) = h^{1-2s} δ⁴q(k) / (s(2-2s)(3-2s)),
// q(d) = d² (|d|^ε - 1)/ε with ε = 1 - 2s (q = d² log|d| at ε = 0).
// ---------------------------------------------------------------------------

double q_kernel(double d, double eps) {
  const double a = std::abs(d);
  if (a == 0.0) return 0.0;
  const double l = std::log(a);
  return eps == 0.0 ? a * a * l : a * a * std::expm1(eps * l) / eps;
}

// r-th derivative of q at d > 0 for r >= 3.
double q_derivative(int r, double d, double eps) {
  double c = (2.0 + eps) * (1.0 + eps);
  for (int j = 3; j <= r - 1; ++j) c *= (2.0 + eps - j);
  return c * std::pow(d, 2.0 + eps - r);
}

double fourth_difference_q(long k, double eps) {
  constexpr long series_threshold = 24;
  if (k < series_threshold) {
    const double d = static_cast<double>(k);
    return q_kernel(d + 2, eps) - 4.0 * q_kernel(d + 1, eps) + 6.0 * q_kernel(d, eps) -
           4.0 * q_kernel(d - 1, eps) + q_kernel(d - 2, eps);
  }
  // δ⁴f = Σ_{r even ≥ 4} (2^{r+1} - 8)/r! f^{(r)}; terms decay like (r/k)^r.
  const double d = static_cast<double>(k);
  double sum = 0.0;
  double factorial = 24.0;  // r!
  for (int r = 4; r <= 20; r += 2) {
    sum += (std::ldexp(1.0, r + 1) - 8.0) / factorial * q_derivative(r, d, eps);
    factorial *= (r + 1.0) * (r + 2.0);
  }
  return sum;
}

FractionalAssembly assemble_fractional_1d(const Grid& grid, double s) {
  const Eigen::Index m = grid.size();
  const double h = grid.spacing()[0];
  const double eps = 1.0 - 2.0 * s;
  const double scale = std::pow(h, eps) / (s * (2.0 - 2.0 * s) * (3.0 - 2.0 * s));

  Eigen::VectorXd band(m);
  for (Eigen::Index k = 0; k < m; ++k) band[k] = scale * fourth_difference_q(static_cast<long>(k), eps);

  FractionalAssembly out;
  out.matrix.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) out.matrix(i, j) = band[std::abs(i - j)];
  out.tail.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) out.tail[i] = exterior_kernel_integral(grid.domain(), grid.node(i), s);
  return out;
}

// ---------------------------------------------------------------------------
// 2D: B(u, v) = (1/(2s²)) ∫∫ ∇u(x)·∇v(y) |x-y|^{-2s} dx dy. On a uniform grid
// the element-pair integrals depend only on the cell offset, so a table of
// 4x4 local matrices indexed by offset is built once and scattered.
// ---------------------------------------------------------------------------

using Local4 = Eigen::Matrix4d;

struct AxisFactors {
  // d(a, a') = ∫ H_a'((t+w)/h) H_{a'}'(t/h) / h² dt, p(a, a') = ∫ H_a((t+w)/h) H_{a'}(t/h) dt
  Eigen::Matrix2d d;
  Eigen::Matrix2d p;
};

inline double hat(int a, double t) { return a == 0 ? 1.0 - t : t; }

AxisFactors axis_factors(double w, double h) {
  const double lo = std::max(0.0, -w);
  const double hi = std::min(h, h - w);
  const double len = std::max(0.0, hi - lo);
  AxisFactors f;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) f.d(a, b) = (a == 0 ? -1.0 : 1.0) * (b == 0 ? -1.0 : 1.0) * len / (h * h);
  // Integrand is quadratic in t: two-point Gauss is exact.
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * len;
  const double g = half / std::numbers::sqrt3;
  f.p.setZero();
  for (double t : {mid - g, mid + g}) {
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) f.p(a, b) += half * hat(a, (t + w) / h) * hat(b, t / h);
  }
  return f;
}

// G(w)[2a+b][2a'+b'] for the reference cell pair displaced by w (x-cell minus y-cell).
Local4 convolution_density(double w1, double w2, double hx, double hy) {
  const AxisFactors fx = axis_factors(w1, hx);
  const AxisFactors fy = axis_factors(w2, hy);
  Local4 g;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int a2 = 0; a2 < 2; ++a2)
        for (int b2 = 0; b2 < 2; ++b2)
          g(2 * a + b, 2 * a2 + b2) = fx.d(a, a2) * fy.p(b, b2) + fx.p(a, a2) * fy.d(b, b2);
  return g;
}

struct OffsetRules {
  quad::Rule jacobi;          // radial Duffy variable, weight u^{1-2s}
  quad::Rule legendre_angle;  // angular Duffy variable
  quad::Rule near;            // tensor rule next to the singularity
  quad::Rule mid;
  quad::Rule far;
};

Local4 offset_matrix(int ox, int oy, double hx, double hy, double s, const OffsetRules& rules) {
  Local4 total = Local4::Zero();
  const double zx0 = ox * hx;
  const double zy0 = oy * hy;
  const int reach = std::max(std::abs(ox), std::abs(oy));
  const quad::Rule& tensor = reach <= 2 ? rules.near : (reach <= 6 ? rules.mid : rules.far);

  for (int qx = 0; qx < 2; ++qx) {
    for (int qy = 0; qy < 2; ++qy) {
      const double w1a = qx == 0 ? -hx : 0.0, w1b = qx == 0 ? 0.0 : hx;
      const double w2a = qy == 0 ? -hy : 0.0, w2b = qy == 0 ? 0.0 : hy;
      // singular point z = 0 sits at w = (-zx0, -zy0)
      const double c1 = -zx0, c2 = -zy0;
      const bool corner_x = c1 == w1a || c1 == w1b;
      const bool corner_y = c2 == w2a || c2 == w2b;

      if (corner_x && corner_y) {
        // Duffy split into two triangles sharing the singular corner.
        const double p1 = c1 == w1a ? w1b : w1a;  // opposite x edge
        const double p2 = c2 == w2a ? w2b : w2a;
        const std::array<std::array<double, 4>, 2> triangles{{
            {p1 - c1, 0.0, p1 - c1, p2 - c2},  // (A - c), (B - c)
            {p1 - c1, p2 - c2, 0.0, p2 - c2},
        }};
        for (const auto& tri : triangles) {
          const double ax = tri[0], ay = tri[1], bx = tri[2], by = tri[3];
          const double det = std::abs(ax * by - ay * bx);
          for (Eigen::Index iv = 0; iv < rules.legendre_angle.nodes.size(); ++iv) {
            const double v = rules.legendre_angle.nodes[iv];
            const double dx = ax + v * (bx - ax);
            const double dy = ay + v * (by - ay);
            const double dir = std::pow(dx * dx + dy * dy, -s);
            for (Eigen::Index iu = 0; iu < rules.jacobi.nodes.size(); ++iu) {
              const double u = rules.jacobi.nodes[iu];
              const double wgt = det * rules.legendre_angle.weights[iv] * rules.jacobi.weights[iu] * dir;
              total += wgt * convolution_density(c1 + u * dx, c2 + u * dy, hx, hy);
            }
          }
        }
      } else {
        const double sx = 0.5 * (w1b - w1a), mx = 0.5 * (w1b + w1a);
        const double sy = 0.5 * (w2b - w2a), my = 0.5 * (w2b + w2a);
        for (Eigen::Index i = 0; i < tensor.nodes.size(); ++i) {
          const double w1 = mx + sx * tensor.nodes[i];
          for (Eigen::Index j = 0; j < tensor.nodes.size(); ++j) {
            const double w2 = my + sy * tensor.nodes[j];
            const double z1 = w1 + zx0, z2 = w2 + zy0;
            const double kernel = std::pow(z1 * z1 + z2 * z2, -s);
            total += sx * sy * tensor.weights[i] * tensor.weights[j] * kernel *
                     convolution_density(w1, w2, hx, hy);
          }
        }
      }
    }
  }
  return total;
}

FractionalAssembly assemble_fractional_2d(const Grid& grid, double s) {
  const int n_cells = grid.subdivisions();
  const int m_axis = grid.nodes_per_axis();
  const double hx = grid.spacing()[0];
  const double hy = grid.spacing()[1];
  const Eigen::Index m = grid.size();

  OffsetRules rules{quad::gauss_jacobi_unit(5, 1.0 - 2.0 * s), quad::gauss_legendre(12, 0.0, 1.0),
                    quad::gauss_legendre(8), quad::gauss_legendre(5), quad::gauss_legendre(4)};

  const int span = 2 * n_cells - 1;
  std::vector<Local4> table(static_cast<std::size_t>(span) * span);
  auto slot = [&](int ox, int oy) -> std::size_t {
    return static_cast<std::size_t>(ox + n_cells - 1) * span + static_cast<std::size_t>(oy + n_cells - 1);
  };
  parallel_for(0, static_cast<std::ptrdiff_t>(span) * span, [&](std::ptrdiff_t idx) {
    const int ox = static_cast<int>(idx / span) - (n_cells - 1);
    const int oy = static_cast<int>(idx % span) - (n_cells - 1);
    table[static_cast<std::size_t>(idx)] = offset_matrix(ox, oy, hx, hy, s, rules);
  });

  const double constant = 1.0 / (2.0 * s * s);
  FractionalAssembly out;
  out.matrix.resize(m, m);
  parallel_for(0, m, [&](std::ptrdiff_t i) {
    const int ix = static_cast<int>(i / m_axis) + 1;
    const int iy = static_cast<int>(i % m_axis) + 1;
    for (Eigen::Index j = i; j < m; ++j) {
      const int jx = static_cast<int>(j / m_axis) + 1;
      const int jy = static_cast<int>(j % m_axis) + 1;
      double sum = 0.0;
      for (int ka = 0; ka < 2; ++ka) {      // x-cell of node i: cx = ix - 1 + ka, local a = 1 - ka
        for (int kb = 0; kb < 2; ++kb) {
          const int li = 2 * (1 - ka) + (1 - kb);
          for (int la = 0; la < 2; ++la) {
            for (int lb = 0; lb < 2; ++lb) {
              const int lj = 2 * (1 - la) + (1 - lb);
              const int ox = (ix - 1 + ka) - (jx - 1 + la);
              const int oy = (iy - 1 + kb) - (jy - 1 + lb);
              sum += table[slot(ox, oy)](li, lj);
            }
          }
        }
      }
      out.matrix(i, j) = constant * sum;
    }
  });
  out.matrix.triangularView<Eigen::StrictlyLower>() = out.matrix.transpose().triangularView<Eigen::StrictlyLower>();

  out.tail.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) out.tail[i] = exterior_kernel_integral(grid.domain(), grid.node(i), s);
  return out;
}

}  // namespace

DiscreteMixedOperator::DiscreteMixedOperator(GridPtr grid, double s, SparseMatrix local,
                                             Eigen::MatrixXd fractional, Eigen::VectorXd tail)
    : grid_(std::move(grid)), s_(s), local_(std::move(local)), fractional_(std::move(fractional)),
      tail_(std::move(tail)) {
  combined_ = fractional_;
  combined_ += Eigen::MatrixXd(local_);
}

Eigen::Matrix4d q1_element_stiffness(double hx, double hy) {
  // local order (a, b) -> 2a + b; ∫ H_a' H_a' = ±1/h, ∫ H_b H_b = h/3 or h/6
  Eigen::Matrix4d ke;
  const double rx = hy / hx, ry = hx / hy;
  for (int p = 0; p < 4; ++p) {
    for (int q = 0; q < 4; ++q) {
      const int ap = p / 2, bp = p % 2, aq = q / 2, bq = q % 2;
      const double dx = (ap == aq) ? 1.0 : -1.0;
      const double dy = (bp == bq) ? 1.0 : -1.0;
      const double mx = (ap == aq) ? 1.0 / 3.0 : 1.0 / 6.0;
      const double my = (bp == bq) ? 1.0 / 3.0 : 1.0 / 6.0;
      ke(p, q) = rx * dx * my + ry * mx * dy;
    }
  }
  return ke;
}

SparseMatrix assemble_local(const Grid& grid) {
  const Eigen::Index m = grid.size();
  std::vector<Eigen::Triplet<double>> triplets;
  if (grid.dimension() == 1) {
    const double h = grid.spacing()[0];
    for (Eigen::Index i = 0; i < m; ++i) {
      triplets.emplace_back(i, i, 2.0 / h);
      if (i + 1 < m) {
        triplets.emplace_back(i, i + 1, -1.0 / h);
        triplets.emplace_back(i + 1, i, -1.0 / h);
      }
    }
  } else {
    const Eigen::Matrix4d ke = q1_element_stiffness(grid.spacing()[0], grid.spacing()[1]);
    const int n = grid.subdivisions();
    for (int cx = 0; cx < n; ++cx) {
      for (int cy = 0; cy < n; ++cy) {
        std::array<Eigen::Index, 4> idx{};
        for (int p = 0; p < 4; ++p) idx[p] = grid.interior_index(cx + p / 2, cy + p % 2);
        for (int p = 0; p < 4; ++p) {
          if (idx[p] < 0) continue;
          for (int q = 0; q < 4; ++q)
            if (idx[q] >= 0) triplets.emplace_back(idx[p], idx[q], ke(p, q));
        }
      }
    }
  }
  SparseMatrix a(m, m);
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

FractionalAssembly assemble_fractional(const Grid& grid, double s) {
  require_order(s);
  if (grid.size() > max_dense_nodes)
    throw Error(ErrorKind::capacity_exceeded, "dense nonlocal matrix capped at 10^4 interior nodes");
  return grid.dimension() == 1 ? assemble_fractional_1d(grid, s) : assemble_fractional_2d(grid, s);
}

DiscreteMixedOperator assemble_operator(const GridPtr& grid, double s, OperatorOptions options) {
  require_order(s);
  SparseMatrix local = assemble_local(*grid);
  FractionalAssembly frac;
  if (options.zero_fractional) {
    frac.matrix = Eigen::MatrixXd::Zero(grid->size(), grid->size());
    frac.tail.resize(grid->size());
    for (Eigen::Index i = 0; i < grid->size(); ++i)
      frac.tail[i] = exterior_kernel_integral(grid->domain(), grid->node(i), s);
  } else {
    frac = assemble_fractional(*grid, s);
  }
  if (options.flip_fractional_entry && grid->size() > 1) frac.matrix(0, 1) = -frac.matrix(0, 1);
  return DiscreteMixedOperator(grid, s, std::move(local), std::move(frac.matrix), std::move(frac.tail));
}

double exterior_kernel_integral(const Domain& domain, std::span<const double> x, double s) {
  require_order(s);
  if (const auto* iv = std::get_if<Interval>(&domain.kind())) {
    return (std::pow(iv->b - x[0], -2.0 * s) + std::pow(x[0] - iv->a, -2.0 * s)) / (2.0 * s);
  }
  if (const auto* r = std::get_if<Rectangle>(&domain.kind())) {
    // κ(x) = (1/2s) ∫_0^{2π} R(θ)^{-2s} dθ; per side R = d / cos ψ over the
    // angular window subtended by that side.
    static const quad::Rule rule = quad::gauss_legendre(32);
    struct Side {
      double dist;
      double lo;
      double hi;
    };
    const double px = x[0], py = x[1];
    const std::array<Side, 4> sides{{
        {r->bx - px, r->ay - py, r->by - py},
        {px - r->ax, r->ay - py, r->by - py},
        {r->by - py, r->ax - px, r->bx - px},
        {py - r->ay, r->ax - px, r->bx - px},
    }};
    double total = 0.0;
    for (const Side& side : sides) {
      const double psi_lo = std::atan2(side.lo, side.dist);
      const double psi_hi = std::atan2(side.hi, side.dist);
      // split at the foot of the perpendicular so both pieces are smooth
      for (auto [a, b] : {std::pair{psi_lo, std::min(0.0, psi_hi)}, std::pair{std::max(0.0, psi_lo), psi_hi}}) {
        if (!(b > a)) continue;
        const double half = 0.5 * (b - a), mid = 0.5 * (b + a);
        for (Eigen::Index k = 0; k < rule.nodes.size(); ++k) {
          const double psi = mid + half * rule.nodes[k];
          total += half * rule.weights[k] * std::pow(std::cos(psi) / side.dist, 2.0 * s);
        }
      }
    }
    return total / (2.0 * s);
  }
  throw Error(ErrorKind::unsupported_domain, "exterior integral needs an interval or rectangle");
}

double bilinear_form(const DiscreteMixedOperator& op, const GridFunction& u, const GridFunction& v) {
  require_same_grid(u, v);
  if (u.grid() != op.grid()) throw Error(ErrorKind::grid_mismatch, "function not on the operator grid");
  return u.values().dot(op.combined() * v.values());
}

double local_energy(const DiscreteMixedOperator& op, const GridFunction& u) {
  if (u.grid() != op.grid()) throw Error(ErrorKind::grid_mismatch, "function not on the operator grid");
  return u.values().dot(op.local() * u.values());
}

double fractional_energy(const DiscreteMixedOperator& op, const GridFunction& u) {
  if (u.grid() != op.grid()) throw Error(ErrorKind::grid_mismatch, "function not on the operator grid");
  return u.values().dot(op.fractional() * u.values());
}

double fit_embedding_constant(const DiscreteMixedOperator& op, std::span<const GridFunction> samples) {
  if (samples.empty()) throw Error(ErrorKind::degenerate_input, "no samples given");
  double best = 0.0;
  for (const GridFunction& u : samples) {
    const double grad = local_energy(op, u);
    if (!(grad > 0.0)) throw Error(ErrorKind::degenerate_input, "all-zero sample");
    best = std::max(best, fractional_energy(op, u) / grad);
  }
  return best;
}

double fit_embedding_constant(const GridPtr& grid, double s, std::span<const GridFunction> samples) {
  return fit_embedding_constant(assemble_operator(grid, s), samples);
}

void write_local_triplets(std::ostream& out, const DiscreteMixedOperator& op) {
  out << "# mixsing local stiffness triplets v1\nrow,col,value\n" << std::setprecision(17);
  for (int k = 0; k < op.local().outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(op.local(), k); it; ++it)
      out << it.row() << ',' << it.col() << ',' << it.value() << '\n';
}

void write_tail(std::ostream& out, const DiscreteMixedOperator& op) {
  out << "# mixsing tail v1\nindex,kappa\n" << std::setprecision(17);
  for (Eigen::Index i = 0; i < op.tail().size(); ++i) out << i << ',' << op.tail()[i] << '\n';
}

}  // namespace mixsing
