#pragma once

#include "mixsing/domain_grid.hpp"
#include "mixsing/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace mixsing {

/// Volume of the unit ball in R^n.
template <class Scalar = double>
Scalar unit_ball_volume(int n) {
  using std::pow;
  using std::tgamma;
  const Scalar half = Scalar(n) / Scalar(2);
  return pow(std::numbers::pi_v<Scalar>, half) / tgamma(half + Scalar(1));
}

template <class Scalar>
struct ValueMeasure {
  Scalar value;
  Scalar measure;
};

/// μ(t) = |{|u| > t}| as a right-continuous step function of t ≥ 0:
/// μ(t) = measures[j] for t in [levels[j], levels[j+1]), with levels[0] = 0 and
/// μ ≡ 0 from levels.back() on.
template <class Scalar = double>
struct StepFunction {
  std::vector<Scalar> levels{Scalar(0)};
  std::vector<Scalar> measures;

  Scalar operator()(Scalar t) const {
    if (t < Scalar(0)) t = Scalar(0);
    const auto it = std::upper_bound(levels.begin(), levels.end(), t);
    const auto j = static_cast<std::size_t>(it - levels.begin()) - 1;
    return j < measures.size() ? measures[j] : Scalar(0);
  }

  bool operator==(const StepFunction&) const = default;
};

enum class ProfileKind {
  step,    ///< constant values[j] on [breaks[j], breaks[j+1])
  linear,  ///< nodal values at breaks, linear in between
};

/// Nonincreasing, nonnegative function on (0, total_measure).
template <class Scalar = double>
class RearrangedProfile {
public:
  RearrangedProfile() = default;
  RearrangedProfile(ProfileKind kind, std::vector<Scalar> breaks, std::vector<Scalar> values, Scalar total)
      : kind_(kind), breaks_(std::move(breaks)), values_(std::move(values)), total_(total) {
    const std::size_t expect = kind_ == ProfileKind::step ? breaks_.size() - 1 : breaks_.size();
    if (breaks_.size() < 2 || values_.size() != expect)
      throw Error(ErrorKind::invalid_argument, "profile breakpoints and values disagree");
    if (breaks_.front() != Scalar(0) || breaks_.back() != total_)
      throw Error(ErrorKind::measure_mismatch, "profile must span (0, total measure)");
    for (std::size_t j = 1; j < breaks_.size(); ++j)
      if (!(breaks_[j] > breaks_[j - 1])) throw Error(ErrorKind::invalid_argument, "breakpoints must increase");
    for (std::size_t j = 0; j < values_.size(); ++j) {
      if (values_[j] < Scalar(0)) throw Error(ErrorKind::invalid_argument, "profile values must be nonnegative");
      if (j > 0 && values_[j] > values_[j - 1]) throw Error(ErrorKind::increasing_profile, "profile must be nonincreasing");
    }
  }

  ProfileKind kind() const noexcept { return kind_; }
  const std::vector<Scalar>& breaks() const noexcept { return breaks_; }
  const std::vector<Scalar>& values() const noexcept { return values_; }
  Scalar total_measure() const noexcept { return total_; }
  std::size_t pieces() const noexcept { return breaks_.size() - 1; }

  /// Right-continuous evaluation; 0 at and beyond the total measure.
  Scalar operator()(Scalar s) const {
    if (s >= total_) return kind_ == ProfileKind::linear && s == total_ ? values_.back() : Scalar(0);
    if (s < Scalar(0)) s = Scalar(0);
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), s);
    const auto j = static_cast<std::size_t>(it - breaks_.begin()) - 1;
    if (kind_ == ProfileKind::step) return values_[j];
    const Scalar w = (s - breaks_[j]) / (breaks_[j + 1] - breaks_[j]);
    return values_[j] + w * (values_[j + 1] - values_[j]);
  }

  /// Left limit at s > 0.
  Scalar left_limit(Scalar s) const {
    if (kind_ == ProfileKind::linear) return (*this)(s);
    if (s <= Scalar(0)) return values_.front();
    if (s > total_) return Scalar(0);
    const auto it = std::lower_bound(breaks_.begin(), breaks_.end(), s);
    return values_[static_cast<std::size_t>(it - breaks_.begin()) - 1];
  }

  /// u*(0⁺), the essential supremum.
  Scalar sup() const noexcept { return values_.front(); }

  /// Piece values as a step profile (identity for step kind; linear pieces are
  /// averaged), mainly for distribution comparisons.
  std::vector<ValueMeasure<Scalar>> step_pieces() const {
    std::vector<ValueMeasure<Scalar>> out;
    for (std::size_t j = 0; j + 1 < breaks_.size(); ++j) {
      const Scalar v = kind_ == ProfileKind::step ? values_[j] : (values_[j] + values_[j + 1]) / Scalar(2);
      out.push_back({v, breaks_[j + 1] - breaks_[j]});
    }
    return out;
  }

private:
  ProfileKind kind_ = ProfileKind::step;
  std::vector<Scalar> breaks_{Scalar(0), Scalar(1)};
  std::vector<Scalar> values_{Scalar(0)};
  Scalar total_ = Scalar(1);
};

/// Cell data of a grid function: (|u_i|, cell_measure) per interior node.
inline std::vector<ValueMeasure<double>> cell_data(const GridFunction& u) {
  std::vector<ValueMeasure<double>> out;
  out.reserve(static_cast<std::size_t>(u.size()));
  const double mu = u.grid()->cell_measure();
  for (Eigen::Index i = 0; i < u.size(); ++i) out.push_back({std::abs(u[i]), mu});
  return out;
}

namespace detail {

template <class Scalar>
void check_pairs(const std::vector<ValueMeasure<Scalar>>& pairs) {
  using std::isfinite;
  if (pairs.empty()) throw Error(ErrorKind::empty_input, "no data to rearrange");
  for (const auto& p : pairs) {
    if (!isfinite(p.value)) throw Error(ErrorKind::invalid_argument, "non-finite value");
    if (!(p.measure > Scalar(0))) throw Error(ErrorKind::invalid_argument, "measures must be positive");
  }
}

// (|value|, measure) sorted by value descending, ties merged, zeros dropped.
template <class Scalar>
std::vector<ValueMeasure<Scalar>> plateaus(const std::vector<ValueMeasure<Scalar>>& pairs) {
  using std::abs;
  std::vector<ValueMeasure<Scalar>> sorted;
  sorted.reserve(pairs.size());
  for (const auto& p : pairs)
    if (abs(p.value) > Scalar(0)) sorted.push_back({abs(p.value), p.measure});
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.value > b.value; });
  std::vector<ValueMeasure<Scalar>> merged;
  for (const auto& p : sorted) {
    if (!merged.empty() && merged.back().value == p.value)
      merged.back().measure += p.measure;
    else
      merged.push_back(p);
  }
  return merged;
}

}  // namespace detail

template <class Scalar>
StepFunction<Scalar> distribution_function(const std::vector<ValueMeasure<Scalar>>& pairs) {
  detail::check_pairs(pairs);
  const auto plat = detail::plateaus(pairs);
  StepFunction<Scalar> mu;
  // plateaus descend in value; the measure above level t accumulates from the top
  std::vector<Scalar> cumulative(plat.size());
  Scalar acc = Scalar(0);
  for (std::size_t j = 0; j < plat.size(); ++j) cumulative[j] = (acc += plat[j].measure);
  for (std::size_t r = plat.size(); r-- > 0;) {
    mu.measures.push_back(cumulative[r]);
    mu.levels.push_back(plat[r].value);
  }
  return mu;
}

inline StepFunction<double> distribution_function(const GridFunction& u) {
  return distribution_function(cell_data(u));
}

template <class Scalar>
StepFunction<Scalar> distribution_function(const RearrangedProfile<Scalar>& profile) {
  if (profile.kind() != ProfileKind::step)
    throw Error(ErrorKind::invalid_argument, "distribution of a linear profile is not a step function");
  const auto pieces = profile.step_pieces();
  bool any = false;
  for (const auto& p : pieces) any = any || p.value > Scalar(0);
  if (!any) return StepFunction<Scalar>{};
  return distribution_function(pieces);
}

/// u* of piecewise-constant data, zero-padded up to total_measure.
template <class Scalar>
RearrangedProfile<Scalar> decreasing_rearrangement(const std::vector<ValueMeasure<Scalar>>& pairs,
                                                   Scalar total_measure) {
  detail::check_pairs(pairs);
  const auto plat = detail::plateaus(pairs);
  std::vector<Scalar> breaks{Scalar(0)};
  std::vector<Scalar> values;
  Scalar acc = Scalar(0);
  for (const auto& p : plat) {
    acc += p.measure;
    breaks.push_back(acc);
    values.push_back(p.value);
  }
  Scalar mass = Scalar(0);
  for (const auto& p : pairs) mass += p.measure;
  const Scalar slack = Scalar(64) * std::numeric_limits<Scalar>::epsilon() * std::max(Scalar(1), total_measure);
  if (mass > total_measure + slack) throw Error(ErrorKind::measure_mismatch, "data measure exceeds the total measure");
  if (values.empty()) return RearrangedProfile<Scalar>(ProfileKind::step, {Scalar(0), total_measure}, {Scalar(0)}, total_measure);
  if (breaks.back() < total_measure - slack) {
    breaks.push_back(total_measure);
    values.push_back(Scalar(0));
  } else {
    breaks.back() = total_measure;
  }
  return RearrangedProfile<Scalar>(ProfileKind::step, std::move(breaks), std::move(values), total_measure);
}

template <class Scalar>
RearrangedProfile<Scalar> decreasing_rearrangement(const std::vector<ValueMeasure<Scalar>>& pairs) {
  Scalar mass = Scalar(0);
  for (const auto& p : pairs) mass += p.measure;
  return decreasing_rearrangement(pairs, mass);
}

/// Grid functions are rearranged on (0, |Ω|).
inline RearrangedProfile<double> decreasing_rearrangement(const GridFunction& u) {
  return decreasing_rearrangement(cell_data(u), u.grid()->domain().volume());
}

/// x ↦ u*(ω_n |x|^n) on the ball of volume |Ω| centred at the origin.
template <class Scalar = double>
class RadialFunction {
public:
  RadialFunction(RearrangedProfile<Scalar> profile, int n)
      : profile_(std::move(profile)), n_(n), omega_(unit_ball_volume<Scalar>(n)) {
    if (n < 1) throw Error(ErrorKind::invalid_argument, "dimension must be positive");
  }

  Scalar at_radius(Scalar r) const {
    using std::abs;
    using std::pow;
    return profile_(omega_ * pow(abs(r), Scalar(n_)));
  }

  Scalar operator()(std::span<const Scalar> x) const {
    using std::sqrt;
    Scalar r2 = Scalar(0);
    for (Scalar c : x) r2 += c * c;
    return at_radius(sqrt(r2));
  }

  /// Radius of the ball Ω^♯.
  Scalar radius() const {
    using std::pow;
    return pow(profile_.total_measure() / omega_, Scalar(1) / Scalar(n_));
  }

  int dimension() const noexcept { return n_; }

private:
  RearrangedProfile<Scalar> profile_;
  int n_;
  Scalar omega_;
};

template <class Scalar>
RadialFunction<Scalar> schwarz_rearrangement(const RearrangedProfile<Scalar>& profile, int n) {
  return RadialFunction<Scalar>(profile, n);
}

namespace detail {

template <class Scalar>
std::vector<Scalar> merged_breaks(const RearrangedProfile<Scalar>& a, const RearrangedProfile<Scalar>& b) {
  std::vector<Scalar> out;
  std::merge(a.breaks().begin(), a.breaks().end(), b.breaks().begin(), b.breaks().end(), std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

template <class Scalar>
void require_same_measure(const RearrangedProfile<Scalar>& a, const RearrangedProfile<Scalar>& b) {
  using std::abs;
  const Scalar tol = Scalar(64) * std::numeric_limits<Scalar>::epsilon() * std::max(Scalar(1), a.total_measure());
  if (abs(a.total_measure() - b.total_measure()) > tol)
    throw Error(ErrorKind::measure_mismatch, "profiles live on different measure intervals");
}

}  // namespace detail

/// ∫ a·b over (0, |Ω|), exact for step profiles.
template <class Scalar>
Scalar integrate_product(const RearrangedProfile<Scalar>& a, const RearrangedProfile<Scalar>& b) {
  detail::require_same_measure(a, b);
  if (a.kind() != ProfileKind::step || b.kind() != ProfileKind::step)
    throw Error(ErrorKind::invalid_argument, "products are integrated for step profiles only");
  const auto br = detail::merged_breaks(a, b);
  Scalar acc = Scalar(0);
  for (std::size_t j = 0; j + 1 < br.size(); ++j) acc += a(br[j]) * b(br[j]) * (br[j + 1] - br[j]);
  return acc;
}

/// ∫₀^{|Ω|} u*v* − ∫_Ω |uv|, both exact for piecewise-constant data.
inline double hardy_littlewood_gap(const GridFunction& u, const GridFunction& v) {
  require_same_grid(u, v);
  const double direct = (u.values().cwiseAbs().array() * v.values().cwiseAbs().array()).sum() * u.grid()->cell_measure();
  return integrate_product(decreasing_rearrangement(u), decreasing_rearrangement(v)) - direct;
}

template <class Scalar>
Scalar hardy_littlewood_gap(const std::vector<ValueMeasure<Scalar>>& u, const std::vector<ValueMeasure<Scalar>>& v) {
  using std::abs;
  if (u.size() != v.size()) throw Error(ErrorKind::measure_mismatch, "cell data of different sizes");
  Scalar direct = Scalar(0), total = Scalar(0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i].measure != v[i].measure) throw Error(ErrorKind::measure_mismatch, "cell measures differ");
    direct += abs(u[i].value * v[i].value) * u[i].measure;
    total += u[i].measure;
  }
  return integrate_product(decreasing_rearrangement(u, total), decreasing_rearrangement(v, total)) - direct;
}

inline constexpr double infinity_norm = std::numeric_limits<double>::infinity();

/// ‖u*‖_{L^p(0,|Ω|)}; exact for step profiles and for linear profiles (per
/// piece ∫ of a power of a linear function).
template <class Scalar>
Scalar profile_lp_norm(const RearrangedProfile<Scalar>& profile, Scalar p) {
  using std::pow;
  if (!(p >= Scalar(1))) throw Error(ErrorKind::invalid_argument, "p must be at least 1");
  if (p == std::numeric_limits<Scalar>::infinity()) return profile.sup();
  const auto& br = profile.breaks();
  const auto& v = profile.values();
  Scalar acc = Scalar(0);
  for (std::size_t j = 0; j + 1 < br.size(); ++j) {
    const Scalar len = br[j + 1] - br[j];
    if (profile.kind() == ProfileKind::step) {
      acc += pow(v[j], p) * len;
    } else {
      const Scalar a = v[j], b = v[j + 1];
      acc += a == b ? pow(a, p) * len : len * (pow(a, p + 1) - pow(b, p + 1)) / ((p + 1) * (a - b));
    }
  }
  return pow(acc, Scalar(1) / p);
}

/// ‖a − b‖_{L^p(0,|Ω|)} for step profiles.
template <class Scalar>
Scalar profile_lp_distance(const RearrangedProfile<Scalar>& a, const RearrangedProfile<Scalar>& b, Scalar p) {
  using std::abs;
  using std::pow;
  detail::require_same_measure(a, b);
  if (a.kind() != ProfileKind::step || b.kind() != ProfileKind::step)
    throw Error(ErrorKind::invalid_argument, "distances are computed for step profiles only");
  const auto br = detail::merged_breaks(a, b);
  if (p == std::numeric_limits<Scalar>::infinity()) {
    Scalar m = Scalar(0);
    for (std::size_t j = 0; j + 1 < br.size(); ++j) m = std::max(m, abs(a(br[j]) - b(br[j])));
    return m;
  }
  Scalar acc = Scalar(0);
  for (std::size_t j = 0; j + 1 < br.size(); ++j) acc += pow(abs(a(br[j]) - b(br[j])), p) * (br[j + 1] - br[j]);
  return pow(acc, Scalar(1) / p);
}

/// Profile CSV: header `# mixsing profile v1, volume=<|Ω|>`, then `s,value`
/// rows. Step profiles list the left end of each plateau; linear profiles list
/// their nodes.
template <class Scalar>
void write_profile_csv(std::ostream& out, const RearrangedProfile<Scalar>& profile) {
  out << std::setprecision(17) << "# mixsing profile v1, volume=" << profile.total_measure() << '\n';
  out << "s,value\n";
  const auto& br = profile.breaks();
  const auto& v = profile.values();
  for (std::size_t j = 0; j < v.size(); ++j) out << br[j] << ',' << v[j] << '\n';
}

/// Reads a step profile written by write_profile_csv.
inline RearrangedProfile<double> read_profile_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::io_error, "empty profile stream");
  const std::string tag = "# mixsing profile v1, volume=";
  if (line.rfind(tag, 0) != 0) throw Error(ErrorKind::io_error, "not a mixsing profile");
  const double volume = std::stod(line.substr(tag.size()));
  std::getline(in, line);
  std::vector<double> breaks, values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    double s = 0.0, v = 0.0;
    char comma = 0;
    if (!(row >> s >> comma >> v) || comma != ',') throw Error(ErrorKind::io_error, "malformed profile row: " + line);
    breaks.push_back(s);
    values.push_back(v);
  }
  breaks.push_back(volume);
  return RearrangedProfile<double>(ProfileKind::step, std::move(breaks), std::move(values), volume);
}

}  // namespace mixsing
