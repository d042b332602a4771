#include "mixsing/experiment.hpp"
#include "mixsing/rearrange.hpp"

#include <cmath>
#include <random>

namespace mixsing {
namespace {

class Suite {
public:
  explicit Suite(std::string name) { result_.name = std::move(name); }
  void expect(bool ok) {
    ++result_.total;
    if (ok) ++result_.passed;
  }
  template <class F>
  void guarded(F&& body) {
    try {
      body();
    } catch (const std::exception&) {
      expect(false);
    }
  }
  SuiteResult result() const { return result_; }

private:
  SuiteResult result_;
};

std::vector<ValueMeasure<double>> random_cells(std::mt19937_64& rng, int count) {
  std::uniform_real_distribution<double> value(-3.0, 3.0), measure(0.01, 0.2);
  std::vector<ValueMeasure<double>> out;
  for (int i = 0; i < count; ++i) out.push_back({value(rng), measure(rng)});
  return out;
}

bool same_distribution(const StepFunction<double>& a, const StepFunction<double>& b) {
  if (a.levels != b.levels || a.measures.size() != b.measures.size()) return false;
  for (std::size_t j = 0; j < a.measures.size(); ++j)
    if (std::abs(a.measures[j] - b.measures[j]) > 1e-12) return false;
  return true;
}

ProblemSpec model_spec(double s, double gamma, double q) {
  ProblemSpec spec;
  spec.s = s;
  spec.nonlinearity.gamma = gamma;
  spec.nonlinearity.q = q;
  spec.f.kind = SourceSpec::Kind::polynomial;
  spec.f.coefficients = {1.0, 0.0, 1.0};
  spec.schedule.n_levels = {1, 2, 4, 8};
  return spec;
}

}  // namespace

std::vector<SuiteResult> selftest(const SelftestOptions& options) {
  std::vector<SuiteResult> out;
  std::mt19937_64 rng(20240611);

  {
    Suite t("grid");
    t.guarded([&] {
      const GridPtr g = build_grid(Domain::interval(-1.0, 1.0), 4);
      t.expect(g->size() == 3 && g->node(0)[0] == -0.5 && g->node(2)[0] == 0.5);
      const GridPtr r = build_grid(Domain::rectangle(0.0, 1.0, 0.0, 1.0), 3);
      t.expect(r->size() == 4 && std::abs(r->cell_measure() - 1.0 / 9.0) < 1e-15);
      t.expect(g->cell_measure() * static_cast<double>(g->size()) <= 2.0);
    });
    out.push_back(t.result());
  }

  OperatorOptions hook;
  hook.flip_fractional_entry = options.inject_sign_flip;
  {
    Suite t("operator-symmetry");
    t.guarded([&] {
      for (double s : {0.25, 0.5, 0.75}) {
        const auto op1 = assemble_operator(build_grid(Domain::interval(-1.0, 1.0), 16), s, hook);
        t.expect((op1.fractional() - op1.fractional().transpose()).cwiseAbs().maxCoeff() == 0.0);
        const Eigen::MatrixXd loc(op1.local());
        t.expect((loc - loc.transpose()).cwiseAbs().maxCoeff() == 0.0);
      }
      const auto op2 = assemble_operator(build_grid(Domain::rectangle(-1.0, 1.0, -1.0, 1.0), 6), 0.4, hook);
      t.expect((op2.fractional() - op2.fractional().transpose()).cwiseAbs().maxCoeff() == 0.0);
    });
    out.push_back(t.result());
  }

  {
    Suite t("operator-coercivity");
    t.guarded([&] {
      const GridPtr g = build_grid(Domain::interval(-1.0, 1.0), 16);
      const auto op = assemble_operator(g, 0.3, hook);
      std::normal_distribution<double> nd;
      for (int k = 0; k < 10; ++k) {
        Eigen::VectorXd v(g->size());
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = nd(rng);
        const GridFunction u(g, v);
        t.expect(bilinear_form(op, u, u) >= local_energy(op, u) && local_energy(op, u) > 0.0);
      }
      for (Eigen::Index i = 0; i < op.tail().size(); ++i) t.expect(op.tail()[i] > 0.0);
      for (Eigen::Index i = 0; i < g->size(); ++i)
        for (Eigen::Index j = i + 2; j < g->size(); ++j) t.expect(op.fractional()(i, j) <= 0.0);
    });
    out.push_back(t.result());
  }

  {
    Suite t("exterior-kernel");
    t.guarded([&] {
      for (double s : {0.25, 0.5, 0.75}) {
        const double x = 0.0;
        t.expect(std::abs(exterior_kernel_integral(Domain::interval(-1.0, 1.0), {&x, 1}, s) - 1.0 / s) < 1e-12);
      }
    });
    out.push_back(t.result());
  }

  {
    Suite t("truncations");
    std::uniform_real_distribution<double> ud(-10.0, 10.0);
    for (int k = 0; k < 200; ++k) {
      const double x = ud(rng), kk = std::abs(ud(rng)) + 0.1;
      t.expect(std::abs(truncate_k(kk, x) + remainder_k(kk, x) - x) <= 1e-14 * std::abs(x));
      const double v = v_delta_k(1.0, kk, x);
      t.expect(v >= 0.0 && v <= 1.0 && std::abs(v + s_delta_k(1.0, kk, x) - 1.0) <= 1e-15);
      const double gt = level_test(1.0, 0.5, x);
      t.expect(gt >= 0.0 && gt <= 0.5);
    }
    out.push_back(t.result());
  }

  {
    Suite t("rearrangement");
    t.guarded([&] {
      for (int k = 0; k < 50; ++k) {
        const auto a = random_cells(rng, 20);
        double total = 0.0;
        for (const auto& p : a) total += p.measure;
        const auto star = decreasing_rearrangement(a, total);
        t.expect(same_distribution(distribution_function(star), distribution_function(a)));
        double l1 = 0.0, l2 = 0.0;
        for (const auto& p : a) {
          l1 += std::abs(p.value) * p.measure;
          l2 += p.value * p.value * p.measure;
        }
        t.expect(std::abs(profile_lp_norm(star, 1.0) - l1) <= 1e-12 * std::max(1.0, l1));
        t.expect(std::abs(profile_lp_norm(star, 2.0) - std::sqrt(l2)) <= 1e-12 * std::max(1.0, l2));
        auto b = a;
        std::shuffle(b.begin(), b.end(), rng);
        for (std::size_t i = 0; i < b.size(); ++i) b[i].measure = a[i].measure;
        t.expect(hardy_littlewood_gap(a, b) >= -1e-12);
      }
    });
    out.push_back(t.result());
  }

  {
    Suite t("comparison-profile");
    t.guarded([&] {
      const RearrangedProfile<double> one(ProfileKind::step, {0.0, 2.0}, {1.0}, 2.0);
      const auto v = comparison_profile(one, 1, 2.0);
      double worst = 0.0;
      for (std::size_t i = 0; i < v.breaks().size(); ++i) {
        const double tau = v.breaks()[i];
        worst = std::max(worst, std::abs(v.values()[i] - (4.0 - tau * tau) / 8.0));
      }
      t.expect(worst <= 1e-12);
      t.expect(v.values().back() == 0.0);
    });
    out.push_back(t.result());
  }

  {
    Suite t("regime");
    t.guarded([&] {
      const RegimeReport r = classify_regime(0.5, 2.0, 5, 1.0);
      t.expect(r.q_threshold == 0.0 && r.p_exponent && *r.p_exponent == 15.0 && r.genuine_gain);
      t.expect(std::abs(*r.m_threshold - 10.0 / 6.5) < 1e-15);
      t.expect(classify_regime(1.0, 2.0, 1, 1.0).q_threshold == -1.0);
    });
    out.push_back(t.result());
  }

  {
    Suite t("solver");
    t.guarded([&] {
      const ProblemSpec spec = model_spec(0.25, 0.5, 2.0);
      const GridPtr g = build_grid(spec.domain, 32);
      const auto op = assemble_operator(g, spec.s, hook);
      const GridFunction f = sample_source(g, spec.f);
      const LimitResult res = solve_limit(op, spec, f);
      t.expect(res.report.monotonicity_violation <= 1e-8);
      t.expect(res.u.values().minCoeff() > 0.0);
      for (const auto& l : res.report.levels) t.expect(l.final_residual_maxnorm <= 1e-10 && l.apriori_satisfied);
    });
    out.push_back(t.result());
  }
  return out;
}

}  // namespace mixsing
