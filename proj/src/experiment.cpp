#include "mixsing/experiment.hpp"

#include "mixsing/rearrange.hpp"

#include <Eigen/Core>
#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace mixsing {
namespace fs = std::filesystem;

namespace {

[[noreturn]] void config_fail(const std::string& what) { throw Error(ErrorKind::config_error, what); }

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    config_fail(std::string("bad value for '") + key + "': " + e.what());
  }
}

ScalarFunction parse_scalar_function(const json& j) {
  ScalarFunction f;
  const std::string kind = get_or<std::string>(j, "kind", "zero");
  if (kind == "zero") return f;
  if (kind != "power") config_fail("unknown function kind: " + kind);
  f.kind = ScalarFunction::Kind::power;
  f.coefficient = get_or(j, "coefficient", 1.0);
  f.exponent = get_or(j, "exponent", 1.0);
  f.shift = get_or(j, "shift", 0.0);
  return f;
}

SourceSpec parse_source(const json& j, const fs::path& base) {
  SourceSpec s;
  if (j.contains("csv")) {
    s.kind = SourceSpec::Kind::samples;
    fs::path p = j.at("csv").get<std::string>();
    s.path = (p.is_absolute() || base.empty() ? p : base / p).string();
    return s;
  }
  const std::string preset = get_or<std::string>(j, "preset", "constant");
  s.value = get_or(j, "value", 1.0);
  if (preset == "constant") {
    s.kind = SourceSpec::Kind::constant;
  } else if (preset == "polynomial") {
    s.kind = SourceSpec::Kind::polynomial;
    s.coefficients = get_or(j, "coefficients", std::vector<double>{});
    if (s.coefficients.empty()) config_fail("polynomial source needs coefficients");
  } else if (preset == "gaussian") {
    s.kind = SourceSpec::Kind::gaussian;
    s.width = get_or(j, "width", 1.0);
    s.center = get_or(j, "center", std::vector<double>{});
    if (!(s.width > 0.0)) config_fail("gaussian width must be positive");
  } else if (preset == "radial_power") {
    s.kind = SourceSpec::Kind::radial_power;
    s.power = get_or(j, "power", 0.0);
  } else {
    config_fail("unknown source preset: " + preset);
  }
  return s;
}

Domain parse_domain(const json& j) {
  const std::string kind = get_or<std::string>(j, "kind", "interval");
  if (kind == "interval") {
    const double a = get_or(j, "a", -1.0), b = get_or(j, "b", 1.0);
    if (!(b > a)) config_fail("interval needs a < b");
    return Domain::interval(a, b);
  }
  if (kind == "rectangle") {
    const double ax = get_or(j, "ax", -1.0), bx = get_or(j, "bx", 1.0);
    const double ay = get_or(j, "ay", -1.0), by = get_or(j, "by", 1.0);
    if (!(bx > ax) || !(by > ay)) config_fail("rectangle needs positive side lengths");
    return Domain::rectangle(ax, bx, ay, by);
  }
  config_fail("unsupported domain kind: " + kind);
}

json number(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

FileEntry describe(const fs::path& dir, const std::string& name) {
  const fs::path p = dir / name;
  return {name, fs::file_size(p), sha256_hex(p)};
}

class PhaseTimer {
public:
  explicit PhaseTimer(RunManifest& m) : manifest_(m) {}
  template <class F>
  auto run(const std::string& phase, F&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(body())>) {
        body();
        record(phase, t0);
      } else {
        auto out = body();
        record(phase, t0);
        return out;
      }
    } catch (const Error& e) {
      throw Error(e.kind(), phase + ": " + std::string(e.what()));
    }
  }

private:
  void record(const std::string& phase, std::chrono::steady_clock::time_point t0) {
    manifest_.phase_seconds.emplace_back(phase, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  RunManifest& manifest_;
};

}  // namespace

ExperimentConfig parse_config(const json& doc, const fs::path& base) {
  if (!doc.is_object()) config_fail("configuration must be a JSON object");
  ExperimentConfig c;
  c.source = doc;
  const json problem = doc.value("problem", json::object());
  ProblemSpec& p = c.problem;
  const json grid = doc.value("grid", json::object());
  if (grid.contains("domain") && problem.contains("domain")) config_fail("domain given twice (grid.domain and problem.domain)");
  p.domain = parse_domain(grid.contains("domain") ? grid.at("domain") : problem.value("domain", json::object()));
  p.s = get_or(problem, "s", 0.5);
  p.m = get_or(problem, "m", 2.0);
  NonlinearitySpec& nl = p.nonlinearity;
  nl.gamma = get_or(problem, "gamma", 0.5);
  nl.q = get_or(problem, "q", 1.0);
  if (problem.contains("theta")) nl.theta = get_or(problem, "theta", nl.gamma);
  const std::string mode = get_or<std::string>(problem, "mode", "model");
  if (mode == "custom") {
    nl.mode = Mode::custom;
    nl.g = parse_scalar_function(problem.value("g", json::object()));
    nl.h = parse_scalar_function(problem.value("h", json::object()));
    if (!problem.contains("singular_at_zero")) config_fail("custom mode needs an explicit singular_at_zero flag");
    nl.singular_at_zero = get_or(problem, "singular_at_zero", true);
  } else if (mode != "model") {
    config_fail("mode must be 'model' or 'custom'");
  }
  nl.absorption_off = get_or(problem, "absorption_off", false);
  const json consts = problem.value("constants", json::object());
  nl.c_lower = get_or(consts, "c_lower", nl.c_lower);
  nl.c_upper = get_or(consts, "c_upper", nl.c_upper);
  nl.s_lower = get_or(consts, "s_lower", nl.s_lower);
  nl.s_upper = get_or(consts, "s_upper", nl.s_upper);
  nl.nu = get_or(consts, "nu", nl.nu);
  nl.s1 = get_or(consts, "s1", nl.s1);
  p.f = parse_source(problem.value("f", json::object()), base);
  const std::string hreg = get_or<std::string>(problem, "h_regularization", nl.mode == Mode::model ? "shifted" : "truncated");
  if (hreg == "shifted") p.h_form = HRegularization::shifted;
  else if (hreg == "truncated") p.h_form = HRegularization::truncated;
  else config_fail("h_regularization must be 'shifted' or 'truncated'");

  const json sched = doc.value("schedule", json::object());
  p.schedule.n_levels = get_or(sched, "n_levels", p.schedule.n_levels);
  p.schedule.k_initial = get_or(sched, "k_initial", p.schedule.k_initial);
  if (p.schedule.n_levels.empty()) config_fail("schedule.n_levels must not be empty");
  for (int n : p.schedule.n_levels)
    if (n <= 0) config_fail("n levels must be positive");

  const json tol = doc.value("tolerances", json::object());
  p.tolerances.residual = get_or(tol, "residual", p.tolerances.residual);
  p.tolerances.level = get_or(tol, "level", p.tolerances.level);
  p.tolerances.max_newton = get_or(tol, "max_newton", p.tolerances.max_newton);
  c.talenti_relative = get_or(tol, "talenti_relative", c.talenti_relative);
  c.talenti_h_factor = get_or(tol, "talenti_h_factor", c.talenti_h_factor);
  if (!(p.tolerances.residual > 0.0) || !(p.tolerances.level > 0.0) || p.tolerances.max_newton <= 0 ||
      !(c.talenti_relative >= 0.0) || !(c.talenti_h_factor >= 0.0))
    config_fail("tolerances must be positive");

  c.N = get_or(grid, "N", c.N);
  const json checks = doc.value("checks", json::object());
  c.checks.talenti = get_or(checks, "talenti", c.checks.talenti);
  c.checks.bounds = get_or(checks, "bounds", c.checks.bounds);
  c.checks.uniqueness = get_or(checks, "uniqueness", c.checks.uniqueness);
  c.checks.equiintegrability = get_or(checks, "equiintegrability", c.checks.equiintegrability);
  c.checks.energy = get_or(checks, "energy", c.checks.energy);
  if (doc.contains("output")) {
    fs::path out = doc.at("output").get<std::string>();
    c.output = out.is_absolute() || base.empty() ? out : base / out;
  }
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config_error, "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config_error, std::string("parse error: ") + e.what());
  }
  return parse_config(doc, path.parent_path());
}

std::string sha256_hex(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_error, "cannot read " + file.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 15];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return os.str();
}

json to_json(const ValidationReport& r) {
  json out = json::array();
  for (const auto& c : r.checks) out.push_back({{"name", c.name}, {"status", to_string(c.status)}, {"detail", c.detail}});
  return out;
}

json to_json(const RegimeReport& r) {
  json out;
  out["q_threshold"] = r.q_threshold;
  out["m_threshold"] = r.m_threshold ? json(*r.m_threshold) : json(nullptr);
  out["case"] = to_string(r.summability_case);
  out["genuine_gain"] = r.genuine_gain;
  out["p_exponent"] = r.p_exponent ? json(*r.p_exponent) : json(nullptr);
  out["q_admissible"] = r.q_admissible;
  return out;
}

json to_json(const SolveReport& r) {
  return {{"n_level", r.n_level},
          {"k_level", r.k_level},
          {"newton_iterations", r.newton_iterations},
          {"picard_steps", r.picard_steps},
          {"clamp_count", r.clamp_count},
          {"converged", r.converged},
          {"final_residual_maxnorm", r.final_residual_maxnorm},
          {"energy_rho_sq", r.energy_rho_sq},
          {"absorption_mass", r.absorption_mass},
          {"apriori_constant", r.apriori_constant},
          {"apriori_satisfied", r.apriori_satisfied},
          {"min_value", r.min_value},
          {"max_value", r.max_value}};
}

json to_json(const LimitReport& r) {
  json levels = json::array();
  for (const auto& l : r.levels) levels.push_back(to_json(l));
  return {{"n_levels", r.n_levels},
          {"levels", levels},
          {"successive_sup_diffs", r.successive_sup_diffs},
          {"monotonicity_violation", r.monotonicity_violation},
          {"converged", r.converged},
          {"final_k", r.final_k}};
}

json to_json(const ComparisonReport& r) {
  return {{"points", r.tau.size()},
          {"min_margin", r.min_margin},
          {"integrated_margin", r.integrated_margin},
          {"tolerance", r.tolerance},
          {"pass", r.pass}};
}

json to_json(const BoundReport& r) {
  json consts = json::object();
  for (const auto& [k, v] : r.constants) consts[k] = number(v);
  return {{"case", to_string(r.bound_case)},
          {"p", r.p ? json(*r.p) : json(nullptr)},
          {"rhs_value", number(r.rhs_value)},
          {"statement_rhs", number(r.statement_rhs)},
          {"hardy_rhs", number(r.hardy_rhs)},
          {"lhs_value", r.lhs_value ? number(*r.lhs_value) : json(nullptr)},
          {"constants", consts},
          {"pass", r.lhs_value ? json(r.pass) : json(nullptr)}};
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::nonconvergence:
      return 3;
    case ErrorKind::invalid_subdivision:
    case ErrorKind::unsupported_domain:
    case ErrorKind::invalid_sample:
    case ErrorKind::hypothesis_violation:
    case ErrorKind::invalid_order:
    case ErrorKind::capacity_exceeded:
    case ErrorKind::outside_theory:
    case ErrorKind::out_of_case:
    case ErrorKind::invalid_argument:
    case ErrorKind::config_error:
    case ErrorKind::io_error:
    case ErrorKind::empty_input:
    case ErrorKind::measure_mismatch:
    case ErrorKind::increasing_profile:
    case ErrorKind::grid_mismatch:
    case ErrorKind::degenerate_input:
      return 2;
    default:
      return 1;
  }
}

RunManifest run_experiment(const ExperimentConfig& config) {
  RunManifest manifest;
  manifest.config = config.source;
  manifest.versions = {{"mixsing", "1.0.0"},
                       {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                     std::to_string(EIGEN_MINOR_VERSION)},
                       {"compiler", __VERSION__}};
  PhaseTimer timer(manifest);
  const ProblemSpec& spec = config.problem;
  json report;
  report["config"] = config.source;
  bool pass = true;

  const ValidationReport validation = timer.run("validate", [&] { return validate_hypotheses(spec); });
  report["hypotheses"] = to_json(validation);
  if (!validation.ok()) {
    std::string failed;
    for (const auto& c : validation.checks)
      if (c.status == CheckStatus::fail) failed += (failed.empty() ? "" : ", ") + c.name;
    throw Error(ErrorKind::hypothesis_violation, "validate: failed " + failed);
  }
  const int n = spec.domain.dimension();
  try {
    report["regime"] = to_json(classify_regime(spec.nonlinearity.gamma, spec.m, n, spec.nonlinearity.q));
  } catch (const Error& e) {
    report["regime"] = {{"error", e.what()}};
  }

  fs::create_directories(config.output);
  for (const char* name : {"solution.csv", "profile.csv", "comparison.csv", "report.json", "manifest.json"})
    fs::remove(config.output / name);
  const GridPtr grid = timer.run("grid", [&] { return build_grid(spec.domain, config.N); });
  const GridFunction f = timer.run("sample", [&] { return sample_source(grid, spec.f); });
  const DiscreteMixedOperator op = timer.run("assemble", [&] { return assemble_operator(grid, spec.s); });
  const LimitResult limit = timer.run("solve", [&] { return solve_limit(op, spec, f); });
  report["limit"] = to_json(limit.report);
  const GridFunction& u = limit.u;
  {
    std::ofstream out(config.output / "solution.csv");
    write_csv(out, u);
  }
  if (spec.nonlinearity.mode == Mode::model && limit.report.monotonicity_violation > 1e-8) pass = false;
  const double umin = u.size() ? u.values().minCoeff() : 0.0;
  report["positivity"] = {{"min_value", umin}, {"pass", umin >= -1e-12}};
  pass = pass && umin >= -1e-12;

  const auto [u_star, f_star] = timer.run("rearrange", [&] {
    return std::pair{decreasing_rearrangement(u), decreasing_rearrangement(f)};
  });
  {
    std::ofstream out(config.output / "profile.csv");
    write_profile_csv(out, u_star);
  }

  const double umax = u.size() ? u.values().maxCoeff() : 0.0;
  if (config.checks.talenti) {
    timer.run("compare", [&] {
      const auto v_star = comparison_profile(f_star, n, spec.domain.volume(), u_star.breaks());
      const double tol = config.talenti_relative * umax + config.talenti_h_factor * grid->h();
      const ComparisonReport cmp = talenti_margin(u_star, v_star, spec.nonlinearity.gamma, tol);
      json j = to_json(cmp);
      j["levelset_margin"] = levelset_inequality_check(u_star, f_star, spec.nonlinearity.gamma, n);
      report["talenti"] = j;
      pass = pass && cmp.pass;
      std::ofstream out(config.output / "comparison.csv");
      out << std::setprecision(17) << "tau,u_star,bound,margin\n";
      for (std::size_t i = 0; i < cmp.tau.size(); ++i)
        out << cmp.tau[i] << ',' << cmp.u_star[i] << ',' << cmp.bound[i] << ',' << cmp.margin[i] << '\n';
    });
  }

  if (config.checks.bounds) {
    timer.run("bounds", [&] {
      const double fnorm = profile_lp_norm(f_star, spec.m);
      if (!(fnorm > 0.0)) {
        report["bounds"] = {{"skipped", "f vanishes"}, {"pass", true}};
        return;
      }
      BoundReport b = summability_bounds(n, spec.m, spec.nonlinearity.gamma, spec.domain.volume(), fnorm);
      if (b.bound_case == BoundCase::ii) {
        b.check(profile_lp_norm(u_star, std::numeric_limits<double>::infinity()));
      } else if (b.bound_case == BoundCase::i) {
        b.check(profile_lp_norm(u_star, *b.p));
      } else {
        b.check(orlicz_sup(u_star, n, spec.nonlinearity.gamma, spec.domain.volume()).value);
      }
      report["bounds"] = to_json(b);
      report["bounds"]["f_norm_m"] = fnorm;
      pass = pass && b.pass;
    });
  }

  if (config.checks.energy) {
    bool ok = true;
    for (const auto& l : limit.report.levels) ok = ok && l.apriori_satisfied;
    report["energy"] = {{"apriori_all_levels", ok}};
    pass = pass && ok;
  }

  if (config.checks.equiintegrability) {
    timer.run("equiintegrability", [&] {
      if (!(umax > 0.0)) {
        report["equiintegrability"] = {{"margin", 0.0}, {"pass", true}};
        return;
      }
      const double k = umax / 2.0, eta = k / 4.0;
      const TruncatedData data = build_truncated_data(spec, f, spec.schedule.n_levels.at(limit.report.levels.size() - 1), limit.report.final_k);
      const double margin = equiintegrability_check(op, u, spec, data.f_n, eta, k);
      report["equiintegrability"] = {{"k", k}, {"eta", eta}, {"margin", margin}, {"pass", margin >= -1e-10}};
      pass = pass && margin >= -1e-10;
    });
  }

  if (config.checks.uniqueness) {
    timer.run("uniqueness", [&] {
      std::vector<GridFunction> starts;
      starts.emplace_back(grid);
      starts.emplace_back(grid, Eigen::VectorXd::Ones(grid->size()));
      starts.push_back(sample_function(grid, [&](std::span<const double> x) {
        double t = 10.0;
        const Eigen::VectorXd lo = spec.domain.lower(), side = spec.domain.sides();
        for (std::size_t a = 0; a < x.size(); ++a) t *= 1.0 - std::abs(2.0 * (x[a] - lo[a]) / side[a] - 1.0);
        return t;
      }));
      const UniquenessReport uq = uniqueness_probe(op, spec, f, starts);
      const bool ok = uq.max_difference <= 1e-8 && uq.identity_minimum >= -1e-10;
      report["uniqueness"] = {{"max_difference", uq.max_difference}, {"identity_minimum", uq.identity_minimum}, {"pass", ok}};
      pass = pass && ok;
    });
  }

  report["pass"] = pass;
  {
    std::ofstream out(config.output / "report.json");
    out << report.dump(2) << '\n';
  }
  manifest.report = report;
  manifest.pass = pass;
  for (const char* name : {"solution.csv", "profile.csv", "comparison.csv", "report.json"})
    if (fs::exists(config.output / name)) manifest.files.push_back(describe(config.output, name));

  json m;
  m["config"] = manifest.config;
  m["versions"] = manifest.versions;
  json phases = json::object();
  for (const auto& [phase, secs] : manifest.phase_seconds) phases[phase] = secs;
  m["wall_seconds"] = phases;
  json files = json::array();
  for (const auto& fe : manifest.files) files.push_back({{"name", fe.name}, {"bytes", fe.bytes}, {"sha256", fe.sha256}});
  m["files"] = files;
  m["pass"] = pass;
  std::ofstream out(config.output / "manifest.json");
  out << m.dump(2) << '\n';
  return manifest;
}

}  // namespace mixsing
