#include "mixsing/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace mixsing;

namespace {

json read_document(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config_error, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config_error, std::string("parse error: ") + e.what());
  }
}

int run_one(const ExperimentConfig& config, bool quiet = false) {
  const RunManifest m = run_experiment(config);
  if (!quiet) {
    std::cout << "output: " << config.output.string() << '\n';
    for (const auto& f : m.files) std::cout << "  " << f.name << "  " << f.sha256 << '\n';
    std::cout << (m.pass ? "PASS" : "FAIL") << '\n';
  }
  return m.pass ? 0 : 1;
}

// "a.b.c" -> nested object key; numeric-looking values are stored as numbers.
void set_dotted(json& doc, const std::string& path, const std::string& raw) {
  json* node = &doc;
  std::stringstream ss(path);
  std::string key;
  std::vector<std::string> keys;
  while (std::getline(ss, key, '.')) keys.push_back(key);
  if (keys.empty()) throw Error(ErrorKind::config_error, "empty --param");
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
    if (!node->is_object()) throw Error(ErrorKind::config_error, "--param path crosses a non-object at " + keys[i]);
    node = &(*node)[keys[i]];
    if (node->is_null()) *node = json::object();
  }
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::exception&) {
    value = raw;
  }
  (*node)[keys.back()] = value;
}

std::vector<std::string> split_list(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixsing: mixed local/nonlocal singular problems, comparison and summability checks"};
  app.require_subcommand(1);

  std::string config_path;
  auto* solve = app.add_subcommand("solve", "Run a configured experiment");
  solve->add_option("config", config_path, "JSON configuration")->required();

  auto* compare = app.add_subcommand("compare", "Run an experiment with the comparison and bound checks forced on");
  compare->add_option("config", config_path, "JSON configuration")->required();

  int bn = 1;
  double bm = 2.0, bgamma = 0.5, bvolume = 1.0, bfnorm = 1.0;
  auto* bounds = app.add_subcommand("bounds", "Evaluate the summability bound constants");
  bounds->add_option("--n", bn, "dimension")->required();
  bounds->add_option("--m", bm, "summability of f")->required();
  bounds->add_option("--gamma", bgamma, "singularity exponent")->required();
  bounds->add_option("--volume", bvolume, "domain volume");
  bounds->add_option("--fnorm", bfnorm, "norm of f in L^m");

  std::string fault;
  auto* self = app.add_subcommand("selftest", "Run the built-in invariant suites");
  self->add_option("--inject-fault", fault, "test hook")->check(CLI::IsMember({"sign-flip"}));

  std::string param, values;
  auto* sweep = app.add_subcommand("sweep", "Repeat an experiment over values of one parameter");
  sweep->add_option("config", config_path, "JSON configuration")->required();
  sweep->add_option("--param", param, "dotted key, e.g. problem.s")->required();
  sweep->add_option("--values", values, "comma separated values")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*solve || *compare) {
      ExperimentConfig config = load_config(config_path);
      if (*compare) config.checks.talenti = config.checks.bounds = true;
      return run_one(config);
    }
    if (*bounds) {
      const BoundReport r = summability_bounds(bn, bm, bgamma, bvolume, bfnorm);
      std::cout << to_json(r).dump(2) << '\n';
      return 0;
    }
    if (*self) {
      SelftestOptions opt;
      opt.inject_sign_flip = fault == "sign-flip";
      int failed = 0;
      for (const auto& s : selftest(opt)) {
        std::cout << std::left << std::setw(22) << s.name << s.passed << '/' << s.total << '\n';
        if (s.passed != s.total) ++failed;
      }
      std::cout << (failed ? "selftest: FAIL" : "selftest: PASS") << '\n';
      return failed ? 1 : 0;
    }
    if (*sweep) {
      const fs::path path(config_path);
      const json base = read_document(path);
      int worst = 0;
      for (const auto& v : split_list(values)) {
        json doc = base;
        set_dotted(doc, param, v);
        ExperimentConfig config = parse_config(doc, path.parent_path());
        config.output /= param + "=" + v;
        int rc = 0;
        try {
          rc = run_one(config, true);
        } catch (const Error& e) {
          std::cerr << param << '=' << v << ": " << e.what() << '\n';
          rc = exit_code_for(e.kind());
        }
        std::cout << param << '=' << v << "  " << (rc == 0 ? "PASS" : "FAIL") << "  " << config.output.string() << '\n';
        worst = std::max(worst, rc);
      }
      return worst;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
