#pragma once

#include "mixsing/problem_data.hpp"
#include "mixsing/solver.hpp"
#include "mixsing/talenti.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mixsing {

using json = nlohmann::ordered_json;

struct CheckFlags {
  bool talenti = true;
  bool bounds = true;
  bool uniqueness = false;
  bool equiintegrability = true;
  bool energy = true;
};

struct ExperimentConfig {
  ProblemSpec problem;
  int N = 64;
  CheckFlags checks;
  std::filesystem::path output = "mixsing-out";
  double talenti_relative = 0.05;  ///< tolerance = rel·‖U‖_∞ + h_factor·h
  double talenti_h_factor = 2.0;
  json source;                     ///< the parsed document, echoed into reports
};

/// Parses the JSON configuration; relative sample paths resolve against `base`.
ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base = {});
ExperimentConfig load_config(const std::filesystem::path& path);

struct FileEntry {
  std::string name;
  std::uintmax_t bytes = 0;
  std::string sha256;
};

struct RunManifest {
  json config;
  json versions;
  std::vector<std::pair<std::string, double>> phase_seconds;
  std::vector<FileEntry> files;
  bool pass = false;
  json report;  ///< contents of report.json
};

/// validate → solve → rearrange → compare → bounds → extra checks; writes
/// solution.csv, profile.csv, comparison.csv (when comparing), report.json and
/// manifest.json. Errors propagate as Error with the phase name prefixed.
RunManifest run_experiment(const ExperimentConfig& config);

std::string sha256_hex(const std::filesystem::path& file);

// JSON views of module reports.
json to_json(const ValidationReport& r);
json to_json(const RegimeReport& r);
json to_json(const SolveReport& r);
json to_json(const LimitReport& r);
json to_json(const ComparisonReport& r);
json to_json(const BoundReport& r);

struct SelftestOptions {
  bool inject_sign_flip = false;  ///< negate one A_frac entry before the operator suites
};

struct SuiteResult {
  std::string name;
  int passed = 0;
  int total = 0;
};

/// Invariant suites over every module at small sizes.
std::vector<SuiteResult> selftest(const SelftestOptions& options = {});

/// Exit status for an error kind: 2 invalid input, 3 nonconvergence, 1 otherwise.
int exit_code_for(ErrorKind kind);

}  // namespace mixsing
