#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "imet/io.hpp"
#include "imet/metrics.hpp"

namespace imet {

/// Experiment ids: equality, gap, scaling, lbk, asymptotics, geodesic.
struct ExperimentConfig {
  std::string experiment;
  Json domain;               // model document; null picks the experiment default
  std::uint64_t seed = 1;
  int samples = 0;           // 0 picks the experiment default
  Budget budget;
  double tol_eq = 1e-4;
  std::string output_dir;    // empty: IMET_OUT_DIR, then "imet_out"
  Json params = Json::object();

  /// Throws Error on unknown experiments or non-positive tolerances.
  static ExperimentConfig from_json(const Json& j);
  Json to_json() const;
  void validate() const;
};

struct Verdict {
  std::string name;
  double value = 0.0;
  std::string relation;  // "<=", "<", ">=", ">", "=="
  double threshold = 0.0;
  bool pass = false;
};

Verdict make_verdict(std::string name, double value, std::string relation, double threshold);

struct ExperimentReport {
  std::string experiment;
  std::uint64_t seed = 0;
  Json config;
  std::vector<ComparisonReport> cases;
  std::map<std::string, Table> tables;
  std::vector<Verdict> verdicts;
  double runtime_seconds = 0.0;  // kept out of the report document

  bool passed() const;
  /// Deterministic document: config, tables, cases and verdicts.
  Json to_json() const;
};

ExperimentReport run_equality_experiment(const ExperimentConfig& config);
ExperimentReport run_gap_experiment(const ExperimentConfig& config);
ExperimentReport run_scaling_experiment(const ExperimentConfig& config);
ExperimentReport run_lbk_experiment(const ExperimentConfig& config);
ExperimentReport run_boundary_asymptotics(const ExperimentConfig& config);
/// Stationary certificates and left inverses of ball geodesics, plus the
/// perturbation gap under cap perturbations.
ExperimentReport run_geodesic_experiment(const ExperimentConfig& config);
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Verdicts from the recorded tables and the config thresholds only.
std::vector<Verdict> evaluate_verdicts(const std::string& experiment, const std::map<std::string, Table>& tables,
                                       const Json& config);

/// Writes <id>.json, one CSV per table, <id>_cases.csv, SVG figures and
/// <id>_timing.json under dir. Returns the written paths.
std::vector<std::string> write_report(const ExperimentReport& report, const std::string& dir);

}  // namespace imet
