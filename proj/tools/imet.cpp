#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "imet/harness.hpp"

using namespace imet;

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
};

Json load(const Options& o) { return o.config_path.empty() ? Json::object() : Json::parse(read_text(o.config_path)); }

ExperimentConfig experiment_config(Json j, const std::string& fallback, const Options& o) {
  if (!j.contains("experiment")) j["experiment"] = fallback;
  ExperimentConfig c = ExperimentConfig::from_json(j);
  if (o.seed) c.seed = *o.seed;
  return c;
}

void print_verdicts(const ExperimentReport& r) {
  for (const Verdict& v : r.verdicts)
    std::printf("%s  %-48s %.6g %s %.6g\n", v.pass ? "PASS" : "FAIL", v.name.c_str(), v.value, v.relation.c_str(),
                v.threshold);
}

int run_and_write(const ExperimentConfig& c) {
  const ExperimentReport r = run_experiment(c);
  const std::string dir = output_directory(c.output_dir.empty() ? "imet_out" : c.output_dir);
  write_report(r, dir);
  std::printf("%s: %zu verdicts, %s (%.1f s) -> %s\n", r.experiment.c_str(), r.verdicts.size(),
              r.passed() ? "passed" : "failed", r.runtime_seconds, dir.c_str());
  print_verdicts(r);
  return r.passed() ? 0 : 1;
}

// {"domain": {...}, "z": [...], "w": [...], "v": [...], "budget": {...}}
int metric(const Options& o) {
  const Json j = load(o);
  const Domain D = make_domain(model_from_json(j.value("domain", Json{{"type", "ball"}, {"n", 2}})));
  Budget b = j.contains("budget") ? budget_from_json(j.at("budget")) : Budget{};
  if (o.seed) b.seed = *o.seed;
  const CVec z = j.contains("z") ? cvec_from_json(j.at("z")) : CVec(CVec::Zero(D.dimension()));
  const CVec w = j.contains("w") ? cvec_from_json(j.at("w")) : z;
  std::optional<CVec> v;
  if (j.contains("v")) v = cvec_from_json(j.at("v"));
  CompareOptions opt;
  opt.tol_eq = j.value("tol_eq", opt.tol_eq);
  const ComparisonReport r = compare(D, z, w, v, b, opt);
  std::cout << to_json(r).dump(2) << "\n";
  const bool ok = ordering_holds(r);
  std::printf("%s  ordering\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}

// A single config or an array of configs.
int report(const Options& o) {
  const Json j = load(o);
  int status = 0;
  if (j.is_array()) {
    for (const Json& c : j) status |= run_and_write(experiment_config(c, "equality", o));
  } else {
    status = run_and_write(experiment_config(j, "equality", o));
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Invariant metrics: bounds, scaling families, stationary discs"};
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed = 0;
  auto common = [&](CLI::App* s) {
    s->add_option("-c,--config", o.config_path, "JSON configuration document")->check(CLI::ExistingFile);
    s->add_option("-s,--seed", seed, "seed override");
  };
  auto* metric_cmd = app.add_subcommand("metric", "bounds and closed forms at one pair or direction");
  auto* compare_cmd = app.add_subcommand("compare", "equality or gap experiment (default: equality)");
  auto* scale_cmd = app.add_subcommand("scale", "scaling normal form, C2 table and blended family");
  auto* geodesic_cmd = app.add_subcommand("geodesic", "stationary certificates and perturbation gaps");
  auto* lbk_cmd = app.add_subcommand("lbk", "disc families approaching a boundary point");
  auto* report_cmd = app.add_subcommand("report", "run any experiment config, or an array of them");
  for (auto* s : {metric_cmd, compare_cmd, scale_cmd, geodesic_cmd, lbk_cmd, report_cmd}) common(s);
  CLI11_PARSE(app, argc, argv);

  for (auto* s : app.get_subcommands())
    if (s->count("--seed")) o.seed = seed;
  try {
    if (metric_cmd->parsed()) return metric(o);
    if (report_cmd->parsed()) return report(o);
    const std::string id = compare_cmd->parsed() ? "equality"
                           : scale_cmd->parsed() ? "scaling"
                           : geodesic_cmd->parsed() ? "geodesic"
                                                    : "lbk";
    Json j = load(o);
    if (!compare_cmd->parsed()) j["experiment"] = id;
    if (compare_cmd->parsed() && j.contains("experiment") && j["experiment"] != "equality" && j["experiment"] != "gap")
      throw Error("compare runs the equality or gap experiment");
    return run_and_write(experiment_config(j, id, o));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "imet: %s\n", e.what());
    return 2;
  }
}
