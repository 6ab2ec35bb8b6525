// One PASS/FAIL line per acceptance criterion. Usage: imet_acceptance [criterion...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <optional>
#include <string>
#include <vector>

#include "imet/harness.hpp"
#include "imet/scaling.hpp"

using namespace imet;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

ExperimentConfig config(const Json& j) { return ExperimentConfig::from_json(j); }

const Table& table(const ExperimentReport& r, const std::string& name) { return r.tables.at(name); }

std::vector<double> col(const Table& t, const std::string& name) {
  std::size_t c = 0;
  while (t.columns.at(c) != name) ++c;
  std::vector<double> out;
  for (const auto& row : t.rows) out.push_back(row[c]);
  return out;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// The ordering chain written out from the report fields.
bool chain_holds(const ComparisonReport& r) {
  bool ok = true;
  if (r.k_up) ok = ok && r.c_low <= *r.k_up + 2e-7;
  if (r.k_up && r.l_up) ok = ok && *r.k_up + 2e-7 <= *r.l_up + 2e-7;
  if (r.l_up) ok = ok && r.c_low <= *r.l_up + 2e-7;
  if (r.gamma_low && r.kappa_up) ok = ok && *r.gamma_low <= *r.kappa_up + 2e-7;
  return ok;
}

Json equality_config(const Json& domain, int samples) {
  return {{"experiment", "equality"}, {"domain", domain}, {"samples", samples}, {"seed", 1}};
}

Outcome equality_on_model_domains() {
  const std::vector<Json> domains{{{"type", "disc"}}, {{"type", "ball"}, {"n", 2}}, {{"type", "polydisc"}, {"n", 2}}};
  Outcome o{true, ""};
  for (const Json& d : domains) {
    const auto t0 = Clock::now();
    const ExperimentReport r = run_experiment(config(equality_config(d, 50)));
    const double secs = seconds_since(t0);
    const Table& t = table(r, "pairs");
    double worst_bracket = 0.0, worst_closed = 0.0;
    const auto c = col(t, "c_low"), l = col(t, "l_up"), exact = col(t, "c_exact");
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double bracket = std::isfinite(l[i]) ? l[i] - c[i] : INFINITY;
      worst_bracket = std::max(worst_bracket, bracket);
      worst_closed = std::max({worst_closed, std::abs(c[i] - exact[i]), std::abs(l[i] - exact[i])});
    }
    const bool ok = t.rows.size() == 50 && worst_bracket <= 1e-4 && worst_closed <= 1e-4 && secs <= 120.0;
    o.pass = o.pass && ok;
    o.detail += d.at("type").get<std::string>() + fmt(" bracket %.2e closed %.2e %.0fs; ", worst_bracket, worst_closed, secs);
  }
  return o;
}

Outcome ordering_chain() {
  std::vector<Json> configs{equality_config({{"type", "disc"}}, 50), equality_config({{"type", "ball"}, {"n", 2}}, 50),
                            equality_config({{"type", "polydisc"}, {"n", 2}}, 50),
                            {{"experiment", "gap"}, {"seed", 1}}};
  Json near = equality_config({{"type", "ellipsoid"}, {"n", 2}, {"weights", {1.0, 2.0}}}, 6);
  near["params"] = {{"region", "boundary"}, {"directions", true}};
  configs.push_back(near);
  int reports = 0, violations = 0;
  for (const Json& j : configs)
    for (const ComparisonReport& c : run_experiment(config(j)).cases) {
      ++reports;
      if (!chain_holds(c) || !ordering_holds(c)) ++violations;
    }
  return {violations == 0 && reports > 0, fmt("%.0f reports, %.0f violations", reports, violations)};
}

Outcome annulus_gap() {
  const auto t0 = Clock::now();
  const ExperimentReport r = run_experiment(config({{"experiment", "gap"}, {"seed", 1}, {"params", {{"product", false}}}}));
  const double secs = seconds_since(t0);
  const Table& t = table(r, "pairs");
  const auto c8 = col(t, "c_degree8"), c16 = col(t, "c_degree16"), k = col(t, "k_exact");
  int strict = 0, plateau = 0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (k[i] > c16[i]) ++strict;
    if (c16[i] - c8[i] < 0.1 * (k[i] - c16[i])) ++plateau;
  }
  const bool ok = t.rows.size() == 10 && strict == 10 && plateau >= 8 && secs <= 300.0;
  return {ok, fmt("k > c16 on %.0f/10, plateau on %.0f/10, %.0fs", strict, plateau, secs)};
}

ExperimentReport scaling_report() {
  return run_experiment(config({{"experiment", "scaling"}, {"seed", 1}}));
}

Outcome scaling_c2(const ExperimentReport& r) {
  const Table& t = table(r, "c2");
  bool ok = t.rows.size() == 8;
  std::string detail;
  for (const char* name : {"value", "gradient", "hessian"}) {
    const auto v = col(t, name);
    bool mono = true;
    for (std::size_t i = 1; i < v.size(); ++i) mono = mono && v[i] < v[i - 1];
    const double ratio = v.back() / v.front();
    ok = ok && mono && ratio <= 1e-2;
    detail += std::string(name) + (mono ? " decreasing" : " not decreasing") + fmt(" last/first %.3g; ", ratio);
  }
  double ball = 0.0;
  for (const char* name : {"value", "gradient", "hessian"})
    for (double x : col(table(r, "c2_ball"), name)) ball = std::max(ball, x);
  ok = ok && ball <= 1e-12;
  return {ok, detail + fmt("ball row max %.2e", ball)};
}

Outcome blended_family(const ExperimentReport& r) {
  const Table& f = table(r, "family");
  const Table& s = table(r, "family_summary");
  const double mu0 = col(s, "mu0")[0], violations = col(s, "monotonicity_violations")[0];
  const auto mu = col(f, "mu"), sup = col(f, "sup_level_to_ball"), eps = col(f, "eps"), margin = col(f, "convexity_margin");
  double worst = 0.0, min_margin = INFINITY;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    worst = std::max(worst, sup[i] / eps[i]);
    if (mu[i] >= mu0) min_margin = std::min(min_margin, margin[i]);
  }
  const double grid = static_cast<double>(closed_ball_grid(2, BlendedOptions{}.ball_grid_per_axis).size());
  const bool ok = grid >= 1e4 && violations == 0 && worst <= 3.0 && mu0 >= 1 && mu0 <= 4 && min_margin > 0;
  return {ok, fmt("%.0f grid points, %.0f violations, max sup/eps %.3f", grid, violations, worst) +
                  fmt(", mu0 %.0f, min margin beyond mu0 %.3f", mu0, min_margin)};
}

Outcome stationary_certification() {
  const ExperimentReport r = run_experiment(config({{"experiment", "geodesic"}, {"seed", 1}, {"samples", 20}}));
  const Table& t = table(r, "certificates");
  const auto passes = col(t, "passes"), res = col(t, "boundary_residual"), en = col(t, "dual_negative_energy"),
             li = col(t, "left_inverse_error"), wmin = col(t, "winding_min"), wmax = col(t, "winding_max");
  bool ok = t.rows.size() == 20;
  double worst_res = 0, worst_en = 0, worst_li = 0;
  for (std::size_t i = 0; i < passes.size(); ++i) {
    ok = ok && passes[i] == 1 && wmin[i] == 1 && wmax[i] == 1;
    worst_res = std::max(worst_res, res[i]);
    worst_en = std::max(worst_en, en[i]);
    worst_li = std::max(worst_li, li[i]);
  }
  ok = ok && worst_res <= 1e-8 && worst_en <= 1e-8 && worst_li <= 1e-8;
  return {ok, fmt("residual %.2e, negative energy %.2e, left inverse %.2e", worst_res, worst_en, worst_li)};
}

Outcome lbk_discs() {
  const ExperimentReport r = run_experiment(config({{"experiment", "lbk"}, {"seed", 1}}));
  const Table& s = table(r, "summary");
  const Table& lv = table(r, "levels");
  const auto cases = col(s, "case"), is_ball = col(s, "is_ball"), fin = col(s, "final_gap"), hmin = col(s, "holder_min"),
             hmax = col(s, "holder_max"), end = col(s, "endpoint_error");
  const auto lcase = col(lv, "case"), lgap = col(lv, "gap");
  bool ok = true, saw_ball = false, saw_other = false;
  std::string detail;
  for (std::size_t k = 0; k < cases.size(); ++k) {
    std::vector<double> gaps;
    for (std::size_t i = 0; i < lcase.size(); ++i)
      if (lcase[i] == cases[k] && std::isfinite(lgap[i])) gaps.push_back(lgap[i]);
    bool decreasing = gaps.size() == 4;
    for (std::size_t i = 1; i < gaps.size(); ++i) decreasing = decreasing && (gaps[i] < gaps[i - 1] || gaps[i] <= 1e-8);
    const bool c = decreasing && hmax[k] / hmin[k] <= 3.0 && end[k] <= 1e-2 && (is_ball[k] == 0 || fin[k] <= 1e-3);
    ok = ok && c;
    (is_ball[k] == 1 ? saw_ball : saw_other) = true;
    detail += fmt("case %.0f final gap %.2e endpoint %.2e", cases[k], fin[k], end[k]) + (c ? " ok; " : " fails; ");
  }
  return {ok && saw_ball && saw_other, detail};
}

Outcome boundary_asymptotics() {
  const ExperimentReport r =
      run_experiment(config({{"experiment", "asymptotics"}, {"params", {{"basepoints", {{0, 0, 0, 0}}}}}}));
  const Table& t = table(r, "ratios");
  const auto d = col(t, "dist"), ratio = col(t, "ratio");
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] == 1e-4) return {ratio[i] >= 0.485 && ratio[i] <= 0.515, fmt("ratio at dist 1e-4: %.4f", ratio[i])};
  return {false, "dist 1e-4 missing"};
}

Outcome perturbation_stability() {
  const ExperimentReport r = run_experiment(config({{"experiment", "geodesic"}, {"seed", 1}, {"samples", 1},
                                                    {"params", {{"disc_points", 1}, {"amplitudes", {1e-2, 1e-3, 1e-4}}}}}));
  const auto gap = col(table(r, "perturbation"), "gap");
  const bool ok = gap.size() == 3 && gap[1] < gap[0] && gap[2] < gap[1];
  return {ok, fmt("gaps %.3e, %.3e, %.3e", gap[0], gap[1], gap[2])};
}

Outcome numerical_hygiene() {
  Ellipsoid cubic;
  cubic.weights = {1.0, 1.0};
  cubic.exponents = {1, 1};
  cubic.norm_powers.push_back({1.0, 3.0, cvec({0.0, 1.0})});
  Ellipsoid quartic;
  quartic.weights = {1.0, 2.0};
  quartic.exponents = {1, 2};
  quartic.perturbation = Perturbation::parse("0.1*x1^4 + 0.05*x1^2*y2^2", 2);
  const std::vector<ModelDomain> models{UnitDisc{}, Ball{2}, Ball{3}, Polydisc{2}, Annulus{0.25, 1.0}, cubic, quartic,
                                        ReinhardtDAlpha{0.5}, HalfSpaceCap{2, 0.5}};
  std::mt19937_64 rng(10);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u;
  double worst = 0.0;
  for (const ModelDomain& m : models) {
    const Domain D = make_domain(m);
    const int n = D.dimension();
    std::vector<CVec> probes;
    while (probes.size() < 100) {
      CVec z(n);
      for (int j = 0; j < n; ++j) z[j] = cplx(g(rng), g(rng));
      z *= 1.2 * D.bounding_radius * std::pow(u(rng), 1.0 / (2 * n)) / z.norm();
      z += D.star_center;
      if (D.model && std::holds_alternative<Annulus>(*D.model) && std::abs(z[0]) < 0.05) continue;
      probes.push_back(z);
    }
    const DerivativeCheck c = validate_derivatives(D.defining, probes);
    worst = std::max({worst, c.gradient_error, c.hessian_error});
  }
  return {worst <= 1e-5, fmt("%.0f models x 100 probes, worst relative error %.2e", double(models.size()), worst)};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  if (wanted.empty())
    for (int k = 1; k <= 10; ++k) wanted.push_back(k);

  std::optional<ExperimentReport> scaling;
  auto scaled = [&]() -> const ExperimentReport& {
    if (!scaling) scaling = scaling_report();
    return *scaling;
  };
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"equality on disc, ball, polydisc", equality_on_model_domains},
      {"ordering chain", ordering_chain},
      {"annulus strict gap", annulus_gap},
      {"scaling C2 convergence", [&] { return scaling_c2(scaled()); }},
      {"blended family", [&] { return blended_family(scaled()); }},
      {"stationary certification", stationary_certification},
      {"LBK discs", lbk_discs},
      {"boundary asymptotics", boundary_asymptotics},
      {"perturbation stability", perturbation_stability},
      {"numerical hygiene", numerical_hygiene},
  };
  int failed = 0;
  for (int k : wanted) {
    if (k < 1 || k > 10) {
      std::fprintf(stderr, "no criterion %d\n", k);
      return 2;
    }
    Outcome o;
    try {
      o = criteria[k - 1].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("criterion %d (%s): %s  %s\n", k, criteria[k - 1].first.c_str(), o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
