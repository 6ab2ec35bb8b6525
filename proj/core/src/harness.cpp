#include "imet/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "imet/geodesics.hpp"
#include "imet/hyperbolic.hpp"
#include "imet/scaling.hpp"
#include "imet/svg.hpp"

namespace imet {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();
const std::vector<std::string> kExperiments{"equality", "gap", "scaling", "lbk", "asymptotics", "geodesic"};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double opt_value(const std::optional<double>& v) { return v ? *v : kNaN; }

template <class T>
T param(const ExperimentConfig& c, const char* key, T fallback) {
  return c.params.contains(key) ? c.params.at(key).get<T>() : fallback;
}

double param_in(const Json& config, const char* key, double fallback) {
  if (!config.contains("params")) return fallback;
  const Json& p = config.at("params");
  return p.contains(key) ? p.at(key).get<double>() : fallback;
}

int column(const Table& t, const std::string& name) {
  const auto it = std::find(t.columns.begin(), t.columns.end(), name);
  if (it == t.columns.end()) throw Error("table has no column '" + name + "'");
  return static_cast<int>(it - t.columns.begin());
}

std::vector<double> col(const Table& t, const std::string& name) {
  const int c = column(t, name);
  std::vector<double> out;
  for (const auto& r : t.rows) out.push_back(r[c]);
  return out;
}

const Table* find_table(const std::map<std::string, Table>& tables, const std::string& name) {
  const auto it = tables.find(name);
  return it == tables.end() ? nullptr : &it->second;
}

double finite_max(const std::vector<double>& v) {
  double m = -INFINITY;
  for (double x : v)
    if (std::isfinite(x)) m = std::max(m, x);
  return m;
}

// Steps where the sequence fails to decrease strictly.
int non_decreasing_steps(const std::vector<double>& v, double negligible = 0.0) {
  int bad = 0;
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(v[k] < v[k - 1] || v[k] <= negligible)) ++bad;
  return bad;
}

Domain config_domain(const ExperimentConfig& c, const ModelDomain& fallback) {
  return make_domain(c.domain.is_null() ? fallback : model_from_json(c.domain));
}

CVec uniform_ball(std::mt19937_64& rng, int n, double radius) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u;
  CVec z(n);
  for (int j = 0; j < n; ++j) z[j] = cplx(g(rng), g(rng));
  return z * (radius * std::pow(u(rng), 1.0 / (2 * n)) / z.norm());
}

// Interior sample: uniform in the scaled model for ball, disc and polydisc,
// rejection from the bounding ball otherwise.
CVec sample_interior(const Domain& D, std::mt19937_64& rng, double radius) {
  const int n = D.dimension();
  if (D.model && std::holds_alternative<Polydisc>(*D.model)) {
    CVec z(n);
    for (int j = 0; j < n; ++j) z[j] = uniform_ball(rng, 1, radius)[0];
    return z;
  }
  if (D.model && (std::holds_alternative<Ball>(*D.model) || std::holds_alternative<UnitDisc>(*D.model)))
    return uniform_ball(rng, n, radius);
  for (int tries = 0; tries < 100000; ++tries) {
    const CVec z = D.star_center + uniform_ball(rng, n, radius * D.bounding_radius);
    if (D.defining.value(z) < -1e-3) return z;
  }
  throw BudgetExhausted("no interior sample found");
}

// Boundary crossing along e_n from the star center.
CVec boundary_point_along_last_axis(const Domain& D) {
  const int n = D.dimension();
  CVec e = CVec::Zero(n);
  e[n - 1] = 1.0;
  double lo = 0.0, hi = 2.0 * D.bounding_radius + 1.0;
  if (!(D.defining.value(D.star_center + hi * e) > 0)) throw Error("ray does not leave the domain");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (D.defining.value(D.star_center + mid * e) < 0 ? lo : hi) = mid;
  }
  return D.star_center + hi * e;
}

CVec sample_near_boundary(const Domain& D, std::mt19937_64& rng, const CVec& a, double depth) {
  const CVec nu = outward_normal(D, a);
  const CVec base = a - depth * D.bounding_radius * nu;
  for (int tries = 0; tries < 100000; ++tries) {
    const CVec z = base + uniform_ball(rng, D.dimension(), 0.5 * depth * D.bounding_radius);
    if (D.defining.value(z) < -1e-3) return z;
  }
  throw BudgetExhausted("no sample near the boundary point");
}

ExperimentReport start(const ExperimentConfig& c) {
  c.validate();
  ExperimentReport r;
  r.experiment = c.experiment;
  r.seed = c.seed;
  r.config = c.to_json();
  return r;
}

Budget seeded_budget(const ExperimentConfig& c) {
  Budget b = c.budget;
  b.seed = c.seed;
  return b;
}

DefiningFunction cap_perturbed_ball(double amplitude) {
  return make_defining(2, [amplitude](const auto& z) {
    auto s = abs2(z[0]) + abs2(z[1]) - 1.0;
    const auto x = re(z[0]) - 0.5;
    return s + amplitude * pow_int(branch_max(x, x * 0.0), 3);
  });
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
  ExperimentConfig c;
  c.experiment = j.at("experiment").get<std::string>();
  if (j.contains("domain")) c.domain = j.at("domain");
  c.seed = j.value("seed", c.seed);
  c.samples = j.value("samples", c.samples);
  if (j.contains("budget")) c.budget = budget_from_json(j.at("budget"));
  c.tol_eq = j.value("tol_eq", c.tol_eq);
  c.output_dir = j.value("output_dir", c.output_dir);
  if (j.contains("params")) c.params = j.at("params");
  c.validate();
  return c;
}

Json ExperimentConfig::to_json() const {
  return {{"experiment", experiment}, {"domain", domain},   {"seed", seed},           {"samples", samples},
          {"budget", imet::to_json(budget)}, {"tol_eq", tol_eq}, {"output_dir", output_dir}, {"params", params}};
}

void ExperimentConfig::validate() const {
  if (std::find(kExperiments.begin(), kExperiments.end(), experiment) == kExperiments.end())
    throw Error("unknown experiment '" + experiment + "'");
  if (!(tol_eq > 0) || !(budget.eps_feas > 0)) throw Error("tolerances must be positive");
  if (samples < 0) throw Error("samples must be non-negative");
  if (!params.is_object()) throw Error("params must be an object");
}

Verdict make_verdict(std::string name, double value, std::string relation, double threshold) {
  Verdict v{std::move(name), value, std::move(relation), threshold, false};
  if (v.relation == "<=") v.pass = value <= threshold;
  else if (v.relation == "<") v.pass = value < threshold;
  else if (v.relation == ">=") v.pass = value >= threshold;
  else if (v.relation == ">") v.pass = value > threshold;
  else if (v.relation == "==") v.pass = value == threshold;
  else throw Error("unknown relation '" + v.relation + "'");
  return v;
}

bool ExperimentReport::passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

Json ExperimentReport::to_json() const {
  Json t = Json::object();
  for (const auto& [name, table] : tables) t[name] = imet::to_json(table);
  Json c = Json::array();
  for (const auto& r : cases) c.push_back(imet::to_json(r));
  Json v = Json::array();
  for (const auto& x : verdicts)
    v.push_back({{"name", x.name},
                 {"value", std::isfinite(x.value) ? Json(x.value) : Json(nullptr)},
                 {"relation", x.relation},
                 {"threshold", x.threshold},
                 {"pass", x.pass}});
  return {{"experiment", experiment}, {"seed", seed}, {"config", config}, {"tables", t},
          {"cases", c},               {"verdicts", v}, {"passed", passed()}};
}

ExperimentReport run_equality_experiment(const ExperimentConfig& c) {
  const auto t0 = Clock::now();
  ExperimentReport rep = start(c);
  const Domain D = config_domain(c, Ball{2});
  const int samples = c.samples > 0 ? c.samples : 50;
  const std::string region = param<std::string>(c, "region", "interior");
  const double radius = param<double>(c, "radius", 0.7);
  const bool directions = param<bool>(c, "directions", false);
  std::mt19937_64 rng(c.seed);
  CVec a;
  if (region == "boundary") a = boundary_point_along_last_axis(D);
  else if (region != "interior") throw Error("region must be 'interior' or 'boundary'");
  CompareOptions opt;
  opt.tol_eq = c.tol_eq;
  const Budget budget = seeded_budget(c);

  Table t;
  t.columns = {"c_low", "k_up", "l_up", "gap", "c_exact", "c_error", "l_error",
               "gamma_low", "kappa_up", "gamma_exact", "kappa_exact", "certified"};
  for (int i = 0; i < samples; ++i) {
    CVec z, w;
    if (region == "boundary") {
      z = sample_near_boundary(D, rng, a, param<double>(c, "depth", 0.3));
      w = sample_near_boundary(D, rng, a, param<double>(c, "depth", 0.3));
    } else {
      z = sample_interior(D, rng, radius);
      w = sample_interior(D, rng, radius);
    }
    std::optional<CVec> v;
    if (directions && (w - z).norm() > 0) v = CVec((w - z) / (w - z).norm());
    ComparisonReport r = compare(D, z, w, v, budget, opt);
    const double ce = opt_value(r.c_exact);
    t.rows.push_back({r.c_low, opt_value(r.k_up), opt_value(r.l_up), opt_value(r.gap), ce, std::abs(r.c_low - ce),
                      r.l_up ? std::abs(*r.l_up - ce) : kNaN, opt_value(r.gamma_low), opt_value(r.kappa_up),
                      opt_value(r.gamma_exact), opt_value(r.kappa_exact),
                      r.gap && *r.gap <= c.tol_eq ? 1.0 : 0.0});
    rep.cases.push_back(std::move(r));
  }
  rep.tables["pairs"] = t;
  rep.verdicts = evaluate_verdicts(rep.experiment, rep.tables, rep.config);
  rep.runtime_seconds = seconds_since(t0);
  return rep;
}

ExperimentReport run_gap_experiment(const ExperimentConfig& c) {
  const auto t0 = Clock::now();
  ExperimentReport rep = start(c);
  const Domain A = config_domain(c, Annulus{0.25, 1.0});
  if (!A.model || !std::holds_alternative<Annulus>(*A.model)) throw Error("gap experiment needs an annulus");
  const Annulus an = std::get<Annulus>(*A.model);
  const int samples = c.samples > 0 ? c.samples : 10;
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> mod(an.r_minus + 0.15 * (an.r_plus - an.r_minus),
                                             an.r_minus + 0.85 * (an.r_plus - an.r_minus));
  std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi);
  std::vector<std::pair<cplx, cplx>> pairs;
  if (param<bool>(c, "include_reference_pair", true)) pairs.push_back({0.5, -0.5});
  while (static_cast<int>(pairs.size()) < samples) {
    const cplx z = std::polar(mod(rng), ang(rng)), w = std::polar(mod(rng), ang(rng));
    if (std::abs(z - w) >= 0.2) pairs.push_back({z, w});
  }
  const Budget budget = seeded_budget(c);
  CompareOptions opt;
  opt.tol_eq = c.tol_eq;
  Table t;
  t.columns = {"c_low", "k_up", "l_up", "c_degree8", "c_degree16", "k_exact", "gap", "improvement", "plateau", "certified"};
  for (const auto& [z, w] : pairs) {
    ComparisonReport r = compare(A, cvec({z}), cvec({w}), std::nullopt, budget, opt);
    const double c8 = opt_value(r.c_degree8), c16 = opt_value(r.c_degree16), k = opt_value(r.k_exact);
    const double gap = k - c16, imp = c16 - c8;
    t.rows.push_back({r.c_low, opt_value(r.k_up), opt_value(r.l_up), c8, c16, k, gap, imp,
                      imp < 0.1 * gap ? 1.0 : 0.0, r.gap_certified ? 1.0 : 0.0});
    rep.cases.push_back(std::move(r));
  }
  rep.tables["pairs"] = t;
  if (param<bool>(c, "product", true) && pairs.size() >= 2) {
    const ComparisonReport p = compare_product({A, A}, {cvec({pairs[0].first}), cvec({pairs[1].first})},
                                               {cvec({pairs[0].second}), cvec({pairs[1].second})}, budget, opt);
    Table pt;
    pt.columns = {"c_low", "k_up", "l_up", "k_exact", "certified"};
    pt.rows.push_back({p.c_low, opt_value(p.k_up), opt_value(p.l_up), opt_value(p.k_exact), p.gap_certified ? 1.0 : 0.0});
    rep.tables["product"] = pt;
    rep.cases.push_back(p);
  }
  rep.verdicts = evaluate_verdicts(rep.experiment, rep.tables, rep.config);
  rep.runtime_seconds = seconds_since(t0);
  return rep;
}

ExperimentReport run_scaling_experiment(const ExperimentConfig& c) {
  const auto t0 = Clock::now();
  ExperimentReport rep = start(c);
  Ellipsoid cubic;
  cubic.weights = {1.0, 1.0};
  cubic.exponents = {1, 1};
  cubic.norm_powers.push_back({1.0, 3.0, cvec({0.0, 1.0})});
  const Domain D = config_domain(c, cubic);
  const int n = D.dimension();
  CVec a = CVec::Zero(n);
  a[n - 1] = 1.0;
  if (c.params.contains("boundary_point")) a = cvec_from_json(c.params.at("boundary_point"));
  const NormalForm nf = normalize_at_boundary_point(D, a);
  const DefiningFunction rho = make_domain(Ball{n}).defining;

  const std::vector<CVec> grid = scaling_region_grid(n, param<int>(c, "grid_per_axis", 9));
  Table c2, ball;
  c2.columns = ball.columns = {"mu", "t", "value", "gradient", "hessian"};
  for (int mu = 1; mu <= param<int>(c, "c2_levels", 8); ++mu) {
    const double t = 1.0 - std::ldexp(1.0, -mu);
    const C2Distance d = c2_distance(scaled_defining(nf.r, t), rho, grid);
    c2.rows.push_back({double(mu), t, d.value, d.gradient, d.hessian});
    const C2Distance b = c2_distance(scaled_defining(rho, t), rho, grid);
    ball.rows.push_back({double(mu), t, b.value, b.gradient, b.hessian});
  }
  rep.tables["c2"] = c2;
  rep.tables["c2_ball"] = ball;

  const ScalingSchedule schedule = ScalingSchedule::standard(param<int>(c, "t_count", 40), param<int>(c, "levels", 6));
  BlendedOptions bo;
  bo.ball_grid_per_axis = param<int>(c, "ball_grid_per_axis", bo.ball_grid_per_axis);
  bo.lattice_step = param<double>(c, "lattice_step", bo.lattice_step);
  const BlendedFamily fam = blended_family(nf.r, schedule, bo);
  Table ft;
  ft.columns = {"mu", "s", "t", "eps", "sup_to_ball", "sup_level_to_ball", "convexity_margin", "component_cells",
                "negative_cells"};
  for (const BlendedLevel& L : fam.levels)
    ft.rows.push_back({double(L.mu), double(L.s), L.t, L.eps, L.sup_to_ball, L.sup_level_to_ball, L.convexity_margin,
                       double(L.component_cells), double(L.negative_cells)});
  rep.tables["family"] = ft;
  Table fs;
  fs.columns = {"mu0", "monotonicity_violations", "nested"};
  fs.rows.push_back({double(fam.mu0), double(fam.monotonicity_violations), fam.nested ? 1.0 : 0.0});
  rep.tables["family_summary"] = fs;

  CVec z = CVec::Zero(n), w = CVec::Zero(n);
  z[0] = 0.1;
  w[n - 1] = 0.2;
  if (c.params.contains("pair")) {
    z = cvec_from_json(c.params.at("pair").at(0));
    w = cvec_from_json(c.params.at("pair").at(1));
  }
  const double l_ball = ball_distance(z, w);
  Table lt;
  lt.columns = {"mu", "l_up", "l_ball"};
  const Budget budget = seeded_budget(c);
  for (const BlendedLevel& L : fam.levels) {
    double l = kNaN;
    if (L.rho.value(z) < -kInteriorMargin && L.rho.value(w) < -kInteriorMargin) {
      const DiscBound b = lempert_upper(L.domain, z, w, budget);
      if (b.feasible) l = b.value;
    }
    lt.rows.push_back({double(L.mu), l, l_ball});
  }
  rep.tables["lempert"] = lt;
  rep.verdicts = evaluate_verdicts(rep.experiment, rep.tables, rep.config);
  rep.runtime_seconds = seconds_since(t0);
  return rep;
}

ExperimentReport run_lbk_experiment(const ExperimentConfig& c) {
  const auto t0 = Clock::now();
  ExperimentReport rep = start(c);
  Json cases = c.params.contains("cases") ? c.params.at("cases") : Json::array();
  if (cases.empty()) {
    cases.push_back({{"domain", {{"type", "ball"}, {"n", 2}}}, {"p", {0, 0, 1, 0}}, {"q", {0, 0, 0, 0}}});
    cases.push_back({{"domain", {{"type", "ball"}, {"n", 2}}}, {"p", {0, 0, 1, 0}}, {"q", {0.2, 0, 0, 0}}});
    cases.push_back({{"domain", {{"type", "ellipsoid"}, {"n", 2}, {"weights", {1.0, 2.0}}}},
                     {"p", {0, 0, 1.0 / std::sqrt(2.0), 0}},
                     {"q", {0.2, 0, 0, 0}}});
  }
  const int levels = param<int>(c, "approach_count", 5);
  const Budget budget = seeded_budget(c);
  Table summary, lv;
  summary.columns = {"case", "is_ball", "final_gap", "holder_min", "holder_max", "endpoint_error", "node_error"};
  lv.columns = {"case", "level", "xi", "holder", "gap", "value"};
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const ModelDomain m = model_from_json(cases[k].at("domain"));
    const Domain D = make_domain(m);
    const LbkReport r = lbk_trace(D, cvec_from_json(cases[k].at("p")), cvec_from_json(cases[k].at("q")), levels, budget);
    for (std::size_t v = 0; v < r.xi.size(); ++v)
      lv.rows.push_back({double(k), double(v + 1), r.xi[v], r.holder[v], v == 0 ? kNaN : r.gaps[v - 1], r.values[v]});
    const auto [hmin, hmax] = std::minmax_element(r.holder.begin(), r.holder.end());
    summary.rows.push_back({double(k), std::holds_alternative<Ball>(m) ? 1.0 : 0.0, r.gaps.back(), *hmin, *hmax,
                            r.endpoint_error, r.node_error});
  }
  rep.tables["summary"] = summary;
  rep.tables["levels"] = lv;
  rep.verdicts = evaluate_verdicts(rep.experiment, rep.tables, rep.config);
  rep.runtime_seconds = seconds_since(t0);
  return rep;
}

ExperimentReport run_boundary_asymptotics(const ExperimentConfig& c) {
  const auto t0 = Clock::now();
  ExperimentReport rep = start(c);
  std::vector<CVec> bases{cvec({0.0, 0.0}), cvec({0.3, 0.0}), cvec({cplx(-0.2, 0.1), cplx(0.0, 0.4)})};
  if (c.params.contains("basepoints")) {
    bases.clear();
    for (const Json& b : c.params.at("basepoints")) bases.push_back(cvec_from_json(b));
  }
  const std::vector<double> dists =
      param<std::vector<double>>(c, "distances", std::vector<double>{0.5, 1e-1, 1e-2, 1e-3, 1e-4});
  Table t;
  t.columns = {"basepoint", "dist", "c", "ratio"};
  for (std::size_t b = 0; b < bases.size(); ++b)
    for (double d : dists) {
      const CVec z = cvec({1.0 - d, 0.0});
      const double cv = ball_distance(bases[b], z);
      t.rows.push_back({double(b), d, cv, cv / -std::log(d)});
    }
  rep.tables["ratios"] = t;
  rep.verdicts = evaluate_verdicts(rep.experiment, rep.tables, rep.config);
  rep.runtime_seconds = seconds_since(t0);
  return rep;
}

ExperimentReport run_geodesic_experiment(const ExperimentConfig& c) {
  const auto t0 = Clock::now();
  ExperimentReport rep = start(c);
  const int samples = c.samples > 0 ? c.samples : 20;
  const Domain B = make_domain(Ball{2});
  std::mt19937_64 rng(c.seed);
  Table certs;
  certs.columns = {"pair", "boundary_residual", "dual_negative_energy", "left_inverse_error", "winding_min",
                   "winding_max", "passes"};
  const int points = param<int>(c, "disc_points", 100);
  for (int i = 0; i < samples; ++i) {
    const CVec z = uniform_ball(rng, 2, 0.7), w = uniform_ball(rng, 2, 0.7);
    const Geodesic g = ball_geodesic(2, z, w);
    const StationaryCertificate cert = certify_stationary(B, g.disc);
    double err = 0.0;
    int wmin = 1 << 20, wmax = -(1 << 20);
    for (int k = 0; k < points; ++k) {
      const cplx l = std::polar(0.95 * std::sqrt((k + 0.5) / points), 2.399963229728653 * k);
      const CVec x = g.disc.evaluate(l);
      const int wind = left_inverse_winding(g.disc, cert.dual_map, x);
      wmin = std::min(wmin, wind);
      wmax = std::max(wmax, wind);
      try {
        err = std::max(err, std::abs(left_inverse(g.disc, cert.dual_map, x) - l));
      } catch (const Error&) {
        err = INFINITY;
      }
    }
    certs.rows.push_back({double(i), cert.boundary_residual, cert.dual_negative_energy, err, double(wmin), double(wmax),
                          cert.passes ? 1.0 : 0.0});
  }
  rep.tables["certificates"] = certs;

  Table pert;
  pert.columns = {"amplitude", "gap"};
  const std::vector<double> amps = param<std::vector<double>>(c, "amplitudes", std::vector<double>{1e-2, 1e-3, 1e-4});
  const Budget budget = seeded_budget(c);
  for (double a : amps) {
    const PerturbationGap g = geodesic_perturbation_gap(B, cap_perturbed_ball(a), cvec({0.0, 0.0}), cvec({1.0, 0.0}), budget);
    pert.rows.push_back({a, g.gap});
  }
  rep.tables["perturbation"] = pert;
  rep.verdicts = evaluate_verdicts(rep.experiment, rep.tables, rep.config);
  rep.runtime_seconds = seconds_since(t0);
  return rep;
}

ExperimentReport run_experiment(const ExperimentConfig& c) {
  if (c.experiment == "equality") return run_equality_experiment(c);
  if (c.experiment == "gap") return run_gap_experiment(c);
  if (c.experiment == "scaling") return run_scaling_experiment(c);
  if (c.experiment == "lbk") return run_lbk_experiment(c);
  if (c.experiment == "asymptotics") return run_boundary_asymptotics(c);
  if (c.experiment == "geodesic") return run_geodesic_experiment(c);
  throw Error("unknown experiment '" + c.experiment + "'");
}

std::vector<Verdict> evaluate_verdicts(const std::string& experiment, const std::map<std::string, Table>& tables,
                                       const Json& config) {
  std::vector<Verdict> out;
  auto ordering_violations = [](const Table& t) {
    const auto c = col(t, "c_low"), k = col(t, "k_up"), l = col(t, "l_up");
    int bad = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (std::isfinite(k[i]) && !(c[i] <= k[i] + 2e-7)) ++bad;
      else if (std::isfinite(k[i]) && std::isfinite(l[i]) && !(k[i] <= l[i])) ++bad;
      else if (!std::isfinite(k[i]) && std::isfinite(l[i]) && !(c[i] <= l[i] + 2e-7)) ++bad;
    }
    return double(bad);
  };

  if (experiment == "equality") {
    const Table& t = tables.at("pairs");
    const auto cert = col(t, "certified");
    double frac = 0.0;
    for (double x : cert) frac += x;
    frac = cert.empty() ? 0.0 : frac / cert.size();
    out.push_back(make_verdict("certified fraction", frac, ">=", param_in(config, "pass_fraction", 0.9)));
    const double err = std::max(finite_max(col(t, "c_error")), finite_max(col(t, "l_error")));
    if (std::isfinite(err)) out.push_back(make_verdict("max closed-form error", err, "<=", param_in(config, "closed_form_tol", 1e-4)));
    out.push_back(make_verdict("ordering violations", ordering_violations(t), "==", 0));
    const auto g = col(t, "gamma_low"), k = col(t, "kappa_up");
    int bad = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (std::isfinite(g[i]) && std::isfinite(k[i]) && !(g[i] <= k[i] + 2e-7)) ++bad;
    out.push_back(make_verdict("metric ordering violations", bad, "==", 0));
  } else if (experiment == "gap") {
    const Table& t = tables.at("pairs");
    const auto plateau = col(t, "plateau"), gap = col(t, "gap");
    double p = 0.0, strict = 0.0;
    for (double x : plateau) p += x;
    for (double x : gap) strict += x > 0 ? 1.0 : 0.0;
    out.push_back(make_verdict("plateau pairs", p, ">=", std::ceil(param_in(config, "plateau_fraction", 0.8) * plateau.size())));
    out.push_back(make_verdict("pairs with k above c16", strict, "==", double(gap.size())));
    out.push_back(make_verdict("ordering violations", ordering_violations(t), "==", 0));
    if (const Table* pt = find_table(tables, "product")) {
      out.push_back(make_verdict("product gap certified", col(*pt, "certified")[0], "==", 1));
      out.push_back(make_verdict("product ordering violations", ordering_violations(*pt), "==", 0));
    }
  } else if (experiment == "scaling") {
    const Table& c2 = tables.at("c2");
    const double ratio = param_in(config, "c2_ratio", 1e-2);
    for (const char* name : {"value", "gradient", "hessian"}) {
      const auto v = col(c2, name);
      out.push_back(make_verdict(std::string("c2 ") + name + " non-decreasing steps", non_decreasing_steps(v), "==", 0));
      out.push_back(make_verdict(std::string("c2 ") + name + " last/first", v.back() / v.front(), "<=", ratio));
    }
    const Table& ball = tables.at("c2_ball");
    double bmax = 0.0;
    for (const char* name : {"value", "gradient", "hessian"}) bmax = std::max(bmax, finite_max(col(ball, name)));
    out.push_back(make_verdict("ball fixed point", bmax, "<=", 1e-12));
    const Table& fam = tables.at("family");
    const auto sup = col(fam, "sup_level_to_ball"), eps = col(fam, "eps");
    double worst = 0.0;
    for (std::size_t i = 0; i < sup.size(); ++i) worst = std::max(worst, sup[i] / eps[i]);
    out.push_back(make_verdict("max sup |rho_mu - rho| / eps_mu", worst, "<=", 3.0));
    const Table& fs = tables.at("family_summary");
    out.push_back(make_verdict("monotonicity violations", col(fs, "monotonicity_violations")[0], "==", 0));
    out.push_back(make_verdict("components nested", col(fs, "nested")[0], "==", 1));
    out.push_back(make_verdict("mu0 reported", col(fs, "mu0")[0], ">=", 1));
    out.push_back(make_verdict("mu0", col(fs, "mu0")[0], "<=", param_in(config, "max_mu0", 4)));
    const Table& lt = tables.at("lempert");
    const auto l = col(lt, "l_up"), lb = col(lt, "l_ball");
    int increases = 0;
    for (std::size_t i = 1; i < l.size(); ++i)
      if (std::isfinite(l[i]) && std::isfinite(l[i - 1]) && l[i] > l[i - 1] + 1e-7) ++increases;
    out.push_back(make_verdict("Lempert increases across levels", increases, "==", 0));
    out.push_back(make_verdict("Lempert last level minus ball", std::abs(l.back() - lb.back()), "<=", 1e-3));
  } else if (experiment == "lbk") {
    const Table& s = tables.at("summary");
    const Table& lv = tables.at("levels");
    const auto cases = col(s, "case"), is_ball = col(s, "is_ball"), final_gap = col(s, "final_gap");
    const auto hmin = col(s, "holder_min"), hmax = col(s, "holder_max"), end = col(s, "endpoint_error");
    const auto lcase = col(lv, "case"), lgap = col(lv, "gap");
    for (std::size_t k = 0; k < cases.size(); ++k) {
      const std::string tag = "case " + std::to_string(int(cases[k])) + " ";
      std::vector<double> gaps;
      for (std::size_t i = 0; i < lcase.size(); ++i)
        if (lcase[i] == cases[k] && std::isfinite(lgap[i])) gaps.push_back(lgap[i]);
      out.push_back(make_verdict(tag + "non-decreasing gap steps", non_decreasing_steps(gaps, 1e-8), "==", 0));
      out.push_back(make_verdict(tag + "Holder max/min", hmax[k] / hmin[k], "<=", param_in(config, "holder_ratio", 3.0)));
      out.push_back(make_verdict(tag + "endpoint error", end[k], "<=", 1e-2));
      if (is_ball[k] == 1.0) out.push_back(make_verdict(tag + "final gap", final_gap[k], "<=", 1e-3));
    }
  } else if (experiment == "asymptotics") {
    const Table& t = tables.at("ratios");
    const auto b = col(t, "basepoint"), d = col(t, "dist"), r = col(t, "ratio");
    const double tol = param_in(config, "ratio_tol", 0.015);
    std::map<double, std::pair<double, double>> closest;  // basepoint -> (dist, ratio)
    for (std::size_t i = 0; i < b.size(); ++i)
      if (!closest.count(b[i]) || d[i] < closest[b[i]].first) closest[b[i]] = {d[i], r[i]};
    for (const auto& [base, dr] : closest)
      out.push_back(make_verdict("basepoint " + std::to_string(int(base)) + " |ratio - 1/2| at dist " +
                                     std::to_string(dr.first),
                                 std::abs(dr.second - 0.5), "<=", tol));
  } else if (experiment == "geodesic") {
    const Table& t = tables.at("certificates");
    const auto passes = col(t, "passes");
    double passing = 0.0;
    for (double x : passes) passing += x;
    out.push_back(make_verdict("certificates passing", passing, "==", double(passes.size())));
    out.push_back(make_verdict("max boundary residual", finite_max(col(t, "boundary_residual")), "<=", 1e-8));
    out.push_back(make_verdict("max dual negative energy", finite_max(col(t, "dual_negative_energy")), "<=", 1e-8));
    out.push_back(make_verdict("max left inverse error", finite_max(col(t, "left_inverse_error")), "<=", 1e-8));
    const auto wmin = col(t, "winding_min"), wmax = col(t, "winding_max");
    out.push_back(make_verdict("min winding", *std::min_element(wmin.begin(), wmin.end()), "==", 1));
    out.push_back(make_verdict("max winding", *std::max_element(wmax.begin(), wmax.end()), "==", 1));
    const Table& pert = tables.at("perturbation");
    const auto amp = col(pert, "amplitude"), gap = col(pert, "gap");
    std::vector<std::size_t> order(amp.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return amp[a] > amp[b]; });
    std::vector<double> by_amp;
    for (std::size_t i : order) by_amp.push_back(gap[i]);
    out.push_back(make_verdict("perturbation gap non-decreasing steps", non_decreasing_steps(by_amp), "==", 0));
    double positive = 0.0;
    for (double g : gap) positive += g > 0 ? 1.0 : 0.0;
    out.push_back(make_verdict("positive perturbation gaps", positive, "==", double(gap.size())));
  }
  return out;
}

std::vector<std::string> write_report(const ExperimentReport& report, const std::string& dir) {
  std::vector<std::string> written;
  auto put = [&](const std::string& name, const std::string& content) {
    const std::string path = dir + "/" + name;
    write_text(path, content);
    written.push_back(path);
  };
  const std::string id = report.experiment;
  put(id + ".json", report.to_json().dump(2) + "\n");
  for (const auto& [name, table] : report.tables) put(id + "_" + name + ".csv", to_csv(table));
  if (!report.cases.empty()) {
    std::string csv = comparison_csv_header() + "\n";
    for (const auto& c : report.cases) csv += comparison_csv_row(c) + "\n";
    put(id + "_cases.csv", csv);
  }
  put(id + "_timing.json", Json{{"experiment", id}, {"runtime_seconds", report.runtime_seconds}}.dump(2) + "\n");

  auto series = [](const Table& t, const std::string& x, const std::string& y, std::string name, bool markers = false) {
    return PlotSeries{std::move(name), col(t, x), col(t, y), markers};
  };
  PlotOptions opt;
  if (id == "gap") {
    const Table& t = report.tables.at("pairs");
    std::vector<double> idx;
    for (std::size_t i = 0; i < t.rows.size(); ++i) idx.push_back(double(i));
    opt.title = "Annulus lower bounds against the exact distance";
    opt.x_label = "pair";
    opt.y_label = "distance";
    put(id + "_bounds.svg", line_plot_svg({{"degree 8", idx, col(t, "c_degree8"), true},
                                           {"degree 16", idx, col(t, "c_degree16"), true},
                                           {"exact", idx, col(t, "k_exact"), true}},
                                          opt));
  } else if (id == "scaling") {
    const Table& t = report.tables.at("c2");
    opt.title = "C2 distance of the scaled domains to the ball";
    opt.x_label = "mu";
    opt.y_label = "distance";
    opt.log_y = true;
    put(id + "_c2.svg", line_plot_svg({series(t, "mu", "value", "value"), series(t, "mu", "gradient", "gradient"),
                                       series(t, "mu", "hessian", "hessian")},
                                      opt));
    const Table& f = report.tables.at("family");
    opt.title = "Blended family against the ball";
    put(id + "_family.svg", line_plot_svg({series(f, "mu", "sup_level_to_ball", "sup"), series(f, "mu", "eps", "eps")}, opt));
    const Table& l = report.tables.at("lempert");
    opt = {};
    opt.title = "Lempert upper bound across levels";
    opt.x_label = "mu";
    opt.y_label = "l";
    opt.reference_y = l.rows.empty() ? kNaN : col(l, "l_ball")[0];
    put(id + "_lempert.svg", line_plot_svg({series(l, "mu", "l_up", "l_up", true)}, opt));
  } else if (id == "lbk") {
    const Table& t = report.tables.at("levels");
    std::map<double, PlotSeries> per_case;
    const auto c = col(t, "case"), lvl = col(t, "level"), gap = col(t, "gap");
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (!std::isfinite(gap[i])) continue;
      auto& s = per_case[c[i]];
      s.name = "case " + std::to_string(int(c[i]));
      s.x.push_back(lvl[i]);
      s.y.push_back(gap[i]);
    }
    std::vector<PlotSeries> ss;
    for (auto& [k, s] : per_case) ss.push_back(s);
    opt.title = "Sup distance between consecutive discs";
    opt.x_label = "level";
    opt.y_label = "gap";
    opt.log_y = true;
    put(id + "_gaps.svg", line_plot_svg(ss, opt));
  } else if (id == "asymptotics") {
    const Table& t = report.tables.at("ratios");
    std::map<double, PlotSeries> per_base;
    const auto b = col(t, "basepoint"), d = col(t, "dist"), r = col(t, "ratio");
    for (std::size_t i = 0; i < b.size(); ++i) {
      auto& s = per_base[b[i]];
      s.name = "basepoint " + std::to_string(int(b[i]));
      s.x.push_back(-std::log10(d[i]));
      s.y.push_back(r[i]);
    }
    std::vector<PlotSeries> ss;
    for (auto& [k, s] : per_base) ss.push_back(s);
    opt.title = "Distance over -log dist";
    opt.x_label = "-log10 dist";
    opt.y_label = "ratio";
    opt.reference_y = 0.5;
    put(id + "_ratios.svg", line_plot_svg(ss, opt));
  } else if (id == "geodesic") {
    const Table& t = report.tables.at("perturbation");
    std::vector<double> la;
    for (double a : col(t, "amplitude")) la.push_back(std::log10(a));
    opt.title = "Geodesic perturbation gap";
    opt.x_label = "log10 amplitude";
    opt.y_label = "gap";
    opt.log_y = true;
    put(id + "_perturbation.svg", line_plot_svg({{"gap", la, col(t, "gap"), false}}, opt));
  }
  return written;
}

}  // namespace imet
