#include "imet/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace imet {

namespace {

// Shortest representation that reads back to the same double.
std::string exact(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string cvec_cell(const CVec& z) {
  std::string out;
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    if (j) out += ';';
    out += exact(z[j].real()) + ':' + exact(z[j].imag());
  }
  return out;
}

std::string optional_cell(const std::optional<double>& v) { return v ? exact(*v) : std::string(); }

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json perturbation_json(const Perturbation& p) {
  Json terms = Json::array();
  for (const auto& t : p.terms) terms.push_back({{"coefficient", t.coefficient}, {"powers", t.powers}});
  return terms;
}

Perturbation perturbation_from_json(const Json& j, int n) {
  if (j.is_string()) return Perturbation::parse(j.get<std::string>(), n);
  Perturbation p;
  p.n = n;
  for (const Json& t : j) {
    Perturbation::Term term;
    term.coefficient = t.at("coefficient").get<double>();
    term.powers = t.at("powers").get<std::vector<int>>();
    if (static_cast<int>(term.powers.size()) != 2 * n) throw Error("perturbation term needs 2n powers");
    p.terms.push_back(term);
  }
  return p;
}

}  // namespace

Json to_json(const CVec& z) {
  Json a = Json::array();
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    a.push_back(z[j].real());
    a.push_back(z[j].imag());
  }
  return a;
}

CVec cvec_from_json(const Json& j) {
  if (!j.is_array() || j.size() % 2 != 0) throw Error("complex vector needs an even-length array");
  CVec z(static_cast<Eigen::Index>(j.size() / 2));
  for (std::size_t k = 0; k < j.size() / 2; ++k) z[k] = cplx(j[2 * k].get<double>(), j[2 * k + 1].get<double>());
  return z;
}

Json to_json(const ModelDomain& m) {
  return std::visit(
      [](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, UnitDisc>) {
          return {{"type", "disc"}};
        } else if constexpr (std::is_same_v<T, Ball>) {
          return {{"type", "ball"}, {"n", x.n}};
        } else if constexpr (std::is_same_v<T, Polydisc>) {
          return {{"type", "polydisc"}, {"n", x.n}};
        } else if constexpr (std::is_same_v<T, Annulus>) {
          return {{"type", "annulus"}, {"r_minus", x.r_minus}, {"r_plus", x.r_plus}};
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          Json np = Json::array();
          for (const auto& p : x.norm_powers)
            np.push_back({{"coefficient", p.coefficient}, {"power", p.power}, {"center", to_json(p.center)}});
          return {{"type", "ellipsoid"},
                  {"n", x.n},
                  {"weights", x.weights},
                  {"exponents", x.exponents},
                  {"perturbation", perturbation_json(x.perturbation)},
                  {"norm_powers", np}};
        } else if constexpr (std::is_same_v<T, ReinhardtDAlpha>) {
          return {{"type", "reinhardt"}, {"alpha", x.alpha}};
        } else {
          return {{"type", "cap"}, {"n", x.n}, {"level", x.level}};
        }
      },
      m);
}

ModelDomain model_from_json(const Json& j) {
  const std::string type = j.at("type").get<std::string>();
  const int n = j.value("n", 2);
  if (type == "disc") return UnitDisc{};
  if (type == "ball") return Ball{n};
  if (type == "polydisc") return Polydisc{n};
  if (type == "annulus") return Annulus{j.value("r_minus", 0.25), j.value("r_plus", 1.0)};
  if (type == "reinhardt") return ReinhardtDAlpha{j.value("alpha", 0.5)};
  if (type == "cap") return HalfSpaceCap{n, j.value("level", 0.5)};
  if (type == "ellipsoid") {
    Ellipsoid e;
    e.n = n;
    e.weights = j.value("weights", std::vector<double>(n, 1.0));
    e.exponents = j.value("exponents", std::vector<int>(n, 1));
    if (j.contains("perturbation")) e.perturbation = perturbation_from_json(j.at("perturbation"), n);
    e.perturbation.n = n;
    if (j.contains("norm_powers"))
      for (const Json& p : j.at("norm_powers"))
        e.norm_powers.push_back({p.at("coefficient").get<double>(), p.value("power", 3.0), cvec_from_json(p.at("center"))});
    return e;
  }
  throw Error("unknown domain type '" + type + "'");
}

Json to_json(const AnalyticDisc& f) {
  Json c = Json::array();
  for (Eigen::Index k = 0; k < f.coeffs.rows(); ++k)
    for (Eigen::Index j = 0; j < f.coeffs.cols(); ++j) {
      c.push_back(f.coeffs(k, j).real());
      c.push_back(f.coeffs(k, j).imag());
    }
  return {{"dimension", f.dimension()}, {"degree", f.degree()}, {"coefficients", c}};
}

AnalyticDisc disc_from_json(const Json& j) {
  const int n = j.at("dimension").get<int>(), d = j.at("degree").get<int>();
  const Json& c = j.at("coefficients");
  if (n < 1 || d < 0 || c.size() != static_cast<std::size_t>(2 * n * (d + 1)))
    throw Error("disc document: coefficient count does not match dimension and degree");
  CMat m(d + 1, n);
  std::size_t i = 0;
  for (int k = 0; k <= d; ++k)
    for (int q = 0; q < n; ++q, i += 2) m(k, q) = cplx(c[i].get<double>(), c[i + 1].get<double>());
  return AnalyticDisc(std::move(m));
}

Json to_json(const HoloFunctional& F) {
  return {{"kind", F.kind == HoloFunctional::Kind::Laurent ? "laurent" : "polynomial"},
          {"n", F.n},
          {"degree", F.degree},
          {"exponents", F.exponents},
          {"coefficients", to_json(F.coefficients)},
          {"pole", to_json(F.pole)},
          {"guard", F.guard}};
}

HoloFunctional functional_from_json(const Json& j) {
  const bool laurent = j.at("kind").get<std::string>() == "laurent";
  HoloFunctional F = laurent ? HoloFunctional::laurent(j.at("degree").get<int>())
                             : HoloFunctional::polynomial(j.at("n").get<int>(), j.at("degree").get<int>());
  F.exponents = j.at("exponents").get<std::vector<std::vector<int>>>();
  F.coefficients = cvec_from_json(j.at("coefficients"));
  F.pole = cvec_from_json(j.at("pole"));
  F.guard = j.at("guard").get<double>();
  return F;
}

Json to_json(const Budget& b) {
  return {{"evaluations", b.evaluations},       {"local_starts", b.local_starts},
          {"random_starts", b.random_starts},   {"seed", b.seed},
          {"disc_degree", b.disc_degree},       {"functional_degree", b.functional_degree},
          {"laurent_degree", b.laurent_degree}, {"circle_samples", b.circle_samples},
          {"eps_feas", b.eps_feas},             {"pole_evaluations", b.pole_evaluations},
          {"exchange_rounds", b.exchange_rounds}, {"exchange_candidates", b.exchange_candidates},
          {"chain_samples", b.chain_samples}};
}

Budget budget_from_json(const Json& j, Budget b) {
  b.evaluations = j.value("evaluations", b.evaluations);
  b.local_starts = j.value("local_starts", b.local_starts);
  b.random_starts = j.value("random_starts", b.random_starts);
  b.seed = j.value("seed", b.seed);
  b.disc_degree = j.value("disc_degree", b.disc_degree);
  b.functional_degree = j.value("functional_degree", b.functional_degree);
  b.laurent_degree = j.value("laurent_degree", b.laurent_degree);
  b.circle_samples = j.value("circle_samples", b.circle_samples);
  b.eps_feas = j.value("eps_feas", b.eps_feas);
  b.pole_evaluations = j.value("pole_evaluations", b.pole_evaluations);
  b.exchange_rounds = j.value("exchange_rounds", b.exchange_rounds);
  b.exchange_candidates = j.value("exchange_candidates", b.exchange_candidates);
  b.chain_samples = j.value("chain_samples", b.chain_samples);
  return b;
}

Json to_json(const ComparisonReport& r) {
  Json j = {{"domain", r.domain},
            {"z", to_json(r.z)},
            {"w", to_json(r.w)},
            {"v", r.v ? to_json(*r.v) : Json(nullptr)},
            {"c_low", r.c_low},
            {"k_up", optional_json(r.k_up)},
            {"l_up", optional_json(r.l_up)},
            {"gamma_low", optional_json(r.gamma_low)},
            {"kappa_up", optional_json(r.kappa_up)},
            {"gap", optional_json(r.gap)},
            {"l_margin", r.l_margin},
            {"kappa_margin", r.kappa_margin},
            {"xi", r.xi},
            {"c_exact", optional_json(r.c_exact)},
            {"k_exact", optional_json(r.k_exact)},
            {"gamma_exact", optional_json(r.gamma_exact)},
            {"kappa_exact", optional_json(r.kappa_exact)},
            {"c_degree8", optional_json(r.c_degree8)},
            {"c_degree16", optional_json(r.c_degree16)},
            {"c_envelope", optional_json(r.c_envelope)},
            {"equality_certified", r.equality_certified},
            {"gap_certified", r.gap_certified},
            {"ordering_ok", r.ordering_ok}};
  if (r.witness_disc.coeffs.size() > 0) j["witness_disc"] = to_json(r.witness_disc);
  if (r.witness_functional.coefficients.size() > 0) j["witness_functional"] = to_json(r.witness_functional);
  return j;
}

Json to_json(const StationaryCertificate& c) {
  return {{"boundary_residual", c.boundary_residual},
          {"dual_negative_energy", c.dual_negative_energy},
          {"holder_estimate", c.holder_estimate},
          {"residual_threshold", c.residual_threshold},
          {"boundary_attached", c.boundary_attached},
          {"weight_positive", c.weight_positive},
          {"passes", c.passes},
          {"weight_coefficients", std::vector<double>(c.weight_coefficients.data(),
                                                      c.weight_coefficients.data() + c.weight_coefficients.size())},
          {"dual_map", to_json(c.dual_map)}};
}

std::string comparison_csv_header() { return "z,w,c_low,k_up,l_up,gap,flags"; }

std::string comparison_csv_row(const ComparisonReport& r) {
  std::string flags;
  auto flag = [&flags](bool on, const char* name) {
    if (!on) return;
    if (!flags.empty()) flags += '|';
    flags += name;
  };
  flag(r.equality_certified, "equality");
  flag(r.gap_certified, "gap");
  flag(!r.ordering_ok, "order_violation");
  flag(!r.l_up.has_value(), "l_infeasible");
  return cvec_cell(r.z) + ',' + cvec_cell(r.w) + ',' + exact(r.c_low) + ',' + optional_cell(r.k_up) + ',' +
         optional_cell(r.l_up) + ',' + optional_cell(r.gap) + ',' + flags;
}

Json to_json(const Table& t) {
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    Json row = Json::array();
    // JSON has no NaN; missing cells become null
    for (double x : r) row.push_back(std::isfinite(x) ? Json(x) : Json(nullptr));
    rows.push_back(row);
  }
  return {{"columns", t.columns}, {"rows", rows}};
}

Table table_from_json(const Json& j) {
  Table t;
  t.columns = j.at("columns").get<std::vector<std::string>>();
  for (const Json& r : j.at("rows")) {
    std::vector<double> row;
    for (const Json& x : r) row.push_back(x.is_null() ? std::nan("") : x.get<double>());
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      if (std::isfinite(r[i])) out += exact(r[i]);
    }
    out += '\n';
  }
  return out;
}

void write_text(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << content;
  if (!f) throw Error("write failed for " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string output_directory(const std::string& fallback) {
  const char* env = std::getenv("IMET_OUT_DIR");
  return env && *env ? std::string(env) : fallback;
}

}  // namespace imet
