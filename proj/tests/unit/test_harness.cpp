#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "doctest.h"
#include "imet/harness.hpp"

using namespace imet;

namespace {

ExperimentConfig config(const std::string& text) { return ExperimentConfig::from_json(Json::parse(text)); }

std::string temp_dir(const std::string& leaf) {
  const auto p = std::filesystem::temp_directory_path() / ("imet_harness_" + leaf);
  std::filesystem::remove_all(p);
  return p.string();
}

const Verdict& find(const std::vector<Verdict>& vs, const std::string& prefix) {
  for (const Verdict& v : vs)
    if (v.name.rfind(prefix, 0) == 0) return v;
  FAIL("no verdict " << prefix);
  throw;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("verdict relations") {
    CHECK(make_verdict("a", 1.0, "<=", 1.0).pass);
    CHECK_FALSE(make_verdict("a", 1.0, "<", 1.0).pass);
    CHECK(make_verdict("a", 2.0, ">", 1.0).pass);
    CHECK(make_verdict("a", 1.0, ">=", 1.0).pass);
    CHECK(make_verdict("a", 0.0, "==", 0.0).pass);
    CHECK_FALSE(make_verdict("a", std::nan(""), "<=", 1.0).pass);
    CHECK_THROWS_AS(make_verdict("a", 0.0, "~", 0.0), Error);
  }

  TEST_CASE("config validation") {
    CHECK_THROWS_AS(config(R"({"experiment": "nope"})"), Error);
    CHECK_THROWS_AS(config(R"({"experiment": "gap", "tol_eq": 0})"), Error);
    CHECK_THROWS_AS(config(R"({"experiment": "gap", "samples": -1})"), Error);
    const ExperimentConfig c = config(R"({"experiment": "gap", "seed": 9, "budget": {"local_starts": 4}})");
    const ExperimentConfig d = ExperimentConfig::from_json(c.to_json());
    CHECK(d.seed == 9);
    CHECK(d.budget.local_starts == 4);
    CHECK(d.to_json() == c.to_json());
  }

  TEST_CASE("verdicts are a function of the tables") {
    Table pairs;
    pairs.columns = {"c_low", "k_up", "l_up", "gap", "c_exact", "c_error", "l_error",
                     "gamma_low", "kappa_up", "gamma_exact", "kappa_exact", "certified"};
    const double nan = std::nan("");
    pairs.rows = {{1.0, 1.0, 1.0 + 1e-6, 1e-6, 1.0, 0.0, 1e-6, nan, nan, nan, nan, 1.0},
                  {0.5, 0.4, 0.6, 0.1, nan, nan, nan, nan, nan, nan, nan, 0.0}};
    const std::map<std::string, Table> tables{{"pairs", pairs}};
    const Json cfg = {{"params", {{"pass_fraction", 0.5}}}};
    const auto v1 = evaluate_verdicts("equality", tables, cfg);
    const auto v2 = evaluate_verdicts("equality", tables, cfg);
    REQUIRE(v1.size() == v2.size());
    for (std::size_t i = 0; i < v1.size(); ++i) {
      CHECK(v1[i].name == v2[i].name);
      CHECK(v1[i].value == v2[i].value);
      CHECK(v1[i].pass == v2[i].pass);
    }
    CHECK(find(v1, "certified fraction").value == 0.5);
    CHECK(find(v1, "certified fraction").pass);
    CHECK(find(v1, "ordering violations").value == 1.0);
    CHECK_FALSE(find(v1, "ordering violations").pass);
    CHECK(find(v1, "max closed-form error").value == 1e-6);
    CHECK_FALSE(find(evaluate_verdicts("equality", tables, Json::object()), "certified fraction").pass);
  }

  TEST_CASE("asymptotics table against the closed form") {
    const ExperimentReport r =
        run_experiment(config(R"({"experiment": "asymptotics", "params": {"basepoints": [[0, 0, 0, 0]]}})"));
    const Table& t = r.tables.at("ratios");
    REQUIRE(t.rows.size() == 5);
    for (const auto& row : t.rows) {
      const double d = row[1];
      CHECK(row[2] == doctest::Approx(0.5 * std::log((2.0 - d) / d)).epsilon(1e-12));
      CHECK(row[3] == doctest::Approx(row[2] / -std::log(d)).epsilon(1e-15));
    }
    // approaches 1/2 from above, slowly
    for (std::size_t i = 1; i < t.rows.size(); ++i) CHECK(t.rows[i][3] < t.rows[i - 1][3]);
    CHECK(t.rows.back()[3] > 0.5);
  }

  TEST_CASE("equality run on the disc") {
    const ExperimentReport r = run_experiment(config(R"({"experiment": "equality", "samples": 4, "seed": 3,
        "domain": {"type": "disc"}})"));
    CHECK(r.cases.size() == 4);
    CHECK(r.passed());
    for (const auto& c : r.cases) CHECK(ordering_holds(c));
    const ExperimentReport again = run_experiment(config(R"({"experiment": "equality", "samples": 4, "seed": 3,
        "domain": {"type": "disc"}})"));
    CHECK(again.to_json() == r.to_json());
  }

  TEST_CASE("equality near a boundary point with directions") {
    const ExperimentReport r = run_experiment(config(R"({"experiment": "equality", "samples": 2,
        "params": {"region": "boundary", "directions": true}})"));
    const Table& t = r.tables.at("pairs");
    for (const auto& row : t.rows) {
      CHECK(std::isfinite(row[7]));
      CHECK(row[7] <= row[8] + 2e-7);
    }
    CHECK(find(r.verdicts, "metric ordering violations").pass);
  }

  TEST_CASE("gap run records a strict gap") {
    const ExperimentReport r =
        run_experiment(config(R"({"experiment": "gap", "samples": 2, "params": {"product": false}})"));
    const Table& t = r.tables.at("pairs");
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][5] > t.rows[0][4]);
    CHECK(find(r.verdicts, "pairs with k above c16").pass);
    CHECK(r.tables.count("product") == 0);
  }

  TEST_CASE("lbk run on the ball") {
    const ExperimentReport r = run_experiment(config(R"({"experiment": "lbk", "params": {"approach_count": 3,
        "cases": [{"domain": {"type": "ball", "n": 2}, "p": [0, 0, 1, 0], "q": [0, 0, 0, 0]}]}})"));
    CHECK(r.tables.at("levels").rows.size() == 3);
    CHECK(r.passed());
  }

  TEST_CASE("reports on disk") {
    const std::string dir = temp_dir("out");
    const ExperimentReport r = run_experiment(config(R"({"experiment": "asymptotics"})"));
    const auto paths = write_report(r, dir);
    for (const auto& p : paths) CHECK(std::filesystem::exists(p));
    const Json doc = Json::parse(read_text(dir + "/asymptotics.json"));
    CHECK(doc.at("experiment") == "asymptotics");
    CHECK(doc.contains("runtime_seconds") == false);
    CHECK(Json::parse(read_text(dir + "/asymptotics_timing.json")).contains("runtime_seconds"));
    CHECK(read_text(dir + "/asymptotics_ratios.svg").rfind("<svg", 0) == 0);
    const Table back = table_from_json(doc.at("tables").at("ratios"));
    CHECK(back.rows == r.tables.at("ratios").rows);
    std::filesystem::remove_all(dir);
  }
}
