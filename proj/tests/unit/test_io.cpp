#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "doctest.h"
#include "generators.hpp"
#include "imet/io.hpp"

using namespace imet;

namespace {

std::string temp_dir(const std::string& leaf) {
  const auto p = std::filesystem::temp_directory_path() / ("imet_io_" + leaf);
  std::filesystem::remove_all(p);
  return p.string();
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("complex vectors round trip exactly") {
    gen::Rng rng(11);
    for (int k = 0; k < 50; ++k) {
      const CVec z = rng.in_ball(3, 10.0) * std::pow(10.0, rng.uniform(-200, 200));
      const CVec back = cvec_from_json(Json::parse(to_json(z).dump()));
      REQUIRE(back.size() == z.size());
      for (int j = 0; j < z.size(); ++j) CHECK(back[j] == z[j]);
    }
    CHECK_THROWS_AS(cvec_from_json(Json::parse("[1, 2, 3]")), Error);
  }

  TEST_CASE("discs round trip bit for bit") {
    gen::Rng rng(12);
    for (int k = 0; k < 20; ++k) {
      CMat c(1 + k % 7, 2);
      for (int i = 0; i < c.rows(); ++i)
        for (int j = 0; j < c.cols(); ++j) c(i, j) = rng.gaussian_c() / 3.0;
      const AnalyticDisc f(c);
      const AnalyticDisc g = disc_from_json(Json::parse(to_json(f).dump()));
      REQUIRE(g.coeffs.rows() == c.rows());
      REQUIRE(g.coeffs.cols() == c.cols());
      CHECK((g.coeffs.array() == c.array()).all());
    }
  }

  TEST_CASE("model documents rebuild the same defining function") {
    Ellipsoid e;
    e.weights = {1.0, 2.0};
    e.exponents = {1, 2};
    e.norm_powers.push_back({0.5, 3.0, cvec({0.0, 1.0})});
    const std::vector<ModelDomain> models{UnitDisc{}, Ball{3}, Polydisc{2}, Annulus{0.3, 1.5}, e,
                                          ReinhardtDAlpha{0.25}, HalfSpaceCap{2, 0.4}};
    gen::Rng rng(13);
    for (const ModelDomain& m : models) {
      const Domain a = make_domain(m);
      const Domain b = make_domain(model_from_json(Json::parse(to_json(m).dump())));
      CHECK(a.dimension() == b.dimension());
      for (int k = 0; k < 20; ++k) {
        const CVec z = rng.in_ball(a.dimension(), 1.2);
        CHECK(a.defining.value(z) == b.defining.value(z));
      }
    }
    CHECK_THROWS_AS(model_from_json(Json::parse(R"({"type": "torus"})")), Error);
    CHECK_THROWS_AS(make_domain(model_from_json(Json::parse(R"({"type": "annulus", "r_minus": 2, "r_plus": 1})"))),
                    Error);
  }

  TEST_CASE("perturbation strings parse in model documents") {
    const Json j = Json::parse(R"({"type": "ellipsoid", "n": 2, "weights": [1, 1], "perturbation": "x1^4"})");
    const Domain D = make_domain(model_from_json(j));
    const CVec z = cvec({0.5, cplx(0.1, 0.2)});
    CHECK(D.defining.value(z) == doctest::Approx(-1.0 + z.squaredNorm() + std::pow(0.5, 4)).epsilon(1e-14));
  }

  TEST_CASE("budget keeps defaults for missing keys") {
    Budget base;
    base.evaluations = 77;
    const Budget b = budget_from_json(Json::parse(R"({"local_starts": 5})"), base);
    CHECK(b.local_starts == 5);
    CHECK(b.evaluations == 77);
    const Budget c = budget_from_json(to_json(b));
    CHECK(c.local_starts == 5);
    CHECK(c.evaluations == 77);
    CHECK(c.circle_samples == b.circle_samples);
  }

  TEST_CASE("functionals round trip") {
    HoloFunctional F = HoloFunctional::polynomial(2, 2);
    F.coefficients = CVec::LinSpaced(F.size(), 0.1, 0.9);
    F.pole = cvec({0.25, cplx(0.0, -0.5)});
    F.guard = 0.75;
    const HoloFunctional G = functional_from_json(Json::parse(to_json(F).dump()));
    CHECK(G.size() == F.size());
    const CVec x = cvec({0.3, cplx(0.1, 0.1)});
    CHECK((G.basis(x) - F.basis(x)).norm() == 0.0);
    CHECK(G.guard == 0.75);
  }

  TEST_CASE("tables: NaN becomes null and CSV keeps full precision") {
    Table t;
    t.columns = {"a", "b"};
    t.rows = {{0.1, std::nan("")}, {1.0 / 3.0, -2.5}};
    const Json j = to_json(t);
    CHECK(j.dump().find("null") != std::string::npos);
    const Table back = table_from_json(Json::parse(j.dump()));
    CHECK(std::isnan(back.rows[0][1]));
    CHECK(back.rows[1][0] == 1.0 / 3.0);
    const std::string csv = to_csv(t);
    CHECK(csv.rfind("a,b\n", 0) == 0);
    CHECK(csv.find("0.33333333333333331") != std::string::npos);
  }

  TEST_CASE("comparison rows carry the flags") {
    ComparisonReport r;
    r.z = cvec({0.5});
    r.w = cvec({cplx(0.0, -0.25)});
    r.c_low = 1.0;
    r.k_up = 1.5;
    r.gap = 0.5;
    r.gap_certified = true;
    r.ordering_ok = true;
    const std::string row = comparison_csv_row(r);
    CHECK(comparison_csv_header() == "z,w,c_low,k_up,l_up,gap,flags");
    CHECK(row.rfind("0.5:0,0:-0.25,1,1.5,,0.5,", 0) == 0);
    CHECK(row.find("gap") != std::string::npos);
    CHECK(row.find("equality") == std::string::npos);
  }

  TEST_CASE("text files and the output directory") {
    const std::string dir = temp_dir("text");
    write_text(dir + "/nested/x.txt", "hello\n");
    CHECK(read_text(dir + "/nested/x.txt") == "hello\n");
    CHECK_THROWS_AS(read_text(dir + "/missing.txt"), Error);
    ::setenv("IMET_OUT_DIR", dir.c_str(), 1);
    CHECK(output_directory("fallback") == dir);
    ::setenv("IMET_OUT_DIR", "", 1);
    CHECK(output_directory("fallback") == "fallback");
    ::unsetenv("IMET_OUT_DIR");
    std::filesystem::remove_all(dir);
  }
}
