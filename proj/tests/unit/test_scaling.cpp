#include <cmath>

#include "doctest.h"
#include "generators.hpp"
#include "imet/geodesics.hpp"
#include "imet/scaling.hpp"

using namespace imet;

namespace {

Domain cubic_domain() {
  Ellipsoid e;
  e.weights = {1.0, 1.0};
  e.exponents = {1, 1};
  e.norm_powers.push_back({1.0, 3.0, cvec({0.0, 1.0})});
  return make_domain(e);
}

Domain weighted_ellipsoid(double w1, double w2) {
  Ellipsoid e;
  e.weights = {w1, w2};
  e.exponents = {1, 1};
  return make_domain(e);
}

double ball(const CVec& z) { return -1.0 + z.squaredNorm(); }

// -1 + |x|^2 + |x - e_2|^3 at x = A_t(z), written out directly.
double cubic_scaled_oracle(double t, const CVec& z) {
  const cplx den = 1.0 + t * z[1];
  const CVec x = cvec({std::sqrt(1.0 - t * t) * z[0] / den, (z[1] + t) / den});
  const double d = std::sqrt(std::norm(x[0]) + std::norm(x[1] - 1.0));
  return std::norm(den) / (1.0 - t * t) * (-1.0 + x.squaredNorm() + d * d * d);
}

// Composite Simpson rule for the bump primitive.
double bump_oracle(double s, int m = 20000) {
  auto f = [](double u) { return u <= 0 || u >= 1 ? 0.0 : std::exp(-1.0 / (u * (1.0 - u))); };
  const double h = s / m;
  double acc = f(0.0) + f(s);
  for (int i = 1; i < m; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return acc * h / 3.0;
}

std::vector<CVec> probes(int count, std::uint64_t seed, double radius = 0.95) {
  gen::Rng rng(seed);
  std::vector<CVec> out;
  while (static_cast<int>(out.size()) < count) {
    const CVec z = rng.in_ball(2, radius);
    if (z[1].real() > -0.45) out.push_back(z);
  }
  return out;
}

const BlendedFamily& cubic_family() {
  static const BlendedFamily fam = blended_family(cubic_domain().defining, ScalingSchedule::standard());
  return fam;
}

}  // namespace

TEST_SUITE("scaling") {
  TEST_CASE("schedule") {
    const ScalingSchedule s = ScalingSchedule::standard(8, 5);
    CHECK_NOTHROW(s.validate());
    CHECK(s.t.front() == 0.5);
    CHECK(s.t.back() == 1.0 - 1.0 / 256.0);
    CHECK(s.eps[1] == 1.0 / 16.0);
    ScalingSchedule bad = s;
    bad.eps[2] = 0.5 * bad.eps[1];
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = s;
    bad.t[3] = bad.t[2];
    CHECK_THROWS_AS(bad.validate(), Error);
  }

  TEST_CASE("chi") {
    CHECK(chi(-1.0) == 0.0);
    CHECK(chi(-0.5) == 0.0);
    CHECK(chi(0.0) == 1.0);
    CHECK(chi(-0.25) == 1.0);
    CHECK(chi(-0.375) > 0.0);
    CHECK(chi(-0.375) < 1.0);
    CHECK(chi(-0.375) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(chi_derivative(-0.375) > 0.0);
    const double mass = bump_oracle(1.0);
    for (double x : {-0.49, -0.45, -0.4, -0.3, -0.26}) {
      CHECK(std::abs(chi(x) - bump_oracle(4 * x + 2) / mass) < 1e-10);
      const double h = 1e-6;
      CHECK(chi_derivative(x) == doctest::Approx((chi(x + h) - chi(x - h)) / (2 * h)).epsilon(1e-6));
      CHECK(chi_second_derivative(x) ==
            doctest::Approx((chi_derivative(x + h) - chi_derivative(x - h)) / (2 * h)).epsilon(1e-5));
    }
    double prev = 0.0;
    for (int i = 0; i <= 100; ++i) {
      const double v = chi(-0.5 + 0.0025 * i);
      CHECK(v >= prev);
      prev = v;
    }
  }

  TEST_CASE("normalize_at_boundary_point examples") {
    const NormalForm b = normalize_at_boundary_point(make_domain(Ball{2}), cvec({0.0, 1.0}));
    CHECK((b.U - CMat::Identity(2, 2)).norm() < 1e-15);
    CHECK((b.T - CMat::Identity(2, 2)).norm() < 1e-15);
    for (const CVec& z : probes(20, 1)) CHECK(std::abs(b.r.value(z) - ball(z)) < 1e-15);
    for (double q : b.shell_ratios) CHECK(q < 1e-6);

    // hand expansion for -1 + |z1|^2 + 2|z2|^2 at (0, 2^{-1/2})
    const Domain E = weighted_ellipsoid(1.0, 2.0);
    const NormalForm e = normalize_at_boundary_point(E, cvec({0.0, 1.0 / std::sqrt(2.0)}));
    const double l = 0.5 * (1.0 - std::sqrt(2.0));
    for (const CVec& z : probes(50, 2)) {
      const cplx u1 = z[0], u2 = z[1] - 1.0;
      const cplx w2 = u2 - l * u2 * u2;
      const double m = 1.0 + 2.0 * l * w2.real();
      const cplx x1 = std::pow(2.0, 0.25) * u1, x2 = 1.0 / std::sqrt(2.0) + w2;
      const double oracle = m * (-1.0 + std::norm(x1) + 2.0 * std::norm(x2)) / std::sqrt(2.0);
      CHECK(std::abs(e.r.value(z) - oracle) < 1e-13);
    }
    REQUIRE(e.shell_ratios.size() == 3);
    CHECK(e.shell_ratios[2] < e.shell_ratios[1]);
    CHECK(e.shell_ratios[1] < e.shell_ratios[0]);
    CHECK(e.shell_ratios[2] < 1e-3);

    CHECK_THROWS_AS(normalize_at_boundary_point(make_domain(HalfSpaceCap{2, 0.5}), cvec({0.0, 0.5})),
                    NotStronglyConvexAt);
    CHECK_THROWS_AS(normalize_at_boundary_point(make_domain(Ball{2}), cvec({0.0, 0.5})), OutOfRegion);
  }

  TEST_CASE("property: normal form at random ellipsoid boundary points") {
    gen::Rng rng(3);
    for (int i = 0; i < 15; ++i) {
      const double w1 = rng.uniform(1.0, 3.0), w2 = rng.uniform(1.0, 3.0);
      const Domain E = weighted_ellipsoid(w1, w2);
      const CVec u = rng.unit_vector(2);
      const CVec a = u / std::sqrt(w1 * std::norm(u[0]) + w2 * std::norm(u[1]));
      const NormalForm nf = normalize_at_boundary_point(E, a);
      const CVec en = cvec({0.0, 1.0});
      CHECK((nf.to_original(en) - a).norm() < 1e-14);
      CHECK(std::abs(nf.r.value(en)) < 1e-14);
      CHECK((nf.r.gradient(en) - 2.0 * en).norm() < 1e-10);
      CHECK((nf.r.real_hessian(en) - 2.0 * RMat::Identity(4, 4)).norm() < 1e-9);
      for (int k = 0; k < 20; ++k) {
        const CVec z = en + 0.05 * rng.in_ball(2, 1.0);
        const double v = nf.r.value(z), o = E.defining.value(nf.to_original(z));
        if (std::abs(o) > 1e-12) CHECK((v < 0) == (o < 0));
      }
    }
  }

  TEST_CASE("scaled_defining examples") {
    const DefiningFunction rho = make_domain(Ball{2}).defining;
    for (int mu = 1; mu <= 8; ++mu) {
      const DefiningFunction rt = scaled_defining(rho, 1.0 - std::ldexp(1.0, -mu));
      for (const CVec& z : probes(50, 4, 1.0)) CHECK(std::abs(rt.value(z) - ball(z)) < 1e-12);
    }
    const DefiningFunction cubic = cubic_domain().defining;
    // r_t(0) = -1 + h(A_t(0) - e_n) / (1 - t^2): -1 exactly for h = 0, in the limit otherwise
    for (double t : {0.1, 0.5, 0.9, 0.999}) {
      CHECK(std::abs(scaled_defining(rho, t).value(CVec::Zero(2)) + 1.0) < 1e-12);
      const double expected = -1.0 + std::pow(1.0 - t, 3) / (1.0 - t * t);
      CHECK(std::abs(scaled_defining(cubic, t).value(CVec::Zero(2)) - expected) < 1e-12);
    }
    const DefiningFunction r9 = scaled_defining(cubic, 0.9);
    for (const CVec& z : probes(100, 5)) CHECK(std::abs(r9.value(z) - cubic_scaled_oracle(0.9, z)) < 1e-10);
    const DerivativeCheck dc = validate_derivatives(r9, probes(20, 6));
    CHECK(dc.gradient_error < 1e-6);
    CHECK(dc.hessian_error < 1e-5);
    CHECK_THROWS_AS(r9.value(cvec({0.0, -1.0 / 0.9})), PoleHit);
    CHECK_THROWS_AS(r9.value(cvec({0.0, -0.6})), OutOfRegion);
    CHECK_THROWS_AS(scaled_defining(cubic, 1.0), Error);
  }

  TEST_CASE("c2_distance") {
    const DefiningFunction rho = make_domain(Ball{2}).defining;
    const std::vector<CVec> grid = scaling_region_grid(2, 9);
    for (const CVec& z : grid) CHECK(z[1].real() > -0.5);
    const C2Distance zero = c2_distance(rho, rho, grid);
    CHECK(zero.value == 0.0);
    CHECK(zero.gradient == 0.0);
    CHECK(zero.hessian == 0.0);
    const DefiningFunction shifted(
        2, [](const CVec& z) { return ball(z) + 0.3; },
        [rho](const CVec& z) { return rho.jet(z) + 0.3; });
    const C2Distance c = c2_distance(shifted, rho, grid);
    CHECK(c.value == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(c.gradient == 0.0);
    CHECK(c.hessian == 0.0);

    const DefiningFunction cubic = cubic_domain().defining;
    C2Distance prev{1e300, 1e300, 1e300};
    for (double t : {0.9, 0.99, 0.999}) {
      const C2Distance d = c2_distance(scaled_defining(cubic, t), rho, grid);
      CHECK(d.value < prev.value);
      CHECK(d.gradient < prev.gradient);
      CHECK(d.hessian < prev.hessian);
      prev = d;
    }
  }

  TEST_CASE("blended_family of the ball") {
    const DefiningFunction rho = make_domain(Ball{2}).defining;
    BlendedOptions opt;
    opt.ball_grid_per_axis = 8;
    opt.lattice_step = 1.0 / 8.0;
    const BlendedFamily fam = blended_family(rho, ScalingSchedule::standard(10, 3), opt);
    REQUIRE(fam.levels.size() == 3);
    for (const BlendedLevel& L : fam.levels) {
      CHECK(L.s == L.mu - 1);  // the first unused t already meets the bound
      for (const CVec& z : probes(20, 7, 1.0)) CHECK(std::abs(L.rho.value(z) - ball(z) - 2 * L.eps) < 1e-12);
      const double radius = std::sqrt(1.0 - 2 * L.eps);
      CHECK(std::abs(L.rho.value(cvec({0.0, radius}))) < 1e-12);
      CHECK(std::abs(L.rho.value(cvec({cplx(0.0, radius), 0.0}))) < 1e-12);
      CHECK(L.component_cells == L.negative_cells);
      CHECK(L.convexity_margin > 0);
    }
    CHECK(fam.mu0 == 1);
    CHECK(fam.monotonicity_violations == 0);
    CHECK(fam.nested);
  }

  TEST_CASE("blended_family of the cubic normal form") {
    const BlendedFamily& fam = cubic_family();
    REQUIRE(fam.levels.size() == 6);
    CHECK(fam.monotonicity_violations == 0);
    CHECK(fam.nested);
    CHECK(fam.mu0 >= 1);
    CHECK(fam.mu0 <= 4);
    const DefiningFunction rho = make_domain(Ball{2}).defining;
    int prev_s = -1;
    for (const BlendedLevel& L : fam.levels) {
      CHECK(L.s > prev_s);
      prev_s = L.s;
      CHECK(L.sup_to_ball < L.eps);
      CHECK(L.sup_level_to_ball <= 3 * L.eps);
      CHECK(L.component_cells <= L.negative_cells);
      // chi r_t + (1 - chi) rho + 2 eps, assembled independently
      for (const CVec& z : probes(50, 8, 1.0)) {
        const double c = chi(z[1].real());
        const double rt = c > 0 ? cubic_scaled_oracle(L.t, z) : 0.0;
        CHECK(std::abs(L.rho.value(z) - (c * rt + (1 - c) * ball(z) + 2 * L.eps)) < 1e-12);
      }
    }
    CHECK_THROWS_AS(blended_family(cubic_domain().defining, ScalingSchedule::standard(3, 2)), BudgetExhausted);
  }

  TEST_CASE("property: blended level derivatives") {
    const BlendedFamily& fam = cubic_family();
    // finite differences lose digits in proportion to 1 / (1 - t^2)
    for (const BlendedLevel& L : fam.levels) {
      if (L.t > 1.0 - std::ldexp(1.0, -14)) continue;
      const DerivativeCheck dc = validate_derivatives(L.rho, probes(20, 9, 0.9));
      CHECK(dc.gradient_error < 1e-6);
      CHECK(dc.hessian_error < 1e-5);
    }
  }

  TEST_CASE("transport_geodesic") {
    const AnalyticDisc f = AnalyticDisc::affine(cvec({0.0, 0.0}), cvec({1.0, 0.0}));
    const AnalyticDisc g = transport_geodesic(f, 0.5);
    for (int k = 0; k < 64; ++k) {
      const cplx l = std::polar(1.0, 2 * M_PI * k / 64);
      CHECK((g.evaluate(l) - cvec({std::sqrt(0.75) * l, 0.5})).norm() < 1e-10);
    }
    const AnalyticDisc c = transport_geodesic(AnalyticDisc::constant(cvec({0.0, 0.0})), 0.7);
    CHECK((c.evaluate(0.3) - cvec({0.0, 0.7})).norm() < 1e-14);

    const Domain B = make_domain(Ball{2});
    gen::Rng rng(10);
    for (int i = 0; i < 5; ++i) {
      const Geodesic geo = ball_geodesic(2, rng.in_ball(2, 0.5), rng.in_ball(2, 0.5));
      REQUIRE(certify_stationary(B, geo.disc).passes);
      const AnalyticDisc h = transport_geodesic(geo.disc, 0.6);
      CHECK(certify_stationary(B, h).passes);
      for (int k = 0; k < 16; ++k) {
        const cplx l = std::polar(1.0, 0.4 * k);
        CHECK((h.evaluate(l) - scaling_automorphism(0.6, geo.disc.evaluate(l))).norm() < 1e-10);
      }
    }
    const AnalyticDisc steep = AnalyticDisc::affine(cvec({0.0, 0.0}), cvec({0.0, -2.0}));
    CHECK_THROWS_AS(transport_geodesic(steep, 0.9), PoleHit);
  }

  TEST_CASE("lbk_disc on the ball") {
    const Domain B = make_domain(Ball{2});
    const CVec p = cvec({0.0, 1.0});
    const LbkReport radial = lbk_disc(B, p, cvec({0.0, 0.0}), 5);
    CHECK(sup_distance(radial.disc, AnalyticDisc::affine(cvec({0.0, 0.0}), cvec({0.0, 1.0}))) < 1e-6);
    CHECK(radial.endpoint_error < 1e-6);
    CHECK(radial.cauchy);

    const CVec q = cvec({0.2, 0.0});
    const LbkReport r = lbk_disc(B, p, q, 5);
    for (std::size_t k = 1; k < r.xi.size(); ++k) CHECK(r.xi[k] > r.xi[k - 1]);
    for (std::size_t k = 1; k < r.gaps.size(); ++k) CHECK(r.gaps[k] < r.gaps[k - 1]);
    CHECK(r.endpoint_error < 1e-2);
    // the last witness is the closed-form geodesic through q and a_5
    const Geodesic g = ball_geodesic(2, q, p - std::ldexp(1.0, -5) * p);
    CHECK(r.xi.back() == doctest::Approx(g.xi).epsilon(1e-6));
    CHECK(sup_distance(r.disc, g.disc) < 1e-4);
    CHECK_THROWS_AS(lbk_disc(B, p, q, 1), Error);
    CHECK_THROWS_AS(lbk_disc(make_domain(HalfSpaceCap{2, 0.5}), cvec({0.0, 0.5}), q, 3), NotStronglyConvexAt);
  }

  TEST_CASE("lbk_disc on an ellipsoid") {
    const Domain E = weighted_ellipsoid(1.0, 2.0);
    const CVec p = cvec({0.0, 1.0 / std::sqrt(2.0)}), q = cvec({0.2, 0.0});
    const LbkReport r = lbk_disc(E, p, q, 5);
    const LbkReport b = lbk_disc(make_domain(Ball{2}), cvec({0.0, 1.0}), q, 5);
    for (std::size_t k = 1; k < r.gaps.size(); ++k) CHECK(r.gaps[k] < r.gaps[k - 1]);
    const double ball_holder = *std::max_element(b.holder.begin(), b.holder.end());
    for (double h : r.holder) CHECK(h <= 2 * ball_holder);
    CHECK(r.endpoint_error < 1e-2);
  }
}
