#include <cmath>

#include "doctest.h"
#include "generators.hpp"
#include "imet/hyperbolic.hpp"

using namespace imet;

namespace {

// log-form oracle, independent of the atanh path
double log_atanh(double m) { return 0.5 * std::log((1 + m) / (1 - m)); }

// Disc model of the strip: zeta -> exp(zeta) onto the upper half plane, then the Cayley map.
cplx strip_to_disc(cplx zeta) {
  const cplx u = std::exp(zeta);
  return (u - cplx(0, 1)) / (u + cplx(0, 1));
}

}  // namespace

TEST_SUITE("hyperbolic") {
  TEST_CASE("poincare distance examples") {
    CHECK(poincare_distance(0.0, 0.0) == 0.0);
    CHECK(poincare_distance(0.0, 0.5) == doctest::Approx(0.5493061443340549).epsilon(1e-14));
    CHECK(poincare_distance(0.5, -0.5) == doctest::Approx(1.0986122886681098).epsilon(1e-14));
    CHECK(poincare_distance(0.0, 0.5) == doctest::Approx(log_atanh(0.5)).epsilon(1e-14));
  }

  TEST_CASE("poincare metric examples") {
    CHECK(poincare_metric(0.0, 1.0) == 1.0);
    CHECK(poincare_metric(0.5, 1.0) == doctest::Approx(4.0 / 3.0));
    CHECK(poincare_metric(cplx(0.2, 0.3), 0.0) == 0.0);
  }

  TEST_CASE("moebius invariance of the poincare distance") {
    gen::Rng rng(1);
    for (int k = 0; k < 500; ++k) {
      const MoebiusMap m = rng.moebius(0.9);
      const cplx a = rng.in_disc(0.9), b = rng.in_disc(0.9);
      CHECK(std::abs(poincare_distance(m(a), m(b)) - poincare_distance(a, b)) < 1e-12);
      CHECK(std::abs(m(m.a)) < 1e-14);
      CHECK(std::abs(m.inverse(m(a)) - a) < 1e-13);
    }
  }

  TEST_CASE("poincare distance stays accurate near the boundary") {
    const double s = 1.0 - 1e-12;
    CHECK(poincare_distance(0.0, s) == doctest::Approx(0.5 * std::log((1.0 + s) / (1.0 - s))).epsilon(1e-12));
  }

  TEST_CASE("ball distance examples") {
    CHECK(ball_distance(cvec({0.1, 0.2}), cvec({0.1, 0.2})) == 0.0);
    CHECK(ball_distance(cvec({0.0, 0.0}), cvec({0.5, 0.0})) == doctest::Approx(0.5493061443340549).epsilon(1e-14));
    CHECK(ball_distance(cvec({0.3, 0.0}), cvec({-0.3, 0.0})) == doctest::Approx(log_atanh(0.6 / 1.09)).epsilon(1e-14));
    CHECK(ball_distance(cvec({0.3, 0.0}), cvec({-0.3, 0.0})) == doctest::Approx(poincare_distance(0.3, -0.3)).epsilon(1e-14));
  }

  TEST_CASE("ball distance is invariant and reduces to the disc on slices") {
    gen::Rng rng(2);
    for (int k = 0; k < 200; ++k) {
      const auto phi = rng.ball_automorphism(2, 0.8);
      const CVec z = rng.in_ball(2, 0.9), w = rng.in_ball(2, 0.9);
      CHECK(std::abs(ball_distance(phi(z), phi(w)) - ball_distance(z, w)) < 1e-11);
      CHECK((phi.inverse(phi(z)) - z).norm() < 1e-12);
      CHECK(phi(z).norm() < 1.0);
      const CVec u = rng.unit_vector(3);
      const cplx a = rng.in_disc(0.9), b = rng.in_disc(0.9);
      CHECK(std::abs(ball_distance(a * u, b * u) - poincare_distance(a, b)) < 1e-12);
    }
  }

  TEST_CASE("ball metric matches the derivative of the distance") {
    gen::Rng rng(4);
    for (int k = 0; k < 50; ++k) {
      const CVec z = rng.in_ball(2, 0.8);
      const CVec v = rng.unit_vector(2);
      const double h = 1e-6;
      const double fd = ball_distance(z, z + h * v) / h;
      CHECK(ball_metric(z, v) == doctest::Approx(fd).epsilon(1e-5));
    }
    CHECK(ball_metric(cvec({0.5, 0.0}), cvec({1.0, 0.0})) == doctest::Approx(4.0 / 3.0));
  }

  TEST_CASE("scaling automorphism examples") {
    const CVec a = cvec({0.0, 1.0});
    CHECK((scaling_automorphism(0.5, cvec({0.0, 0.0})) - cvec({0.0, 0.5})).norm() < 1e-15);
    for (double t : {0.1, 0.5, 0.9, 0.999}) CHECK((scaling_automorphism(t, a) - a).norm() < 1e-15);
    CHECK(scaling_automorphism(0.9, cvec({0.2, 0.3})).norm() < 1.0);
    CHECK_THROWS_AS(scaling_automorphism(0.5, cvec({0.0, -2.0})), PoleHit);
  }

  TEST_CASE("scaling automorphism ball identity and group behaviour") {
    gen::Rng rng(6);
    for (int k = 0; k < 500; ++k) {
      const double t = rng.uniform(0.01, 0.99);
      const CVec z = rng.in_ball(2, 1.5);
      const CVec w = scaling_automorphism(t, z);
      const double lhs = w.squaredNorm() - 1.0;
      const double rhs = (1 - t * t) * (z.squaredNorm() - 1.0) / std::norm(1.0 + t * z[1]);
      CHECK(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(rhs)));
      const auto A = BallScalingAutomorphism::from_t(t, 2);
      CHECK((A.inverse(A(z)) - z).norm() < 1e-10 * std::max(1.0, z.norm()));
      const CVec z2 = rng.in_ball(2, 0.99);
      if ((z2 - z).norm() > 1e-6) CHECK((A(z2) - A(z)).norm() > 0.0);
    }
  }

  TEST_CASE("annulus lift and strip distance agree with the disc model") {
    gen::Rng rng(7);
    for (int k = 0; k < 200; ++k) {
      const double y1 = rng.uniform(0.05, 3.0), y2 = rng.uniform(0.05, 3.0), ds = rng.uniform(-4, 4);
      const cplx p = strip_to_disc(cplx(0.0, y1)), q = strip_to_disc(cplx(ds, y2));
      CHECK(strip_distance(ds, y1, y2) == doctest::Approx(poincare_distance(p, q)).epsilon(1e-10));
    }
    // the large-separation branch is continuous with the direct formula
    CHECK(strip_distance(60.0, 1.0, 2.0) == doctest::Approx(strip_distance(60.0 - 1e-9, 1.0, 2.0)).epsilon(1e-10));
  }

  TEST_CASE("annulus kobayashi examples") {
    CHECK(annulus_kobayashi(0.25, 0.5, 0.5) == 0.0);
    const double opposite = annulus_kobayashi(0.25, 0.5, -0.5);
    CHECK(opposite > 0.0);
    // same ray: deck index 0 is optimal and the neighbours are larger
    const AnnulusLift a = annulus_lift(0.25, 0.5), b = annulus_lift(0.25, 0.7);
    const double k0 = strip_distance(b.s - a.s, a.y, b.y);
    CHECK(annulus_kobayashi(0.25, 0.5, 0.7) == doctest::Approx(k0).epsilon(1e-14));
    CHECK(strip_distance(b.s - a.s + a.period, a.y, b.y) > k0);
    CHECK(strip_distance(b.s - a.s - a.period, a.y, b.y) > k0);
    // opposite points: the two half-turn lifts tie
    const AnnulusLift c = annulus_lift(0.25, -0.5);
    CHECK(opposite == doctest::Approx(strip_distance(c.s - a.s, a.y, c.y)).epsilon(1e-14));
    CHECK_THROWS_AS(annulus_kobayashi(0.25, 0.2, 0.5), LiftFailure);
    CHECK_THROWS_AS(annulus_kobayashi(0.25, 0.5, 1.0), LiftFailure);
  }

  TEST_CASE("annulus kobayashi is symmetric and satisfies the triangle inequality") {
    gen::Rng rng(9);
    for (int k = 0; k < 300; ++k) {
      const cplx z = rng.in_annulus(0.26, 0.99), w = rng.in_annulus(0.26, 0.99), u = rng.in_annulus(0.26, 0.99);
      const double zw = annulus_kobayashi(0.25, z, w);
      CHECK(std::abs(zw - annulus_kobayashi(0.25, w, z)) < 1e-10);
      CHECK(zw <= annulus_kobayashi(0.25, z, u) + annulus_kobayashi(0.25, u, w) + 1e-10);
    }
  }

  TEST_CASE("annulus metric is the infinitesimal distance") {
    gen::Rng rng(10);
    for (double r : {0.0, 0.25, 0.6}) {
      for (int k = 0; k < 20; ++k) {
        const cplx z = rng.in_annulus(r + 0.05, 0.95);
        const cplx v = rng.unimodular();
        const double h = 1e-7;
        CHECK(annulus_kobayashi_metric(r, z, v) == doctest::Approx(annulus_kobayashi(r, z, z + h * v) / h).epsilon(1e-5));
      }
    }
    // punctured disc: half-plane cover
    CHECK(annulus_kobayashi(0.0, 0.5, 0.5 * std::exp(cplx(0, 0.3))) > 0.0);
  }
}
