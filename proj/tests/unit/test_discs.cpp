#include <cmath>
#include <numbers>

#include "doctest.h"
#include "generators.hpp"
#include "imet/discs.hpp"

using namespace imet;

namespace {

AnalyticDisc random_disc(gen::Rng& rng, int n, int d) {
  CMat c(d + 1, n);
  for (int j = 0; j <= d; ++j)
    for (int k = 0; k < n; ++k) c(j, k) = rng.gaussian_c() / double(j + 1);
  return AnalyticDisc(c);
}

CVec naive_sum(const AnalyticDisc& f, cplx l) {
  CVec out = CVec::Zero(f.dimension());
  for (int j = 0; j <= f.degree(); ++j) out += f.coeffs.row(j).transpose() * std::pow(l, j);
  return out;
}

}  // namespace

TEST_SUITE("discs") {
  TEST_CASE("evaluate examples") {
    const CVec z = cvec({0.1, cplx(0.2, 0.3)});
    const AnalyticDisc c = AnalyticDisc::constant(z);
    CHECK((c.evaluate(cplx(0.3, 0.4)) - z).norm() == 0.0);
    const AnalyticDisc id = AnalyticDisc::affine(cvec({0.0, 0.0, 0.0}), cvec({1.0, 0.0, 0.0}));
    CHECK((id.evaluate(cplx(0, 1)) - cvec({cplx(0, 1), 0.0, 0.0})).norm() == 0.0);
    gen::Rng rng(1);
    const AnalyticDisc f = random_disc(rng, 2, 3);
    CHECK((f.evaluate(0.5) - naive_sum(f, 0.5)).norm() < 1e-14);
    CHECK((f.evaluate(0.0) - f.coeffs.row(0).transpose()).norm() == 0.0);
    CHECK((f.derivative(0.0) - f.coeffs.row(1).transpose()).norm() == 0.0);
  }

  TEST_CASE("derivative matches a difference quotient") {
    gen::Rng rng(2);
    const AnalyticDisc f = random_disc(rng, 2, 6);
    const cplx l(0.3, -0.2);
    const double h = 1e-6;
    const CVec fd = (f.evaluate(l + h) - f.evaluate(l - h)) / (2 * h);
    CHECK((f.derivative(l) - fd).norm() < 1e-8);
  }

  TEST_CASE("extension residual examples") {
    const BoundaryTrace sq = sample_trace([](cplx z) { return cvec({z * z}); }, 1, 64);
    const FourierTail t1 = holomorphic_extension_residual(sq);
    CHECK(t1.negative_energy < 1e-28);
    CHECK(t1.positive_energy == doctest::Approx(1.0));
    const BoundaryTrace bar = sample_trace([](cplx z) { return cvec({std::conj(z)}); }, 1, 64);
    const FourierTail t2 = holomorphic_extension_residual(bar);
    CHECK(t2.negative_energy == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(t2.positive_energy < 1e-28);
    CHECK(std::abs(t2.coefficient(-1, 0) - 1.0) < 1e-14);
    // ball stationary disc (lambda, 0) with unit weight: zeta * conj(nu) = (1, 0)
    const BoundaryTrace dual = sample_trace([](cplx z) { return cvec({z * std::conj(z), 0.0}); }, 2, 64);
    const FourierTail t3 = holomorphic_extension_residual(dual);
    CHECK(t3.negative_energy < 1e-28);
    CHECK(extends_holomorphically(t3));
    CHECK(std::abs(t3.extension.coeffs(0, 0) - 1.0) < 1e-14);
    CHECK_THROWS_AS(holomorphic_extension_residual(sample_trace([](cplx z) { return cvec({z}); }, 1, 4)), Error);
  }

  TEST_CASE("round trip and Parseval") {
    gen::Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      const int d = 1 + trial % 9;
      const AnalyticDisc f = random_disc(rng, 2, d);
      const BoundaryTrace t = boundary_trace(f, 64);
      for (int j = 0; j < t.size(); ++j) CHECK((t.samples.row(j).transpose() - naive_sum(f, t.node(j))).norm() < 1e-12);
      const FourierTail tail = holomorphic_extension_residual(t);
      CHECK((tail.extension.coeffs.topRows(d + 1) - f.coeffs).cwiseAbs().maxCoeff() < 1e-10);
      CHECK(tail.negative_energy < 1e-20);
      double sample_energy = 0.0;
      for (int j = 0; j < t.size(); ++j) sample_energy += t.samples.row(j).squaredNorm();
      sample_energy /= t.size();
      CHECK(std::abs(sample_energy - tail.negative_energy - tail.positive_energy) < 1e-10);
      double coeff_energy = 0.0;
      for (int k = -32; k < 32; ++k)
        for (int c = 0; c < 2; ++c) coeff_energy += std::norm(tail.coefficient(k, c));
      CHECK(std::abs(coeff_energy - tail.negative_energy - tail.positive_energy) < 1e-10);
    }
    CHECK_THROWS_AS(boundary_trace(AnalyticDisc(CMat::Ones(10, 1)), 32), Error);
    CHECK_THROWS_AS(boundary_trace(AnalyticDisc(CMat::Ones(2, 1)), 24), Error);
  }

  TEST_CASE("holder seminorm examples") {
    const AnalyticDisc c = AnalyticDisc::constant(cvec({0.3, 0.1}));
    CHECK(holder_half_seminorm(c, 256) == 0.0);
    CHECK(holder_half_norm(c, 256) == doctest::Approx(std::sqrt(0.1)));
    const AnalyticDisc id = AnalyticDisc::affine(cvec({0.0, 0.0}), cvec({1.0, 0.0}));
    CHECK(holder_half_seminorm(id, 256) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  }

  TEST_CASE("holder seminorm is stable and monotone under refinement") {
    // sqrt(1 - zeta) has an exact square-root singularity at zeta = 1
    auto g = [](cplx z) { return cvec({std::sqrt(1.0 - z)}); };
    double prev = 0.0;
    std::vector<double> values;
    for (int N : {256, 512, 1024, 2048, 4096}) {
      const double v = holder_half_seminorm(sample_trace(g, 1, N));
      CHECK(v >= prev - 1e-15);
      prev = v;
      values.push_back(v);
    }
    for (std::size_t k = 1; k < values.size(); ++k) CHECK(std::abs(values[k] / values[k - 1] - 1.0) < 0.05);
  }

  TEST_CASE("holomorphic expansion of a rational map") {
    const cplx b(0.6, 0.2);
    auto f = [b](cplx l) { return cvec({1.0 / (1.0 - b * l), l}); };
    const Expansion e = expand_holomorphic(f, 2, 1e-10);
    CHECK(e.tail <= 1e-10);
    for (int j = 0; j <= std::min(e.disc.degree(), 30); ++j) CHECK(std::abs(e.disc.coeffs(j, 0) - std::pow(b, j)) < 1e-12);
    for (int k = 0; k < 32; ++k) {
      const cplx l = std::polar(1.0, 2 * std::numbers::pi * k / 32.0 + 0.1);
      CHECK((e.disc.evaluate(l) - f(l)).norm() < 1e-9);
    }
    CHECK(sup_distance(e.disc, e.disc) == 0.0);
  }
}
