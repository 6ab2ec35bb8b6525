#include <benchmark/benchmark.h>

#include "imet/geodesics.hpp"
#include "imet/hyperbolic.hpp"
#include "imet/metrics.hpp"
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

void BM_BallDistance(benchmark::State& s) {
  const CVec z = cvec({0.3, cplx(0.1, -0.2)}), w = cvec({cplx(-0.4, 0.2), 0.5});
  for (auto _ : s) benchmark::DoNotOptimize(ball_distance(z, w));
}
BENCHMARK(BM_BallDistance);

void BM_AnnulusKobayashi(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(annulus_kobayashi(0.25, 0.5, -0.5));
}
BENCHMARK(BM_AnnulusKobayashi);

void BM_DefiningJet(benchmark::State& s) {
  const Domain D = cubic_domain();
  const CVec z = cvec({0.3, cplx(0.2, 0.1)});
  for (auto _ : s) benchmark::DoNotOptimize(D.defining.real_hessian(z));
}
BENCHMARK(BM_DefiningJet);

void BM_ScaledDefiningHessian(benchmark::State& s) {
  const NormalForm nf = normalize_at_boundary_point(cubic_domain(), cvec({0.0, 1.0}));
  const DefiningFunction r = scaled_defining(nf.r, 0.99);
  const CVec z = cvec({0.3, cplx(0.2, 0.1)});
  for (auto _ : s) benchmark::DoNotOptimize(r.real_hessian(z));
}
BENCHMARK(BM_ScaledDefiningHessian);

void BM_Chi(benchmark::State& s) {
  double x = -0.49;
  for (auto _ : s) {
    benchmark::DoNotOptimize(chi(x));
    x = x > -0.26 ? -0.49 : x + 1e-3;
  }
}
BENCHMARK(BM_Chi);

void BM_CertifyStationary(benchmark::State& s) {
  const Domain B = make_domain(Ball{2});
  const Geodesic g = ball_geodesic(2, cvec({0.2, 0.1}), cvec({-0.3, cplx(0.0, 0.4)}));
  for (auto _ : s) benchmark::DoNotOptimize(certify_stationary(B, g.disc));
}
BENCHMARK(BM_CertifyStationary)->Unit(benchmark::kMillisecond);

void BM_CompareBall(benchmark::State& s) {
  const Domain B = make_domain(Ball{2});
  const CVec z = cvec({0.2, 0.1}), w = cvec({-0.3, cplx(0.0, 0.4)});
  for (auto _ : s) benchmark::DoNotOptimize(compare(B, z, w, std::nullopt, Budget{}, CompareOptions{}));
}
BENCHMARK(BM_CompareBall)->Unit(benchmark::kMillisecond);

void BM_LempertEllipsoid(benchmark::State& s) {
  Ellipsoid e;
  e.weights = {1.0, 2.0};
  e.exponents = {1, 1};
  const Domain D = make_domain(e);
  const CVec z = cvec({0.2, 0.1}), w = cvec({-0.3, cplx(0.0, 0.3)});
  for (auto _ : s) benchmark::DoNotOptimize(lempert_upper(D, z, w));
}
BENCHMARK(BM_LempertEllipsoid)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
