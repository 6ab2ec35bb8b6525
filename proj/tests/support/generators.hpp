#pragma once

// Hand-rolled generators for property tests.

#include <cmath>
#include <complex>
#include <random>

#include "imet/hyperbolic.hpp"
#include "imet/types.hpp"

namespace gen {

using imet::cplx;
using imet::CVec;

struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}

  double uniform(double a = 0.0, double b = 1.0) { return std::uniform_real_distribution<double>(a, b)(engine); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine); }
  cplx gaussian_c() { return {normal(), normal()}; }

  CVec unit_vector(int n) {
    CVec v(n);
    for (int j = 0; j < n; ++j) v[j] = gaussian_c();
    return v / v.norm();
  }
  /// Uniform in the ball of the given radius in C^n.
  CVec in_ball(int n, double radius) {
    return unit_vector(n) * (radius * std::pow(uniform(), 1.0 / (2.0 * n)));
  }
  /// Each coordinate uniform in the disc of the given radius.
  CVec in_polydisc(int n, double radius) {
    CVec v(n);
    for (int j = 0; j < n; ++j) v[j] = in_ball(1, radius)[0];
    return v;
  }
  cplx in_disc(double radius) { return in_ball(1, radius)[0]; }
  cplx unimodular() { return std::polar(1.0, uniform(0.0, 2 * M_PI)); }
  cplx in_annulus(double r_minus, double r_plus) {
    return std::polar(uniform(r_minus, r_plus), uniform(0.0, 2 * M_PI));
  }

  imet::CMat unitary(int n) {
    imet::CMat A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = gaussian_c();
    Eigen::HouseholderQR<imet::CMat> qr(A);
    return qr.householderQ() * imet::CMat::Identity(n, n);
  }
  imet::BallAutomorphism ball_automorphism(int n, double radius = 0.7) { return {in_ball(n, radius), unitary(n)}; }
  imet::MoebiusMap moebius(double radius = 0.8) { return {in_disc(radius), unimodular()}; }
};

}  // namespace gen
