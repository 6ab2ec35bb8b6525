#pragma once

#include <functional>
#include <vector>

#include "imet/types.hpp"

namespace imet {

/// f(lambda) = sum_{j=0..d} c_j lambda^j with c_j in C^n (row j of coeffs).
struct AnalyticDisc {
  CMat coeffs;

  AnalyticDisc() = default;
  explicit AnalyticDisc(CMat c) : coeffs(std::move(c)) {}
  static AnalyticDisc constant(const CVec& z);
  /// lambda -> z + lambda v.
  static AnalyticDisc affine(const CVec& z, const CVec& v);

  int dimension() const { return static_cast<int>(coeffs.cols()); }
  int degree() const { return static_cast<int>(coeffs.rows()) - 1; }

  CVec evaluate(cplx lambda) const;
  CVec operator()(cplx lambda) const { return evaluate(lambda); }
  CVec derivative(cplx lambda) const;
};

struct Expansion {
  AnalyticDisc disc;
  double tail = 0.0;  // estimated sum of |c_k| beyond the kept degree
};

/// f_j(lambda) = N_j(lambda) / (1 - b_j lambda) with polynomial numerators
/// (row k of numerator holds the lambda^k coefficients).
struct RationalDisc {
  CMat numerator;
  CVec pole;

  int dimension() const { return static_cast<int>(numerator.cols()); }
  int degree() const { return static_cast<int>(numerator.rows()) - 1; }
  /// Largest radius on which every denominator is nonzero.
  double pole_radius() const;

  CVec evaluate(cplx lambda) const;
  CVec derivative(cplx lambda) const;
  /// Taylor expansion of lambda -> f(scale * lambda), truncated once the
  /// geometric tail bound drops below tail_tol or max_degree is reached.
  Expansion taylor(double scale, double tail_tol = 1e-13, int max_degree = 4096) const;
};

/// Samples at zeta_j = exp(2 pi i j / N); row j of samples is the value at zeta_j.
struct BoundaryTrace {
  CMat samples;
  int size() const { return static_cast<int>(samples.rows()); }
  int dimension() const { return static_cast<int>(samples.cols()); }
  cplx node(int j) const;
};

struct FourierTail {
  double negative_energy = 0.0;
  double positive_energy = 0.0;  // includes the constant mode
  /// Row k + N/2 holds the coefficient of zeta^k, k = -N/2..N/2-1.
  CMat coefficients;
  /// Nonnegative modes as an analytic disc.
  AnalyticDisc extension;

  double relative_negative_energy() const;
  cplx coefficient(int k, int component) const;
};

inline constexpr int kDefaultFourierSize = 512;

bool is_power_of_two(int N);

/// Normalized DFT: out[k] = (1/N) sum_j x_j exp(-2 pi i jk/N). FFTW backed.
std::vector<cplx> fourier_coefficients(const std::vector<cplx>& samples);
/// Inverse of fourier_coefficients.
std::vector<cplx> fourier_synthesis(const std::vector<cplx>& coefficients);

/// Throws Error unless N is a power of two with N >= 4 (degree + 1).
BoundaryTrace boundary_trace(const AnalyticDisc& f, int N = kDefaultFourierSize);
BoundaryTrace sample_trace(const std::function<CVec(cplx)>& g, int n, int N = kDefaultFourierSize);

FourierTail holomorphic_extension_residual(const BoundaryTrace& g);
/// negative_energy <= 1e-8 * positive_energy.
bool extends_holomorphically(const FourierTail& tail, double rel_tol = 1e-8);

/// Max of |f(zeta) - f(eta)| / |zeta - eta|^{1/2} over grid pairs at dyadic index gaps.
/// A lower estimate of the true seminorm.
double holder_half_seminorm(const BoundaryTrace& g);
double sup_norm(const BoundaryTrace& g);
/// Seminorm estimate plus sup norm.
double holder_half_norm(const BoundaryTrace& g);
double holder_half_norm(const AnalyticDisc& f, int N = 1024);
double holder_half_seminorm(const AnalyticDisc& f, int N = 1024);

/// Taylor expansion of a map holomorphic near the closed disc, truncated once
/// the coefficient tail sum is below tail_tol or max_degree is reached.
Expansion expand_holomorphic(const std::function<CVec(cplx)>& f, int n, double tail_tol = 1e-10,
                             int max_degree = 2048);

/// max of |f - g| over |lambda| <= radius, sampled on the circle of that radius.
double sup_distance(const AnalyticDisc& f, const AnalyticDisc& g, double radius = 1.0, int angles = 512);

}  // namespace imet
