#pragma once

#include <vector>

#include "imet/types.hpp"

namespace imet {

/// Candidate holomorphic map D -> C of the form
///   F(x) = guard * sum_i c_i x^{alpha_i} / (1 - <x, pole>)
/// with alpha_i ranging over multi-indices of total degree <= degree
/// (Polynomial) or over the exponents -degree..degree in one variable (Laurent,
/// pole fixed at 0).
struct HoloFunctional {
  enum class Kind { Polynomial, Laurent };

  Kind kind = Kind::Polynomial;
  int n = 1;
  int degree = 0;
  std::vector<std::vector<int>> exponents;
  CVec coefficients;
  CVec pole;
  double guard = 1.0;

  static HoloFunctional polynomial(int n, int degree);
  static HoloFunctional laurent(int degree);

  int size() const { return static_cast<int>(exponents.size()); }

  /// Basis values x^{alpha_i} / (1 - <x, pole>), without coefficients or guard.
  CVec basis(const CVec& x) const;
  /// Row i holds d/dx_j of basis i.
  CMat basis_gradient(const CVec& x) const;

  cplx operator()(const CVec& x) const;
  /// Holomorphic gradient dF/dx_j.
  CVec gradient(const CVec& x) const;
};

}  // namespace imet
