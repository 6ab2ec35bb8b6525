#include "imet/functionals.hpp"

#include <cmath>

namespace imet {

namespace {

void multi_indices(int n, int degree, std::vector<int>& current, int pos, std::vector<std::vector<int>>& out) {
  if (pos == n) {
    out.push_back(current);
    return;
  }
  int used = 0;
  for (int j = 0; j < pos; ++j) used += current[j];
  for (int k = 0; k + used <= degree; ++k) {
    current[pos] = k;
    multi_indices(n, degree, current, pos + 1, out);
  }
  current[pos] = 0;
}

cplx ipow(cplx x, int k) {
  if (k >= 0) {
    cplx r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
  }
  return 1.0 / ipow(x, -k);
}

}  // namespace

HoloFunctional HoloFunctional::polynomial(int n, int degree) {
  HoloFunctional F;
  F.kind = Kind::Polynomial;
  F.n = n;
  F.degree = degree;
  std::vector<int> cur(n, 0);
  multi_indices(n, degree, cur, 0, F.exponents);
  F.coefficients = CVec::Zero(F.size());
  F.pole = CVec::Zero(n);
  return F;
}

HoloFunctional HoloFunctional::laurent(int degree) {
  HoloFunctional F;
  F.kind = Kind::Laurent;
  F.n = 1;
  F.degree = degree;
  for (int k = -degree; k <= degree; ++k) F.exponents.push_back({k});
  F.coefficients = CVec::Zero(F.size());
  F.pole = CVec::Zero(1);
  return F;
}

CVec HoloFunctional::basis(const CVec& x) const {
  const cplx den = 1.0 - inner(x, pole);
  CVec out(size());
  for (int i = 0; i < size(); ++i) {
    cplx m = 1.0;
    for (int j = 0; j < n; ++j) m *= ipow(x[j], exponents[i][j]);
    out[i] = m / den;
  }
  return out;
}

CMat HoloFunctional::basis_gradient(const CVec& x) const {
  const cplx den = 1.0 - inner(x, pole);
  CMat out(size(), n);
  for (int i = 0; i < size(); ++i) {
    cplx m = 1.0;
    for (int j = 0; j < n; ++j) m *= ipow(x[j], exponents[i][j]);
    for (int j = 0; j < n; ++j) {
      const int e = exponents[i][j];
      cplx dm = 0.0;
      if (e != 0) {
        dm = static_cast<double>(e) * ipow(x[j], e - 1);
        for (int k = 0; k < n; ++k)
          if (k != j) dm *= ipow(x[k], exponents[i][k]);
      }
      // d/dx_j of 1/(1 - sum x_k conj(b_k)) is conj(b_j)/den^2
      out(i, j) = dm / den + m * std::conj(pole[j]) / (den * den);
    }
  }
  return out;
}

cplx HoloFunctional::operator()(const CVec& x) const { return guard * (basis(x).transpose() * coefficients)(0); }

CVec HoloFunctional::gradient(const CVec& x) const { return guard * (basis_gradient(x).transpose() * coefficients); }

}  // namespace imet
