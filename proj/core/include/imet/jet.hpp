#pragma once

// Second-order forward-mode jets over the packed real coordinates
// (x1, y1, ..., xn, yn). Model defining functions are written once as
// templates over the scalar type and evaluated either on plain doubles
// (fast value path) or on jets (exact gradient and real Hessian).

#include <cmath>
#include <vector>

#include "imet/types.hpp"

namespace imet {

inline constexpr int kMaxJetDim = 8;
using JVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxJetDim, 1>;
using JMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxJetDim, kMaxJetDim>;

struct Jet {
  double v = 0.0;
  JVec g;
  JMat h;

  Jet() = default;
  Jet(double value, int dim) : v(value), g(JVec::Zero(dim)), h(JMat::Zero(dim, dim)) {}

  static Jet variable(double value, int index, int dim) {
    Jet j(value, dim);
    j.g[index] = 1.0;
    return j;
  }
  int dim() const { return static_cast<int>(g.size()); }
};

/// f(a) given f, f', f'' at a.v.
inline Jet apply(const Jet& a, double f0, double f1, double f2) {
  Jet r;
  r.v = f0;
  r.g = f1 * a.g;
  r.h = f1 * a.h + f2 * a.g * a.g.transpose();
  return r;
}

inline Jet operator+(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v + b.v;
  r.g = a.g + b.g;
  r.h = a.h + b.h;
  return r;
}
inline Jet operator-(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v - b.v;
  r.g = a.g - b.g;
  r.h = a.h - b.h;
  return r;
}
inline Jet operator-(const Jet& a) {
  Jet r;
  r.v = -a.v;
  r.g = -a.g;
  r.h = -a.h;
  return r;
}
inline Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v * b.v;
  r.g = a.v * b.g + b.v * a.g;
  r.h = a.v * b.h + b.v * a.h + a.g * b.g.transpose() + b.g * a.g.transpose();
  return r;
}
inline Jet operator+(const Jet& a, double c) {
  Jet r = a;
  r.v += c;
  return r;
}
inline Jet operator+(double c, const Jet& a) { return a + c; }
inline Jet operator-(const Jet& a, double c) { return a + (-c); }
inline Jet operator-(double c, const Jet& a) { return (-a) + c; }
inline Jet operator*(const Jet& a, double c) {
  Jet r;
  r.v = a.v * c;
  r.g = a.g * c;
  r.h = a.h * c;
  return r;
}
inline Jet operator*(double c, const Jet& a) { return a * c; }
inline Jet reciprocal(const Jet& a) {
  const double inv = 1.0 / a.v;
  return apply(a, inv, -inv * inv, 2.0 * inv * inv * inv);
}
inline Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
inline Jet operator/(const Jet& a, double c) { return a * (1.0 / c); }
inline Jet operator/(double c, const Jet& a) { return c * reciprocal(a); }

inline Jet sqrt(const Jet& a) {
  const double s = std::sqrt(a.v);
  return apply(a, s, 0.5 / s, -0.25 / (s * a.v));
}
inline Jet exp(const Jet& a) {
  const double e = std::exp(a.v);
  return apply(a, e, e, e);
}
inline Jet log(const Jet& a) { return apply(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }
/// a^p for a >= 0; at a = 0 the jet is taken as zero, valid for p > 2.
inline Jet pow(const Jet& a, double p) {
  if (a.v == 0.0) return Jet(0.0, a.dim());
  return apply(a, std::pow(a.v, p), p * std::pow(a.v, p - 1.0), p * (p - 1.0) * std::pow(a.v, p - 2.0));
}

using std::exp;
using std::log;
using std::pow;
using std::sqrt;

inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.v; }

template <class T>
T pow_int(const T& x, int k) {
  if (k == 0) return x * 0.0 + 1.0;
  T r = x;
  for (int i = 1; i < k; ++i) r = r * x;
  return r;
}

/// Max of two smooth branches; derivatives follow the active branch.
template <class T>
T branch_max(const T& a, const T& b) {
  return value_of(a) >= value_of(b) ? a : b;
}

/// Complex number whose real and imaginary parts are jets.
struct CJet {
  Jet re;
  Jet im;
};

inline CJet operator+(const CJet& a, const CJet& b) { return {a.re + b.re, a.im + b.im}; }
inline CJet operator-(const CJet& a, const CJet& b) { return {a.re - b.re, a.im - b.im}; }
inline CJet operator*(const CJet& a, const CJet& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline CJet operator+(const CJet& a, cplx c) { return {a.re + c.real(), a.im + c.imag()}; }
inline CJet operator+(cplx c, const CJet& a) { return a + c; }
inline CJet operator-(const CJet& a, cplx c) { return a + (-c); }
inline CJet operator-(cplx c, const CJet& a) { return {c.real() - a.re, c.imag() - a.im}; }
inline CJet operator*(const CJet& a, cplx c) {
  return {a.re * c.real() - a.im * c.imag(), a.re * c.imag() + a.im * c.real()};
}
inline CJet operator*(cplx c, const CJet& a) { return a * c; }
inline CJet operator*(const CJet& a, const Jet& s) { return {a.re * s, a.im * s}; }
inline CJet operator*(const Jet& s, const CJet& a) { return a * s; }
inline CJet operator*(const CJet& a, double s) { return {a.re * s, a.im * s}; }
inline CJet operator*(double s, const CJet& a) { return a * s; }
inline Jet abs2(const CJet& a) { return a.re * a.re + a.im * a.im; }
inline CJet conj(const CJet& a) { return {a.re, -a.im}; }
inline CJet operator/(const CJet& a, const CJet& b) {
  const Jet inv = reciprocal(abs2(b));
  return (a * conj(b)) * inv;
}
inline const Jet& re(const CJet& a) { return a.re; }
inline const Jet& im(const CJet& a) { return a.im; }
inline cplx value_of(const CJet& a) { return {a.re.v, a.im.v}; }

inline double abs2(cplx a) { return std::norm(a); }
inline double re(cplx a) { return a.real(); }
inline double im(cplx a) { return a.imag(); }
inline cplx value_of(cplx a) { return a; }

/// Identity jets for the coordinates of z.
inline std::vector<CJet> seed_jets(const CVec& z) {
  const int dim = static_cast<int>(2 * z.size());
  std::vector<CJet> out;
  out.reserve(z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    out.push_back({Jet::variable(z[j].real(), static_cast<int>(2 * j), dim),
                   Jet::variable(z[j].imag(), static_cast<int>(2 * j + 1), dim)});
  }
  return out;
}

inline std::vector<cplx> as_vector(const CVec& z) { return std::vector<cplx>(z.data(), z.data() + z.size()); }

}  // namespace imet
