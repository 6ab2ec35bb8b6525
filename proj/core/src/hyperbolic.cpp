#include "imet/hyperbolic.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace imet {

double atanh_from(double m, double one_minus_m2) {
  if (m <= 0) return 0.0;
  if (one_minus_m2 <= 0) return std::numeric_limits<double>::infinity();
  const double one_minus_m = one_minus_m2 / (1.0 + m);
  return 0.5 * std::log1p(2.0 * m / one_minus_m);
}

double poincare_distance(cplx zeta, cplx xi) {
  const cplx den = 1.0 - std::conj(zeta) * xi;
  const double m = std::abs(zeta - xi) / std::abs(den);
  const double defect = (1.0 - std::norm(zeta)) * (1.0 - std::norm(xi)) / std::norm(den);
  return atanh_from(m, defect);
}

double poincare_metric(cplx zeta, cplx v) { return std::abs(v) / (1.0 - std::norm(zeta)); }

cplx MoebiusMap::operator()(cplx z) const { return phase * (z - a) / (1.0 - std::conj(a) * z); }

cplx MoebiusMap::inverse(cplx w) const {
  const cplx u = w / phase;
  return (u + a) / (1.0 + std::conj(a) * u);
}

cplx MoebiusMap::derivative(cplx z) const {
  const cplx d = 1.0 - std::conj(a) * z;
  return phase * (1.0 - std::norm(a)) / (d * d);
}

CVec ball_involution(const CVec& a, const CVec& z) {
  const double a2 = a.squaredNorm();
  const cplx za = inner(z, a);
  if (a2 == 0.0) return -z;
  const CVec Pz = (za / a2) * a;
  const CVec Qz = z - Pz;
  const double s = std::sqrt(1.0 - a2);
  return (a - Pz - s * Qz) / (1.0 - za);
}

double ball_involution_defect(const CVec& a, const CVec& z) {
  return (1.0 - a.squaredNorm()) * (1.0 - z.squaredNorm()) / std::norm(1.0 - inner(z, a));
}

double ball_distance(const CVec& z, const CVec& w) {
  const CVec u = ball_involution(z, w);
  return atanh_from(u.norm(), ball_involution_defect(z, w));
}

double ball_metric(const CVec& z, const CVec& v) {
  const double d = 1.0 - z.squaredNorm();
  return std::sqrt(v.squaredNorm() / d + std::norm(inner(v, z)) / (d * d));
}

CVec BallAutomorphism::operator()(const CVec& z) const { return U * ball_involution(a, z); }

CVec BallAutomorphism::inverse(const CVec& w) const { return ball_involution(a, U.adjoint() * w); }

BallScalingAutomorphism BallScalingAutomorphism::from_t(double t, int n) {
  if (!(t > 0 && t < 1)) throw Error("scaling parameter must lie in (0,1)");
  return {1.0 - t, n};
}

namespace {

CVec apply_scaling(double t, double one_minus_t2, const CVec& z) {
  const Eigen::Index n = z.size();
  const cplx den = 1.0 + t * z[n - 1];
  if (std::abs(den) < 1e-14) throw PoleHit("1 + t z_n vanishes");
  CVec out(n);
  const double s = std::sqrt(one_minus_t2);
  for (Eigen::Index j = 0; j + 1 < n; ++j) out[j] = s * z[j] / den;
  out[n - 1] = (z[n - 1] + t) / den;
  return out;
}

}  // namespace

CVec BallScalingAutomorphism::operator()(const CVec& z) const { return apply_scaling(t(), one_minus_t2(), z); }

CVec BallScalingAutomorphism::inverse(const CVec& w) const { return apply_scaling(-t(), one_minus_t2(), w); }

CVec scaling_automorphism(double t, const CVec& z) { return apply_scaling(t, (1.0 - t) * (1.0 + t), z); }

AnnulusLift annulus_lift(double r_minus, cplx z) {
  const double m = std::abs(z);
  if (!(r_minus >= 0 && r_minus < 1)) throw LiftFailure("annulus needs 0 <= r_minus < 1");
  if (!(m > r_minus && m < 1)) throw LiftFailure("point outside the annulus");
  AnnulusLift L;
  if (r_minus == 0.0) {
    L.a = 0.0;
    L.s = std::arg(z);
    L.y = -std::log(m);
    L.period = 2 * std::numbers::pi;
  } else {
    L.a = -std::log(r_minus) / std::numbers::pi;
    L.s = std::arg(z) / L.a;
    L.y = -std::log(m) / L.a;
    L.period = 2 * std::numbers::pi / L.a;
  }
  return L;
}

double strip_distance(double ds, double y1, double y2) {
  ds = std::abs(ds);
  const double sy = std::sin(y1) * std::sin(y2);
  if (ds > 60.0) {
    // asinh(x) = log(2x) + O(x^-2), sinh(ds/2) = e^{ds/2}/2 (1 + O(e^{-ds}))
    return 0.5 * ds - 0.5 * std::log(sy);
  }
  const double sh = std::sinh(0.5 * ds);
  const double sn = std::sin(0.5 * (y1 - y2));
  return std::asinh(std::sqrt((sh * sh + sn * sn) / sy));
}

double half_plane_distance(double ds, double y1, double y2) {
  const double dy = y1 - y2;
  return std::asinh(0.5 * std::sqrt((ds * ds + dy * dy) / (y1 * y2)));
}

double annulus_kobayashi(double r_minus, cplx z, cplx w) {
  const AnnulusLift L1 = annulus_lift(r_minus, z);
  const AnnulusLift L2 = annulus_lift(r_minus, w);
  auto dist = [&](long k) {
    const double ds = L2.s + k * L1.period - L1.s;
    return L1.a == 0.0 ? half_plane_distance(ds, L1.y, L2.y) : strip_distance(ds, L1.y, L2.y);
  };
  // distance grows with |ds|, so the first excluded index bounds every further term
  double best = std::numeric_limits<double>::infinity();
  long K = 3;
  long done = -1;
  while (true) {
    for (long k = done + 1; k <= K; ++k) {
      best = std::min({best, dist(k), dist(-k)});
    }
    done = K;
    if (std::min(dist(K + 1), dist(-K - 1)) > best) break;
    K *= 2;
  }
  return best;
}

double annulus_kobayashi_metric(double r_minus, cplx z, cplx v) {
  const AnnulusLift L = annulus_lift(r_minus, z);
  const double m = std::abs(z);
  if (L.a == 0.0) return std::abs(v) / (2.0 * m * L.y);
  return std::abs(v) / (2.0 * L.a * m * std::sin(L.y));
}

}  // namespace imet
