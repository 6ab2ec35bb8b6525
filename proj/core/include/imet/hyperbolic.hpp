#pragma once

#include "imet/types.hpp"

namespace imet {

/// tanh^{-1} of the pseudo-hyperbolic distance on the unit disc.
double poincare_distance(cplx zeta, cplx xi);
/// |v| / (1 - |zeta|^2).
double poincare_metric(cplx zeta, cplx v);
/// tanh^{-1}(m) computed from m and 1 - m^2 without cancellation.
double atanh_from(double m, double one_minus_m2);

/// z -> phase * (z - a) / (1 - conj(a) z).
struct MoebiusMap {
  cplx a = 0.0;
  cplx phase = 1.0;

  cplx operator()(cplx z) const;
  cplx inverse(cplx w) const;
  cplx derivative(cplx z) const;
};

/// Involutive automorphism of the unit ball exchanging a and 0.
CVec ball_involution(const CVec& a, const CVec& z);
/// 1 - |phi_a(z)|^2, computed as (1-|a|^2)(1-|z|^2)/|1-<z,a>|^2.
double ball_involution_defect(const CVec& a, const CVec& z);

double ball_distance(const CVec& z, const CVec& w);
/// Infinitesimal form of ball_distance (all invariant metrics agree on the ball).
double ball_metric(const CVec& z, const CVec& v);

/// z -> U phi_a(z), a general automorphism of the ball.
struct BallAutomorphism {
  CVec a;
  CMat U;

  CVec operator()(const CVec& z) const;
  CVec inverse(const CVec& w) const;
};

/// A_t(z) = ((1-t^2)^{1/2} z' / (1 + t z_n), (z_n + t) / (1 + t z_n)).
/// Stores 1 - t so that t close to 1 keeps full relative precision.
struct BallScalingAutomorphism {
  double one_minus_t = 0.5;
  int n = 2;

  static BallScalingAutomorphism from_t(double t, int n);
  double t() const { return 1.0 - one_minus_t; }
  /// 1 - t^2.
  double one_minus_t2() const { return one_minus_t * (2.0 - one_minus_t); }

  CVec operator()(const CVec& z) const;
  CVec inverse(const CVec& w) const;
};

/// Throws PoleHit if |1 + t z_n| < 1e-14.
CVec scaling_automorphism(double t, const CVec& z);

/// Coordinates of a point of the annulus {r < |z| < 1} in its universal cover,
/// the strip {0 < Im zeta < pi} with covering map zeta -> exp(i a zeta).
/// For r = 0 the cover is the upper half plane with zeta -> exp(i zeta).
struct AnnulusLift {
  double s = 0.0;       // Re zeta
  double y = 0.0;       // Im zeta
  double period = 0.0;  // deck translation in Re zeta
  double a = 0.0;       // 0 for the punctured disc
};

AnnulusLift annulus_lift(double r_minus, cplx z);
/// Hyperbolic distance on the strip {0 < Im < pi} with metric |d zeta| / (2 sin Im zeta).
double strip_distance(double ds, double y1, double y2);
/// Hyperbolic distance on the upper half plane with metric |d zeta| / (2 Im zeta).
double half_plane_distance(double ds, double y1, double y2);

/// Exact Kobayashi distance of {r_minus < |z| < 1}; throws LiftFailure outside.
double annulus_kobayashi(double r_minus, cplx z, cplx w);
/// Kobayashi-Royden metric of {r_minus < |z| < 1}.
double annulus_kobayashi_metric(double r_minus, cplx z, cplx v);

}  // namespace imet
