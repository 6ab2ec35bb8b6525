#pragma once

#include <vector>

#include "imet/discs.hpp"
#include "imet/domains.hpp"
#include "imet/metrics.hpp"
#include "imet/types.hpp"

namespace imet {

struct ScalingSchedule {
  std::vector<double> t;    // increasing in (0,1)
  std::vector<double> eps;  // positive with 3 eps[k+1] < eps[k]

  /// t_k = 1 - 2^-k for k = 1..t_count, eps_k = 4^-k for k = 1..levels.
  static ScalingSchedule standard(int t_count = 40, int levels = 6);
  /// Throws Error unless both sequences satisfy their invariants.
  void validate() const;
};

/// C-infinity transition: 0 on (-inf, -1/2], 1 on [-1/4, inf), increasing.
/// Normalized primitive of exp(-1 / (s (1 - s))) rescaled to [-1/2, -1/4].
double chi(double x);
double chi_derivative(double x);
double chi_second_derivative(double x);

/// Defining function r(z) = -1 + |z|^2 + h(z - e_n) with h = o(|z - e_n|^2),
/// related to the original one by r(z) = m(z) r_D(Psi(z)) with Psi affine in
/// z' and quadratic in z_n, m > 0 near e_n.
struct NormalForm {
  DefiningFunction r;
  CVec a;        // boundary point of D
  CMat U;        // unitary, U e_n = outward normal at a
  CMat T;        // tangential scaling
  CVec ell;      // multiplier 1 + 2 Re <w, conj(ell)>
  CMat S;        // holomorphic quadratic correction
  double gradient_norm = 0.0;
  std::vector<double> shells{1e-2, 1e-3, 1e-4};
  std::vector<double> shell_ratios;  // max |h(d)| / |d|^2 on each shell

  /// Psi: normal-form coordinates to coordinates of D.
  CVec to_original(const CVec& z) const;
};

/// Throws NotStronglyConvexAt when the tangential Levi form at a is not
/// positive, Error when a is not a boundary point or the shell check fails.
NormalForm normalize_at_boundary_point(const Domain& D, const CVec& a);

/// r_t(z) = |1 + t z_n|^2 / (1 - t^2) r(A_t(z)), defined for Re z_n >= -1/2
/// (OutOfRegion below). Derivatives are chained exactly.
DefiningFunction scaled_defining(const DefiningFunction& r, double t);

/// Real-coordinate lattice points of the closed unit ball in C^n, per_axis
/// points on each of the 2n axes, plus per_axis^2 points on the sphere.
std::vector<CVec> closed_ball_grid(int n, int per_axis);
/// Lattice points of the closed ball with Re z_n > -1/2.
std::vector<CVec> scaling_region_grid(int n, int per_axis);

struct C2Distance {
  double value = 0.0;
  double gradient = 0.0;
  double hessian = 0.0;  // spectral norm
};

C2Distance c2_distance(const DefiningFunction& f, const DefiningFunction& g, const std::vector<CVec>& grid);

struct BlendedOptions {
  int ball_grid_per_axis = 16;  // over 10^4 points of the closed ball for n = 2
  double lattice_step = 1.0 / 16.0;  // flood fill resolution
};

struct BlendedLevel {
  int mu = 0;             // 1-based level
  int s = 0;              // index into the t sequence (0-based)
  double t = 0.0;
  double eps = 0.0;
  double sup_to_ball = 0.0;       // sup over the ball grid of |rho~_s - rho|
  double sup_level_to_ball = 0.0; // sup over the ball grid of |rho_mu - rho|
  DefiningFunction rho;           // rho~_s + 2 eps
  Domain domain;                  // component of {rho < 0} containing 0
  int component_cells = 0;        // lattice cells in that component
  int negative_cells = 0;         // lattice cells with rho < 0
  double convexity_margin = 0.0;  // strong_convexity_margin on a boundary grid
};

struct BlendedFamily {
  DefiningFunction base;  // r in normal form
  ScalingSchedule schedule;
  std::vector<BlendedLevel> levels;
  int mu0 = 0;  // first level from which every margin is positive, 0 if none
  int monotonicity_violations = 0;  // ball grid points with rho_mu <= rho_mu+1
  bool nested = true;               // component of level mu inside that of mu+1 on the lattice

  /// rho~_t = chi(Re z_n) r_t + (1 - chi(Re z_n)) rho as one formula.
  static DefiningFunction blend(const DefiningFunction& r, double t);
};

/// Greedy subsequence s_mu with sup |rho~_s - rho| < eps_mu on the ball grid;
/// throws BudgetExhausted when the t sequence runs out.
BlendedFamily blended_family(const DefiningFunction& r, const ScalingSchedule& schedule,
                             const BlendedOptions& opt = {});

/// A_t o f re-expanded with tail <= tail_tol. Throws PoleHit when 1 + t f_n
/// vanishes on the closed disc.
AnalyticDisc transport_geodesic(const AnalyticDisc& f, double t, double tail_tol = 1e-10);

struct LbkReport {
  AnalyticDisc disc;                  // last geodesic
  std::vector<double> xi;             // second node per level
  std::vector<double> gaps;           // sup |f_nu - f_nu+1| on the unit circle
  std::vector<double> holder;         // holder_half_norm per level
  std::vector<double> values;         // Lempert bound per level
  double endpoint_error = 0.0;        // |f(1) - p| for the last disc
  double node_error = 0.0;            // |f(xi) - p| for the last disc
  bool decreasing = false;
  bool cauchy = false;                // gaps decreasing and the last one <= 1e-3
};

/// Geodesics through q and a_nu = p - 2^-nu nu_D(p), nu = 1..approach_count,
/// with gaps and Holder estimates; never throws on the trend.
LbkReport lbk_trace(const Domain& D, const CVec& p, const CVec& q, int approach_count = 5, const Budget& budget = {});

/// lbk_trace followed by the trend check. Geodesics through q and a_nu = p - 2^-nu nu_D(p), nu = 1..approach_count.
/// Throws NoCauchyTrend when the gaps do not decrease.
LbkReport lbk_disc(const Domain& D, const CVec& p, const CVec& q, int approach_count = 5,
                   const Budget& budget = {});

}  // namespace imet
