#pragma once

#include <optional>
#include <vector>

#include "imet/discs.hpp"
#include "imet/domains.hpp"
#include "imet/metrics.hpp"
#include "imet/types.hpp"

namespace imet {

struct Geodesic {
  AnalyticDisc disc;
  RationalDisc exact;  // the rational map before truncation
  double xi = 0.0;     // f(0) = z, f(xi) = w
  double tail = 0.0;
};

/// Complex geodesic of the unit ball through z (at 0) and w (at xi = |phi_z(w)|):
/// lambda -> phi_z(lambda u) with u = phi_z(w) / |phi_z(w)|.
Geodesic ball_geodesic(int n, const CVec& z, const CVec& w, double tail_tol = 1e-12, int max_degree = 4096);

struct StationaryOptions {
  int samples = 512;        // boundary nodes, a power of two
  int weight_degree = 16;   // trigonometric degree of the weight
  double residual_scale = 1e-6;  // boundary residual threshold per unit diameter
  double energy_tol = 1e-6;
};

struct StationaryCertificate {
  double boundary_residual = 0.0;
  double dual_negative_energy = 0.0;
  AnalyticDisc dual_map;
  std::vector<double> weight;  // rho at the boundary nodes
  RVec weight_coefficients;    // (a_0, a_1, b_1, ..., a_d, b_d); empty when rho was supplied
  double holder_estimate = 0.0;
  double residual_threshold = 0.0;
  bool boundary_attached = false;
  bool weight_positive = false;
  bool passes = false;
};

/// Checks f(T) in bD and builds the weight rho > 0 with zeta rho conj(nu(f))
/// extending holomorphically; the extension is the dual map. A disc that is
/// not boundary attached gets a failing certificate (no throw).
StationaryCertificate certify_stationary(const Domain& D, const AnalyticDisc& f,
                                         const std::optional<std::vector<double>>& rho = std::nullopt,
                                         const StationaryOptions& opt = {});

/// eta -> (z - f(eta)) . dual(eta), bilinear.
cplx left_inverse_equation(const AnalyticDisc& f, const AnalyticDisc& dual, const CVec& z, cplx eta);

/// Winding number of the equation over |eta| = 1 - 1e-6.
int left_inverse_winding(const AnalyticDisc& f, const AnalyticDisc& dual, const CVec& z);

/// Root of the equation in the unit disc: Newton from 16 starts, uniqueness by
/// the winding count. Throws NoRoot (winding 0) or MultipleRoots (winding >= 2).
cplx left_inverse(const AnalyticDisc& f, const AnalyticDisc& dual, const CVec& z);

/// Evaluates left_inverse and records the points where uniqueness was verified.
class LeftInverse {
 public:
  LeftInverse(AnalyticDisc f, AnalyticDisc dual) : f_(std::move(f)), dual_(std::move(dual)) {}
  cplx operator()(const CVec& z);
  const std::vector<CVec>& certified_domain() const { return certified_; }

 private:
  AnalyticDisc f_, dual_;
  std::vector<CVec> certified_;
};

struct PerturbationGap {
  double gap = 0.0;  // sup over |lambda| <= 1 - 1e-3
  DiscBound base, perturbed;
};

/// Extremal discs for (z, X) on D and on {r_perturbed < 0}, compared in sup norm.
/// Throws Infeasible when either search fails.
PerturbationGap geodesic_perturbation_gap(const Domain& D, const DefiningFunction& r_perturbed, const CVec& z,
                                          const CVec& X, const Budget& budget = {});

}  // namespace imet
