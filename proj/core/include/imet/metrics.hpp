#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "imet/discs.hpp"
#include "imet/domains.hpp"
#include "imet/functionals.hpp"
#include "imet/types.hpp"

namespace imet {

struct Budget {
  int evaluations = 1500;  // objective evaluations per local disc search
  int local_starts = 2;    // best seeds refined by local search
  int random_starts = 8;   // random perturbations of the best deterministic seed
  std::uint64_t seed = 1;
  int disc_degree = 8;
  int functional_degree = 2;
  int laurent_degree = 8;
  int circle_samples = 128;  // boundary circle of the disc feasibility grid
  double eps_feas = 1e-7;
  int pole_evaluations = 30;  // pole search of the functional family
  int exchange_rounds = 3;
  int exchange_candidates = 16;
  int chain_samples = 6;
};

/// Interior points need r <= -this margin.
inline constexpr double kInteriorMargin = 1e-6;
inline constexpr double kGuardSlack = 1e-9;

struct DiscBound {
  bool feasible = false;
  double value = 0.0;  // p(0, xi) or 1/lambda
  double xi = 0.0;     // second node (Lempert) or derivative scale lambda (Kobayashi-Royden)
  /// lambda -> f(scale * lambda); a holomorphic disc into D.
  AnalyticDisc witness;
  double witness_tail = 0.0;
  RationalDisc rational;
  double scale = 0.0;
  /// -max r(witness) over the validation grid.
  double margin = 0.0;
  int evaluations = 0;
};

DiscBound lempert_upper(const Domain& D, const CVec& z, const CVec& w, const Budget& budget = {});
DiscBound kobayashi_royden_upper(const Domain& D, const CVec& z, const CVec& v, const Budget& budget = {});
/// Same searches, returning as soon as the bound is at most stop_value.
DiscBound lempert_upper_until(const Domain& D, const CVec& z, const CVec& w, const Budget& budget, double stop_value);
DiscBound kobayashi_royden_upper_until(const Domain& D, const CVec& z, const CVec& v, const Budget& budget,
                                       double stop_value);

struct FunctionalBound {
  double value = 0.0;
  HoloFunctional witness;  // guard applied: sup over the checked points is 1 - 1e-9
  double sup_grid = 0.0;   // unguarded sup on the boundary grid
  double sup_checked = 0.0;  // unguarded sup on the validation grid plus refined points
  int exchange_rounds = 0;
};

FunctionalBound caratheodory_lower(const Domain& D, const CVec& z, const CVec& w, const Budget& budget = {});
FunctionalBound caratheodory_reiffen_lower(const Domain& D, const CVec& z, const CVec& v, const Budget& budget = {});
/// Same searches, returning once the bound reaches stop_value. The seed
/// functionals (bounding ball, coordinate discs) come first, so -inf returns
/// the best seed.
FunctionalBound caratheodory_lower_until(const Domain& D, const CVec& z, const CVec& w, const Budget& budget,
                                         double stop_value);
FunctionalBound caratheodory_reiffen_lower_until(const Domain& D, const CVec& z, const CVec& v, const Budget& budget,
                                                 double stop_value);

struct ChainBound {
  double value = 0.0;
  std::vector<CVec> chain;  // z, waypoints..., w
  bool feasible = false;
};

/// chain_depth in 1..3; depth 1 is the direct disc.
ChainBound kobayashi_distance_upper(const Domain& D, const CVec& z, const CVec& w, int chain_depth,
                                    const Budget& budget = {});

enum class Quantity { Caratheodory, Kobayashi, Lempert, CaratheodoryReiffen, KobayashiRoyden };

/// Closed form on a model, or nullopt when none is available.
std::optional<double> closed_form(const ModelDomain& m, Quantity q, const CVec& z, const CVec& w_or_v);

struct CompareOptions {
  int chain_depth = 1;
  double tol_eq = 1e-4;
  double gap_margin = 0.0;
};

struct ComparisonReport {
  std::string domain;
  CVec z, w;
  std::optional<CVec> v;

  double c_low = 0.0;
  std::optional<double> k_up, l_up;
  std::optional<double> gamma_low, kappa_up;
  std::optional<double> gap;  // l_up - c_low

  double l_margin = 0.0;
  double kappa_margin = 0.0;
  double xi = 0.0;
  AnalyticDisc witness_disc;
  HoloFunctional witness_functional;

  std::optional<double> c_exact, k_exact, gamma_exact, kappa_exact;
  /// Annulus degree escalation: bounds at Laurent degree 8 and 16 and the
  /// extrapolated envelope c16 + 10 (c16 - c8).
  std::optional<double> c_degree8, c_degree16, c_envelope;

  bool equality_certified = false;
  bool gap_certified = false;
  bool ordering_ok = true;
};

ComparisonReport compare(const Domain& D, const CVec& z, const CVec& w, const std::optional<CVec>& v,
                         const Budget& budget = {}, const CompareOptions& opt = {});

/// Reduction to the factors of a product domain: every quantity is the max over factors.
ComparisonReport compare_product(const std::vector<Domain>& factors, const std::vector<CVec>& z,
                                 const std::vector<CVec>& w, const Budget& budget = {},
                                 const CompareOptions& opt = {});

bool ordering_holds(const ComparisonReport& r);

}  // namespace imet
