#pragma once

#include <functional>
#include <limits>

#include "imet/types.hpp"

namespace imet {

struct PatternSearchOptions {
  double initial_step = 0.1;
  double min_step = 1e-7;
  int max_evaluations = 2000;
  double target = -std::numeric_limits<double>::infinity();  // stop once f <= target
};

struct PatternSearchResult {
  RVec x;
  double value = 0.0;
  int evaluations = 0;
  double final_step = 0.0;
};

/// Compass search minimizing f. The step halves after an unsuccessful poll; a
/// successful direction is followed with doubling strides.
PatternSearchResult pattern_search(const std::function<double(const RVec&)>& f, const RVec& x0,
                                   const PatternSearchOptions& opt = {});

struct MinMaxResult {
  CVec y;
  double value = 0.0;  // max_g |a_g + (Phi y)_g|
  int iterations = 0;
  bool converged = false;
};

/// Minimizes max_g |a_g + (Phi y)_g| over y in C^p as a second-order cone
/// program, solved by a primal-dual interior point method with
/// Nesterov-Todd scaling and Mehrotra correction. rel_gap bounds the
/// duality gap relative to the optimal value.
MinMaxResult min_max_modulus(const CVec& a, const CMat& Phi, double rel_gap = 1e-10);

}  // namespace imet
