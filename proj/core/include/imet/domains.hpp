#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "imet/jet.hpp"
#include "imet/types.hpp"

namespace imet {

using ValueFn = std::function<double(const CVec&)>;
using JetFn = std::function<Jet(const CVec&)>;
using RealGradFn = std::function<RVec(const CVec&)>;
using RealHessFn = std::function<RMat(const CVec&)>;

/// Real-valued function on C^n with exact first and second derivatives.
///
/// The gradient is packed as complex components dr/dx_j + i dr/dy_j, so the
/// ball function -1 + |z|^2 has gradient 2z. The real Hessian is ordered as
/// (x1, y1, ..., xn, yn).
class DefiningFunction {
 public:
  DefiningFunction() = default;
  DefiningFunction(int n, ValueFn value, JetFn jet);

  /// Wraps user callables for the real gradient and Hessian after checking
  /// them against finite differences at random probes; throws Error on mismatch.
  static DefiningFunction from_derivatives(int n, ValueFn value, RealGradFn grad, RealHessFn hess,
                                           double probe_radius = 1.0, std::uint64_t seed = 7);

  int dimension() const { return n_; }
  double value(const CVec& z) const { return value_(z); }
  Jet jet(const CVec& z) const { return jet_(z); }
  CVec gradient(const CVec& z) const;
  RVec real_gradient(const CVec& z) const;
  RMat real_hessian(const CVec& z) const;

  explicit operator bool() const { return static_cast<bool>(value_); }

 private:
  int n_ = 0;
  ValueFn value_;
  JetFn jet_;
};

/// Builds a DefiningFunction from a generic formula callable on both
/// std::vector<cplx> (returning double) and std::vector<CJet> (returning Jet).
template <class Formula>
DefiningFunction make_defining(int n, Formula formula) {
  return DefiningFunction(
      n, [formula](const CVec& z) { return formula(as_vector(z)); },
      [formula](const CVec& z) { return formula(seed_jets(z)); });
}

struct DerivativeCheck {
  double gradient_error = 0.0;  // max relative error over probes
  double hessian_error = 0.0;
};

/// Compares analytic derivatives to central differences at the given probes.
/// Errors are relative to max(1, |analytic|).
DerivativeCheck validate_derivatives(const DefiningFunction& r, const std::vector<CVec>& probes);

/// Polynomial in the real coordinates x_j = Re z_j, y_j = Im z_j.
struct Perturbation {
  struct Term {
    double coefficient = 0.0;
    std::vector<int> powers;  // length 2n, order (x1, y1, ..., xn, yn)
  };
  int n = 0;
  std::vector<Term> terms;

  /// Parses strings like "-1.5*x1^2 + x1^4 + 0.5*x1*y2^3".
  static Perturbation parse(const std::string& text, int n);
  std::string to_string() const;
  bool empty() const { return terms.empty(); }

  template <class C>
  auto evaluate(const std::vector<C>& z) const {
    using T = decltype(abs2(z[0]));
    T sum = re(z[0]) * 0.0;
    for (const auto& term : terms) {
      T prod = re(z[0]) * 0.0 + term.coefficient;
      for (int k = 0; k < 2 * n; ++k) {
        const int p = term.powers[k];
        if (p == 0) continue;
        const T coord = (k % 2 == 0) ? T(re(z[k / 2])) : T(im(z[k / 2]));
        prod = prod * pow_int(coord, p);
      }
      sum = sum + prod;
    }
    return sum;
  }
};

struct UnitDisc {};
struct Ball {
  int n = 2;
};
struct Polydisc {
  int n = 2;
};
struct Annulus {
  double r_minus = 0.25;
  double r_plus = 1.0;
};
/// r = -1 + sum w_j |z_j|^{2 m_j} + h(x, y) + sum c_k |z - center_k|^{p_k}.
struct Ellipsoid {
  struct NormPower {
    double coefficient = 0.0;
    double power = 3.0;
    CVec center;
  };
  int n = 2;
  std::vector<double> weights;
  std::vector<int> exponents;
  Perturbation perturbation;
  std::vector<NormPower> norm_powers;
};
struct ReinhardtDAlpha {
  double alpha = 0.5;
};
/// Unit ball cut by the real half-space Re z_n < level.
struct HalfSpaceCap {
  int n = 2;
  double level = 0.5;
};

using ModelDomain = std::variant<UnitDisc, Ball, Polydisc, Annulus, Ellipsoid, ReinhardtDAlpha, HalfSpaceCap>;

int model_dimension(const ModelDomain& m);
std::string model_name(const ModelDomain& m);

struct Domain {
  DefiningFunction defining;
  CVec interior_point;
  double bounding_radius = 1.0;
  /// Rays from this point are used to sample the boundary.
  CVec star_center;
  bool c2 = true;
  std::optional<ModelDomain> model;
  std::string name;

  int dimension() const { return defining.dimension(); }
};

/// Builds the domain for a model; validates model parameters (throws Error).
Domain make_domain(const ModelDomain& m);
/// Generic domain from a defining function; no model closed forms attached.
Domain make_domain(DefiningFunction r, CVec interior_point, double bounding_radius, std::string name = "custom");

inline constexpr double kTolBoundary = 1e-12;
/// Preconditions of boundary operations accept points computed by root search.
inline constexpr double kTolBoundaryPre = 1e-9;

struct Membership {
  enum Kind { Interior, Boundary, Exterior };
  Kind kind = Interior;
  double margin = 0.0;  // -value(z)
};

Membership contains(const Domain& D, const CVec& z, double tol_boundary = kTolBoundary);

/// gradient / |gradient| at a boundary point.
CVec outward_normal(const Domain& D, const CVec& z, double tol_boundary = kTolBoundaryPre);

/// Complex Hessian of a real 2n x 2n Hessian in (x1, y1, ...) order.
CMat complex_hessian(const RMat& real_hessian);
/// sum_jk r_{j kbar}(a) X_j conj(X_k).
double levi_form(const Domain& D, const CVec& a, const CVec& X, double tol_boundary = kTolBoundaryPre);

struct BoundaryGrid {
  std::vector<CVec> points;
  std::vector<CVec> normals;
  double mesh = 0.0;
  /// Angular coordinates and ray radius of each sample (see direction_from_angles).
  std::vector<RVec> angles;
  std::vector<double> radii;
};

struct GridOptions {
  int theta = 0;  // samples per circle angle; 0 picks a default by dimension
  int phi = 0;    // samples of the modulus angle for n >= 2
  int ray_samples = 96;
};

BoundaryGrid boundary_grid(const Domain& D, const GridOptions& opt = {});

/// Angles (theta) for n = 1; (phi_1..phi_{n-1}, theta_1..theta_n) otherwise, where
/// the moduli are hyperspherical in the phi's and theta_j is the argument of z_j.
CVec direction_from_angles(int n, const RVec& angles);
std::vector<RVec> angular_grid(int n, const GridOptions& opt);
/// Unit directions from the star center, product grid in angular coordinates.
std::vector<CVec> angular_directions(int n, const GridOptions& opt);
/// Boundary crossing on the ray with the given angles closest to radius_guess.
std::optional<CVec> boundary_point_near(const Domain& D, const RVec& angles, double radius_guess);

/// Min over the grid of the smallest eigenvalue of the real Hessian on the
/// real tangent space of the boundary.
double strong_convexity_margin(const Domain& D, const BoundaryGrid& grid);
double tangent_min_eigenvalue(const DefiningFunction& r, const CVec& a);

/// Negative inside, positive outside.
double signed_distance(const Domain& D, const CVec& z, int max_iter = 400);
/// Nearest boundary point to z (KKT point of |b - z|^2 subject to r(b) = 0).
CVec nearest_boundary_point(const Domain& D, const CVec& z, int max_iter = 400);

}  // namespace imet
