#include "imet/domains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace imet {

namespace {

constexpr double kPi = std::numbers::pi;

template <class C>
auto sum_abs2(const std::vector<C>& z) {
  auto s = abs2(z[0]);
  for (std::size_t j = 1; j < z.size(); ++j) s = s + abs2(z[j]);
  return s;
}

Jet jet_from_callables(const CVec& z, double v, const RVec& g, const RMat& h) {
  Jet j(v, static_cast<int>(2 * z.size()));
  j.g = g;
  j.h = h;
  return j;
}

}  // namespace

DefiningFunction::DefiningFunction(int n, ValueFn value, JetFn jet)
    : n_(n), value_(std::move(value)), jet_(std::move(jet)) {
  if (2 * n > kMaxJetDim) throw Error("dimension too large for jet storage");
}

CVec DefiningFunction::gradient(const CVec& z) const { return to_complex(real_gradient(z)); }

RVec DefiningFunction::real_gradient(const CVec& z) const { return RVec(jet_(z).g); }

RMat DefiningFunction::real_hessian(const CVec& z) const { return RMat(jet_(z).h); }

DefiningFunction DefiningFunction::from_derivatives(int n, ValueFn value, RealGradFn grad, RealHessFn hess,
                                                    double probe_radius, std::uint64_t seed) {
  DefiningFunction r(
      n, value, [value, grad, hess](const CVec& z) { return jet_from_callables(z, value(z), grad(z), hess(z)); });
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-probe_radius, probe_radius);
  std::vector<CVec> probes;
  for (int k = 0; k < 20; ++k) {
    CVec z(n);
    for (int j = 0; j < n; ++j) z[j] = cplx(u(rng), u(rng));
    probes.push_back(z);
  }
  const DerivativeCheck check = validate_derivatives(r, probes);
  if (check.gradient_error > 1e-6 || check.hessian_error > 1e-5) {
    throw Error("supplied derivatives disagree with finite differences (gradient " +
                std::to_string(check.gradient_error) + ", hessian " + std::to_string(check.hessian_error) + ")");
  }
  return r;
}

DerivativeCheck validate_derivatives(const DefiningFunction& r, const std::vector<CVec>& probes) {
  DerivativeCheck out;
  const int m = 2 * r.dimension();
  for (const CVec& z : probes) {
    const RVec x = to_real(z);
    const RVec g = r.real_gradient(z);
    const RMat H = r.real_hessian(z);
    const double scale_g = std::max(1.0, g.cwiseAbs().maxCoeff());
    const double scale_h = std::max(1.0, H.cwiseAbs().maxCoeff());
    for (int k = 0; k < m; ++k) {
      const double h = 1e-5 * std::max(1.0, std::abs(x[k]));
      RVec xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      const double fd = (r.value(to_complex(xp)) - r.value(to_complex(xm))) / (2 * h);
      out.gradient_error = std::max(out.gradient_error, std::abs(fd - g[k]) / scale_g);
      const RVec fd_row = (r.real_gradient(to_complex(xp)) - r.real_gradient(to_complex(xm))) / (2 * h);
      out.hessian_error = std::max(out.hessian_error, (fd_row - H.col(k)).cwiseAbs().maxCoeff() / scale_h);
    }
  }
  return out;
}

int model_dimension(const ModelDomain& m) {
  return std::visit(
      [](const auto& x) -> int {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, UnitDisc> || std::is_same_v<T, Annulus>) {
          return 1;
        } else if constexpr (std::is_same_v<T, ReinhardtDAlpha>) {
          return 2;
        } else {
          return x.n;
        }
      },
      m);
}

std::string model_name(const ModelDomain& m) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, UnitDisc>) return "UnitDisc";
        if constexpr (std::is_same_v<T, Ball>) return "Ball(" + std::to_string(x.n) + ")";
        if constexpr (std::is_same_v<T, Polydisc>) return "Polydisc(" + std::to_string(x.n) + ")";
        if constexpr (std::is_same_v<T, Annulus>)
          return "Annulus(" + std::to_string(x.r_minus) + "," + std::to_string(x.r_plus) + ")";
        if constexpr (std::is_same_v<T, Ellipsoid>) return "Ellipsoid(" + std::to_string(x.n) + ")";
        if constexpr (std::is_same_v<T, ReinhardtDAlpha>) return "ReinhardtDAlpha(" + std::to_string(x.alpha) + ")";
        if constexpr (std::is_same_v<T, HalfSpaceCap>) return "HalfSpaceCap(" + std::to_string(x.level) + ")";
      },
      m);
}

namespace {

// Largest boundary crossing along rays from the center, used when no closed
// form for the bounding radius is available.
double estimate_bounding_radius(const DefiningFunction& r, const CVec& center) {
  GridOptions opt;
  opt.theta = r.dimension() == 1 ? 64 : 12;
  opt.phi = 5;
  double best = 0.0;
  const double smax = 16.0;
  const int samples = 640;
  for (const CVec& d : angular_directions(r.dimension(), opt)) {
    double last = 0.0;
    double prev = r.value(center);
    for (int k = 1; k <= samples; ++k) {
      const double s = smax * k / samples;
      const double v = r.value(center + s * d);
      if ((prev < 0) != (v < 0)) last = s;
      prev = v;
    }
    best = std::max(best, (center + last * d).norm());
  }
  return best * 1.02 + smax / samples;
}

}  // namespace

Domain make_domain(DefiningFunction r, CVec interior_point, double bounding_radius, std::string name) {
  Domain D;
  D.defining = std::move(r);
  D.star_center = interior_point;
  D.interior_point = std::move(interior_point);
  D.bounding_radius = bounding_radius;
  D.name = std::move(name);
  if (!(D.defining.value(D.interior_point) < 0)) throw Error("interior point is not inside the domain");
  return D;
}

Domain make_domain(const ModelDomain& m) {
  Domain D;
  D.model = m;
  D.name = model_name(m);
  const int n = model_dimension(m);
  D.interior_point = CVec::Zero(n);
  D.star_center = CVec::Zero(n);
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, UnitDisc> || std::is_same_v<T, Ball>) {
          if (n < 1) throw Error("Ball dimension must be positive");
          D.defining = make_defining(n, [](const auto& z) { return sum_abs2(z) - 1.0; });
          D.bounding_radius = 1.0;
        } else if constexpr (std::is_same_v<T, Polydisc>) {
          if (n < 1) throw Error("Polydisc dimension must be positive");
          D.defining = make_defining(n, [](const auto& z) {
            auto v = abs2(z[0]) - 1.0;
            for (std::size_t j = 1; j < z.size(); ++j) v = branch_max(v, abs2(z[j]) - 1.0);
            return v;
          });
          D.bounding_radius = std::sqrt(static_cast<double>(n));
        } else if constexpr (std::is_same_v<T, Annulus>) {
          if (!(0 <= x.r_minus && x.r_minus < x.r_plus)) throw Error("Annulus requires 0 <= r_minus < r_plus");
          const double R = x.r_plus;
          const double q2 = (x.r_minus / R) * (x.r_minus / R);
          D.defining = make_defining(1, [R, q2](const auto& z) {
            const auto s = abs2(z[0]) * (1.0 / (R * R));
            return (s - 1.0) * (s - q2) * (1.0 / (1.0 - q2));
          });
          D.bounding_radius = R;
          D.interior_point[0] = 0.5 * (x.r_minus + R);
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          if (static_cast<int>(x.weights.size()) != n || static_cast<int>(x.exponents.size()) != n)
            throw Error("Ellipsoid needs one weight and one exponent per coordinate");
          if (!x.perturbation.empty() && x.perturbation.n != n) throw Error("perturbation dimension mismatch");
          const Ellipsoid e = x;
          D.defining = make_defining(n, [e](const auto& z) {
            auto v = abs2(z[0]) * 0.0 - 1.0;
            for (int j = 0; j < e.n; ++j) v = v + e.weights[j] * pow_int(abs2(z[j]), e.exponents[j]);
            if (!e.perturbation.empty()) v = v + e.perturbation.evaluate(z);
            for (const auto& np : e.norm_powers) {
              auto s = abs2(z[0] - np.center[0]);
              for (int j = 1; j < e.n; ++j) s = s + abs2(z[j] - np.center[j]);
              v = v + np.coefficient * pow(s, 0.5 * np.power);
            }
            return v;
          });
          if (!(D.defining.value(D.interior_point) < 0)) {
            CVec best = D.interior_point;
            for (int j = 0; j < n; ++j)
              for (cplx c : {cplx(0.5), cplx(-0.5), cplx(0, 0.5), cplx(0, -0.5)}) {
                CVec p = CVec::Zero(n);
                p[j] = c;
                if (D.defining.value(p) < D.defining.value(best)) best = p;
              }
            D.interior_point = best;
            D.star_center = best;
          }
          D.bounding_radius = estimate_bounding_radius(D.defining, D.star_center);
        } else if constexpr (std::is_same_v<T, ReinhardtDAlpha>) {
          if (!(x.alpha > 0 && x.alpha <= 1)) throw Error("ReinhardtDAlpha requires alpha in (0,1]");
          const double a2 = x.alpha * x.alpha;
          D.defining = make_defining(2, [a2](const auto& z) {
            auto v = branch_max(abs2(z[0]) - 1.0, abs2(z[1]) - 1.0);
            return branch_max(v, abs2(z[0] * z[1]) - a2);
          });
          D.bounding_radius = std::sqrt(2.0);
          D.c2 = false;
        } else if constexpr (std::is_same_v<T, HalfSpaceCap>) {
          if (!(x.level > -1.0)) throw Error("HalfSpaceCap level must exceed -1");
          const int last = n - 1;
          const double level = x.level;
          D.defining = make_defining(n, [last, level](const auto& z) {
            return branch_max(sum_abs2(z) - 1.0, re(z[last]) - level);
          });
          D.bounding_radius = 1.0;
          if (level <= 0) D.interior_point[last] = 0.5 * (level - 1.0);
          D.star_center = D.interior_point;
        }
      },
      m);
  if (!(D.defining.value(D.interior_point) < 0)) throw Error("model interior point is not inside the domain");
  return D;
}

Membership contains(const Domain& D, const CVec& z, double tol_boundary) {
  const double v = D.defining.value(z);
  Membership m;
  m.margin = -v;
  if (v < -tol_boundary) {
    m.kind = Membership::Interior;
  } else if (v <= tol_boundary) {
    m.kind = Membership::Boundary;
  } else {
    m.kind = Membership::Exterior;
  }
  return m;
}

CVec outward_normal(const Domain& D, const CVec& z, double tol_boundary) {
  const double v = D.defining.value(z);
  if (std::abs(v) > tol_boundary) throw OutOfRegion("outward_normal needs a boundary point");
  const CVec g = D.defining.gradient(z);
  const double norm = g.norm();
  if (norm < 1e-10) throw DegenerateGradient("gradient norm " + std::to_string(norm));
  return g / norm;
}

CMat complex_hessian(const RMat& H) {
  const Eigen::Index n = H.rows() / 2;
  CMat L(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const double xx = H(2 * j, 2 * k), yy = H(2 * j + 1, 2 * k + 1);
      const double xy = H(2 * j, 2 * k + 1), yx = H(2 * j + 1, 2 * k);
      L(j, k) = 0.25 * cplx(xx + yy, xy - yx);
    }
  }
  return L;
}

double levi_form(const Domain& D, const CVec& a, const CVec& X, double tol_boundary) {
  if (std::abs(D.defining.value(a)) > tol_boundary) throw OutOfRegion("levi_form needs a boundary point");
  const CMat L = complex_hessian(D.defining.real_hessian(a));
  cplx s = 0.0;
  for (Eigen::Index j = 0; j < L.rows(); ++j)
    for (Eigen::Index k = 0; k < L.cols(); ++k) s += L(j, k) * X[j] * std::conj(X[k]);
  return s.real();
}

CVec direction_from_angles(int n, const RVec& angles) {
  CVec d(n);
  if (n == 1) {
    d[0] = std::polar(1.0, angles[0]);
    return d;
  }
  double s = 1.0;
  for (int j = 0; j < n - 1; ++j) {
    d[j] = std::polar(s * std::cos(angles[j]), angles[n - 1 + j]);
    s *= std::sin(angles[j]);
  }
  d[n - 1] = std::polar(s, angles[2 * n - 2]);
  return d;
}

std::vector<RVec> angular_grid(int n, const GridOptions& opt) {
  std::vector<RVec> out;
  if (n == 1) {
    const int T = opt.theta > 0 ? opt.theta : 256;
    for (int k = 0; k < T; ++k) out.push_back(RVec::Constant(1, 2 * kPi * k / T));
    return out;
  }
  const int T = opt.theta > 0 ? opt.theta : (n == 2 ? 32 : 8);
  const int P = opt.phi > 0 ? opt.phi : (n == 2 ? 9 : 5);
  // hyperspherical modulus angles in [0, pi/2], one circle angle per coordinate
  std::vector<int> idx(2 * n - 1, 0);
  while (true) {
    RVec ang(2 * n - 1);
    for (int j = 0; j < n - 1; ++j) ang[j] = P == 1 ? 0.0 : 0.5 * kPi * idx[j] / (P - 1);
    for (int j = 0; j < n; ++j) ang[n - 1 + j] = 2 * kPi * idx[n - 1 + j] / T;
    out.push_back(ang);
    int j = 2 * n - 2;
    while (j >= 0) {
      const int limit = j >= n - 1 ? T : P;
      if (++idx[j] < limit) break;
      idx[j--] = 0;
    }
    if (j < 0) break;
  }
  return out;
}

std::vector<CVec> angular_directions(int n, const GridOptions& opt) {
  std::vector<CVec> out;
  for (const RVec& a : angular_grid(n, opt)) out.push_back(direction_from_angles(n, a));
  return out;
}

namespace {

double refine_root(const DefiningFunction& r, const CVec& c, const CVec& d, double a, double b, double va) {
  for (int it = 0; it < 200 && b - a > 1e-16 * std::max(1.0, b); ++it) {
    const double m = 0.5 * (a + b);
    const double vm = r.value(c + m * d);
    if (vm == 0.0) return m;
    if ((vm < 0) == (va < 0)) {
      a = m;
      va = vm;
    } else {
      b = m;
    }
  }
  const double fa = std::abs(r.value(c + a * d)), fb = std::abs(r.value(c + b * d));
  return fa <= fb ? a : b;
}

}  // namespace

BoundaryGrid boundary_grid(const Domain& D, const GridOptions& opt) {
  BoundaryGrid grid;
  const DefiningFunction& r = D.defining;
  const CVec& c = D.star_center;
  const double smax = 1.05 * D.bounding_radius + c.norm();
  const int S = std::max(8, opt.ray_samples);
  const std::vector<RVec> angles = angular_grid(D.dimension(), opt);
  for (const RVec& ang : angles) {
    const CVec d = direction_from_angles(D.dimension(), ang);
    double prev_s = 0.0;
    double prev_v = r.value(c);
    for (int k = 1; k <= S; ++k) {
      const double s = smax * k / S;
      const double v = r.value(c + s * d);
      if ((prev_v < 0 && v > 0) || (prev_v > 0 && v < 0) || (v == 0 && prev_v != 0)) {
        const double root = v == 0 ? s : refine_root(r, c, d, prev_s, s, prev_v);
        const CVec p = c + root * d;
        const CVec g = r.gradient(p);
        grid.points.push_back(p);
        grid.normals.push_back(g / g.norm());
        grid.angles.push_back(ang);
        grid.radii.push_back(root);
      }
      prev_s = s;
      prev_v = v;
    }
  }
  // mesh: nearest-neighbour gap maximised over (a strided subset of) samples
  const std::size_t N = grid.points.size();
  const std::size_t stride = std::max<std::size_t>(1, N / 512);
  double mesh = 0.0;
  for (std::size_t i = 0; i < N; i += stride) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < N; ++j) {
      const double dist = (grid.points[i] - grid.points[j]).norm();
      if (dist > 1e-14) best = std::min(best, dist);
    }
    if (std::isfinite(best)) mesh = std::max(mesh, best);
  }
  grid.mesh = mesh;
  return grid;
}

double tangent_min_eigenvalue(const DefiningFunction& r, const CVec& a) {
  const Jet j = r.jet(a);
  const RVec g = j.g;
  const RMat H = j.h;
  const Eigen::Index m = g.size();
  Eigen::HouseholderQR<RMat> qr(g);
  const RMat Q = qr.householderQ() * RMat::Identity(m, m);
  const RMat T = Q.rightCols(m - 1);
  const RMat Ht = T.transpose() * H * T;
  if (Ht.size() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (Ht + Ht.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

double strong_convexity_margin(const Domain& D, const BoundaryGrid& grid) {
  if (grid.points.empty()) throw Error("strong_convexity_margin needs a nonempty grid");
  double best = std::numeric_limits<double>::infinity();
  for (const CVec& p : grid.points) best = std::min(best, tangent_min_eigenvalue(D.defining, p));
  return best;
}

namespace {

bool project_to_boundary(const DefiningFunction& r, RVec& x) {
  for (int it = 0; it < 60; ++it) {
    const CVec z = to_complex(x);
    const Jet j = r.jet(z);
    if (std::abs(j.v) < 1e-15) return true;
    const double g2 = j.g.squaredNorm();
    if (g2 < 1e-24) return false;
    x -= (j.v / g2) * RVec(j.g);
  }
  return std::abs(r.value(to_complex(x))) < 1e-12;
}

struct LocalResult {
  RVec b;
  double dist = std::numeric_limits<double>::infinity();
  bool ok = false;
};

LocalResult local_nearest(const DefiningFunction& r, const RVec& z, RVec b, int max_iter) {
  LocalResult res;
  if (!project_to_boundary(r, b)) return res;
  double alpha = 1.0;
  double dist = (z - b).norm();
  double tangential = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const RVec g = r.real_gradient(to_complex(b));
    const RVec ghat = g / g.norm();
    const RVec d = z - b;
    const RVec t = d - d.dot(ghat) * ghat;
    tangential = t.norm();
    if (tangential < 1e-13 * (1.0 + d.norm())) break;
    RVec trial = b + alpha * t;
    if (project_to_boundary(r, trial) && (z - trial).norm() < dist) {
      b = trial;
      dist = (z - b).norm();
      alpha = std::min(1.0, 2 * alpha);
    } else {
      alpha *= 0.5;
      if (alpha < 1e-14) break;
    }
  }
  // KKT Newton polish on the stationarity system b - z + lam g(b) = 0, r(b) = 0
  const Eigen::Index m = z.size();
  RVec bk = b;
  {
    const RVec g = r.real_gradient(to_complex(bk));
    double lam = (z - bk).dot(g) / g.squaredNorm();
    for (int it = 0; it < 20; ++it) {
      const Jet j = r.jet(to_complex(bk));
      RVec F(m + 1);
      F.head(m) = bk - z + lam * RVec(j.g);
      F[m] = j.v;
      if (F.norm() < 1e-15) break;
      RMat J = RMat::Zero(m + 1, m + 1);
      J.topLeftCorner(m, m) = RMat::Identity(m, m) + lam * RMat(j.h);
      J.topRightCorner(m, 1) = j.g;
      J.bottomLeftCorner(1, m) = j.g.transpose();
      const RVec step = J.fullPivLu().solve(F);
      if (!step.allFinite()) break;
      bk -= step.head(m);
      lam -= step[m];
    }
  }
  if (bk.allFinite() && std::abs(r.value(to_complex(bk))) < 1e-12 && (z - bk).norm() <= dist + 1e-12) {
    const RVec g = r.real_gradient(to_complex(bk));
    const RVec d = z - bk;
    const RVec t = d - d.dot(g) / g.squaredNorm() * g;
    if (t.norm() <= std::max(tangential, 1e-10)) {
      b = bk;
      dist = d.norm();
      tangential = t.norm();
    }
  }
  res.b = b;
  res.dist = dist;
  res.ok = std::abs(r.value(to_complex(b))) < 1e-10 && tangential < 1e-6 * (1.0 + dist);
  return res;
}

}  // namespace

std::optional<CVec> boundary_point_near(const Domain& D, const RVec& angles, double radius_guess) {
  const DefiningFunction& r = D.defining;
  const CVec& c = D.star_center;
  const CVec d = direction_from_angles(D.dimension(), angles);
  const double v0 = r.value(c + radius_guess * d);
  if (v0 == 0.0) return CVec(c + radius_guess * d);
  double delta = 1e-4 * std::max(1.0, radius_guess);
  for (int k = 0; k < 30; ++k, delta *= 2.0) {
    for (double sgn : {1.0, -1.0}) {
      const double s = radius_guess + sgn * delta;
      if (s <= 0) continue;
      const double v = r.value(c + s * d);
      if ((v < 0) != (v0 < 0)) {
        const double a = std::min(s, radius_guess), b = std::max(s, radius_guess);
        const double va = a == s ? v : v0;
        return CVec(c + refine_root(r, c, d, a, b, va) * d);
      }
    }
  }
  return std::nullopt;
}

CVec nearest_boundary_point(const Domain& D, const CVec& z, int max_iter) {
  GridOptions opt;
  opt.theta = D.dimension() == 1 ? 64 : (D.dimension() == 2 ? 12 : 6);
  opt.phi = D.dimension() == 2 ? 5 : 3;
  opt.ray_samples = 48;
  const BoundaryGrid grid = boundary_grid(D, opt);
  if (grid.points.empty()) throw NoConvergence("no boundary samples found");
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < grid.points.size(); ++i) order.emplace_back((grid.points[i] - z).norm(), i);
  const std::size_t keep = std::min<std::size_t>(6, order.size());
  std::partial_sort(order.begin(), order.begin() + keep, order.end());
  const RVec x = to_real(z);
  LocalResult best;
  for (std::size_t k = 0; k < keep; ++k) {
    LocalResult r = local_nearest(D.defining, x, to_real(grid.points[order[k].second]), max_iter);
    if (r.ok && r.dist < best.dist) best = r;
  }
  if (!best.ok) throw NoConvergence("boundary projection failed");
  return to_complex(best.b);
}

double signed_distance(const Domain& D, const CVec& z, int max_iter) {
  const CVec b = nearest_boundary_point(D, z, max_iter);
  const double dist = (b - z).norm();
  return D.defining.value(z) <= 0 ? -dist : dist;
}

}  // namespace imet
