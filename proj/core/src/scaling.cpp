#include "imet/scaling.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <string>

#include "imet/hyperbolic.hpp"

namespace imet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// gaps at this level count as converged
constexpr double kNegligibleGap = 1e-8;

// exp(-1 / (u (1 - u))) on (0, 1)
double bump(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return std::exp(-1.0 / (u * (1.0 - u)));
}

double bump_integral(double s) {
  if (s <= 0.0) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(bump, 0.0, std::min(s, 1.0), 4, 1e-12);
}

double bump_mass() {
  static const double mass = bump_integral(1.0);
  return mass;
}

// r(x) with x given as complex jets, chained to the jet coordinates.
Jet chain(const DefiningFunction& r, const std::vector<CJet>& x) {
  const int n = static_cast<int>(x.size());
  CVec p(n);
  for (int j = 0; j < n; ++j) p[j] = value_of(x[j]);
  const Jet outer = r.jet(p);
  const int dim = x[0].re.dim();
  Jet out(outer.v, dim);
  JMat G(2 * n, dim);
  for (int k = 0; k < 2 * n; ++k) {
    const Jet& u = k % 2 == 0 ? x[k / 2].re : x[k / 2].im;
    G.row(k) = u.g.transpose();
    out.g += outer.g[k] * u.g;
    out.h += outer.g[k] * u.h;
  }
  out.h += G.transpose() * outer.h * G;
  return out;
}

double ball_value(const CVec& z) { return -1.0 + z.squaredNorm(); }

Jet ball_jet(const CVec& z) {
  const std::vector<CJet> s = seed_jets(z);
  Jet out(-1.0, static_cast<int>(2 * z.size()));
  for (const CJet& c : s) out = out + abs2(c);
  return out;
}

// Unitary with U e_n = nu (|nu| = 1).
CMat unitary_to_normal(const CVec& nu) {
  const int n = static_cast<int>(nu.size());
  const cplx last = nu[n - 1];
  const cplx phase = std::abs(last) > 0 ? last / std::abs(last) : cplx(1.0);
  CVec w = nu;
  w[n - 1] -= phase;
  CMat D = CMat::Identity(n, n);
  D(n - 1, n - 1) = phase;
  const double w2 = w.squaredNorm();
  if (w2 < 1e-30) return D;
  const CMat H = CMat::Identity(n, n) - (2.0 / w2) * w * w.adjoint();
  return H * D;
}

struct NormalMaps {
  DefiningFunction r;
  CVec a;
  CMat UT;
  CVec ell;
  CMat S;
  double gn = 1.0;
};

}  // namespace

ScalingSchedule ScalingSchedule::standard(int t_count, int levels) {
  if (t_count < 1 || levels < 1) throw Error("ScalingSchedule: counts must be positive");
  ScalingSchedule s;
  for (int k = 1; k <= t_count; ++k) s.t.push_back(1.0 - std::ldexp(1.0, -k));
  for (int k = 1; k <= levels; ++k) s.eps.push_back(std::ldexp(1.0, -2 * k));
  return s;
}

void ScalingSchedule::validate() const {
  if (t.empty() || eps.empty()) throw Error("ScalingSchedule: empty sequence");
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!(t[k] > 0.0 && t[k] < 1.0)) throw Error("ScalingSchedule: t must lie in (0,1)");
    if (k > 0 && !(t[k] > t[k - 1])) throw Error("ScalingSchedule: t must increase");
  }
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0.0)) throw Error("ScalingSchedule: eps must be positive");
    if (k > 0 && !(3.0 * eps[k] < eps[k - 1])) throw Error("ScalingSchedule: need 3 eps[k+1] < eps[k]");
  }
}

double chi(double x) {
  const double u = 4.0 * x + 2.0;
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  if (u <= 0.5) return bump_integral(u) / bump_mass();
  // symmetric bump: the mass on [u, 1] equals the mass on [0, 1 - u]
  return 1.0 - bump_integral(1.0 - u) / bump_mass();
}

double chi_derivative(double x) { return 4.0 * bump(4.0 * x + 2.0) / bump_mass(); }

double chi_second_derivative(double x) {
  const double u = 4.0 * x + 2.0;
  if (u <= 0.0 || u >= 1.0) return 0.0;
  const double q = u * (1.0 - u);
  return 16.0 * bump(u) * (1.0 - 2.0 * u) / (q * q) / bump_mass();
}

CVec NormalForm::to_original(const CVec& z) const {
  const int n = static_cast<int>(z.size());
  CVec u = z;
  u[n - 1] -= 1.0;
  CVec w = u;
  w[n - 1] -= 0.5 * (u.transpose() * S * u)(0, 0);
  return a + U * (T * w);
}

NormalForm normalize_at_boundary_point(const Domain& D, const CVec& a) {
  const DefiningFunction& r = D.defining;
  const int n = r.dimension();
  if (a.size() != n) throw Error("normalize_at_boundary_point: dimension mismatch");
  if (!(std::abs(r.value(a)) <= kTolBoundaryPre)) throw OutOfRegion("normalize_at_boundary_point: a is not on the boundary");
  const CVec g = 0.5 * r.gradient(a);  // dr/dzbar
  const double gn = g.norm();
  if (!(gn > 0)) throw DegenerateGradient("normalize_at_boundary_point: vanishing gradient");
  if (!(tangent_min_eigenvalue(r, a) > 1e-10)) throw NotStronglyConvexAt("normalize_at_boundary_point: flat tangent Hessian");

  const RMat Hr = r.real_hessian(a);
  const CMat Hh = complex_hessian(Hr);
  CMat S(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      S(j, k) = 0.25 * cplx(Hr(2 * j, 2 * k) - Hr(2 * j + 1, 2 * k + 1), -(Hr(2 * j, 2 * k + 1) + Hr(2 * j + 1, 2 * k)));

  NormalForm nf;
  nf.a = a;
  nf.gradient_norm = gn;
  nf.U = unitary_to_normal(g / gn);
  const CMat H1 = nf.U.transpose() * Hh * nf.U.conjugate() / gn;
  const CMat S1 = nf.U.transpose() * S * nf.U / gn;
  nf.T = CMat::Identity(n, n);
  if (n > 1) {
    const CMat B = H1.topLeftCorner(n - 1, n - 1).conjugate();
    Eigen::SelfAdjointEigenSolver<CMat> es(B);
    if (!(es.eigenvalues().minCoeff() > 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff())))
      throw NotStronglyConvexAt("normalize_at_boundary_point: degenerate Levi form");
    nf.T.topLeftCorner(n - 1, n - 1) = es.operatorInverseSqrt();
  }
  const CMat H2 = nf.T.transpose() * H1 * nf.T.conjugate();
  const CMat S2 = nf.T.transpose() * S1 * nf.T;
  nf.ell = CVec::Zero(n);
  for (int j = 0; j + 1 < n; ++j) nf.ell[j] = -H2(j, n - 1);
  nf.ell[n - 1] = 0.5 * (1.0 - H2(n - 1, n - 1).real());
  CVec en = CVec::Zero(n);
  en[n - 1] = 1.0;
  nf.S = S2 + nf.ell * en.transpose() + en * nf.ell.transpose();

  auto maps = std::make_shared<NormalMaps>();
  maps->r = r;
  maps->a = a;
  maps->UT = nf.U * nf.T;
  maps->ell = nf.ell;
  maps->S = nf.S;
  maps->gn = gn;
  auto value = [maps, n](const CVec& z) {
    CVec w = z;
    w[n - 1] -= 1.0;
    const CVec u = w;
    w[n - 1] -= 0.5 * (u.transpose() * maps->S * u)(0, 0);
    const double m = 1.0 + 2.0 * (maps->ell.transpose() * w)(0, 0).real();
    return m * maps->r.value(maps->a + maps->UT * w) / maps->gn;
  };
  auto jet = [maps, n](const CVec& z) {
    std::vector<CJet> u = seed_jets(z);
    u[n - 1].re = u[n - 1].re - 1.0;
    std::vector<CJet> w = u;
    CJet q{Jet(0.0, 2 * n), Jet(0.0, 2 * n)};
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (maps->S(j, k) != 0.0) q = q + (u[j] * u[k]) * maps->S(j, k);
    w[n - 1] = w[n - 1] - q * 0.5;
    std::vector<CJet> x;
    Jet lin(0.0, 2 * n);
    for (int i = 0; i < n; ++i) {
      CJet xi{Jet(maps->a[i].real(), 2 * n), Jet(maps->a[i].imag(), 2 * n)};
      for (int k = 0; k < n; ++k)
        if (maps->UT(i, k) != 0.0) xi = xi + w[k] * maps->UT(i, k);
      x.push_back(xi);
      lin = lin + (w[i] * maps->ell[i]).re;
    }
    return (1.0 + 2.0 * lin) * chain(maps->r, x) / maps->gn;
  };
  nf.r = DefiningFunction(n, value, jet);

  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  double prev = std::numeric_limits<double>::infinity();
  for (double radius : nf.shells) {
    double worst = 0.0;
    for (int k = 0; k < 64; ++k) {
      CVec d(n);
      for (int j = 0; j < n; ++j) d[j] = cplx(gauss(rng), gauss(rng));
      d *= radius / d.norm();
      CVec z = d;
      z[n - 1] += 1.0;
      const double h = nf.r.value(z) - (2.0 * d[n - 1].real() + d.squaredNorm());
      worst = std::max(worst, std::abs(h) / (radius * radius));
    }
    // rounding in r alone contributes about 1e-15 / radius^2
    const double noise = 1e-14 / (radius * radius);
    if (!(worst <= 0.1) || !(worst <= prev + noise))
      throw Error("normalize_at_boundary_point: second-order terms not removed (ratio " + std::to_string(worst) +
                  " on shell " + std::to_string(radius) + ")");
    nf.shell_ratios.push_back(worst);
    prev = worst;
  }
  return nf;
}

DefiningFunction scaled_defining(const DefiningFunction& r, double t) {
  const BallScalingAutomorphism A = BallScalingAutomorphism::from_t(t, r.dimension());
  const int n = r.dimension();
  const double omt2 = A.one_minus_t2();
  const double s = std::sqrt(omt2);
  auto check = [t, n](const CVec& z) {
    if (z.size() != n) throw Error("scaled_defining: dimension mismatch");
    if (std::abs(1.0 + t * z[n - 1]) < 1e-14) throw PoleHit("scaled_defining: 1 + t z_n vanishes");
    if (z[n - 1].real() < -0.5) throw OutOfRegion("scaled_defining: needs Re z_n >= -1/2");
  };
  auto value = [r, A, omt2, t, n, check](const CVec& z) {
    check(z);
    return std::norm(1.0 + t * z[n - 1]) / omt2 * r.value(A(z));
  };
  auto jet = [r, omt2, s, t, n, check](const CVec& z) {
    check(z);
    const std::vector<CJet> u = seed_jets(z);
    const CJet den = u[n - 1] * t + cplx(1.0);
    std::vector<CJet> x(n);
    for (int j = 0; j + 1 < n; ++j) x[j] = (u[j] * s) / den;
    x[n - 1] = (u[n - 1] + cplx(t)) / den;
    return (abs2(den) / omt2) * chain(r, x);
  };
  return DefiningFunction(n, value, jet);
}

std::vector<CVec> closed_ball_grid(int n, int per_axis) {
  if (n < 1 || per_axis < 2) throw Error("closed_ball_grid: need n >= 1 and per_axis >= 2");
  const int d = 2 * n;
  std::vector<CVec> out;
  std::vector<int> idx(d, 0);
  while (true) {
    RVec x(d);
    for (int i = 0; i < d; ++i) x[i] = -1.0 + 2.0 * idx[i] / (per_axis - 1);
    if (x.squaredNorm() <= 1.0) {
      CVec z(n);
      for (int j = 0; j < n; ++j) z[j] = cplx(x[2 * j], x[2 * j + 1]);
      out.push_back(z);
    }
    int i = 0;
    while (i < d && ++idx[i] == per_axis) idx[i++] = 0;
    if (i == d) break;
  }
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  for (int k = 0; k < per_axis * per_axis; ++k) {
    CVec z(n);
    for (int j = 0; j < n; ++j) z[j] = cplx(gauss(rng), gauss(rng));
    out.push_back(z / z.norm());
  }
  return out;
}

std::vector<CVec> scaling_region_grid(int n, int per_axis) {
  std::vector<CVec> out;
  for (const CVec& z : closed_ball_grid(n, per_axis))
    if (z[n - 1].real() > -0.5) out.push_back(z);
  return out;
}

C2Distance c2_distance(const DefiningFunction& f, const DefiningFunction& g, const std::vector<CVec>& grid) {
  C2Distance d;
  for (const CVec& z : grid) {
    const Jet a = f.jet(z), b = g.jet(z);
    d.value = std::max(d.value, std::abs(a.v - b.v));
    d.gradient = std::max(d.gradient, (a.g - b.g).norm());
    const RMat diff = a.h - b.h;
    const Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (diff + diff.transpose()), Eigen::EigenvaluesOnly);
    d.hessian = std::max(d.hessian, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  return d;
}

DefiningFunction BlendedFamily::blend(const DefiningFunction& r, double t) {
  const int n = r.dimension();
  const DefiningFunction rt = scaled_defining(r, t);
  auto value = [rt, n](const CVec& z) {
    const double c = chi(z[n - 1].real());
    if (c == 0.0) return ball_value(z);
    return c * rt.value(z) + (1.0 - c) * ball_value(z);
  };
  auto jet = [rt, n](const CVec& z) {
    const double x = z[n - 1].real();
    const double c = chi(x);
    if (c == 0.0) return ball_jet(z);
    const Jet cj = apply(Jet::variable(x, 2 * (n - 1), 2 * n), c, chi_derivative(x), chi_second_derivative(x));
    return cj * rt.jet(z) + (1.0 - cj) * ball_jet(z);
  };
  return DefiningFunction(n, value, jet);
}

namespace {

struct Lattice {
  int k = 0;     // points per axis
  int d = 0;     // real dimension
  double step = 0.0;
  std::size_t size = 0;

  RVec point(std::size_t id) const {
    RVec x(d);
    for (int i = 0; i < d; ++i) {
      x[i] = -1.0 + step * static_cast<double>(id % k);
      id /= k;
    }
    return x;
  }
};

// Cells of the lattice in the closed ball with rho < 0 (1), the rest 0; then
// the component of the origin marked 2.
std::vector<char> flood_fill(const Lattice& L, const DefiningFunction& rho, int& negative, int& component) {
  std::vector<char> cell(L.size, 0);
  negative = 0;
  const int n = L.d / 2;
  for (std::size_t id = 0; id < L.size; ++id) {
    const RVec x = L.point(id);
    if (x.squaredNorm() > 1.0) continue;
    CVec z(n);
    for (int j = 0; j < n; ++j) z[j] = cplx(x[2 * j], x[2 * j + 1]);
    if (rho.value(z) < 0.0) {
      cell[id] = 1;
      ++negative;
    }
  }
  component = 0;
  std::size_t origin = 0, stride = 1;
  for (int i = 0; i < L.d; ++i, stride *= L.k) origin += stride * static_cast<std::size_t>((L.k - 1) / 2);
  if (cell[origin] != 1) return cell;
  std::vector<std::size_t> stack{origin};
  cell[origin] = 2;
  while (!stack.empty()) {
    const std::size_t id = stack.back();
    stack.pop_back();
    ++component;
    std::size_t rest = id, st = 1;
    for (int i = 0; i < L.d; ++i, st *= L.k) {
      const int c = static_cast<int>(rest % L.k);
      rest /= L.k;
      if (c > 0 && cell[id - st] == 1) {
        cell[id - st] = 2;
        stack.push_back(id - st);
      }
      if (c + 1 < L.k && cell[id + st] == 1) {
        cell[id + st] = 2;
        stack.push_back(id + st);
      }
    }
  }
  return cell;
}

}  // namespace

BlendedFamily blended_family(const DefiningFunction& r, const ScalingSchedule& schedule, const BlendedOptions& opt) {
  schedule.validate();
  const int n = r.dimension();
  BlendedFamily fam;
  fam.base = r;
  fam.schedule = schedule;
  const std::vector<CVec> grid = closed_ball_grid(n, opt.ball_grid_per_axis);
  std::vector<double> rho(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) rho[i] = ball_value(grid[i]);

  Lattice L;
  L.d = 2 * n;
  L.step = opt.lattice_step;
  L.k = 2 * static_cast<int>(std::lround(1.0 / L.step)) + 1;
  while (std::pow(static_cast<double>(L.k), L.d) > 2e7) {
    L.step *= 2.0;
    L.k = 2 * static_cast<int>(std::lround(1.0 / L.step)) + 1;
  }
  L.size = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(L.k), L.d)));

  std::size_t next = 0;
  std::vector<double> prev_values;
  std::vector<char> prev_cells;
  for (std::size_t mu = 0; mu < schedule.eps.size(); ++mu) {
    const double eps = schedule.eps[mu];
    BlendedLevel level;
    level.mu = static_cast<int>(mu) + 1;
    level.eps = eps;
    DefiningFunction chosen;
    bool found = false;
    for (std::size_t s = next; s < schedule.t.size() && !found; ++s) {
      const DefiningFunction b = BlendedFamily::blend(r, schedule.t[s]);
      double sup = 0.0;
      for (std::size_t i = 0; i < grid.size() && sup < eps; ++i) sup = std::max(sup, std::abs(b.value(grid[i]) - rho[i]));
      if (sup < eps) {
        found = true;
        level.s = static_cast<int>(s);
        level.t = schedule.t[s];
        level.sup_to_ball = sup;
        chosen = b;
        next = s + 1;
      }
    }
    if (!found) throw BudgetExhausted("blended_family: no t meets the sup bound at level " + std::to_string(mu + 1));

    level.rho = DefiningFunction(
        n, [chosen, eps](const CVec& z) { return chosen.value(z) + 2.0 * eps; },
        [chosen, eps](const CVec& z) { return chosen.jet(z) + 2.0 * eps; });
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      values[i] = level.rho.value(grid[i]);
      level.sup_level_to_ball = std::max(level.sup_level_to_ball, std::abs(values[i] - rho[i]));
      if (!prev_values.empty() && !(prev_values[i] > values[i])) ++fam.monotonicity_violations;
    }
    prev_values = std::move(values);

    std::vector<char> cells = flood_fill(L, level.rho, level.negative_cells, level.component_cells);
    if (!prev_cells.empty())
      for (std::size_t id = 0; id < L.size; ++id)
        if (prev_cells[id] == 2 && cells[id] != 2) fam.nested = false;
    prev_cells = std::move(cells);

    level.domain = make_domain(level.rho, CVec::Zero(n), 1.0, "blended level " + std::to_string(level.mu));
    level.convexity_margin = strong_convexity_margin(level.domain, boundary_grid(level.domain));
    fam.levels.push_back(std::move(level));
  }
  fam.mu0 = 0;
  for (int m = static_cast<int>(fam.levels.size()); m >= 1 && fam.levels[m - 1].convexity_margin > 0; --m) fam.mu0 = m;
  return fam;
}

AnalyticDisc transport_geodesic(const AnalyticDisc& f, double t, double tail_tol) {
  const int n = f.dimension();
  const BallScalingAutomorphism A = BallScalingAutomorphism::from_t(t, n);
  // 1 + t f_n has no zero in the closed disc iff its winding number on the circle is 0
  const int M = std::max(4096, 64 * (f.degree() + 1));
  double total = 0.0;
  cplx prev = 1.0 + t * f.evaluate(1.0)[n - 1];
  for (int j = 1; j <= M; ++j) {
    const cplx cur = 1.0 + t * f.evaluate(std::polar(1.0, kTwoPi * j / M))[n - 1];
    if (std::abs(cur) < 1e-14) throw PoleHit("transport_geodesic: 1 + t f_n vanishes on the circle");
    total += std::arg(cur / prev);
    prev = cur;
  }
  if (std::lround(total / kTwoPi) != 0) throw PoleHit("transport_geodesic: 1 + t f_n vanishes in the disc");
  const Expansion e = expand_holomorphic([&](cplx l) { return A(f.evaluate(l)); }, n, tail_tol);
  if (!(e.tail <= tail_tol)) throw NoConvergence("transport_geodesic: expansion tail " + std::to_string(e.tail));
  return e.disc;
}

LbkReport lbk_trace(const Domain& D, const CVec& p, const CVec& q, int approach_count, const Budget& budget) {
  if (approach_count < 2) throw Error("lbk_disc: need at least two approach levels");
  if (p.size() != D.dimension() || q.size() != D.dimension()) throw Error("lbk_disc: dimension mismatch");
  if (contains(D, q).kind != Membership::Interior) throw OutOfRegion("lbk_disc: q must be interior");
  if (!(tangent_min_eigenvalue(D.defining, p) > 0)) throw NotStronglyConvexAt("lbk_disc: p is not a convex point");
  const CVec nu = outward_normal(D, p);
  LbkReport rep;
  AnalyticDisc prev;
  for (int v = 1; v <= approach_count; ++v) {
    const CVec target = p - std::ldexp(1.0, -v) * nu;
    const DiscBound b = lempert_upper(D, q, target, budget);
    if (!b.feasible) throw Infeasible("lbk_disc: no disc at level " + std::to_string(v));
    rep.xi.push_back(b.xi);
    rep.values.push_back(b.value);
    rep.holder.push_back(holder_half_norm(b.witness));
    if (v > 1) rep.gaps.push_back(sup_distance(prev, b.witness));
    prev = b.witness;
    if (v == approach_count) {
      rep.disc = b.witness;
      rep.endpoint_error = (b.witness.evaluate(1.0) - p).norm();
      rep.node_error = (b.witness.evaluate(b.xi) - p).norm();
    }
  }
  bool decreasing = true;
  for (std::size_t k = 1; k < rep.gaps.size(); ++k)
    decreasing = decreasing && (rep.gaps[k] < rep.gaps[k - 1] || rep.gaps[k] <= kNegligibleGap);
  rep.decreasing = decreasing;
  rep.cauchy = decreasing && rep.gaps.back() <= 1e-3;
  return rep;
}

LbkReport lbk_disc(const Domain& D, const CVec& p, const CVec& q, int approach_count, const Budget& budget) {
  LbkReport rep = lbk_trace(D, p, q, approach_count, budget);
  if (!rep.decreasing) {
    std::string seq;
    for (double g : rep.gaps) seq += " " + std::to_string(g);
    throw NoCauchyTrend("lbk_disc: gaps" + seq);
  }
  return rep;
}

}  // namespace imet
