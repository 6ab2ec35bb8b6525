#include "imet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

#include "imet/hyperbolic.hpp"
#include "imet/optimize.hpp"

namespace imet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_point(const Domain& D, const CVec& z, const char* what) {
  if (z.size() != D.dimension()) throw Error(std::string(what) + ": dimension mismatch");
  const double v = D.defining.value(z);
  if (!(v <= -kInteriorMargin)) throw OutOfRegion(std::string(what) + ": point is not interior with margin 1e-6");
}

// ---------------------------------------------------------------------------
// disc families

std::vector<cplx> disc_nodes(int boundary) {
  std::vector<cplx> nodes;
  for (int k = 0; k < boundary; ++k) nodes.push_back(std::polar(1.0, 2 * std::numbers::pi * k / boundary));
  const int inner = std::max(8, boundary / 2);
  for (double rho : {0.25, 0.5, 0.75}) {
    for (int k = 0; k < inner; ++k) nodes.push_back(std::polar(rho, 2 * std::numbers::pi * (k + 0.5) / inner));
  }
  return nodes;
}

double max_defining(const DefiningFunction& r, const RationalDisc& f, double s, const std::vector<cplx>& nodes) {
  double m = -kInf;
  for (const cplx& l : nodes) {
    const double v = r.value(f.evaluate(s * l));
    if (!std::isfinite(v)) return kInf;
    m = std::max(m, v);
  }
  return m;
}

// Largest s with max r(f(s lambda)) + eps <= 0 over the nodes, found by
// doubling and the Illinois variant of regula falsi.
double feasible_scale(const DefiningFunction& r, const RationalDisc& f, const std::vector<cplx>& nodes, double eps,
                      double rel_tol) {
  auto phi = [&](double s) {
    const double v = max_defining(r, f, s, nodes) + eps;
    return std::isfinite(v) ? v : 1e300;
  };
  double lo = 0.0, flo = phi(0.0);
  if (flo > 0) return 0.0;
  const double cap = f.pole_radius() * (1.0 - 1e-9);
  double hi = std::min(1.0, cap), fhi = 0.0;
  while (true) {
    fhi = phi(hi);
    if (fhi > 0) break;
    lo = hi;
    flo = fhi;
    if (hi >= cap || hi > 1e8) return lo;
    hi = std::min(2.0 * hi, cap);
  }
  int side = 0;
  for (int it = 0; it < 200 && hi - lo > rel_tol * hi; ++it) {
    double s = (lo * fhi - hi * flo) / (fhi - flo);
    if (!(s > lo && s < hi) || fhi > 1e6) s = 0.5 * (lo + hi);
    const double fs = phi(s);
    if (fs <= 0) {
      lo = s;
      flo = fs;
      if (side == -1) fhi *= 0.5;
      side = -1;
    } else {
      hi = s;
      fhi = fs;
      if (side == 1) flo *= 0.5;
      side = 1;
    }
  }
  return lo;
}

// Rational discs f = N / (1 - b lambda) with f(0) = z and either f(1/2) = w
// (pair) or f'(0) = v (direction). The coefficient of lambda is eliminated by
// the constraint; the parameters are the poles and coefficients of degree >= 2.
struct DiscFamily {
  int n = 1;
  int d = 1;
  CVec z;
  CVec target;
  bool pair = true;

  int size() const { return 2 * n + 2 * n * (d - 1); }

  RationalDisc build(const RVec& x) const {
    RationalDisc f;
    f.numerator = CMat::Zero(d + 1, n);
    f.pole.resize(n);
    int off = 2 * n;
    for (int j = 0; j < n; ++j) {
      const cplx b(x[2 * j], x[2 * j + 1]);
      f.pole[j] = b;
      f.numerator(0, j) = z[j];
      cplx tail = 0.0;
      double half = 0.25;
      for (int k = 2; k <= d; ++k, off += 2, half *= 0.5) {
        const cplx c(x[off], x[off + 1]);
        f.numerator(k, j) = c;
        tail += c * half;
      }
      if (pair)
        f.numerator(1, j) = 2.0 * (target[j] * (1.0 - 0.5 * b) - z[j] - tail);
      else
        f.numerator(1, j) = target[j] - z[j] * b;
    }
    return f;
  }

  RVec params(const RationalDisc& g) const {
    RVec x = RVec::Zero(size());
    int off = 2 * n;
    for (int j = 0; j < n; ++j) {
      x[2 * j] = g.pole[j].real();
      x[2 * j + 1] = g.pole[j].imag();
      for (int k = 2; k <= d; ++k, off += 2) {
        if (k <= g.degree()) {
          x[off] = g.numerator(k, j).real();
          x[off + 1] = g.numerator(k, j).imag();
        }
      }
    }
    return x;
  }
};

RationalDisc polynomial_disc(const CMat& coeffs) {
  RationalDisc f;
  f.numerator = coeffs;
  f.pole = CVec::Zero(coeffs.cols());
  return f;
}

// Ellipsoid {c + L u : |u| < 1}: the complex geodesic through z and w (pair)
// or through z in direction v, normalized for the disc family.
std::optional<RationalDisc> ellipsoid_seed(const CVec& c, const CMat& L, const CVec& z, const CVec& t, bool pair) {
  const Eigen::PartialPivLU<CMat> lu(L);
  const CVec a = lu.solve(CVec(z - c));
  const double a2 = a.squaredNorm();
  if (!(a2 < 1.0)) return std::nullopt;
  const double sa = std::sqrt(1.0 - a2);
  auto P = [&](const CVec& x) -> CVec {
    if (a2 == 0.0) return CVec::Zero(x.size());
    return a * (inner(x, a) / a2);
  };
  CVec e;
  double kappa = 0.0;  // disc parameter scale
  if (pair) {
    const CVec W = lu.solve(CVec(t - c));
    if (!(W.squaredNorm() < 1.0)) return std::nullopt;
    const CVec q = ball_involution(a, W);
    const double xi = q.norm();
    if (xi == 0.0 || xi >= 1.0) return std::nullopt;
    e = q / xi;
    kappa = 2.0 * xi;
  } else {
    const CVec V = lu.solve(t);
    const CVec E = P(V) / (sa * sa) + (V - P(V)) / sa;
    e = -E / E.norm();
    kappa = E.norm();
  }
  const CVec m = P(e) + sa * (e - P(e));
  const cplx beta = inner(e, a);
  if (!std::isfinite(kappa) || !m.allFinite()) return std::nullopt;
  // f(mu) = c + L (a - kappa mu m) / (1 - kappa beta mu)
  RationalDisc f;
  f.numerator.resize(2, z.size());
  f.numerator.row(0) = z.transpose();
  f.numerator.row(1) = (-kappa * beta * c - kappa * (L * m)).transpose();
  f.pole = CVec::Constant(z.size(), kappa * beta);
  return f;
}

std::optional<RationalDisc> ball_seed(const CVec& c, double R, const CVec& z, const CVec& t, bool pair) {
  return ellipsoid_seed(c, R * CMat::Identity(z.size(), z.size()), z, t, pair);
}

// Ellipsoid matching r to second order at m, dropping the pluriharmonic part:
// r(m + d) ~ r(m) + 2 Re <d, g> + d^H H d.
std::optional<RationalDisc> osculating_seed(const Domain& D, const CVec& m, const CVec& z, const CVec& t, bool pair) {
  const CMat H = complex_hessian(D.defining.real_hessian(m)).transpose();
  const Eigen::SelfAdjointEigenSolver<CMat> eig(0.5 * (H + H.adjoint()));
  if (eig.info() != Eigen::Success || !(eig.eigenvalues().minCoeff() > 0)) return std::nullopt;
  const CVec g = 0.5 * D.defining.gradient(m);
  const CVec Hg = eig.eigenvectors() * (eig.eigenvectors().adjoint() * g).cwiseQuotient(
                                           eig.eigenvalues().cast<cplx>());
  const double rho = g.dot(Hg).real() - D.defining.value(m);
  if (!(rho > 0)) return std::nullopt;
  const CMat L = eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().cwiseInverse().cast<cplx>().asDiagonal() *
                 eig.eigenvectors().adjoint() * std::sqrt(rho);
  return ellipsoid_seed(m - Hg, L, z, t, pair);
}

// Product of discs of radius R about the origin: per coordinate Moebius discs.
std::optional<RationalDisc> polydisc_seed(double R, const CVec& z, const CVec& t, bool pair) {
  const int n = static_cast<int>(z.size());
  CVec a = z / R, tt(n);
  for (int j = 0; j < n; ++j) {
    if (!(std::abs(a[j]) < 1.0)) return std::nullopt;
    if (pair) {
      const cplx W = t[j] / R;
      if (!(std::abs(W) < 1.0)) return std::nullopt;
      tt[j] = (W - a[j]) / (1.0 - std::conj(a[j]) * W);
    } else {
      tt[j] = t[j] / R / (1.0 - std::norm(a[j]));
    }
  }
  const double scale = pair ? 2.0 : 1.0;
  RationalDisc f;
  f.numerator.resize(2, n);
  f.pole.resize(n);
  for (int j = 0; j < n; ++j) {
    f.numerator(0, j) = R * a[j];
    f.numerator(1, j) = R * scale * tt[j];
    f.pole[j] = -scale * std::conj(a[j]) * tt[j];
  }
  return f;
}

// Extremal disc of {r_minus < |z| < r_plus} through the universal cover,
// returned as its Taylor polynomial of degree d in the family normalization.
std::optional<RationalDisc> annulus_seed(const Annulus& A, cplx z, cplx t, bool pair, int d) {
  const double rp = A.r_plus;
  const double q = A.r_minus / rp;
  const cplx Z = z / rp;
  AnnulusLift Lz;
  try {
    Lz = annulus_lift(q, Z);
  } catch (const LiftFailure&) {
    return std::nullopt;
  }
  const bool punctured = Lz.a == 0.0;
  const double a = punctured ? 1.0 : Lz.a;
  const cplx zeta_z(Lz.s, Lz.y);
  const cplx uz = punctured ? zeta_z : std::exp(zeta_z);
  auto cover = [&](cplx u) {
    const cplx zeta = punctured ? u : std::log(u);
    return std::exp(cplx(0.0, a) * zeta);
  };
  auto from_disc = [&](cplx lam) { return (uz - lam * std::conj(uz)) / (1.0 - lam); };
  cplx phase = 1.0;
  double c = 1.0;
  if (pair) {
    const cplx W = t / rp;
    AnnulusLift Lw;
    try {
      Lw = annulus_lift(q, W);
    } catch (const LiftFailure&) {
      return std::nullopt;
    }
    double best = kInf;
    cplx uw = 0.0;
    for (int k = -64; k <= 64; ++k) {
      const double ds = Lw.s + k * Lw.period - Lz.s;
      const double dist = punctured ? half_plane_distance(ds, Lz.y, Lw.y) : strip_distance(ds, Lz.y, Lw.y);
      if (dist < best) {
        best = dist;
        const cplx zw(Lw.s + k * Lw.period, Lw.y);
        uw = punctured ? zw : std::exp(zw);
      }
    }
    const cplx m = (uw - uz) / (uw - std::conj(uz));
    const double xi = std::abs(m);
    if (xi == 0.0) return std::nullopt;
    phase = m / xi;
    c = 2.0 * xi;
  } else {
    const cplx d0 = cplx(0.0, a) * Z * cplx(0.0, 2.0 * uz.imag()) / uz;
    phase = std::polar(1.0, std::arg(t) - std::arg(d0));
    c = std::abs(t) / (rp * std::abs(d0));
  }
  const int N = 64;
  const double rho = 0.95;
  std::vector<cplx> samples(N);
  for (int j = 0; j < N; ++j) samples[j] = rp * cover(from_disc(phase * std::polar(rho, 2 * std::numbers::pi * j / N)));
  const std::vector<cplx> hat = fourier_coefficients(samples);
  CMat coeffs(d + 1, 1);
  double ck = 1.0;
  for (int k = 0; k <= d; ++k, ck *= c / rho) coeffs(k, 0) = hat[k] * ck;
  coeffs(0, 0) = z;
  return polynomial_disc(coeffs);
}

struct DiscSearch {
  RationalDisc f;
  double scale = 0.0;
  int evaluations = 0;
};

// Stops early once the scale reaches stop_scale.
DiscSearch search_discs(const Domain& D, const DiscFamily& fam, const Budget& budget, double stop_scale = kInf) {
  const DefiningFunction& r = D.defining;
  const std::vector<cplx> nodes = disc_nodes(budget.circle_samples);
  int evals = 0;
  auto objective = [&](const RVec& x) {
    ++evals;
    return -feasible_scale(r, fam.build(x), nodes, budget.eps_feas, 1e-11);
  };
  // Within a local search only improvements matter: a trial that is already
  // infeasible at the incumbent scale is reported as a tie after one sweep.
  double incumbent = 0.0;
  auto local_objective = [&](const RVec& x) {
    const RationalDisc f = fam.build(x);
    if (incumbent > 0.0 && (incumbent >= f.pole_radius() ||
                            max_defining(r, f, incumbent, nodes) + budget.eps_feas > 0)) {
      ++evals;
      return -incumbent;
    }
    const double v = objective(x);
    incumbent = std::max(incumbent, -v);
    return v;
  };

  std::vector<RVec> seeds;
  {
    CMat aff = CMat::Zero(2, fam.n);
    aff.row(0) = fam.z.transpose();
    seeds.push_back(fam.params(polynomial_disc(aff)));
  }
  const bool pair = fam.pair;
  if (auto s = ball_seed(D.star_center, D.bounding_radius, fam.z, fam.target, pair)) seeds.push_back(fam.params(*s));
  if (D.model) {
    if (std::holds_alternative<Ball>(*D.model) || std::holds_alternative<UnitDisc>(*D.model)) {
      if (auto s = ball_seed(CVec::Zero(fam.n), 1.0, fam.z, fam.target, pair)) seeds.push_back(fam.params(*s));
    }
    if (std::holds_alternative<Polydisc>(*D.model) || std::holds_alternative<UnitDisc>(*D.model)) {
      if (auto s = polydisc_seed(1.0, fam.z, fam.target, pair)) seeds.push_back(fam.params(*s));
    }
    if (const auto* A = std::get_if<Annulus>(&*D.model)) {
      if (auto s = annulus_seed(*A, fam.z[0], fam.target[0], pair, fam.d)) seeds.push_back(fam.params(*s));
    }
  }
  if (auto s = polydisc_seed(D.bounding_radius, fam.z, fam.target, pair)) seeds.push_back(fam.params(*s));
  const CVec mid = pair ? CVec(0.5 * (fam.z + fam.target)) : fam.z;
  if (auto s = osculating_seed(D, mid, fam.z, fam.target, pair)) seeds.push_back(fam.params(*s));

  std::vector<std::pair<double, RVec>> scored;
  for (const RVec& x : seeds) scored.emplace_back(objective(x), x);
  std::sort(scored.begin(), scored.end(), [](const auto& p, const auto& q) { return p.first < q.first; });
  std::mt19937_64 rng(budget.seed);
  std::normal_distribution<double> normal(0.0, 0.05);
  const RVec base = scored.front().second;
  const bool done = -scored.front().first >= stop_scale;
  for (int k = 0; k < budget.random_starts && !done; ++k) {
    RVec x = base;
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] += normal(rng);
    scored.emplace_back(objective(x), x);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& p, const auto& q) { return p.first < q.first; });

  RVec best = scored.front().second;
  double best_value = scored.front().first;
  PatternSearchOptions opt;
  opt.initial_step = 0.05;
  opt.min_step = 1e-7;
  opt.max_evaluations = budget.evaluations;
  opt.target = -stop_scale;
  const int starts = done ? 0 : std::min<int>(budget.local_starts, static_cast<int>(scored.size()));
  for (int k = 0; k < starts && best_value > opt.target; ++k) {
    incumbent = 0.0;
    const PatternSearchResult res = pattern_search(local_objective, scored[k].second, opt);
    if (res.value < best_value) {
      best_value = res.value;
      best = res.x;
    }
  }
  DiscSearch out;
  out.f = fam.build(best);
  out.scale = feasible_scale(r, out.f, nodes, budget.eps_feas, 1e-14);
  // post-validation on a grid four times finer
  const std::vector<cplx> fine = disc_nodes(4 * budget.circle_samples);
  if (max_defining(r, out.f, out.scale, fine) + budget.eps_feas > 0)
    out.scale = std::min(out.scale, feasible_scale(r, out.f, fine, budget.eps_feas, 1e-14));
  out.evaluations = evals;
  return out;
}

void fill_witness(const Domain& D, DiscBound& b, const Budget& budget) {
  const Expansion e = b.rational.taylor(b.scale);
  b.witness = e.disc;
  b.witness_tail = e.tail;
  b.margin = -max_defining(D.defining, b.rational, b.scale, disc_nodes(4 * budget.circle_samples));
}

// ---------------------------------------------------------------------------
// functional families

struct PointSet {
  std::vector<CVec> x;
  std::vector<RVec> angles;
  std::vector<double> radii;
};

PointSet from_grid(const BoundaryGrid& g) { return {g.points, g.angles, g.radii}; }

GridOptions optimization_grid(int n) {
  GridOptions o;
  if (n == 1) {
    o.theta = 128;
  } else if (n == 2) {
    o.theta = 16;
    o.phi = 6;
  } else {
    o.theta = 6;
    o.phi = 4;
  }
  return o;
}

struct InnerSolution {
  CVec coeffs;
  double sup = kInf;
  bool ok = false;
};

// min over coefficients of max |F| on the points subject to F(z) = 0 and
// F(w) = 1 (pair) or F'(z) v = 1 (direction).
InnerSolution solve_inner(const HoloFunctional& F, const std::vector<CVec>& pts, const CVec& z, const CVec& t,
                          bool pair) {
  const int m = F.size();
  const Eigen::Index G = static_cast<Eigen::Index>(pts.size());
  CMat B(G, m);
  for (Eigen::Index g = 0; g < G; ++g) B.row(g) = F.basis(pts[g]).transpose();
  CMat C(2, m);
  C.row(0) = F.basis(z).transpose();
  if (pair)
    C.row(1) = F.basis(t).transpose();
  else
    C.row(1) = (F.basis_gradient(z) * t).transpose();
  RVec S(m);
  for (int i = 0; i < m; ++i) {
    const double mx = std::max(B.col(i).cwiseAbs().maxCoeff(), C.col(i).cwiseAbs().maxCoeff());
    S[i] = mx > 0 ? 1.0 / mx : 1.0;
  }
  const CMat Bs = B * S.asDiagonal();
  const CMat Cs = C * S.asDiagonal();
  Eigen::JacobiSVD<CMat> svd(Cs, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVec sv = svd.singularValues();
  InnerSolution out;
  if (sv.size() < 2 || !(sv[1] > 1e-12 * sv[0])) return out;
  CVec rhs(2);
  rhs << 0.0, 1.0;
  const CVec cp = svd.solve(rhs);
  const CMat N = svd.matrixV().rightCols(m - 2);
  const MinMaxResult res = min_max_modulus(Bs * cp, Bs * N);
  out.coeffs = S.asDiagonal() * (cp + N * res.y);
  out.sup = (B * out.coeffs).cwiseAbs().maxCoeff();
  out.ok = std::isfinite(out.sup);
  return out;
}

double modulus(const HoloFunctional& F, const CVec& coeffs, const CVec& x) {
  return std::abs((F.basis(x).transpose() * coeffs)(0));
}

// Local ascent of |F| along the boundary from the largest grid values.
std::vector<std::pair<double, PointSet>> ascend(const Domain& D, const HoloFunctional& F, const CVec& coeffs,
                                                const PointSet& ps, double spacing, int candidates) {
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < ps.x.size(); ++i) order.emplace_back(-modulus(F, coeffs, ps.x[i]), i);
  std::sort(order.begin(), order.end());
  std::vector<std::size_t> picked;
  for (const auto& [v, i] : order) {
    if (static_cast<int>(picked.size()) >= candidates) break;
    bool near = false;
    for (std::size_t j : picked) {
      if ((ps.angles[i] - ps.angles[j]).cwiseAbs().maxCoeff() < 1.5 * spacing &&
          std::abs(ps.radii[i] - ps.radii[j]) < 1e-3 * std::max(1.0, ps.radii[i])) {
        near = true;
        break;
      }
    }
    if (!near) picked.push_back(i);
  }
  std::vector<std::pair<double, PointSet>> out;
  for (std::size_t i : picked) {
    const double rad = ps.radii[i];
    auto obj = [&](const RVec& ang) {
      const auto p = boundary_point_near(D, ang, rad);
      if (!p) return kInf;
      return -modulus(F, coeffs, *p);
    };
    PatternSearchOptions opt;
    opt.initial_step = 0.5 * spacing;
    opt.min_step = 1e-7;
    opt.max_evaluations = 40 + 20 * static_cast<int>(ps.angles[i].size());
    const PatternSearchResult res = pattern_search(obj, ps.angles[i], opt);
    const auto p = boundary_point_near(D, res.x, rad);
    if (!p) continue;
    PointSet one;
    one.x.push_back(*p);
    one.angles.push_back(res.x);
    one.radii.push_back(rad);
    out.emplace_back(-res.value, one);
  }
  return out;
}

// Value of F at (z, t) once the guard is applied.
double functional_value(const HoloFunctional& F, const CVec& z, const CVec& t, bool pair) {
  const cplx Fz = F(z);
  if (pair) return poincare_distance(Fz, F(t));
  return std::abs((F.gradient(z).transpose() * t)(0)) / (1.0 - std::norm(Fz));
}

// Extremal functionals of the ball |x| < R and of the coordinate discs
// |x_j| < extent_j, written in the polynomial family.
std::vector<HoloFunctional> seed_functionals(const HoloFunctional& family, double R, const RVec& extent,
                                             const CVec& z, const CVec& t, bool pair) {
  const int n = family.n;
  std::vector<HoloFunctional> out;
  auto index_of = [&](int j) {
    for (int i = 0; i < family.size(); ++i) {
      bool match = true;
      for (int k = 0; k < n; ++k) match = match && family.exponents[i][k] == (k == j ? 1 : 0);
      if (match) return i;
    }
    return -1;
  };
  const int i0 = index_of(-1);
  std::vector<int> lin(n);
  for (int j = 0; j < n; ++j) lin[j] = index_of(j);
  if (i0 < 0 || family.degree < 1) return out;
  // x -> (a - L x) / (1 - <x, b>) composed with <., e>
  auto make = [&](const CVec& a, const CMat& L, const CVec& b) {
    const cplx den_t = 1.0 - inner(t, b);
    CVec e = pair ? CVec((a - L * t) / den_t) : CVec(-(L * t) / (1.0 - inner(z, b)));
    if (!(e.norm() > 0)) return;
    e /= e.norm();
    HoloFunctional F = family;
    F.coefficients = CVec::Zero(F.size());
    F.pole = b;
    F.coefficients[i0] = inner(a, e);
    const CVec row = -(L.transpose() * e.conjugate());
    for (int j = 0; j < n; ++j) F.coefficients[lin[j]] = row[j];
    out.push_back(F);
  };
  {
    const CVec a = z / R;
    const double s = std::sqrt(std::max(0.0, 1.0 - a.squaredNorm()));
    CMat L = s * CMat::Identity(n, n);
    if (a.norm() > 0) L += (1.0 - s) * a * a.adjoint() / a.squaredNorm();
    make(a, L / R, a / R);
  }
  for (int j = 0; j < n && n > 1; ++j) {
    CVec a = CVec::Zero(n), b = CVec::Zero(n);
    a[j] = z[j] / extent[j];
    b[j] = a[j] / extent[j];
    CMat L = CMat::Zero(n, n);
    L(j, j) = 1.0 / extent[j];
    make(a, L, b);
  }
  return out;
}

// Seed functionals are tried first; the search stops there when they reach stop_value.
FunctionalBound functional_bound(const Domain& D, const CVec& z, const CVec& t, bool pair, const Budget& budget,
                                 double stop_value) {
  const int n = D.dimension();
  const bool laurent = D.model && std::holds_alternative<Annulus>(*D.model);
  HoloFunctional F = laurent ? HoloFunctional::laurent(budget.laurent_degree)
                             : HoloFunctional::polynomial(n, budget.functional_degree);
  FunctionalBound out;
  out.witness = F;
  out.witness.coefficients = CVec::Zero(F.size());
  if (pair && (z - t).norm() == 0.0) return out;

  const BoundaryGrid fine_grid = boundary_grid(D);
  double Rb = 0.0;
  RVec extent = RVec::Zero(n);
  for (const CVec& p : fine_grid.points) {
    Rb = std::max(Rb, p.norm());
    for (int j = 0; j < n; ++j) extent[j] = std::max(extent[j], std::abs(p[j]));
  }
  PointSet pts = from_grid(fine_grid);
  const double spacing = 2 * std::numbers::pi / (n == 1 ? 256 : (n == 2 ? 32 : 8));
  if (!laurent) {
    // extremals of the bounding ball and coordinate discs
    for (HoloFunctional S : seed_functionals(F, Rb, extent, z, t, pair)) {
      double sup = 0.0;
      for (const CVec& p : pts.x) sup = std::max(sup, modulus(S, S.coefficients, p));
      const double on_grid = sup;
      for (const auto& [v, p] : ascend(D, S, S.coefficients, pts, spacing, budget.exchange_candidates))
        sup = std::max(sup, v);
      if (!(sup > 0)) continue;
      S.guard = (1.0 - kGuardSlack) / sup;
      const double v = functional_value(S, z, t, pair);
      if (v > out.value) {
        out.value = v;
        out.witness = S;
        out.sup_grid = on_grid;
        out.sup_checked = sup;
      }
    }
    if (out.value > 0 && out.value >= stop_value) return out;
    // Pole search with linear numerators, which overfit the grid least. 1 - <x, b> is holomorphic, so |<x, b>| < 1 on the boundary
    // samples keeps the denominator away from zero on D.
    const PointSet coarse = from_grid(boundary_grid(D, optimization_grid(n)));
    auto sup_on = [&](const std::vector<CVec>& pts, const RVec& x) {
      const CVec b = to_complex(x);
      for (const CVec& p : pts)
        if (!(std::abs(inner(p, b)) < 1.0 - 1e-6)) return kInf;
      HoloFunctional G = HoloFunctional::polynomial(n, 1);
      G.pole = b;
      const InnerSolution s = solve_inner(G, pts, z, t, pair);
      return s.ok ? s.sup : kInf;
    };
    std::vector<RVec> seeds{RVec::Zero(2 * n), to_real(z / (Rb * Rb))};
    if (pair) seeds.push_back(to_real(t / (Rb * Rb)));
    // half the gradient of r: the exact pole for quadratic r
    seeds.push_back(to_real(0.5 * D.defining.gradient(z)));
    if (pair) seeds.push_back(to_real(0.5 * D.defining.gradient(t)));
    for (int j = 0; j < n && n > 1; ++j) {
      CVec e = CVec::Zero(n);
      e[j] = z[j] / (extent[j] * extent[j]);
      seeds.push_back(to_real(e));
    }
    auto coarse_sup = [&](const RVec& x) { return sup_on(coarse.x, x); };
    std::vector<std::pair<double, RVec>> scored;
    for (const RVec& x : seeds) scored.emplace_back(coarse_sup(x), x);
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    PatternSearchOptions opt;
    opt.initial_step = 0.05 / Rb;
    opt.min_step = 1e-6 / Rb;
    opt.max_evaluations = budget.pole_evaluations;
    const PatternSearchResult res = pattern_search(coarse_sup, scored.front().second, opt);
    // the coarse optimum may overfit its grid; rescore it with the best seed on the fine grid
    RVec best = scored.front().second;
    if ((res.x - best).norm() > 0 && sup_on(fine_grid.points, res.x) < sup_on(fine_grid.points, best)) best = res.x;
    F.pole = to_complex(best);
  }

  // Coefficients for each numerator degree up to the budget at the chosen pole.
  const int top = laurent ? budget.laurent_degree : std::max(1, budget.functional_degree);
  for (int degree = laurent ? top : 1; degree <= top; ++degree) {
    HoloFunctional G = laurent ? F : HoloFunctional::polynomial(n, degree);
    G.pole = F.pole;
    PointSet work = pts;
    InnerSolution sol = solve_inner(G, work.x, z, t, pair);
    if (!sol.ok) continue;
    const double sol_grid = sol.sup;
    double checked = sol.sup;
    int rounds = 0;
    for (int round = 0; round < budget.exchange_rounds; ++round) {
      const auto peaks = ascend(D, G, sol.coeffs, work, spacing, budget.exchange_candidates);
      double peak = 0.0;
      for (const auto& [v, p] : peaks) peak = std::max(peak, v);
      checked = std::max(sol.sup, peak);
      rounds = round + 1;
      if (peak <= sol.sup * (1.0 + 1e-10)) break;
      for (const auto& [v, p] : peaks) {
        work.x.push_back(p.x[0]);
        work.angles.push_back(p.angles[0]);
        work.radii.push_back(p.radii[0]);
      }
      const InnerSolution next = solve_inner(G, work.x, z, t, pair);
      if (!next.ok) break;
      sol = next;
      checked = sol.sup;
      if (round + 1 == budget.exchange_rounds) {
        const auto last = ascend(D, G, sol.coeffs, work, spacing, budget.exchange_candidates);
        for (const auto& [v, p] : last) checked = std::max(checked, v);
      }
    }
    G.coefficients = sol.coeffs;
    G.guard = (1.0 - kGuardSlack) / checked;
    const double v = functional_value(G, z, t, pair);
    if (v > out.value) {
      out.value = v;
      out.witness = G;
      out.sup_grid = sol_grid;
      out.sup_checked = checked;
      out.exchange_rounds = rounds;
    }
  }
  return out;
}

double chain_value(const Domain& D, const std::vector<CVec>& chain, const Budget& budget) {
  double sum = 0.0;
  for (std::size_t i = 1; i < chain.size(); ++i) {
    const DiscBound b = lempert_upper(D, chain[i - 1], chain[i], budget);
    if (!b.feasible) return kInf;
    sum += b.value;
  }
  return sum;
}

}  // namespace

DiscBound lempert_upper(const Domain& D, const CVec& z, const CVec& w, const Budget& budget) {
  return lempert_upper_until(D, z, w, budget, kInf);
}

DiscBound kobayashi_royden_upper(const Domain& D, const CVec& z, const CVec& v, const Budget& budget) {
  return kobayashi_royden_upper_until(D, z, v, budget, kInf);
}

DiscBound lempert_upper_until(const Domain& D, const CVec& z, const CVec& w, const Budget& budget, double stop_value) {
  require_point(D, z, "lempert_upper");
  require_point(D, w, "lempert_upper");
  DiscBound out;
  if ((z - w).norm() == 0.0) {
    out.feasible = true;
    out.witness = AnalyticDisc::constant(z);
    out.rational = polynomial_disc(out.witness.coeffs);
    out.scale = 1.0;
    out.margin = -D.defining.value(z);
    return out;
  }
  DiscFamily fam;
  fam.n = D.dimension();
  fam.d = std::max(1, budget.disc_degree);
  fam.z = z;
  fam.target = w;
  fam.pair = true;
  // l <= stop_value once 0.5 / scale <= tanh(stop_value)
  const double stop_scale = std::isfinite(stop_value) && stop_value > 0 ? 0.5 / std::tanh(stop_value) : kInf;
  const DiscSearch s = search_discs(D, fam, budget, stop_scale);
  out.rational = s.f;
  out.scale = s.scale;
  out.evaluations = s.evaluations;
  out.feasible = s.scale > 0.5;
  if (!out.feasible) return out;
  out.xi = 0.5 / s.scale;
  out.value = atanh_from(out.xi, (1.0 - out.xi) * (1.0 + out.xi));
  fill_witness(D, out, budget);
  return out;
}

DiscBound kobayashi_royden_upper_until(const Domain& D, const CVec& z, const CVec& v, const Budget& budget,
                                       double stop_value) {
  require_point(D, z, "kobayashi_royden_upper");
  if (v.size() != z.size() || v.norm() == 0.0) throw Error("kobayashi_royden_upper: direction must be nonzero");
  DiscFamily fam;
  fam.n = D.dimension();
  fam.d = std::max(1, budget.disc_degree);
  fam.z = z;
  fam.target = v;
  fam.pair = false;
  const double stop_scale = std::isfinite(stop_value) && stop_value > 0 ? 1.0 / stop_value : kInf;
  const DiscSearch s = search_discs(D, fam, budget, stop_scale);
  DiscBound out;
  out.rational = s.f;
  out.scale = s.scale;
  out.evaluations = s.evaluations;
  out.feasible = s.scale > 0.0;
  if (!out.feasible) return out;
  out.xi = s.scale;
  out.value = 1.0 / s.scale;
  fill_witness(D, out, budget);
  return out;
}

FunctionalBound caratheodory_lower(const Domain& D, const CVec& z, const CVec& w, const Budget& budget) {
  require_point(D, z, "caratheodory_lower");
  require_point(D, w, "caratheodory_lower");
  return functional_bound(D, z, w, true, budget, kInf);
}

FunctionalBound caratheodory_lower_until(const Domain& D, const CVec& z, const CVec& w, const Budget& budget,
                                         double stop_value) {
  require_point(D, z, "caratheodory_lower");
  require_point(D, w, "caratheodory_lower");
  return functional_bound(D, z, w, true, budget, stop_value);
}

FunctionalBound caratheodory_reiffen_lower(const Domain& D, const CVec& z, const CVec& v, const Budget& budget) {
  require_point(D, z, "caratheodory_reiffen_lower");
  if (v.size() != z.size() || v.norm() == 0.0) throw Error("caratheodory_reiffen_lower: direction must be nonzero");
  return functional_bound(D, z, v, false, budget, kInf);
}

FunctionalBound caratheodory_reiffen_lower_until(const Domain& D, const CVec& z, const CVec& v, const Budget& budget,
                                                 double stop_value) {
  require_point(D, z, "caratheodory_reiffen_lower");
  if (v.size() != z.size() || v.norm() == 0.0) throw Error("caratheodory_reiffen_lower: direction must be nonzero");
  return functional_bound(D, z, v, false, budget, stop_value);
}

ChainBound kobayashi_distance_upper(const Domain& D, const CVec& z, const CVec& w, int chain_depth,
                                    const Budget& budget) {
  if (chain_depth < 1 || chain_depth > 3) throw Error("kobayashi_distance_upper: chain depth must be 1, 2 or 3");
  ChainBound out;
  const DiscBound direct = lempert_upper(D, z, w, budget);
  out.chain = {z, w};
  out.value = direct.feasible ? direct.value : kInf;
  out.feasible = direct.feasible;
  if (chain_depth == 1 || (z - w).norm() == 0.0) return out;

  std::mt19937_64 rng(budget.seed + 17);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = D.dimension();
  const double R = D.bounding_radius;
  auto interior = [&](const CVec& u) { return D.defining.value(u) <= -kInteriorMargin; };
  auto random_near = [&](const CVec& target, double sigma) {
    CVec u = target;
    for (int j = 0; j < n; ++j) u[j] += sigma * cplx(normal(rng), normal(rng));
    return u;
  };
  Budget leg = budget;
  leg.evaluations = std::max(100, budget.evaluations / 2);
  leg.random_starts = std::min(budget.random_starts, 2);
  for (int k = 0; k < budget.chain_samples; ++k) {
    std::vector<CVec> chain{z};
    bool ok = true;
    for (int i = 1; i < chain_depth; ++i) {
      const CVec base = z + (w - z) * (static_cast<double>(i) / chain_depth);
      CVec u = k == 0 ? base : random_near(base, 0.1 * R * k / budget.chain_samples);
      for (int tries = 0; tries < 200 && !interior(u); ++tries) u = random_near(base, 0.1 * R * (1 + tries / 20));
      if (!interior(u)) {
        ok = false;
        break;
      }
      chain.push_back(u);
    }
    if (!ok) continue;
    chain.push_back(w);
    const double v = chain_value(D, chain, leg);
    if (v < out.value) {
      out.value = v;
      out.chain = chain;
      out.feasible = true;
    }
  }
  return out;
}

std::optional<double> closed_form(const ModelDomain& m, Quantity q, const CVec& z, const CVec& t) {
  const bool infinitesimal = q == Quantity::CaratheodoryReiffen || q == Quantity::KobayashiRoyden;
  if (std::holds_alternative<UnitDisc>(m)) {
    return infinitesimal ? poincare_metric(z[0], t[0]) : poincare_distance(z[0], t[0]);
  }
  if (std::holds_alternative<Ball>(m)) return infinitesimal ? ball_metric(z, t) : ball_distance(z, t);
  if (std::holds_alternative<Polydisc>(m)) {
    double best = 0.0;
    for (Eigen::Index j = 0; j < z.size(); ++j)
      best = std::max(best, infinitesimal ? poincare_metric(z[j], t[j]) : poincare_distance(z[j], t[j]));
    return best;
  }
  if (const auto* A = std::get_if<Annulus>(&m)) {
    if (q == Quantity::Caratheodory || q == Quantity::CaratheodoryReiffen) return std::nullopt;
    const double rp = A->r_plus;
    const double qm = A->r_minus / rp;
    if (infinitesimal) return annulus_kobayashi_metric(qm, z[0] / rp, t[0]) / rp;
    return annulus_kobayashi(qm, z[0] / rp, t[0] / rp);
  }
  return std::nullopt;
}

bool ordering_holds(const ComparisonReport& r) {
  bool ok = true;
  if (r.k_up) ok = ok && r.c_low <= *r.k_up + 2e-7;
  if (r.k_up && r.l_up) ok = ok && *r.k_up <= *r.l_up + 1e-12;
  if (!r.k_up && r.l_up) ok = ok && r.c_low <= *r.l_up + 2e-7;
  if (r.gamma_low && r.kappa_up) ok = ok && *r.gamma_low <= *r.kappa_up + 2e-7;
  return ok;
}

ComparisonReport compare(const Domain& D, const CVec& z, const CVec& w, const std::optional<CVec>& v,
                         const Budget& budget, const CompareOptions& opt) {
  ComparisonReport rep;
  rep.domain = D.name;
  rep.z = z;
  rep.w = w;
  rep.v = v;
  const bool annulus = D.model && std::holds_alternative<Annulus>(*D.model);

  if (annulus) {
    Budget b8 = budget, b16 = budget;
    b8.laurent_degree = 8;
    b16.laurent_degree = 16;
    const FunctionalBound f8 = caratheodory_lower(D, z, w, b8);
    const FunctionalBound f16 = caratheodory_lower(D, z, w, b16);
    rep.c_degree8 = f8.value;
    rep.c_degree16 = f16.value;
    rep.c_envelope = f16.value + 10.0 * std::max(0.0, f16.value - f8.value);
    const bool use16 = f16.value >= f8.value;
    rep.c_low = use16 ? f16.value : f8.value;
    rep.witness_functional = use16 ? f16.witness : f8.witness;
  }
  // Each side stops once the bracket closes to close_tol; the seed functionals go first.
  const double close_tol = 1e-2 * opt.tol_eq;
  DiscBound l;
  if (annulus) {
    l = lempert_upper(D, z, w, budget);
  } else {
    FunctionalBound f = caratheodory_lower_until(D, z, w, budget, -kInf);
    l = lempert_upper_until(D, z, w, budget, f.value + close_tol);
    if (!l.feasible || l.value - f.value > close_tol)
      f = caratheodory_lower_until(D, z, w, budget, l.feasible ? l.value - close_tol : kInf);
    rep.c_low = f.value;
    rep.witness_functional = f.witness;
  }
  if (l.feasible) {
    rep.l_up = l.value;
    rep.l_margin = l.margin;
    rep.xi = l.xi;
    rep.witness_disc = l.witness;
  }
  if (D.model) {
    rep.c_exact = closed_form(*D.model, Quantity::Caratheodory, z, w);
    rep.k_exact = closed_form(*D.model, Quantity::Kobayashi, z, w);
  }
  std::optional<double> k;
  if (opt.chain_depth > 1) {
    const ChainBound cb = kobayashi_distance_upper(D, z, w, opt.chain_depth, budget);
    if (cb.feasible) k = cb.value;
  } else {
    k = rep.l_up;
  }
  if (rep.k_exact) k = k ? std::min(*k, *rep.k_exact) : *rep.k_exact;
  if (k && rep.l_up) k = std::min(*k, *rep.l_up);
  rep.k_up = k;

  if (v) {
    FunctionalBound g = caratheodory_reiffen_lower_until(D, z, *v, budget, annulus ? kInf : -kInf);
    const DiscBound kr = kobayashi_royden_upper_until(D, z, *v, budget, annulus ? kInf : g.value + close_tol);
    if (!annulus && (!kr.feasible || kr.value - g.value > close_tol))
      g = caratheodory_reiffen_lower_until(D, z, *v, budget, kr.feasible ? kr.value - close_tol : kInf);
    rep.gamma_low = g.value;
    if (kr.feasible) {
      rep.kappa_up = kr.value;
      rep.kappa_margin = kr.margin;
    }
    if (D.model) {
      rep.gamma_exact = closed_form(*D.model, Quantity::CaratheodoryReiffen, z, *v);
      rep.kappa_exact = closed_form(*D.model, Quantity::KobayashiRoyden, z, *v);
    }
  }

  if (rep.l_up) rep.gap = *rep.l_up - rep.c_low;
  rep.equality_certified = rep.gap && *rep.gap <= opt.tol_eq;
  rep.gap_certified = rep.c_envelope && rep.k_exact && *rep.c_envelope < *rep.k_exact - opt.gap_margin;
  rep.ordering_ok = ordering_holds(rep);
  return rep;
}

ComparisonReport compare_product(const std::vector<Domain>& factors, const std::vector<CVec>& z,
                                 const std::vector<CVec>& w, const Budget& budget, const CompareOptions& opt) {
  if (factors.empty() || factors.size() != z.size() || factors.size() != w.size())
    throw Error("compare_product: one point pair per factor required");
  ComparisonReport rep;
  Eigen::Index n = 0;
  for (const auto& x : z) n += x.size();
  rep.z.resize(n);
  rep.w.resize(n);
  rep.k_up = 0.0;
  rep.l_up = 0.0;
  rep.c_envelope = 0.0;
  rep.k_exact = 0.0;
  bool all_exact = true, all_env = true;
  double best_c = -1.0;
  Eigen::Index off = 0;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const ComparisonReport f = compare(factors[i], z[i], w[i], std::nullopt, budget, opt);
    rep.z.segment(off, z[i].size()) = z[i];
    rep.w.segment(off, w[i].size()) = w[i];
    off += z[i].size();
    rep.domain += (i ? " x " : "") + factors[i].name;
    if (f.c_low > best_c) {
      best_c = f.c_low;
      rep.c_low = f.c_low;
      rep.witness_functional = f.witness_functional;
      rep.c_degree8 = f.c_degree8;
      rep.c_degree16 = f.c_degree16;
    }
    if (rep.k_up && f.k_up)
      rep.k_up = std::max(*rep.k_up, *f.k_up);
    else
      rep.k_up.reset();
    if (rep.l_up && f.l_up) {
      if (*f.l_up >= *rep.l_up) {
        rep.witness_disc = f.witness_disc;
        rep.xi = f.xi;
        rep.l_margin = f.l_margin;
      }
      rep.l_up = std::max(*rep.l_up, *f.l_up);
    } else {
      rep.l_up.reset();
    }
    if (f.k_exact && all_exact)
      rep.k_exact = std::max(*rep.k_exact, *f.k_exact);
    else
      all_exact = false;
    if (f.c_envelope && all_env)
      rep.c_envelope = std::max(*rep.c_envelope, *f.c_envelope);
    else
      all_env = false;
  }
  if (!all_exact) rep.k_exact.reset();
  if (!all_env) rep.c_envelope.reset();
  if (rep.l_up) rep.gap = *rep.l_up - rep.c_low;
  rep.equality_certified = rep.gap && *rep.gap <= opt.tol_eq;
  rep.gap_certified = rep.c_envelope && rep.k_exact && *rep.c_envelope < *rep.k_exact - opt.gap_margin;
  rep.ordering_ok = ordering_holds(rep);
  return rep;
}

}  // namespace imet
