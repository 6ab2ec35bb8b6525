#include "imet/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "imet/hyperbolic.hpp"

namespace imet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Drops trailing rows below tol times the largest coefficient.
AnalyticDisc trim(const AnalyticDisc& f, double tol = 1e-15) {
  const double top = f.coeffs.cwiseAbs().maxCoeff();
  int last = f.degree();
  while (last > 0 && f.coeffs.row(last).cwiseAbs().maxCoeff() <= tol * top) --last;
  return AnalyticDisc(CMat(f.coeffs.topRows(last + 1)));
}

CVec conj_normal(const Domain& D, const CVec& x) {
  const CVec g = D.defining.gradient(x);
  const double m = g.norm();
  if (!(m > 0)) return CVec::Zero(x.size());
  return g.conjugate() / m;
}

double weight_basis(int i, double theta) {
  if (i == 0) return 1.0;
  const int k = (i + 1) / 2;
  return i % 2 == 1 ? std::cos(k * theta) : std::sin(k * theta);
}

}  // namespace

Geodesic ball_geodesic(int n, const CVec& z, const CVec& w, double tail_tol, int max_degree) {
  if (z.size() != n || w.size() != n) throw Error("ball_geodesic: dimension mismatch");
  if (!(z.squaredNorm() < 1.0) || !(w.squaredNorm() < 1.0)) throw OutOfRegion("ball_geodesic: points must lie in the ball");
  if ((z - w).norm() == 0.0) throw DegeneratePair("ball_geodesic: z = w");
  const CVec q = ball_involution(z, w);
  const double xi = q.norm();
  if (!(xi > 0.0)) throw DegeneratePair("ball_geodesic: z and w coincide numerically");
  const CVec u = q / xi;
  const double a2 = z.squaredNorm();
  const double s = std::sqrt(1.0 - a2);
  // phi_z(x) = (z - P x - s (x - P x)) / (1 - <x, z>), P the projection onto z
  CVec Pu = CVec::Zero(n);
  if (a2 > 0) Pu = z * (inner(u, z) / a2);
  Geodesic g;
  g.xi = xi;
  g.exact.numerator.resize(2, n);
  g.exact.numerator.row(0) = z.transpose();
  g.exact.numerator.row(1) = (-(Pu + s * (u - Pu))).transpose();
  g.exact.pole = CVec::Constant(n, inner(u, z));
  const Expansion e = g.exact.taylor(1.0, tail_tol, max_degree);
  g.disc = e.disc;
  g.tail = e.tail;
  return g;
}

StationaryCertificate certify_stationary(const Domain& D, const AnalyticDisc& f,
                                         const std::optional<std::vector<double>>& rho,
                                         const StationaryOptions& opt) {
  if (f.dimension() != D.dimension()) throw Error("certify_stationary: dimension mismatch");
  int N = std::max(opt.samples, 8);
  while (!is_power_of_two(N) || N < 4 * (f.degree() + 1)) ++N;
  if (rho && static_cast<int>(rho->size()) != N) throw Error("certify_stationary: weight needs one sample per node");
  const int n = f.dimension();
  const BoundaryTrace trace = boundary_trace(f, N);

  StationaryCertificate cert;
  cert.residual_threshold = opt.residual_scale * 2.0 * D.bounding_radius;
  CMat base(N, n);  // zeta conj(nu(f(zeta)))
  for (int j = 0; j < N; ++j) {
    const CVec x = trace.samples.row(j).transpose();
    cert.boundary_residual = std::max(cert.boundary_residual, std::abs(D.defining.value(x)));
    base.row(j) = (trace.node(j) * conj_normal(D, x)).transpose();
  }
  cert.boundary_attached = cert.boundary_residual <= cert.residual_threshold;
  cert.holder_estimate = holder_half_norm(trace);

  if (rho) {
    cert.weight = *rho;
  } else {
    // least squares over rho = 1 + sum a_k cos k + b_k sin k for the negative modes
    const int d = std::max(0, opt.weight_degree);
    const int m = 2 * d + 1;
    RMat M(N * n, m);  // real and imaginary parts of the modes -N/2..-1
    for (int i = 0; i < m; ++i) {
      for (int c = 0; c < n; ++c) {
        std::vector<cplx> col(N);
        for (int j = 0; j < N; ++j) col[j] = base(j, c) * weight_basis(i, kTwoPi * j / N);
        const std::vector<cplx> hat = fourier_coefficients(col);
        for (int k = 1; k <= N / 2; ++k) {
          const cplx v = hat[N - k];
          M(c * N + 2 * (k - 1), i) = v.real();
          M(c * N + 2 * (k - 1) + 1, i) = v.imag();
        }
      }
    }
    RVec coeffs = RVec::Zero(m);
    coeffs[0] = 1.0;
    if (m > 1) {
      const RVec y = M.rightCols(m - 1).colPivHouseholderQr().solve(-M.col(0));
      coeffs.tail(m - 1) = y;
    }
    std::vector<double> w(N);
    for (int j = 0; j < N; ++j) {
      double v = 0.0;
      for (int i = 0; i < m; ++i) v += coeffs[i] * weight_basis(i, kTwoPi * j / N);
      w[j] = v;
    }
    if (*std::min_element(w.begin(), w.end()) <= 0.0) {
      coeffs = RVec::Zero(m);
      coeffs[0] = 1.0;
      std::fill(w.begin(), w.end(), 1.0);
    }
    cert.weight = std::move(w);
    cert.weight_coefficients = coeffs;
  }
  cert.weight_positive = *std::min_element(cert.weight.begin(), cert.weight.end()) > 0.0;

  BoundaryTrace g;
  g.samples.resize(N, n);
  for (int j = 0; j < N; ++j) g.samples.row(j) = cert.weight[j] * base.row(j);
  const FourierTail tail = holomorphic_extension_residual(g);
  cert.dual_negative_energy = tail.relative_negative_energy();
  cert.dual_map = trim(tail.extension);
  cert.passes = cert.boundary_attached && cert.weight_positive && cert.dual_negative_energy <= opt.energy_tol;
  return cert;
}

cplx left_inverse_equation(const AnalyticDisc& f, const AnalyticDisc& dual, const CVec& z, cplx eta) {
  return dot(z - f.evaluate(eta), dual.evaluate(eta));
}

int left_inverse_winding(const AnalyticDisc& f, const AnalyticDisc& dual, const CVec& z) {
  const double R = 1.0 - 1e-6;
  int M = std::max(2048, 64 * (f.degree() + dual.degree() + 1));
  while (true) {
    double total = 0.0;
    bool smooth = true;
    cplx prev = left_inverse_equation(f, dual, z, R);
    for (int j = 1; j <= M; ++j) {
      const cplx cur = left_inverse_equation(f, dual, z, std::polar(R, kTwoPi * j / M));
      if (cur == 0.0 || prev == 0.0) throw NoConvergence("left_inverse: equation vanishes on the circle");
      const double step = std::arg(cur / prev);
      if (std::abs(step) > std::numbers::pi / 4) smooth = false;
      total += step;
      prev = cur;
    }
    if (smooth || M >= (1 << 20)) return static_cast<int>(std::lround(total / kTwoPi));
    M *= 2;
  }
}

cplx left_inverse(const AnalyticDisc& f, const AnalyticDisc& dual, const CVec& z) {
  if (z.size() != f.dimension() || dual.dimension() != f.dimension())
    throw Error("left_inverse: dimension mismatch");
  const int winding = left_inverse_winding(f, dual, z);
  if (winding <= 0) throw NoRoot("left_inverse: winding count " + std::to_string(winding));
  if (winding >= 2) throw MultipleRoots("left_inverse: winding count " + std::to_string(winding));
  std::vector<cplx> starts{0.0};
  for (double r : {0.3, 0.6, 0.9})
    for (int k = 0; k < 5; ++k) starts.push_back(std::polar(r, kTwoPi * k / 5));
  bool found = false;
  cplx best = 0.0;
  double best_res = 1e300;
  for (cplx eta : starts) {
    for (int it = 0; it < 80; ++it) {
      const CVec fe = f.evaluate(eta), de = dual.evaluate(eta);
      const cplx g = dot(z - fe, de);
      const cplx dg = -dot(f.derivative(eta), de) + dot(z - fe, dual.derivative(eta));
      if (dg == 0.0) break;
      cplx step = g / dg;
      // keep iterates inside the disc
      while (std::abs(eta - step) >= 1.0 && std::abs(step) > 1e-16) step *= 0.5;
      eta -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(eta))) break;
    }
    const double res = std::abs(left_inverse_equation(f, dual, z, eta));
    if (std::abs(eta) < 1.0 && std::isfinite(res) && res < best_res) {
      best_res = res;
      best = eta;
      found = true;
    }
  }
  const double scale = std::max(1.0, z.norm()) * std::max(1.0, dual.coeffs.cwiseAbs().maxCoeff());
  if (!found || !(best_res <= 1e-10 * scale)) throw NoConvergence("left_inverse: Newton did not converge");
  return best;
}

cplx LeftInverse::operator()(const CVec& z) {
  const cplx v = left_inverse(f_, dual_, z);
  certified_.push_back(z);
  return v;
}

PerturbationGap geodesic_perturbation_gap(const Domain& D, const DefiningFunction& r_perturbed, const CVec& z,
                                          const CVec& X, const Budget& budget) {
  if (r_perturbed.dimension() != D.dimension()) throw Error("geodesic_perturbation_gap: dimension mismatch");
  const CVec center = r_perturbed.value(D.star_center) < 0 ? D.star_center : z;
  const Domain P = make_domain(r_perturbed, center, 1.5 * D.bounding_radius, D.name + " perturbed");
  PerturbationGap out;
  out.base = kobayashi_royden_upper(D, z, X, budget);
  out.perturbed = kobayashi_royden_upper(P, z, X, budget);
  if (!out.base.feasible || !out.perturbed.feasible) throw Infeasible("geodesic_perturbation_gap: no feasible disc");
  out.gap = sup_distance(out.base.witness, out.perturbed.witness, 1.0 - 1e-3);
  return out;
}

}  // namespace imet
