#include "imet/optimize.hpp"

#include <cmath>
#include <algorithm>
#include <limits>
#include <vector>

namespace imet {

PatternSearchResult pattern_search(const std::function<double(const RVec&)>& f, const RVec& x0,
                                   const PatternSearchOptions& opt) {
  PatternSearchResult res;
  res.x = x0;
  res.value = f(x0);
  res.evaluations = 1;
  const Eigen::Index m = x0.size();
  double step = opt.initial_step;
  auto budget_left = [&] { return res.evaluations < opt.max_evaluations && res.value > opt.target; };
  while (m > 0 && step >= opt.min_step && budget_left()) {
    bool improved = false;
    for (Eigen::Index k = 0; k < m && budget_left(); ++k) {
      for (double sign : {1.0, -1.0}) {
        if (!budget_left()) break;
        RVec trial = res.x;
        trial[k] += sign * step;
        const double v = f(trial);
        ++res.evaluations;
        if (!(v < res.value)) continue;
        res.value = v;
        res.x = trial;
        improved = true;
        // keep moving along the successful direction with doubling steps
        double stride = 2.0 * step;
        while (budget_left()) {
          RVec further = res.x;
          further[k] += sign * stride;
          const double w = f(further);
          ++res.evaluations;
          if (!(w < res.value)) break;
          res.value = w;
          res.x = further;
          stride *= 2.0;
        }
        break;
      }
    }
    if (!improved) step *= 0.5;
  }
  res.final_step = step;
  return res;
}

namespace {

// Second-order cone {(u0, u1): |u1| <= u0} with u1 in R^2.
using V3 = Eigen::Vector3d;
using M3 = Eigen::Matrix3d;

double jnorm2(const V3& u) {
  const double r = u.tail<2>().norm();
  return (u[0] - r) * (u[0] + r);
}

V3 jordan(const V3& u, const V3& v) {
  V3 out;
  out[0] = u.dot(v);
  out.tail<2>() = u[0] * v.tail<2>() + v[0] * u.tail<2>();
  return out;
}

// Solves lambda o x = r.
V3 jordan_solve(const V3& l, const V3& r) {
  const double delta = jnorm2(l);
  V3 x;
  x[0] = (l[0] * r[0] - l.tail<2>().dot(r.tail<2>())) / delta;
  x.tail<2>() = (r.tail<2>() - x[0] * l.tail<2>()) / l[0];
  return x;
}

// Largest alpha with u + alpha d in the cone (capped at 1e300).
double max_step(const V3& u, const V3& d) {
  double best = 1e300;
  const double A = d[0] * d[0] - d.tail<2>().squaredNorm();
  const double B = 2.0 * (u[0] * d[0] - u.tail<2>().dot(d.tail<2>()));
  const double C = jnorm2(u);
  auto take = [&](double a) {
    if (a > 0 && a < best) best = a;
  };
  if (d[0] < 0) take(-u[0] / d[0]);
  if (A == 0.0) {
    if (B < 0) take(-C / B);
  } else {
    const double disc = B * B - 4.0 * A * C;
    if (disc >= 0) {
      const double q = -0.5 * (B + std::copysign(std::sqrt(disc), B));
      if (q != 0.0) {
        take(q / A);
        take(C / q);
      }
    }
  }
  return best;
}

struct Scaling {
  M3 W, Winv;
  V3 lambda;
};

// Nesterov-Todd scaling: W z = W^{-1} s = lambda.
Scaling nt_scaling(const V3& s, const V3& z) {
  const M3 J = V3(1.0, -1.0, -1.0).asDiagonal();
  const double sn = std::sqrt(jnorm2(s)), zn = std::sqrt(jnorm2(z));
  const V3 sb = s / sn, zb = z / zn;
  const double gamma = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
  const V3 wb = (sb + J * zb) / (2.0 * gamma);
  const V3 v = (wb + V3(1.0, 0.0, 0.0)) / std::sqrt(2.0 * (wb[0] + 1.0));
  const double beta = std::sqrt(sn / zn);
  const M3 H = 2.0 * v * v.transpose() - J;
  Scaling sc;
  sc.W = beta * H;
  sc.Winv = J * H * J / beta;
  sc.lambda = sc.W * z;
  return sc;
}

}  // namespace

MinMaxResult min_max_modulus(const CVec& a, const CMat& Phi_in, double rel_gap) {
  const Eigen::Index G = a.size();
  // unit column scaling; undone on the returned y
  RVec colscale(Phi_in.cols());
  for (Eigen::Index k = 0; k < Phi_in.cols(); ++k) {
    const double mx = Phi_in.col(k).cwiseAbs().maxCoeff();
    colscale[k] = mx > 0 ? 1.0 / mx : 1.0;
  }
  const CMat Phi = Phi_in * colscale.asDiagonal();
  const Eigen::Index p = Phi.cols();
  MinMaxResult res;
  res.y = CVec::Zero(p);
  if (p == 0) {
    res.value = a.cwiseAbs().maxCoeff();
    res.converged = true;
    return res;
  }
  // Variables y = (x, t) with x the real form of the complex unknowns. Cone g holds
  // s_g = (t, Re F_g, Im F_g) = h_g - G_g y; the dual start z_g = (1/G, 0, 0) is feasible.
  const Eigen::Index m = 2 * p;
  const Eigen::Index nv = m + 1;
  RMat Mre(G, m), Mim(G, m);
  for (Eigen::Index k = 0; k < p; ++k) {
    Mre.col(2 * k) = Phi.col(k).real();
    Mim.col(2 * k) = Phi.col(k).imag();
    Mre.col(2 * k + 1) = -Phi.col(k).imag();
    Mim.col(2 * k + 1) = Phi.col(k).real();
  }
  // G_g y = -(t, Mre_g x, Mim_g x)
  auto apply_G = [&](Eigen::Index g, const RVec& y) {
    return V3(-y[m], -Mre.row(g).dot(y.head(m)), -Mim.row(g).dot(y.head(m)));
  };
  // out += G_g^T v
  auto apply_GT = [&](Eigen::Index g, const V3& v, RVec& out) {
    out.head(m) -= v[1] * Mre.row(g).transpose() + v[2] * Mim.row(g).transpose();
    out[m] -= v[0];
  };
  std::vector<V3> h(G), s(G), z(G);
  const double amax = a.cwiseAbs().maxCoeff();
  RVec y = RVec::Zero(nv);
  y[m] = 1.1 * amax + 1e-3 * (1.0 + amax);
  for (Eigen::Index g = 0; g < G; ++g) {
    h[g] = V3(0.0, a[g].real(), a[g].imag());
    s[g] = h[g] - apply_G(g, y);
    z[g] = V3(1.0 / static_cast<double>(G), 0.0, 0.0);
  }
  RVec c = RVec::Zero(nv);
  c[m] = 1.0;

  std::vector<Scaling> sc(G);
  std::vector<V3> ds(G), dz(G), ds_a(G), dz_a(G), rp(G), q(G);
  for (int it = 0; it < 100; ++it) {
    double gap = 0.0;
    for (Eigen::Index g = 0; g < G; ++g) gap += s[g].dot(z[g]);
    const double t = y[m];
    if (gap <= rel_gap * std::max(t, 1e-300)) {
      res.converged = true;
      break;
    }
    const double mu = gap / static_cast<double>(G);
    RVec rd = -c;
    for (Eigen::Index g = 0; g < G; ++g) {
      apply_GT(g, -z[g], rd);
      rp[g] = h[g] - apply_G(g, y) - s[g];
    }
    // Newton system through the QR factor of B = W^{-1} G, so that B^T B is
    // never formed explicitly.
    RMat B(3 * G, nv);
    for (Eigen::Index g = 0; g < G; ++g) {
      sc[g] = nt_scaling(s[g], z[g]);
      const M3& Wi = sc[g].Winv;
      for (int i = 0; i < 3; ++i) {
        B.row(3 * g + i).head(m) = -Wi(i, 1) * Mre.row(g) - Wi(i, 2) * Mim.row(g);
        B(3 * g + i, m) = -Wi(i, 0);
      }
    }
    const Eigen::HouseholderQR<RMat> qr(B);
    const RMat R = qr.matrixQR().topRows(nv).triangularView<Eigen::Upper>();
    auto solve = [&](const std::vector<V3>& rc, std::vector<V3>& Ds, std::vector<V3>& Dz, RVec& Dy) {
      // B^T B Dy = r_d + B^T b with b = W^{-1} r_p - q
      RVec b(3 * G);
      for (Eigen::Index g = 0; g < G; ++g) {
        q[g] = jordan_solve(sc[g].lambda, rc[g]);
        b.segment<3>(3 * g) = sc[g].Winv * rp[g] - q[g];
      }
      Dy = qr.solve(b);
      if (rd.norm() > 0) {
        const RVec u = R.transpose().triangularView<Eigen::Lower>().solve(rd);
        Dy += R.triangularView<Eigen::Upper>().solve(u);
      }
      for (Eigen::Index g = 0; g < G; ++g) {
        Ds[g] = rp[g] - apply_G(g, Dy);
        Dz[g] = sc[g].Winv * (q[g] - sc[g].Winv * Ds[g]);
      }
    };
    auto step_to_boundary = [&](const std::vector<V3>& Ds, const std::vector<V3>& Dz) {
      double alpha = 1e300;
      for (Eigen::Index g = 0; g < G; ++g) alpha = std::min({alpha, max_step(s[g], Ds[g]), max_step(z[g], Dz[g])});
      return alpha;
    };
    std::vector<V3> rc(G);
    for (Eigen::Index g = 0; g < G; ++g) rc[g] = -jordan(sc[g].lambda, sc[g].lambda);
    RVec dy_a(nv), dy(nv);
    solve(rc, ds_a, dz_a, dy_a);
    const double alpha_a = std::min(1.0, step_to_boundary(ds_a, dz_a));
    double gap_a = 0.0;
    for (Eigen::Index g = 0; g < G; ++g) gap_a += (s[g] + alpha_a * ds_a[g]).dot(z[g] + alpha_a * dz_a[g]);
    const double sigma = std::pow(std::max(0.0, gap_a) / gap, 3.0);
    for (Eigen::Index g = 0; g < G; ++g) {
      const V3 corr = jordan(sc[g].Winv * ds_a[g], sc[g].W * dz_a[g]);
      rc[g] += -corr + V3(sigma * mu, 0.0, 0.0);
    }
    solve(rc, ds, dz, dy);
    if (!dy.allFinite()) break;
    const double alpha = std::min(1.0, 0.99 * step_to_boundary(ds, dz));
    if (!(alpha > 1e-14)) break;
    y += alpha * dy;
    for (Eigen::Index g = 0; g < G; ++g) {
      s[g] += alpha * ds[g];
      z[g] += alpha * dz[g];
    }
    ++res.iterations;
  }
  CVec yc(p);
  for (Eigen::Index k = 0; k < p; ++k) yc[k] = cplx(y[2 * k], y[2 * k + 1]);
  const CVec F = a + Phi * yc;
  for (Eigen::Index k = 0; k < p; ++k) res.y[k] = yc[k] * colscale[k];
  res.value = F.cwiseAbs().maxCoeff();
  return res;
}

}  // namespace imet
