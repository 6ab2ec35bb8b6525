#include "imet/discs.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

namespace imet {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<cplx> run_fft(const std::vector<cplx>& in, int sign) {
  const int N = static_cast<int>(in.size());
  std::vector<cplx> out(N);
  std::vector<cplx> buf(in);
  fftw_plan plan;
  {
    // only plan creation and destruction are not thread safe in FFTW
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_1d(N, reinterpret_cast<fftw_complex*>(buf.data()),
                            reinterpret_cast<fftw_complex*>(out.data()), sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace

AnalyticDisc AnalyticDisc::constant(const CVec& z) {
  CMat c(1, z.size());
  c.row(0) = z.transpose();
  return AnalyticDisc(c);
}

AnalyticDisc AnalyticDisc::affine(const CVec& z, const CVec& v) {
  CMat c(2, z.size());
  c.row(0) = z.transpose();
  c.row(1) = v.transpose();
  return AnalyticDisc(c);
}

CVec AnalyticDisc::evaluate(cplx lambda) const {
  const Eigen::Index d = coeffs.rows() - 1;
  CVec out = coeffs.row(d).transpose();
  for (Eigen::Index j = d - 1; j >= 0; --j) out = out * lambda + coeffs.row(j).transpose();
  return out;
}

CVec AnalyticDisc::derivative(cplx lambda) const {
  const Eigen::Index d = coeffs.rows() - 1;
  if (d == 0) return CVec::Zero(coeffs.cols());
  CVec out = static_cast<double>(d) * coeffs.row(d).transpose();
  for (Eigen::Index j = d - 1; j >= 1; --j) out = out * lambda + static_cast<double>(j) * coeffs.row(j).transpose();
  return out;
}

cplx BoundaryTrace::node(int j) const { return std::polar(1.0, 2 * std::numbers::pi * j / size()); }

bool is_power_of_two(int N) { return N > 0 && (N & (N - 1)) == 0; }

std::vector<cplx> fourier_coefficients(const std::vector<cplx>& samples) {
  std::vector<cplx> out = run_fft(samples, FFTW_FORWARD);
  const double inv = 1.0 / static_cast<double>(samples.size());
  for (cplx& c : out) c *= inv;
  return out;
}

std::vector<cplx> fourier_synthesis(const std::vector<cplx>& coefficients) {
  return run_fft(coefficients, FFTW_BACKWARD);
}

BoundaryTrace boundary_trace(const AnalyticDisc& f, int N) {
  if (!is_power_of_two(N) || N < 4 * (f.degree() + 1))
    throw Error("boundary trace size must be a power of two at least 4 (degree + 1)");
  return sample_trace([&f](cplx z) { return f.evaluate(z); }, f.dimension(), N);
}

BoundaryTrace sample_trace(const std::function<CVec(cplx)>& g, int n, int N) {
  BoundaryTrace t;
  t.samples.resize(N, n);
  for (int j = 0; j < N; ++j) t.samples.row(j) = g(std::polar(1.0, 2 * std::numbers::pi * j / N)).transpose();
  return t;
}

double FourierTail::relative_negative_energy() const {
  const double total = negative_energy + positive_energy;
  return total > 0 ? negative_energy / total : 0.0;
}

cplx FourierTail::coefficient(int k, int component) const {
  return coefficients(k + coefficients.rows() / 2, component);
}

FourierTail holomorphic_extension_residual(const BoundaryTrace& g) {
  const int N = g.size();
  if (N < 8 || !is_power_of_two(N)) throw Error("holomorphic_extension_residual needs N >= 8, a power of two");
  const int n = g.dimension();
  FourierTail tail;
  tail.coefficients.resize(N, n);
  CMat ext(N / 2, n);
  for (int c = 0; c < n; ++c) {
    std::vector<cplx> col(N);
    for (int j = 0; j < N; ++j) col[j] = g.samples(j, c);
    const std::vector<cplx> hat = fourier_coefficients(col);
    for (int k = -N / 2; k < N / 2; ++k) {
      const cplx v = hat[(k + N) % N];
      tail.coefficients(k + N / 2, c) = v;
      if (k < 0) {
        tail.negative_energy += std::norm(v);
      } else {
        tail.positive_energy += std::norm(v);
        ext(k, c) = v;
      }
    }
  }
  tail.extension = AnalyticDisc(ext);
  return tail;
}

bool extends_holomorphically(const FourierTail& tail, double rel_tol) {
  return tail.negative_energy <= rel_tol * tail.positive_energy;
}

double holder_half_seminorm(const BoundaryTrace& g) {
  const int N = g.size();
  double best = 0.0;
  for (int gap = 1; gap <= N / 2; gap *= 2) {
    const double chord = std::abs(1.0 - std::polar(1.0, 2 * std::numbers::pi * gap / N));
    const double denom = std::sqrt(chord);
    for (int j = 0; j < N; ++j) {
      const double diff = (g.samples.row(j) - g.samples.row((j + gap) % N)).norm();
      best = std::max(best, diff / denom);
    }
  }
  return best;
}

double sup_norm(const BoundaryTrace& g) {
  double best = 0.0;
  for (int j = 0; j < g.size(); ++j) best = std::max(best, g.samples.row(j).norm());
  return best;
}

double holder_half_norm(const BoundaryTrace& g) { return holder_half_seminorm(g) + sup_norm(g); }

double holder_half_norm(const AnalyticDisc& f, int N) { return holder_half_norm(boundary_trace(f, N)); }

double holder_half_seminorm(const AnalyticDisc& f, int N) { return holder_half_seminorm(boundary_trace(f, N)); }

Expansion expand_holomorphic(const std::function<CVec(cplx)>& f, int n, double tail_tol, int max_degree) {
  int N = 64;
  while (true) {
    const BoundaryTrace t = sample_trace(f, n, N);
    std::vector<double> mag(N, 0.0);
    for (int c = 0; c < n; ++c) {
      std::vector<cplx> col(N);
      for (int j = 0; j < N; ++j) col[j] = t.samples(j, c);
      const std::vector<cplx> hat = fourier_coefficients(col);
      for (int k = 0; k < N; ++k) mag[k] += std::abs(hat[k]);
    }
    // negative bins hold only aliases of modes >= N/2
    double alias = 0.0;
    for (int k = N / 2; k < N; ++k) alias += mag[k];
    double upper_quarter = 0.0;
    for (int k = N / 4; k < N / 2; ++k) upper_quarter += mag[k];
    const bool resolved = alias + upper_quarter <= 0.1 * tail_tol;
    if (resolved || N / 2 > max_degree) {
      int d = std::min(N / 2 - 1, max_degree);
      double suffix = alias;
      for (int k = N / 2 - 1; k > d; --k) suffix += mag[k];
      while (d > 0 && suffix + mag[d] <= tail_tol) {
        suffix += mag[d];
        --d;
      }
      CMat coeffs(d + 1, n);
      for (int c = 0; c < n; ++c) {
        std::vector<cplx> col(N);
        for (int j = 0; j < N; ++j) col[j] = t.samples(j, c);
        const std::vector<cplx> hat = fourier_coefficients(col);
        for (int k = 0; k <= d; ++k) coeffs(k, c) = hat[k];
      }
      return {AnalyticDisc(coeffs), suffix};
    }
    N *= 2;
  }
}

double sup_distance(const AnalyticDisc& f, const AnalyticDisc& g, double radius, int angles) {
  double best = 0.0;
  for (int k = 0; k < angles; ++k) {
    const cplx l = std::polar(radius, 2 * std::numbers::pi * k / angles);
    best = std::max(best, (f.evaluate(l) - g.evaluate(l)).norm());
  }
  return best;
}

}  // namespace imet

namespace imet {

double RationalDisc::pole_radius() const {
  double m = 0.0;
  for (Eigen::Index j = 0; j < pole.size(); ++j) m = std::max(m, std::abs(pole[j]));
  return m > 0 ? 1.0 / m : std::numeric_limits<double>::infinity();
}

CVec RationalDisc::evaluate(cplx lambda) const {
  const Eigen::Index d = numerator.rows() - 1;
  CVec out = numerator.row(d).transpose();
  for (Eigen::Index k = d - 1; k >= 0; --k) out = out * lambda + numerator.row(k).transpose();
  for (Eigen::Index j = 0; j < out.size(); ++j) out[j] /= 1.0 - pole[j] * lambda;
  return out;
}

CVec RationalDisc::derivative(cplx lambda) const {
  const Eigen::Index d = numerator.rows() - 1;
  const Eigen::Index n = numerator.cols();
  CVec N = numerator.row(d).transpose();
  CVec dN = CVec::Zero(n);
  for (Eigen::Index k = d - 1; k >= 0; --k) {
    dN = dN * lambda + N;
    N = N * lambda + numerator.row(k).transpose();
  }
  CVec out(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const cplx den = 1.0 - pole[j] * lambda;
    out[j] = dN[j] / den + N[j] * pole[j] / (den * den);
  }
  return out;
}

Expansion RationalDisc::taylor(double scale, double tail_tol, int max_degree) const {
  const int d = degree();
  const Eigen::Index n = numerator.cols();
  double q = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) q = std::max(q, std::abs(pole[j]) * scale);
  if (q >= 1.0) throw Error("RationalDisc::taylor: pole inside the scaled disc");
  std::vector<CVec> a;
  CVec prev = CVec::Zero(n);
  double sk = 1.0;
  double tail = 0.0;
  for (int k = 0; k <= max_degree; ++k) {
    CVec cur(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const cplx Nk = k <= d ? numerator(k, j) * sk : cplx(0.0);
      cur[j] = Nk + pole[j] * scale * prev[j];
    }
    a.push_back(cur);
    prev = cur;
    sk *= scale;
    if (k >= d) {
      tail = q > 0 ? cur.cwiseAbs().sum() * q / (1.0 - q) : 0.0;
      if (tail <= tail_tol) break;
    }
  }
  CMat coeffs(a.size(), n);
  for (std::size_t k = 0; k < a.size(); ++k) coeffs.row(k) = a[k].transpose();
  return {AnalyticDisc(coeffs), tail};
}

}  // namespace imet
