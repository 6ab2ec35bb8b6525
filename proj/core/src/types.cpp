#include "imet/types.hpp"

namespace imet {

RVec to_real(const CVec& z) {
  RVec x(2 * z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    x[2 * j] = z[j].real();
    x[2 * j + 1] = z[j].imag();
  }
  return x;
}

CVec to_complex(const RVec& x) {
  CVec z(x.size() / 2);
  for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = cplx(x[2 * j], x[2 * j + 1]);
  return z;
}

cplx inner(const CVec& z, const CVec& w) {
  cplx s = 0.0;
  for (Eigen::Index j = 0; j < z.size(); ++j) s += z[j] * std::conj(w[j]);
  return s;
}

cplx dot(const CVec& z, const CVec& w) {
  cplx s = 0.0;
  for (Eigen::Index j = 0; j < z.size(); ++j) s += z[j] * w[j];
  return s;
}

CVec cvec(std::initializer_list<cplx> values) {
  CVec z(static_cast<Eigen::Index>(values.size()));
  Eigen::Index j = 0;
  for (const auto& v : values) z[j++] = v;
  return z;
}

}  // namespace imet
