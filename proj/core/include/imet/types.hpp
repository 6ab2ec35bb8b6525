#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace imet {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;

/// Packs z in C^n as (x1, y1, ..., xn, yn).
RVec to_real(const CVec& z);
CVec to_complex(const RVec& x);

/// Complex inner product <z, w> = sum z_j conj(w_j).
cplx inner(const CVec& z, const CVec& w);
/// Bilinear dot product z . w = sum z_j w_j.
cplx dot(const CVec& z, const CVec& w);

CVec cvec(std::initializer_list<cplx> values);

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define IMET_ERROR(Name)                  \
  class Name : public Error {             \
   public:                                \
    explicit Name(const std::string& what) \
        : Error(#Name ": " + what) {}     \
  }

IMET_ERROR(DegenerateGradient);
IMET_ERROR(NoConvergence);
IMET_ERROR(PoleHit);
IMET_ERROR(LiftFailure);
IMET_ERROR(DegeneratePair);
IMET_ERROR(NoRoot);
IMET_ERROR(MultipleRoots);
IMET_ERROR(NotStronglyConvexAt);
IMET_ERROR(BudgetExhausted);
IMET_ERROR(NotC2);
IMET_ERROR(OutOfRegion);
IMET_ERROR(Infeasible);
IMET_ERROR(NotBoundaryAttached);
IMET_ERROR(NoCauchyTrend);

#undef IMET_ERROR

}  // namespace imet
