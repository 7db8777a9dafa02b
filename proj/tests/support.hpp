#pragma once

#include <cmath>
#include <random>

#include "crprecoder/linalg.hpp"

namespace testing {

using crp::CMat;
using crp::cplx;
using crp::RMat;
using crp::RVec;

inline CMat random_cmat(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  CMat a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = cplx(g(rng), g(rng));
  return a;
}

// Hermitian PD with eigenvalues in [lo, lo + spread].
inline CMat random_hpd(std::mt19937_64& rng, Eigen::Index n, double lo = 0.2, double spread = 2.0) {
  const CMat a = random_cmat(rng, n, n);
  Eigen::HouseholderQR<CMat> qr(a);
  const CMat U = qr.householderQ() * CMat::Identity(n, n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RVec d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = lo + spread * u(rng);
  return U * d.cast<cplx>().asDiagonal() * U.adjoint();
}

inline CMat random_unitary(std::mt19937_64& rng, Eigen::Index n) {
  Eigen::HouseholderQR<CMat> qr(random_cmat(rng, n, n));
  return qr.householderQ() * CMat::Identity(n, n);
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

// log|a| through an LU factorization, independent of the Cholesky path.
inline double logdet_lu(const CMat& a) {
  Eigen::PartialPivLU<CMat> lu(a);
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) s += std::log(std::abs(lu.matrixLU()(i, i)));
  return s;
}

}  // namespace testing
