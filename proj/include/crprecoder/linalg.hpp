#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace crp {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// Small Hermitian helpers shared by every module. All inputs are assumed
// Hermitian; only the lower triangle is read by the eigen solvers.

inline CMat hermitian_part(const CMat& x) { return 0.5 * (x + x.adjoint()); }

/// max |X - X^H| entry, used by invariant checks.
double hermitian_defect(const CMat& x);

/// A^{1/2} for Hermitian PSD A; negative eigenvalues (round-off) are clamped
/// to zero.
CMat psd_sqrt(const CMat& a);

/// A^{1/2} and A^{-1/2} for Hermitian PD A. Eigenvalues below
/// rel_floor * lambda_max are raised to that floor.
struct HermitianRoots {
  CMat sqrt;
  CMat inv_sqrt;
};
HermitianRoots hpd_roots(const CMat& a, double rel_floor = 1e-14);

/// True when Cholesky of the Hermitian matrix succeeds.
bool is_positive_definite(const CMat& a);

/// log det of a Hermitian PD matrix; throws NotPositiveDefinite otherwise.
double logdet_hpd(const CMat& a);

/// Inverse of a Hermitian PD matrix through Cholesky, symmetrized.
CMat inverse_hpd(const CMat& a);

/// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const CMat& a);

/// Numerical rank of a Hermitian PSD matrix at rel_tol * lambda_max.
int psd_rank(const CMat& a, double rel_tol);

/// Vertically stack matrices that share a column count.
CMat vstack(const std::vector<CMat>& blocks, Eigen::Index cols);

}  // namespace crp
