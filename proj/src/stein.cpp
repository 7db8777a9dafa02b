#include "crprecoder/stein.hpp"

#include "crprecoder/errors.hpp"

namespace crp {

SteinFactor::SteinFactor(const CMat& Q, const CMat& Hdot, double t) : t_(t) {
  if (Q.rows() != Q.cols() || Hdot.rows() != Q.rows() || Hdot.cols() != Q.rows())
    throw Error(ErrorCode::DimensionMismatch, "Stein system needs square Q and Hdot of equal size");
  if (!(t >= 0.0)) throw Error(ErrorCode::InvalidArgument, "Stein parameter t must be >= 0");
  if (!is_positive_definite(Q))
    throw Error(ErrorCode::NotPositiveDefinite, "Stein system requires Q > 0");
  const HermitianRoots roots = hpd_roots(Q);
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(roots.sqrt * Hdot * roots.sqrt));
  const RVec d = es.eigenvalues().cwiseMax(0.0);
  left_ = roots.sqrt * es.eigenvectors();
  right_ = es.eigenvectors().adjoint() * roots.inv_sqrt;
  denom_ = (RMat::Ones(d.size(), d.size()) + t * d * d.transpose());
}

CMat SteinFactor::solve(const CMat& B) const {
  if (B.rows() != size() || B.cols() != size())
    throw Error(ErrorCode::DimensionMismatch, "Stein right-hand side has the wrong size");
  CMat Bt = right_ * B * right_.adjoint();
  Bt.array() /= denom_.array().cast<cplx>();
  return left_ * Bt * left_.adjoint();
}

}  // namespace crp
