#include "crprecoder/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "crprecoder/errors.hpp"

namespace crp {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InfeasibleZf: return "InfeasibleZf";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::SingularKkt: return "SingularKkt";
    case ErrorCode::LineSearchStalled: return "LineSearchStalled";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::SizeGuard: return "SizeGuard";
  }
  return "Unknown";
}

double hermitian_defect(const CMat& x) {
  if (x.size() == 0) return 0.0;
  return (x - x.adjoint()).cwiseAbs().maxCoeff();
}

CMat psd_sqrt(const CMat& a) {
  if (a.size() == 0) return a;
  Eigen::SelfAdjointEigenSolver<CMat> es(a);
  RVec d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return hermitian_part(es.eigenvectors() * d.asDiagonal() *
                        es.eigenvectors().adjoint());
}

HermitianRoots hpd_roots(const CMat& a, double rel_floor) {
  Eigen::SelfAdjointEigenSolver<CMat> es(a);
  const RVec& ev = es.eigenvalues();
  const double top = ev.size() ? ev.maxCoeff() : 0.0;
  if (!(top > 0.0)) {
    throw Error(ErrorCode::NotPositiveDefinite, "matrix has no positive eigenvalue");
  }
  RVec d = ev.cwiseMax(rel_floor * top);
  const CMat& u = es.eigenvectors();
  HermitianRoots r;
  r.sqrt = hermitian_part(u * d.cwiseSqrt().asDiagonal() * u.adjoint());
  r.inv_sqrt = hermitian_part(u * d.cwiseSqrt().cwiseInverse().asDiagonal() * u.adjoint());
  return r;
}

bool is_positive_definite(const CMat& a) {
  Eigen::LLT<CMat> llt(a);
  return llt.info() == Eigen::Success;
}

double logdet_hpd(const CMat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::LLT<CMat> llt(a);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite, "log det of a non-PD matrix");
  }
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) s += std::log(llt.matrixLLT()(i, i).real());
  return 2.0 * s;
}

CMat inverse_hpd(const CMat& a) {
  Eigen::LLT<CMat> llt(a);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite, "inverse of a non-PD matrix");
  }
  return hermitian_part(llt.solve(CMat::Identity(a.rows(), a.cols())));
}

double min_eigenvalue(const CMat& a) {
  Eigen::SelfAdjointEigenSolver<CMat> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

int psd_rank(const CMat& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<CMat> es(a, Eigen::EigenvaluesOnly);
  const RVec& ev = es.eigenvalues();
  const double top = ev.maxCoeff();
  if (top <= 0.0) return 0;
  return static_cast<int>((ev.array() > rel_tol * top).count());
}

CMat vstack(const std::vector<CMat>& blocks, Eigen::Index cols) {
  Eigen::Index rows = 0;
  for (const auto& b : blocks) {
    if (b.cols() != cols && b.rows() > 0) throw Error(ErrorCode::DimensionMismatch, "vstack column mismatch");
    rows += b.rows();
  }
  CMat out(rows, cols);
  Eigen::Index r = 0;
  for (const auto& b : blocks) {
    out.middleRows(r, b.rows()) = b;
    r += b.rows();
  }
  return out;
}

}  // namespace crp
