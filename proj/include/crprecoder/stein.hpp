#pragma once

#include "crprecoder/linalg.hpp"

namespace crp {

/// Factorization of the Stein operator X -> t (Q Hdot) X (Hdot Q) + X for
/// Hermitian PD Q and Hermitian PSD Hdot.
///
/// With X = Q^{1/2} Y Q^{1/2} and Q^{1/2} Hdot Q^{1/2} = U D U^H the operator
/// becomes diagonal in the basis U: (U^H Y U)_{ij} (1 + t d_i d_j). Every
/// denominator is >= 1, so one eigendecomposition serves any number of
/// right-hand sides at O(n^3) each.
class SteinFactor {
 public:
  SteinFactor(const CMat& Q, const CMat& Hdot, double t);

  /// Solves t Q Hdot X Hdot Q + X = B. B must be n x n; the result is
  /// Hermitian when B is.
  CMat solve(const CMat& B) const;

  Eigen::Index size() const { return left_.rows(); }
  double t() const { return t_; }
  /// 1 + t d_i d_j.
  const RMat& denominators() const { return denom_; }

 private:
  double t_;
  CMat left_;   // Q^{1/2} U
  CMat right_;  // U^H Q^{-1/2}
  RMat denom_;
};

/// Convenience wrapper matching the factor/solve split.
inline SteinFactor stein_factorize(const CMat& Q, const CMat& Hdot, double t) {
  return SteinFactor(Q, Hdot, t);
}

inline CMat stein_solve(const SteinFactor& factor, const CMat& B) { return factor.solve(B); }

}  // namespace crp
