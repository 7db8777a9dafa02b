#include "crprecoder/baselines.hpp"

#include <string>

#include "crprecoder/errors.hpp"

namespace crp {

DesignResult scheme1_full_zf(const Scenario& scenario, const ChannelSet& channels,
                             const SolverOptions& options) {
  scenario.validate();
  std::vector<CMat> basis;
  for (int k = 0; k < scenario.K(); ++k) {
    std::vector<CMat> blocks{stack_other_channels(channels, k)};
    for (const auto& G : channels.G) blocks.push_back(G);
    const CMat A = vstack(blocks, scenario.N);
    CMat V = null_space_basis(A);
    if (V.cols() < 1)
      throw Error(ErrorCode::InfeasibleZf, "joint SU/PU null space empty for user " + std::to_string(k));
    basis.push_back(std::move(V));
  }
  MacProblem prob = make_mac_problem(basis, channels.H, {}, scenario.antenna_powers(), {},
                                     scenario.P_total, scenario.power_mode);
  return solve_design(std::move(prob), channels.G, options);
}

DesignResult scheme2_svd_zf(const Scenario& scenario, const ChannelSet& channels,
                            const SolverOptions& options) {
  const ZfContext ctx = build_zf_context(scenario, channels);
  std::vector<CMat> basis;
  for (int k = 0; k < ctx.K(); ++k) {
    const auto ks = static_cast<std::size_t>(k);
    Eigen::JacobiSVD<CMat> svd(ctx.Heff[ks], Eigen::ComputeThinV);
    basis.push_back(ctx.Vbar[ks] * svd.matrixV());  // N x n_k
  }
  MacProblem prob = make_mac_problem(basis, channels.H, channels.G, scenario.antenna_powers(),
                                     scenario.I, scenario.P_total, scenario.power_mode);
  return solve_design(std::move(prob), channels.G, options);
}

int dense_variable_count(const MacProblem& prob) {
  int n = prob.L() + 2;
  for (int k = 0; k < prob.K(); ++k) n += prob.n(k) * prob.n(k);
  return n;
}

namespace {

// Real coordinates of an n x n Hermitian matrix: the diagonal, then real and
// imaginary parts of the strict upper triangle.
int herm_dim(Eigen::Index n) { return static_cast<int>(n * n); }

void herm_to_real(const CMat& X, RVec& out, Eigen::Index at) {
  const Eigen::Index n = X.rows();
  for (Eigen::Index a = 0; a < n; ++a) out(at++) = X(a, a).real();
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a + 1; b < n; ++b) {
      out(at++) = X(a, b).real();
      out(at++) = X(a, b).imag();
    }
}

CMat herm_basis(Eigen::Index n, int index) {
  CMat E = CMat::Zero(n, n);
  if (index < n) {
    E(index, index) = 1.0;
    return E;
  }
  int c = static_cast<int>(n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a + 1; b < n; ++b) {
      if (c == index) {
        E(a, b) = 1.0;
        E(b, a) = 1.0;
        return E;
      }
      if (c + 1 == index) {
        E(a, b) = cplx(0.0, 1.0);
        E(b, a) = cplx(0.0, -1.0);
        return E;
      }
      c += 2;
    }
  return E;
}

CMat herm_from_real(const RVec& x, Eigen::Index at, Eigen::Index n) {
  CMat X = CMat::Zero(n, n);
  for (int i = 0; i < herm_dim(n); ++i) X += x(at + i) * herm_basis(n, i);
  return X;
}

}  // namespace

NewtonStep dense_newton_step(const MacProblem& prob, const DualIterate& it) {
  const int K = prob.K(), L = prob.L();
  const double t = it.t;
  const int nvar = dense_variable_count(prob);

  // Offsets of each block of unknowns / equations.
  std::vector<int> q_at;
  int at = 0;
  for (int k = 0; k < K; ++k) {
    q_at.push_back(at);
    at += herm_dim(prob.n(k));
  }
  const int psi_at = at, mu1_at = at + L, mu2_at = at + L + 1;

  // Current point.
  RVec w(prob.row_offset.back());
  for (int i = 0; i < L; ++i) w.segment(prob.row_offset[i], prob.rows(i)).setConstant(it.psi(i));
  std::vector<CMat> Om_inv, Pi_inv, Q_inv;
  for (int k = 0; k < K; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    const CMat& F = prob.factors[ks];
    const CMat Om = F.adjoint() * w.asDiagonal() * F;
    const CMat Pi = Om + prob.Heff[ks].adjoint() * it.Q[ks] * prob.Heff[ks];
    Om_inv.push_back(inverse_hpd(hermitian_part(Om)));
    Pi_inv.push_back(inverse_hpd(hermitian_part(Pi)));
    Q_inv.push_back(inverse_hpd(it.Q[ks]));
  }

  // Residual F(x).
  RVec Fx = RVec::Zero(nvar);
  RVec grad = RVec::Zero(L);
  double trQ = 0.0;
  for (int k = 0; k < K; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    const CMat& H = prob.Heff[ks];
    const CMat R = H * Pi_inv[ks] * H.adjoint() + Q_inv[ks] / t -
                   it.mu1 * CMat::Identity(prob.n(k), prob.n(k));
    herm_to_real(hermitian_part(R), Fx, q_at[ks]);
    for (int i = 0; i < L; ++i) {
      const auto Fi = prob.factor(k, i);
      grad(i) += (Fi * (Pi_inv[ks] - Om_inv[ks]) * Fi.adjoint()).trace().real();
    }
    trQ += it.Q[ks].trace().real();
  }
  for (int i = 0; i < L; ++i)
    Fx(psi_at + i) = grad(i) - 1.0 / (t * it.psi(i)) + it.mu2 * prob.budget(i);
  Fx(mu1_at) = trQ - prob.P;
  Fx(mu2_at) = prob.budget.dot(it.psi) - prob.P;

  // Jacobian, one column per real unknown.
  RMat J = RMat::Zero(nvar, nvar);
  RVec col(nvar);
  for (int k = 0; k < K; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    const CMat& H = prob.Heff[ks];
    const Eigen::Index n = prob.n(k);
    for (int e = 0; e < herm_dim(n); ++e) {
      const CMat E = herm_basis(n, e);
      col.setZero();
      const CMat dPi = H.adjoint() * E * H;
      const CMat dR = -H * Pi_inv[ks] * dPi * Pi_inv[ks] * H.adjoint() - Q_inv[ks] * E * Q_inv[ks] / t;
      herm_to_real(hermitian_part(dR), col, q_at[ks]);
      for (int i = 0; i < L; ++i) {
        const auto Fi = prob.factor(k, i);
        col(psi_at + i) = -(Fi * Pi_inv[ks] * dPi * Pi_inv[ks] * Fi.adjoint()).trace().real();
      }
      col(mu1_at) = E.trace().real();
      J.col(q_at[ks] + e) = col;
    }
  }
  for (int j = 0; j < L; ++j) {
    col.setZero();
    for (int k = 0; k < K; ++k) {
      const auto ks = static_cast<std::size_t>(k);
      const auto Fj = prob.factor(k, j);
      const CMat C = Fj.adjoint() * Fj;
      const CMat& H = prob.Heff[ks];
      herm_to_real(hermitian_part(-H * Pi_inv[ks] * C * Pi_inv[ks] * H.adjoint()), col, q_at[ks]);
      for (int i = 0; i < L; ++i) {
        const auto Fi = prob.factor(k, i);
        col(psi_at + i) += -(Fi * Pi_inv[ks] * C * Pi_inv[ks] * Fi.adjoint()).trace().real() +
                           (Fi * Om_inv[ks] * C * Om_inv[ks] * Fi.adjoint()).trace().real();
      }
    }
    col(psi_at + j) += 1.0 / (t * it.psi(j) * it.psi(j));
    col(mu2_at) = prob.budget(j);
    J.col(psi_at + j) = col;
  }
  col.setZero();
  for (int k = 0; k < K; ++k)
    herm_to_real(-CMat::Identity(prob.n(k), prob.n(k)), col, q_at[static_cast<std::size_t>(k)]);
  J.col(mu1_at) = col;
  col.setZero();
  col.segment(psi_at, L) = prob.budget;
  J.col(mu2_at) = col;

  Eigen::FullPivLU<RMat> lu(J);
  if (!lu.isInvertible()) throw Error(ErrorCode::SingularKkt, "dense KKT Jacobian is singular");
  const RVec dx = lu.solve(-Fx);

  NewtonStep step;
  for (int k = 0; k < K; ++k)
    step.dQ.push_back(herm_from_real(dx, q_at[static_cast<std::size_t>(k)], prob.n(k)));
  step.dpsi = dx.segment(psi_at, L);
  step.dmu1 = dx(mu1_at);
  step.dmu2 = dx(mu2_at);
  return step;
}

SaddleResult naive_newton_oracle(const MacProblem& prob, const SolverOptions& options) {
  if (dense_variable_count(prob) > 200)
    throw Error(ErrorCode::SizeGuard, "dense oracle limited to 200 unknowns, problem has " +
                                          std::to_string(dense_variable_count(prob)));
  return solve_barrier(prob, options, dense_newton_step);
}

}  // namespace crp
