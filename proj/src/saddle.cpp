#include "crprecoder/saddle.hpp"

#include <cmath>
#include <string>

#include "crprecoder/errors.hpp"
#include "crprecoder/stein.hpp"

namespace crp {

namespace {

struct UserEval {
  CMat Omega_inv;
  CMat Pi_inv;
  CMat D;     // Pi^{-1} - Omega^{-1}, formed without cancellation
  CMat Hdot;  // Heff Pi^{-1} Heff^H
  double logdet_Pi = 0.0;
  double logdet_Omega = 0.0;
};

struct Eval {
  std::vector<UserEval> users;
  RVec grad;  // d f~ / d psi_i
};

// Row weights psi_{c(r)} for the stacked factor rows.
RVec row_weights(const MacProblem& prob, const RVec& psi) {
  RVec w(prob.row_offset.back());
  for (int i = 0; i < prob.L(); ++i) w.segment(prob.row_offset[i], prob.rows(i)).setConstant(psi(i));
  return w;
}

CMat chol_inverse(const Eigen::LLT<CMat>& llt, Eigen::Index n) {
  return hermitian_part(llt.solve(CMat::Identity(n, n)));
}

// Row and column scalings making every row and column of diag(dr) A diag(dc)
// have unit max-norm (a few Ruiz sweeps; powers of two keep it exact).
void ruiz_equilibrate(const RMat& A, RVec& dr, RVec& dc) {
  dr = RVec::Ones(A.rows());
  dc = RVec::Ones(A.cols());
  RMat S = A;
  for (int sweep = 0; sweep < 8; ++sweep) {
    for (Eigen::Index i = 0; i < S.rows(); ++i) {
      const double m = S.row(i).cwiseAbs().maxCoeff();
      if (m > 0) {
        const double f = std::exp2(-std::round(0.5 * std::log2(m)));
        S.row(i) *= f;
        dr(i) *= f;
      }
    }
    for (Eigen::Index j = 0; j < S.cols(); ++j) {
      const double m = S.col(j).cwiseAbs().maxCoeff();
      if (m > 0) {
        const double f = std::exp2(-std::round(0.5 * std::log2(m)));
        S.col(j) *= f;
        dc(j) *= f;
      }
    }
  }
}

double chol_logdet(const Eigen::LLT<CMat>& llt) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < llt.matrixLLT().rows(); ++i) s += std::log(llt.matrixLLT()(i, i).real());
  return 2.0 * s;
}

Eval evaluate(const MacProblem& prob, const DualIterate& it) {
  if (static_cast<int>(it.Q.size()) != prob.K() || it.psi.size() != prob.L())
    throw Error(ErrorCode::DimensionMismatch, "iterate does not match problem");
  const RVec w = row_weights(prob, it.psi);
  Eval e;
  e.grad = RVec::Zero(prob.L());
  for (int k = 0; k < prob.K(); ++k) {
    const auto ks = static_cast<std::size_t>(k);
    const CMat& F = prob.factors[ks];
    const CMat& H = prob.Heff[ks];
    const CMat Omega = hermitian_part(F.adjoint() * w.asDiagonal() * F);
    const CMat Pi = hermitian_part(Omega + H.adjoint() * it.Q[ks] * H);
    Eigen::LLT<CMat> lo(Omega), lp(Pi);
    if (lo.info() != Eigen::Success || lp.info() != Eigen::Success)
      throw Error(ErrorCode::IllConditioned, "Omega_k or Pi_k not positive definite, user " + std::to_string(k));
    UserEval u;
    u.Omega_inv = chol_inverse(lo, Omega.rows());
    u.Pi_inv = chol_inverse(lp, Pi.rows());
    u.logdet_Omega = chol_logdet(lo);
    u.logdet_Pi = chol_logdet(lp);
    u.Hdot = hermitian_part(H * u.Pi_inv * H.adjoint());
    // Inactive rows push psi_i toward 0 and Omega^{-1}, Pi^{-1} toward
    // O(1/psi_i); their difference is O(1), so use Woodbury instead:
    // Pi^{-1} - Omega^{-1} = -Omega^{-1} H^H (Q^{-1} + H Omega^{-1} H^H)^{-1} H Omega^{-1}.
    Eigen::LLT<CMat> lq(it.Q[ks]);
    if (lq.info() != Eigen::Success) throw Error(ErrorCode::NotPositiveDefinite, "Q_k not positive definite");
    const CMat HOi = H * u.Omega_inv;
    Eigen::LLT<CMat> lm(hermitian_part(chol_inverse(lq, H.rows()) + HOi * H.adjoint()));
    if (lm.info() != Eigen::Success)
      throw Error(ErrorCode::IllConditioned, "Woodbury core not positive definite, user " + std::to_string(k));
    u.D = hermitian_part(-HOi.adjoint() * lm.solve(HOi));
    for (int i = 0; i < prob.L(); ++i) {
      const auto Fi = prob.factor(k, i);
      e.grad(i) += (Fi * u.D * Fi.adjoint()).trace().real();
    }
    e.users.push_back(std::move(u));
  }
  return e;
}

Residual residual_from(const MacProblem& prob, const DualIterate& it, const Eval& e) {
  Residual r;
  auto& p = r.parts;
  double trQ = 0.0;
  for (int k = 0; k < prob.K(); ++k) {
    const auto ks = static_cast<std::size_t>(k);
    const CMat& Q = it.Q[ks];
    Eigen::LLT<CMat> lq(Q);
    if (lq.info() != Eigen::Success)
      throw Error(ErrorCode::NotPositiveDefinite, "Q_k not positive definite");
    const CMat Rk = e.users[ks].Hdot + chol_inverse(lq, Q.rows()) / it.t -
                    it.mu1 * CMat::Identity(Q.rows(), Q.cols());
    p.stationarity.push_back(Rk.norm());
    trQ += Q.trace().real();
  }
  const RVec full = e.grad - (it.t * it.psi).cwiseInverse() + it.mu2 * prob.budget;
  p.u = full.head(prob.num_power_rows);
  p.w = full.tail(prob.L() - prob.num_power_rows);
  p.trace_gap = prob.P - trQ;
  p.psi_gap = prob.P - prob.budget.dot(it.psi);
  r.norm = p.u.norm() + p.w.norm() + std::abs(p.trace_gap) + std::abs(p.psi_gap);
  for (double s : p.stationarity) r.norm += s;
  return r;
}

}  // namespace

bool NewtonStep::is_zero() const {
  if (dmu1 != 0.0 || dmu2 != 0.0 || (dpsi.size() && !dpsi.isZero(0.0))) return false;
  for (const auto& d : dQ)
    if (!d.isZero(0.0)) return false;
  return true;
}

void SolverOptions::validate() const {
  auto bad = [](const char* m) { throw Error(ErrorCode::InvalidArgument, m); };
  if (!(alpha > 0.0 && alpha < 0.5)) bad("alpha must lie in (0, 0.5)");
  if (!(beta > 0.0 && beta < 1.0)) bad("beta must lie in (0, 1)");
  if (!(t0 > 0.0)) bad("t0 must be positive");
  if (!(gamma >= 1.0)) bad("gamma must be >= 1");
  if (!(eps_residual > 0.0) || !(eps_gap > 0.0)) bad("tolerances must be positive");
  if (max_inner < 1 || max_outer < 1) bad("iteration caps must be positive");
}

int ConvergenceTrace::inner_iterations() const {
  int n = 0;
  for (const auto& r : rows)
    if (r.step > 0.0) ++n;
  return n;
}

DualIterate initial_iterate(const MacProblem& prob, double t0) {
  DualIterate it;
  for (int k = 0; k < prob.K(); ++k) it.Q.push_back(CMat::Identity(prob.n(k), prob.n(k)));
  it.psi = RVec::Ones(prob.L());
  it.mu1 = 1.0;
  it.mu2 = 1.0;
  it.t = t0;
  return it;
}

double mac_objective(const MacProblem& prob, const DualIterate& it) {
  const Eval e = evaluate(prob, it);
  double f = 0.0;
  for (const auto& u : e.users) f += u.logdet_Pi - u.logdet_Omega;
  return f;
}

Residual kkt_residual(const MacProblem& prob, const DualIterate& it) {
  return residual_from(prob, it, evaluate(prob, it));
}

NewtonStep assemble_newton(const MacProblem& prob, const DualIterate& it) {
  const Eval e = evaluate(prob, it);
  const int K = prob.K(), L = prob.L();
  const double t = it.t;

  // Reduced-system ingredients, accumulated over users as complex numbers so
  // the imaginary residue can be checked before it is dropped.
  CMat phi = CMat::Zero(L, L);       // Hessian of f~ in psi
  CMat gam = CMat::Zero(L, L + 2);   // beta/Xi quadratic forms of sigma^(j)
  CMat chi = CMat::Zero(1, L + 2);   // traces of sigma^(j)

  NewtonStep step;
  step.sigma.resize(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    const UserEval& u = e.users[ks];
    const CMat& Q = it.Q[ks];
    const CMat& F = prob.factors[ks];
    const CMat Q2 = Q * Q;
    const SteinFactor sf(Q, u.Hdot, t);

    const CMat Xi = prob.Heff[ks] * u.Pi_inv * F.adjoint();  // n_k x rows
    const CMat QXi = Q * Xi;

    auto& sig = step.sigma[ks];
    sig.resize(static_cast<std::size_t>(L + 2));
    // t Q Hdot Q + Q - t mu1 Q^2 written as t Q R_Q Q: the expanded sum cancels
    // O(t Q^2) terms and loses the near-null directions of Q.
    Eigen::LLT<CMat> lq(Q);
    const CMat RQ = u.Hdot + chol_inverse(lq, Q.rows()) / t - it.mu1 * CMat::Identity(Q.rows(), Q.cols());
    sig[0] = hermitian_part(sf.solve(t * Q * hermitian_part(RQ) * Q));
    for (int i = 0; i < L; ++i) {
      const auto Xq = QXi.middleCols(prob.row_offset[i], prob.rows(i));
      sig[static_cast<std::size_t>(i + 1)] = hermitian_part(sf.solve(-t * Xq * Xq.adjoint()));
    }
    sig[static_cast<std::size_t>(L + 1)] = hermitian_part(sf.solve(-t * Q2));

    // |Bp|^2 - |Bo|^2 = <Bp - Bo, Bp + Bo> blockwise, with Bp - Bo = F D F^H.
    const CMat Bd = F * u.D * F.adjoint();
    const CMat Bs = F * (u.Pi_inv + u.Omega_inv) * F.adjoint();
    for (int i = 0; i < L; ++i) {
      const Eigen::Index ri = prob.row_offset[i], ni = prob.rows(i);
      for (int j = 0; j < L; ++j) {
        const Eigen::Index rj = prob.row_offset[j], nj = prob.rows(j);
        phi(i, j) += Bd.block(ri, rj, ni, nj).cwiseProduct(Bs.block(ri, rj, ni, nj).conjugate()).sum().real();
      }
      const auto Xi_i = Xi.middleCols(ri, ni);
      for (int j = 0; j < L + 2; ++j)
        gam(i, j) += (Xi_i.adjoint() * sig[static_cast<std::size_t>(j)] * Xi_i).trace();
    }
    for (int j = 0; j < L + 2; ++j) chi(0, j) += sig[static_cast<std::size_t>(j)].trace();
  }

  double max_imag = 0.0;
  auto real_of = [&max_imag](cplx z) {
    max_imag = std::max(max_imag, std::abs(z.imag()) / (1.0 + std::abs(z.real())));
    return z.real();
  };

  const int n = L + 2;
  RMat A = RMat::Zero(n, n);
  RVec b(n);
  const RVec& p = prob.budget;
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < L; ++j) A(i, j) = t * (real_of(phi(i, j)) + real_of(gam(i, j + 1)));
    A(i, i) -= 1.0 / (it.psi(i) * it.psi(i));
    A(i, L) = t * real_of(gam(i, L + 1));
    A(i, L + 1) = -t * p(i);
    b(i) = t * (e.grad(i) - real_of(gam(i, 0))) + t * p(i) * it.mu2 - 1.0 / it.psi(i);
  }
  double trace_Q_sigma0 = 0.0;
  for (int k = 0; k < K; ++k) trace_Q_sigma0 += it.Q[static_cast<std::size_t>(k)].trace().real();
  trace_Q_sigma0 += real_of(chi(0, 0));
  for (int j = 0; j < L; ++j) A(L, j) = real_of(chi(0, j + 1));
  A(L, L) = real_of(chi(0, L + 1));
  b(L) = prob.P - trace_Q_sigma0;
  A.row(L + 1).head(L) = p.transpose();
  b(L + 1) = prob.P - p.dot(it.psi);

  // Inactive rows drive psi_i toward 0, so the 1/psi_i^2 diagonal can exceed
  // the other entries by many orders; equilibrate before judging singularity.
  RVec dr, dc;
  ruiz_equilibrate(A, dr, dc);
  const RMat As = dr.asDiagonal() * A * dc.asDiagonal();
  Eigen::PartialPivLU<RMat> lu(As);
  if (!(lu.rcond() > 1e-14)) throw Error(ErrorCode::SingularKkt, "reduced KKT matrix is singular");
  const RVec dx = dc.asDiagonal() * lu.solve(dr.asDiagonal() * b);

  step.dpsi = dx.head(L);
  step.dmu1 = dx(L);
  step.dmu2 = dx(L + 1);
  for (int k = 0; k < K; ++k) {
    const auto& sig = step.sigma[static_cast<std::size_t>(k)];
    CMat dQ = sig[0] + step.dmu1 * sig[static_cast<std::size_t>(L + 1)];
    for (int i = 0; i < L; ++i) dQ += step.dpsi(i) * sig[static_cast<std::size_t>(i + 1)];
    step.dQ.push_back(hermitian_part(dQ));
  }
  step.A = std::move(A);
  step.b = std::move(b);
  step.max_imag_entry = max_imag;
  return step;
}

DualIterate advance(const DualIterate& it, const NewtonStep& step, double s) {
  DualIterate next = it;
  for (std::size_t k = 0; k < next.Q.size(); ++k) next.Q[k] = hermitian_part(it.Q[k] + s * step.dQ[k]);
  next.psi = it.psi + s * step.dpsi;
  next.mu1 = it.mu1 + s * step.dmu1;
  next.mu2 = it.mu2 + s * step.dmu2;
  return next;
}

double line_search(const MacProblem& prob, const DualIterate& it, const NewtonStep& step,
                   const SolverOptions& options) {
  if (step.is_zero()) return 1.0;
  const double r0 = kkt_residual(prob, it).norm;
  for (double s = 1.0; s >= 1e-12; s *= options.beta) {
    const DualIterate next = advance(it, step, s);
    if (next.psi.minCoeff() <= 0.0) continue;
    bool pd = true;
    for (const auto& Q : next.Q) pd = pd && is_positive_definite(Q);
    if (!pd) continue;
    double r1 = 0.0;
    try {
      r1 = kkt_residual(prob, next).norm;
    } catch (const Error&) {
      continue;
    }
    if (std::isfinite(r1) && r1 <= (1.0 - options.alpha * s) * r0) return s;
  }
  throw Error(ErrorCode::LineSearchStalled, "step size fell below 1e-12");
}

SaddleResult solve_barrier(const MacProblem& prob, const SolverOptions& options,
                           const StepFunction& step_fn, ConvergenceTrace* partial) {
  options.validate();
  SaddleResult out;
  DualIterate it = initial_iterate(prob, options.t0);
  auto& trace = out.trace;
  const double m_total = prob.barrier_multiplicity();
  int iter = 0;
  try {
    for (int outer = 0;; ++outer) {
      if (outer >= options.max_outer)
        throw Error(ErrorCode::MaxIterations, "outer iteration cap reached");
      for (int inner = 0;; ++inner) {
        const Residual res = kkt_residual(prob, it);
        TraceRow row{iter, outer, it.t, res.norm, 0.0, mac_objective(prob, it)};
        if (res.norm < options.eps_residual) {
          trace.rows.push_back(row);
          break;
        }
        if (inner >= options.max_inner)
          throw Error(ErrorCode::MaxIterations, "inner iteration cap reached");
        const NewtonStep step = step_fn(prob, it);
        row.step = line_search(prob, it, step, options);
        trace.rows.push_back(row);
        it = advance(it, step, row.step);
        ++iter;
      }
      trace.gap.push_back(m_total / it.t);
      if (trace.gap.back() <= options.eps_gap || options.gamma == 1.0) break;
      it.t *= options.gamma;
    }
  } catch (const Error&) {
    if (partial) *partial = trace;
    throw;
  }
  out.objective = mac_objective(prob, it);
  out.iterate = std::move(it);
  if (partial) *partial = out.trace;
  return out;
}

SaddleResult solve_saddle(const MacProblem& prob, const SolverOptions& options,
                          ConvergenceTrace* partial) {
  return solve_barrier(prob, options, assemble_newton, partial);
}

}  // namespace crp
