#pragma once

#include <functional>
#include <vector>

#include "crprecoder/problem.hpp"

namespace crp {

/// Primal/dual iterate of the barrier method: MAC covariances Q_k, multipliers
/// psi = (eta, lambda) for the constraint rows, the equality multipliers mu1
/// (sum tr Q_k = P) and mu2 (p^T psi = P), and the barrier parameter t.
struct DualIterate {
  std::vector<CMat> Q;
  RVec psi;
  double mu1 = 1.0;
  double mu2 = 1.0;
  double t = 1.0;
};

/// Q_k = I, psi = 1, mu1 = mu2 = 1 at barrier parameter t0.
DualIterate initial_iterate(const MacProblem& prob, double t0);

struct NewtonStep {
  std::vector<CMat> dQ;
  RVec dpsi;
  double dmu1 = 0.0;
  double dmu2 = 0.0;
  // Block-elimination pieces; empty for steps computed by other means.
  // sigma[k][0] is the constant part, sigma[k][1 + i] multiplies dpsi_i and
  // sigma[k][L + 1] multiplies dmu1.
  std::vector<std::vector<CMat>> sigma;
  RMat A;                   // reduced (L+2) x (L+2) system
  RVec b;
  double max_imag_entry = 0.0;  // relative imaginary residue dropped from A

  bool is_zero() const;
};

struct SolverOptions {
  double t0 = 50.0;
  double gamma = 10.0;  // 1 keeps t fixed: a single centering step
  double eps_residual = 1e-5;
  double eps_gap = 1e-4;
  double alpha = 0.01;
  double beta = 0.5;
  int max_inner = 200;
  int max_outer = 30;

  void validate() const;
};

struct TraceRow {
  int iter = 0;  // global inner-iteration counter
  int outer = 0;
  double t = 0.0;
  double residual = 0.0;  // at the start of the iteration
  double step = 0.0;      // accepted step size, 0 on the final row of a centering
  double objective = 0.0;
};

struct ConvergenceTrace {
  std::vector<TraceRow> rows;
  std::vector<double> gap;  // m_total / t after each centering
  int inner_iterations() const;
};

struct ResidualParts {
  std::vector<double> stationarity;  // ||Hdot_k + Q_k^{-1}/t - mu1 I||_F per user
  RVec u;                            // power-row stationarity
  RVec w;                            // interference-row stationarity
  double trace_gap = 0.0;            // P - sum tr Q_k
  double psi_gap = 0.0;              // P - p^T psi
};

struct Residual {
  double norm = 0.0;
  ResidualParts parts;
};

/// sum_k log |Omega_k + Heff_k^H Q_k Heff_k| / |Omega_k|.
double mac_objective(const MacProblem& prob, const DualIterate& it);

/// Residual norm of the centering KKT system at it.t. Throws IllConditioned
/// when some Omega_k or Pi_k is not positive definite.
Residual kkt_residual(const MacProblem& prob, const DualIterate& it);

/// Newton step of the centering KKT system through block elimination: one
/// Stein factorization per user, L + 2 Stein solves per user and a dense
/// (L+2) x (L+2) real system.
NewtonStep assemble_newton(const MacProblem& prob, const DualIterate& it);

/// it + s * step (Hermitian parts of the Q updates).
DualIterate advance(const DualIterate& it, const NewtonStep& step, double s);

/// Backtracking on the residual norm keeping Q_k > 0 and psi > 0. Throws
/// LineSearchStalled once s drops below 1e-12.
double line_search(const MacProblem& prob, const DualIterate& it, const NewtonStep& step,
                   const SolverOptions& options);

struct SaddleResult {
  DualIterate iterate;
  ConvergenceTrace trace;
  double objective = 0.0;
};

using StepFunction = std::function<NewtonStep(const MacProblem&, const DualIterate&)>;

/// Infeasible-start barrier iteration with a pluggable Newton step.
/// On failure the thrown Error is accompanied by `partial` (when non-null)
/// holding the trace so far.
SaddleResult solve_barrier(const MacProblem& prob, const SolverOptions& options,
                           const StepFunction& step_fn, ConvergenceTrace* partial = nullptr);

/// The structured solver: solve_barrier with assemble_newton.
SaddleResult solve_saddle(const MacProblem& prob, const SolverOptions& options = {},
                          ConvergenceTrace* partial = nullptr);

}  // namespace crp
