#pragma once

#include "crprecoder/duality.hpp"

namespace crp {

/// Suboptimal scheme 1: each user's precoder lies in the joint null space of
/// the other SUs and of every PU, so interference rows vanish and power is
/// allocated by the per-antenna solver without PU rows. Throws InfeasibleZf
/// when N - sum_{i!=k} n_i - sum_m n_pu_m < 1.
DesignResult scheme1_full_zf(const Scenario& scenario, const ChannelSet& channels,
                             const SolverOptions& options = {});

/// Suboptimal scheme 2: T_k = Vbar_k Vdot_k Phi_k^{1/2} with Vdot_k the n_k
/// dominant right singular vectors of Heff_k; Phi_k optimized under the
/// original per-antenna and interference rows mapped through Vbar_k Vdot_k.
DesignResult scheme2_svd_zf(const Scenario& scenario, const ChannelSet& channels,
                            const SolverOptions& options = {});

/// Unknown count of the unreduced linearized KKT system:
/// sum_k n_k^2 + L + 2.
int dense_variable_count(const MacProblem& prob);

/// Newton step of the centering KKT system obtained by assembling its full
/// real Jacobian column by column (Hermitian Q_k directions parameterized by
/// n_k^2 reals) and solving it densely. No block elimination.
NewtonStep dense_newton_step(const MacProblem& prob, const DualIterate& it);

/// Barrier iteration identical to solve_saddle but driven by
/// dense_newton_step. Throws SizeGuard above 200 unknowns.
SaddleResult naive_newton_oracle(const MacProblem& prob, const SolverOptions& options = {});

}  // namespace crp
