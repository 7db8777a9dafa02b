#pragma once

#include <vector>

#include "crprecoder/saddle.hpp"
#include "crprecoder/zf.hpp"

namespace crp {

/// Broadcast-side solution mapped back from the MAC saddle point.
struct PrecoderSolution {
  std::vector<CMat> S;  // d_k x d_k covariances in each user's transmit subspace
  std::vector<CMat> T;  // N x L_k precoders, T_k T_k^H = basis_k S_k basis_k^H
  double rate_total = 0.0;  // nats
  RVec per_antenna_power;   // diag(sum_k T_k T_k^H)
  RVec interference;        // tr(G_m sum_k T_k T_k^H G_m^H)
  RVec constraint_values;   // value of every constraint row of the problem
  double feasibility_scale = 1.0;  // common factor applied to restore feasibility
};

/// sum_k log |I + Heff_k S_k Heff_k^H|.
double bc_sum_rate(const MacProblem& prob, const std::vector<CMat>& S);

/// Tall factor with S = Tbar Tbar^H; one column per eigenvalue above
/// rank_tol * lambda_max.
CMat factor_precoder(const CMat& S, double rank_tol = 1e-8);

/// Uplink-to-downlink map S_k = Omega^{-1/2} V U^H Q_k U V^H Omega^{-1/2},
/// U D V^H the compact SVD of Heff_k Omega_k^{-1/2}. Constraint rows are then
/// evaluated; if any exceeds its budget (a finite-precision saddle point) all
/// S_k are scaled by one common factor so every row is met.
PrecoderSolution recover_precoders(const MacProblem& prob, const DualIterate& saddle,
                                   const std::vector<CMat>& pu_channels);

/// Constraint rows sum_k tr(F_i basis_k S_k basis_k^H F_i^H) for given S.
RVec constraint_values(const MacProblem& prob, const std::vector<CMat>& S);


/// Problem, saddle point and recovered precoders of one design.
struct DesignResult {
  MacProblem problem;
  SaddleResult saddle;
  PrecoderSolution solution;
};

/// The proposed ZF design: null-space bases, full constraint set, structured
/// saddle solver, then recovery.
DesignResult design_proposed(const Scenario& scenario, const ChannelSet& channels,
                             const SolverOptions& options = {});

/// Solve + recover for an already assembled problem.
DesignResult solve_design(MacProblem problem, const std::vector<CMat>& pu_channels,
                          const SolverOptions& options);

}  // namespace crp
