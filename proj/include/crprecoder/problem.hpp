#pragma once

#include <vector>

#include "crprecoder/channels.hpp"
#include "crprecoder/zf.hpp"

namespace crp {

/// Data of the convex-concave MAC problem that the saddle solver works on.
///
/// Each user k transmits in the column span of basis[k] (N x d_k) and sees
/// the effective channel Heff[k] = H_k basis[k]. Every linear constraint i of
/// the broadcast problem has the form sum_k tr(F_i basis_k S_k basis_k^H F_i^H)
/// <= budget[i]; the projected factors F_i basis_k are stored stacked per user
/// in factors[k], constraint i occupying rows [row_offset[i], row_offset[i+1]).
///
/// The leading `num_power_rows` constraints are transmit-power rows (one per
/// antenna under PAPC, a single identity row under SPC); the remaining ones
/// are primary-user interference rows.
struct MacProblem {
  std::vector<CMat> basis;
  std::vector<CMat> Heff;
  std::vector<CMat> factors;
  std::vector<Eigen::Index> row_offset;  // size L + 1
  RVec budget;                           // p, size L
  int num_power_rows = 0;
  double P = 1.0;  // level of sum tr(Q_k) = P and p^T psi = P
  int N = 0;       // antenna-space dimension

  int K() const { return static_cast<int>(Heff.size()); }
  int L() const { return static_cast<int>(budget.size()); }
  int n(int k) const { return static_cast<int>(Heff[static_cast<std::size_t>(k)].rows()); }
  int d(int k) const { return static_cast<int>(Heff[static_cast<std::size_t>(k)].cols()); }
  Eigen::Index rows(int i) const { return row_offset[i + 1] - row_offset[i]; }

  /// F_i basis_k.
  auto factor(int k, int i) const {
    return factors[static_cast<std::size_t>(k)].middleRows(row_offset[i], rows(i));
  }

  /// Barrier multiplicity sum_k n_k + L; the gap estimate is this over t.
  int barrier_multiplicity() const;
};

/// Builds the problem for arbitrary per-user transmit subspaces. `power_mode`
/// selects one row per antenna (budgets `antenna_powers`) or a single sum-power
/// row (budget P_total). Interference rows come from `pu_channels` and
/// `thresholds`.
MacProblem make_mac_problem(const std::vector<CMat>& basis, const std::vector<CMat>& su_channels,
                            const std::vector<CMat>& pu_channels,
                            const std::vector<double>& antenna_powers,
                            const std::vector<double>& thresholds, double P_total,
                            PowerMode power_mode);

/// The proposed design: subspaces are the ZF null-space bases, constraint
/// layout taken from scenario.power_mode.
MacProblem build_mac_problem(const ZfContext& ctx, const Scenario& scenario,
                             const ChannelSet& channels);

/// Sum-power layout: psi = [eta; lambda], Lambda = eta I + sum lambda_m G_m^H G_m,
/// p = [P; I]. Same as build_mac_problem with PowerMode::SumPower.
MacProblem build_spc_problem(const ZfContext& ctx, const Scenario& scenario,
                             const ChannelSet& channels);

}  // namespace crp
