#include "crprecoder/problem.hpp"

#include <numeric>

#include "crprecoder/errors.hpp"

namespace crp {

int MacProblem::barrier_multiplicity() const {
  int m = L();
  for (int k = 0; k < K(); ++k) m += n(k);
  return m;
}

MacProblem make_mac_problem(const std::vector<CMat>& basis, const std::vector<CMat>& su_channels,
                            const std::vector<CMat>& pu_channels,
                            const std::vector<double>& antenna_powers,
                            const std::vector<double>& thresholds, double P_total,
                            PowerMode power_mode) {
  if (basis.size() != su_channels.size() || basis.empty())
    throw Error(ErrorCode::DimensionMismatch, "one transmit basis per user is required");
  if (pu_channels.size() != thresholds.size())
    throw Error(ErrorCode::DimensionMismatch, "one threshold per PU channel is required");
  const Eigen::Index N = basis.front().rows();

  // Constraint factors in antenna space.
  std::vector<CMat> F;
  std::vector<double> budget;
  if (power_mode == PowerMode::PerAntenna) {
    if (static_cast<Eigen::Index>(antenna_powers.size()) != N)
      throw Error(ErrorCode::DimensionMismatch, "need one power per antenna");
    for (Eigen::Index i = 0; i < N; ++i) {
      F.push_back(CMat::Identity(N, N).row(i));
      budget.push_back(antenna_powers[static_cast<std::size_t>(i)]);
    }
  } else {
    F.push_back(CMat::Identity(N, N));
    budget.push_back(P_total);
  }
  const int num_power_rows = static_cast<int>(F.size());
  for (std::size_t m = 0; m < pu_channels.size(); ++m) {
    if (pu_channels[m].cols() != N) throw Error(ErrorCode::DimensionMismatch, "PU channel width");
    F.push_back(pu_channels[m]);
    budget.push_back(thresholds[m]);
  }

  MacProblem prob;
  prob.N = static_cast<int>(N);
  prob.P = P_total;
  prob.num_power_rows = num_power_rows;
  prob.budget = Eigen::Map<const RVec>(budget.data(), static_cast<Eigen::Index>(budget.size()));
  prob.row_offset.push_back(0);
  for (const auto& f : F) prob.row_offset.push_back(prob.row_offset.back() + f.rows());
  const CMat F_all = vstack(F, N);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    if (basis[k].rows() != N || su_channels[k].cols() != N)
      throw Error(ErrorCode::DimensionMismatch, "user channel/basis width");
    prob.basis.push_back(basis[k]);
    prob.Heff.push_back(su_channels[k] * basis[k]);
    prob.factors.push_back(F_all * basis[k]);
  }
  return prob;
}

MacProblem build_mac_problem(const ZfContext& ctx, const Scenario& scenario,
                             const ChannelSet& channels) {
  return make_mac_problem(ctx.Vbar, channels.H, channels.G, scenario.antenna_powers(), scenario.I,
                          scenario.P_total, scenario.power_mode);
}

MacProblem build_spc_problem(const ZfContext& ctx, const Scenario& scenario,
                             const ChannelSet& channels) {
  return make_mac_problem(ctx.Vbar, channels.H, channels.G, scenario.antenna_powers(), scenario.I,
                          scenario.P_total, PowerMode::SumPower);
}

}  // namespace crp
