#include "crprecoder/zf.hpp"

#include <algorithm>
#include <limits>

#include "crprecoder/errors.hpp"

namespace crp {

namespace {

int numerical_rank(const Eigen::JacobiSVD<CMat>& svd, Eigen::Index p, Eigen::Index n) {
  const RVec& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double tau =
      static_cast<double>(std::max(p, n)) * std::numeric_limits<double>::epsilon() * sv(0);
  return static_cast<int>((sv.array() > tau).count());
}

}  // namespace

CMat stack_other_channels(const ChannelSet& channels, int k) {
  const int K = static_cast<int>(channels.H.size());
  if (k < 0 || k >= K) throw Error(ErrorCode::InvalidArgument, "user index out of range");
  const Eigen::Index N = channels.H[static_cast<std::size_t>(k)].cols();
  std::vector<CMat> others;
  for (int j = 0; j < K; ++j)
    if (j != k) others.push_back(channels.H[static_cast<std::size_t>(j)]);
  return vstack(others, N);
}

CMat null_space_basis(const CMat& a) {
  const Eigen::Index p = a.rows(), n = a.cols();
  if (p == 0) return CMat::Identity(n, n);
  if (p >= n) throw Error(ErrorCode::InfeasibleZf, "stacked channel has no nontrivial kernel");
  Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeFullV);
  const int rank = numerical_rank(svd, p, n);
  return svd.matrixV().rightCols(n - rank);
}

ZfContext build_zf_context(const Scenario& scenario, const ChannelSet& channels) {
  scenario.validate();
  const int K = scenario.K();
  if (static_cast<int>(channels.H.size()) != K || static_cast<int>(channels.G.size()) != scenario.M())
    throw Error(ErrorCode::DimensionMismatch, "channel set does not match scenario");
  ZfContext ctx;
  const int nr = scenario.total_rx();
  for (int k = 0; k < K; ++k) {
    const int want = scenario.N - (nr - scenario.n[static_cast<std::size_t>(k)]);
    CMat basis = null_space_basis(stack_other_channels(channels, k));
    if (basis.cols() > want) {
      ctx.warnings.push_back("user " + std::to_string(k) +
                             ": stacked channel is rank deficient, kernel dimension " +
                             std::to_string(basis.cols()) + " > " + std::to_string(want));
    }
    if (basis.cols() < scenario.n[static_cast<std::size_t>(k)])
      throw Error(ErrorCode::InfeasibleZf, "null space too small for user " + std::to_string(k));
    const CMat& Hk = channels.H[static_cast<std::size_t>(k)];
    ctx.Heff.push_back(Hk * basis);
    std::vector<CMat> g;
    for (const auto& Gm : channels.G) g.push_back(Gm * basis);
    ctx.Geff.push_back(std::move(g));
    ctx.Vbar.push_back(std::move(basis));
  }
  return ctx;
}

}  // namespace crp
