#pragma once

#include <string>
#include <vector>

#include "crprecoder/channels.hpp"

namespace crp {

/// Zero-forcing decomposition of one drop. User k transmits inside the
/// null space of every other SU's channel.
struct ZfContext {
  std::vector<CMat> Vbar;               // N x nbar_k, orthonormal columns
  std::vector<CMat> Heff;               // H_k Vbar_k, n_k x nbar_k
  std::vector<std::vector<CMat>> Geff;  // Geff[k][m] = G_m Vbar_k
  std::vector<std::string> warnings;    // rank-deficiency notes

  int K() const { return static_cast<int>(Vbar.size()); }
  int nbar(int k) const { return static_cast<int>(Vbar[static_cast<std::size_t>(k)].cols()); }
};

/// Rows of every H_j, j != k, in ascending j. Returns 0 x N for K = 1.
CMat stack_other_channels(const ChannelSet& channels, int k);

/// Orthonormal basis of ker(A) from a full SVD with the cutoff
/// max(p, N) * eps * sigma_max. Throws InfeasibleZf when p >= N.
CMat null_space_basis(const CMat& a);

ZfContext build_zf_context(const Scenario& scenario, const ChannelSet& channels);

}  // namespace crp
