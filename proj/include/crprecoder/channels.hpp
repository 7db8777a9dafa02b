#pragma once

#include <cstdint>
#include <vector>

#include "crprecoder/linalg.hpp"

namespace crp {

enum class PowerMode { PerAntenna, SumPower };

/// Full description of one secondary-network drop. Every quantity is linear;
/// dB conversion happens only when loading configuration.
struct Scenario {
  int N = 0;                        // secondary BS transmit antennas
  std::vector<int> n;               // receive antennas per SU (size K)
  std::vector<int> n_pu;            // receive antennas per PU (size M)
  double P_total = 1.0;             // total transmit power
  std::vector<double> per_antenna;  // P_n; empty means P_total / N each
  std::vector<double> I;            // interference thresholds per PU
  double r = 0.0;                   // correlation magnitude
  std::uint64_t seed = 1;
  PowerMode power_mode = PowerMode::PerAntenna;

  int K() const { return static_cast<int>(n.size()); }
  int M() const { return static_cast<int>(n_pu.size()); }
  int total_rx() const;

  /// P_n for every antenna, resolving the default split.
  std::vector<double> antenna_powers() const;

  /// Throws InvalidArgument for malformed values and InfeasibleZf when
  /// N - sum_{i != k} n_i < n_k for some k.
  void validate() const;
};

/// Helper used by tests and the CLI: K users with n_rx antennas each, M PUs
/// with n_pu antennas, equal thresholds and the default per-antenna split.
Scenario make_uniform_scenario(int N, int K, int n_rx, int M, int n_pu, double P_total,
                               double I, double r = 0.0, std::uint64_t seed = 1);

struct ChannelSet {
  std::vector<CMat> H;  // n_k x N, BS -> SU k
  std::vector<CMat> G;  // n_pu_m x N, BS -> PU m
};

/// [R]_{ij} = (r e^{j phase})^{|i-j|}, conjugated below the diagonal.
CMat exp_correlation_matrix(int size, double r, double phase);

/// Splittable seed derivation: distinct (seed, index) pairs give independent
/// streams, and the result never depends on evaluation order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Counter-based CSCG(0,1) sample addressed by (stream, a, b, c). Channel
/// entries are addressed by position, so growing N, M or n_pu keeps the
/// common entries of a trial unchanged.
cplx cscg_sample(std::uint64_t stream, std::uint64_t a, std::uint64_t b, std::uint64_t c);

/// Uniform sample on [0,1) addressed like cscg_sample.
double uniform_sample(std::uint64_t stream, std::uint64_t a, std::uint64_t b, std::uint64_t c);

/// Kronecker-model sample rx_corr^{1/2} * W * tx_corr^{1/2}, W i.i.d. CSCG(0,1)
/// drawn from the addressed stream.
CMat correlated_rayleigh(const CMat& rx_corr, const CMat& tx_corr, std::uint64_t stream,
                         std::uint64_t tag, std::uint64_t index);

/// Correlated Rayleigh drop H_k = P_k^{1/2} Hraw_k R_k^{1/2} (same for G_m),
/// with per-link correlation phases uniform on [0, 2 pi). Pure function of
/// (scenario, scenario.seed, trial).
ChannelSet generate_channels(const Scenario& scenario, std::uint64_t trial = 0);

}  // namespace crp
