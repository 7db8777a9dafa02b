#include "crprecoder/channels.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "crprecoder/errors.hpp"

namespace crp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t key(std::uint64_t stream, std::uint64_t a, std::uint64_t b, std::uint64_t c,
                  std::uint64_t lane) {
  std::uint64_t h = splitmix64(stream);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ (b + 0x632BE59BD9B4E019ULL));
  h = splitmix64(h ^ (c + 0x8CB92BA72F3D8DD7ULL));
  return splitmix64(h ^ lane);
}

// (0, 1], safe for log.
double open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

// Stream tags for the different random objects of one trial.
constexpr std::uint64_t kSuMatrix = 1, kPuMatrix = 2, kSuPhase = 3, kPuPhase = 4;

CMat correlated(std::uint64_t stream, std::uint64_t tag, std::uint64_t phase_tag, int index,
                int rows, int cols, double r) {
  const double two_pi = 2.0 * std::numbers::pi;
  const double rx_phase = two_pi * uniform_sample(stream, phase_tag, index, 0);
  const double tx_phase = two_pi * uniform_sample(stream, phase_tag, index, 1);
  return correlated_rayleigh(exp_correlation_matrix(rows, r, rx_phase),
                             exp_correlation_matrix(cols, r, tx_phase), stream, tag, index);
}

}  // namespace

int Scenario::total_rx() const { return std::accumulate(n.begin(), n.end(), 0); }

std::vector<double> Scenario::antenna_powers() const {
  if (!per_antenna.empty()) return per_antenna;
  return std::vector<double>(static_cast<std::size_t>(N), P_total / N);
}

void Scenario::validate() const {
  auto bad = [](const std::string& m) { throw Error(ErrorCode::InvalidArgument, m); };
  if (N < 1) bad("N must be positive");
  if (n.empty()) bad("at least one secondary user is required");
  for (int v : n)
    if (v < 1) bad("SU antenna counts must be positive");
  for (int v : n_pu)
    if (v < 1) bad("PU antenna counts must be positive");
  if (I.size() != n_pu.size()) bad("one interference threshold per PU is required");
  for (double v : I)
    if (!(v > 0.0)) bad("interference thresholds must be positive");
  if (!(P_total > 0.0)) bad("total power must be positive");
  if (!per_antenna.empty()) {
    if (static_cast<int>(per_antenna.size()) != N) bad("per_antenna must list N powers");
    for (double v : per_antenna)
      if (!(v > 0.0)) bad("per-antenna powers must be positive");
  }
  if (!(r >= 0.0 && r <= 1.0)) bad("correlation r must lie in [0,1]");
  const int nr = total_rx();
  for (int k = 0; k < K(); ++k) {
    if (N - (nr - n[k]) < n[k]) {
      throw Error(ErrorCode::InfeasibleZf,
                  "N - sum_{i!=k} n_i < n_k for user " + std::to_string(k));
    }
  }
}

Scenario make_uniform_scenario(int N, int K, int n_rx, int M, int n_pu, double P_total,
                               double I, double r, std::uint64_t seed) {
  Scenario s;
  s.N = N;
  s.n.assign(static_cast<std::size_t>(K), n_rx);
  s.n_pu.assign(static_cast<std::size_t>(M), n_pu);
  s.P_total = P_total;
  s.I.assign(static_cast<std::size_t>(M), I);
  s.r = r;
  s.seed = seed;
  return s;
}

CMat exp_correlation_matrix(int size, double r, double phase) {
  if (size < 1) throw Error(ErrorCode::InvalidArgument, "correlation matrix size must be >= 1");
  if (!(r >= 0.0 && r <= 1.0)) throw Error(ErrorCode::InvalidArgument, "r must lie in [0,1]");
  const cplx c = std::polar(r, phase);
  CMat R(size, size);
  for (int i = 0; i < size; ++i) {
    cplx p(1.0, 0.0);
    for (int j = i; j < size; ++j) {
      R(i, j) = p;
      R(j, i) = std::conj(p);
      p *= c;
    }
  }
  return R;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0xD1B54A32D192ED03ULL));
}

double uniform_sample(std::uint64_t stream, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return static_cast<double>(key(stream, a, b, c, 0) >> 11) * 0x1.0p-53;
}

cplx cscg_sample(std::uint64_t stream, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  // Box-Muller; |z|^2 ~ Exp(1) so E|z|^2 = 1.
  const double u1 = open_unit(key(stream, a, b, c, 1));
  const double u2 = open_unit(key(stream, a, b, c, 2));
  return std::polar(std::sqrt(-std::log(u1)), 2.0 * std::numbers::pi * u2);
}

CMat correlated_rayleigh(const CMat& rx_corr, const CMat& tx_corr, std::uint64_t stream,
                         std::uint64_t tag, std::uint64_t index) {
  const Eigen::Index rows = rx_corr.rows(), cols = tx_corr.rows();
  CMat raw(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      raw(i, j) = cscg_sample(stream, tag, index, (std::uint64_t(i) << 32) | std::uint64_t(j));
  return psd_sqrt(rx_corr) * raw * psd_sqrt(tx_corr);
}

ChannelSet generate_channels(const Scenario& scenario, std::uint64_t trial) {
  scenario.validate();
  const std::uint64_t stream = derive_seed(scenario.seed, trial);
  ChannelSet cs;
  for (int k = 0; k < scenario.K(); ++k)
    cs.H.push_back(correlated(stream, kSuMatrix, kSuPhase, k, scenario.n[k], scenario.N, scenario.r));
  for (int m = 0; m < scenario.M(); ++m)
    cs.G.push_back(correlated(stream, kPuMatrix, kPuPhase, m, scenario.n_pu[m], scenario.N, scenario.r));
  return cs;
}

}  // namespace crp
