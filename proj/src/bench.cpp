#include "crprecoder/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "crprecoder/errors.hpp"

namespace crp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Stream offset separating primary-system channels from secondary ones.
constexpr std::uint64_t kPrimaryStream = 0x7072696d61727921ULL;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

int as_count(double v, const char* what) {
  const double r = std::round(v);
  if (std::abs(v - r) > 1e-9 || r < 0)
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be a nonnegative integer");
  return static_cast<int>(r);
}

void summarize(ResultRow& row, const std::vector<double>& rates, const std::vector<int>& iters) {
  row.trials = static_cast<int>(rates.size());
  row.per_trial = rates;
  double sum = 0.0, sum_iters = 0.0;
  int ok = 0;
  for (std::size_t j = 0; j < rates.size(); ++j) {
    if (std::isnan(rates[j])) {
      ++row.failures;
      continue;
    }
    sum += rates[j];
    sum_iters += iters[j];
    ++ok;
  }
  if (ok == 0) {
    row.mean_sr = kNaN;
    row.std_error = kNaN;
    row.mean_inner_iters = kNaN;
    return;
  }
  row.mean_sr = sum / ok;
  row.mean_inner_iters = sum_iters / ok;
  double ss = 0.0;
  for (double r : rates)
    if (!std::isnan(r)) ss += (r - row.mean_sr) * (r - row.mean_sr);
  row.std_error = ok > 1 ? std::sqrt(ss / (ok - 1) / ok) : 0.0;
}

}  // namespace

SweepAxis parse_axis(const std::string& name) {
  if (name == "P") return SweepAxis::P;
  if (name == "I") return SweepAxis::I;
  if (name == "N") return SweepAxis::N;
  if (name == "M") return SweepAxis::M;
  if (name == "n_pu" || name == "npu") return SweepAxis::NPu;
  if (name == "r") return SweepAxis::R;
  throw Error(ErrorCode::InvalidArgument, "unknown sweep axis '" + name + "'");
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::P: return "P";
    case SweepAxis::I: return "I";
    case SweepAxis::N: return "N";
    case SweepAxis::M: return "M";
    case SweepAxis::NPu: return "n_pu";
    case SweepAxis::R: return "r";
  }
  return "?";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "proposed") return Scheme::Proposed;
  if (name == "scheme1") return Scheme::Scheme1;
  if (name == "scheme2") return Scheme::Scheme2;
  throw Error(ErrorCode::InvalidArgument, "unknown scheme '" + name + "'");
}

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Proposed: return "proposed";
    case Scheme::Scheme1: return "scheme1";
    case Scheme::Scheme2: return "scheme2";
  }
  return "?";
}

Scenario apply_sweep(const Scenario& base, SweepAxis axis, double value) {
  Scenario s = base;
  switch (axis) {
    case SweepAxis::P:
      if (!(value > 0)) throw Error(ErrorCode::InvalidArgument, "P must be positive");
      s.P_total = value;
      s.per_antenna.clear();
      break;
    case SweepAxis::I:
      if (!(value > 0)) throw Error(ErrorCode::InvalidArgument, "I must be positive");
      std::fill(s.I.begin(), s.I.end(), value);
      break;
    case SweepAxis::N:
      s.N = as_count(value, "N");
      s.per_antenna.clear();
      break;
    case SweepAxis::M: {
      const int M = as_count(value, "M");
      const int npu = base.n_pu.empty() ? 2 : base.n_pu.front();
      const double I = base.I.empty() ? 1.0 : base.I.front();
      s.n_pu.assign(static_cast<std::size_t>(M), npu);
      s.I.assign(static_cast<std::size_t>(M), I);
      break;
    }
    case SweepAxis::NPu:
      std::fill(s.n_pu.begin(), s.n_pu.end(), as_count(value, "n_pu"));
      break;
    case SweepAxis::R:
      if (value < 0 || value > 1) throw Error(ErrorCode::InvalidArgument, "r must lie in [0, 1]");
      s.r = value;
      break;
  }
  return s;
}

bool scheme_feasible(const Scenario& scenario, Scheme scheme) {
  const int total = scenario.total_rx();
  int pu = 0;
  for (int v : scenario.n_pu) pu += v;
  for (int k = 0; k < scenario.K(); ++k) {
    const int nk = scenario.n[static_cast<std::size_t>(k)];
    const int free_dims = scenario.N - (total - nk);
    if (free_dims < nk) return false;
    if (scheme == Scheme::Scheme1 && free_dims - pu < 1) return false;
  }
  return true;
}

DesignResult run_scheme(Scheme scheme, const Scenario& scenario, const ChannelSet& channels,
                        const SolverOptions& options) {
  switch (scheme) {
    case Scheme::Proposed: return design_proposed(scenario, channels, options);
    case Scheme::Scheme1: return scheme1_full_zf(scenario, channels, options);
    case Scheme::Scheme2: return scheme2_svd_zf(scenario, channels, options);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown scheme");
}

void ExperimentSpec::validate() const {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "sweep values must be nonempty");
  if (!labels.empty() && labels.size() != values.size())
    throw Error(ErrorCode::InvalidArgument, "one label per sweep value is required");
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
  if (schemes.empty()) throw Error(ErrorCode::InvalidArgument, "at least one scheme is required");
  solver.validate();
  for (double v : values) {
    const Scenario s = apply_sweep(base, axis, v);
    s.validate();
    for (Scheme sc : schemes)
      if (!scheme_feasible(s, sc))
        throw Error(ErrorCode::InfeasibleZf,
                    to_string(sc) + " has no design space at " + to_string(axis) + "=" + fmt(v));
  }
}

const ResultRow& ResultTable::find(double sweep_value, const std::string& scheme) const {
  for (const auto& r : rows)
    if (r.scheme == scheme && std::abs(r.sweep_value - sweep_value) <= 1e-12 * (1 + std::abs(sweep_value)))
      return r;
  throw Error(ErrorCode::InvalidArgument, "no row for " + scheme + " at " + fmt(sweep_value));
}

double ResultTable::failure_rate() const {
  long trials = 0, failures = 0;
  for (const auto& r : rows) {
    trials += r.trials;
    failures += r.failures;
  }
  return trials ? static_cast<double>(failures) / static_cast<double>(trials) : 0.0;
}

bool failure_budget_exceeded(const ResultTable& table, double max_failure_rate) {
  return table.failure_rate() > max_failure_rate;
}

int worker_count() {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CR_PRECODER_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<int>(std::min<long>(v, 1024));
  }
  return static_cast<int>(hw);
}

void parallel_for(int count, const std::function<void(int)>& body) {
  const int workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) body(i);
    });
  for (auto& th : pool) th.join();
}

ResultTable run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const std::size_t npts = spec.values.size(), nsch = spec.schemes.size();
  const auto T = static_cast<std::size_t>(spec.trials);
  // rates[point][scheme][trial]
  std::vector<std::vector<std::vector<double>>> rates(
      npts, std::vector<std::vector<double>>(nsch, std::vector<double>(T, kNaN)));
  std::vector<std::vector<std::vector<int>>> iters(
      npts, std::vector<std::vector<int>>(nsch, std::vector<int>(T, 0)));

  std::vector<Scenario> scenarios;
  for (double v : spec.values) scenarios.push_back(apply_sweep(spec.base, spec.axis, v));

  parallel_for(spec.trials, [&](int j) {
    const auto tj = static_cast<std::size_t>(j);
    for (std::size_t p = 0; p < npts; ++p) {
      const ChannelSet ch = generate_channels(scenarios[p], tj);
      for (std::size_t s = 0; s < nsch; ++s) {
        try {
          const DesignResult d = run_scheme(spec.schemes[s], scenarios[p], ch, spec.solver);
          rates[p][s][tj] = d.solution.rate_total;
          iters[p][s][tj] = d.saddle.trace.inner_iterations();
        } catch (const Error&) {
          rates[p][s][tj] = kNaN;
        }
      }
    }
  });

  ResultTable table;
  for (std::size_t p = 0; p < npts; ++p)
    for (std::size_t s = 0; s < nsch; ++s) {
      ResultRow row;
      row.sweep_value = spec.labels.empty() ? spec.values[p] : spec.labels[p];
      row.scheme = to_string(spec.schemes[s]);
      summarize(row, rates[p][s], iters[p][s]);
      table.rows.push_back(std::move(row));
    }
  return table;
}

void write_csv(const ResultTable& table, std::ostream& out) {
  out << "sweep_value,scheme,mean_sr_nats,stderr,trials,mean_inner_iters,failures\n";
  for (const auto& r : table.rows)
    out << fmt(r.sweep_value) << ',' << r.scheme << ',' << fmt(r.mean_sr) << ',' << fmt(r.std_error) << ','
        << r.trials << ',' << fmt(r.mean_inner_iters) << ',' << r.failures << '\n';
}

ConvergenceTrace convergence_run(const Scenario& scenario, const SolverOptions& options,
                                 std::uint64_t trial) {
  const ChannelSet ch = generate_channels(scenario, trial);
  const ZfContext ctx = build_zf_context(scenario, ch);
  return solve_saddle(build_mac_problem(ctx, scenario, ch), options).trace;
}

void write_trace_csv(const ConvergenceTrace& trace, std::ostream& out) {
  out << "iter,t,residual,step,objective\n";
  for (const auto& r : trace.rows)
    out << r.iter << ',' << fmt(r.t) << ',' << fmt(r.residual) << ',' << fmt(r.step) << ','
        << fmt(r.objective) << '\n';
}

double primary_user_rate(const CMat& F, const CMat& W, const CMat& J) {
  const Eigen::Index n = F.rows();
  if (J.rows() != n || J.cols() != n || W.rows() != F.cols())
    throw Error(ErrorCode::DimensionMismatch, "primary rate operands do not conform");
  const CMat noise = hermitian_part(CMat::Identity(n, n) + J);
  const CMat signal = F * W * W.adjoint() * F.adjoint();
  // log|N + S| - log|N| keeps the argument Hermitian.
  return std::max(0.0, logdet_hpd(hermitian_part(noise + signal)) - logdet_hpd(noise));
}

double primary_system_rate(const std::vector<CMat>& primary_channels,
                           const std::vector<CMat>& primary_precoders,
                           const std::vector<CMat>& secondary_precoders,
                           const std::vector<CMat>& cross_channels) {
  if (primary_channels.size() != primary_precoders.size() ||
      primary_channels.size() != cross_channels.size())
    throw Error(ErrorCode::DimensionMismatch, "one channel, precoder and cross channel per PU");
  double rate = 0.0;
  for (std::size_t m = 0; m < primary_channels.size(); ++m) {
    const CMat& G = cross_channels[m];
    CMat J = CMat::Zero(G.rows(), G.rows());
    for (const auto& T : secondary_precoders) {
      const CMat GT = G * T;
      J += GT * GT.adjoint();
    }
    rate += primary_user_rate(primary_channels[m], primary_precoders[m], J);
  }
  return rate;
}

std::vector<CMat> lambda_max_precoders(const Scenario& scenario, const ChannelSet& channels,
                                       const SolverOptions& options) {
  Scenario relaxed = scenario;
  for (int m = 0; m < scenario.M(); ++m)
    relaxed.I[static_cast<std::size_t>(m)] *= scenario.n_pu[static_cast<std::size_t>(m)];
  DesignResult d = design_proposed(relaxed, channels, options);
  double c = 1.0;
  for (int m = 0; m < scenario.M(); ++m) {
    const CMat& G = channels.G[static_cast<std::size_t>(m)];
    CMat J = CMat::Zero(G.rows(), G.rows());
    for (const auto& T : d.solution.T) J += (G * T) * (G * T).adjoint();
    const double top = Eigen::SelfAdjointEigenSolver<CMat>(hermitian_part(J)).eigenvalues().maxCoeff();
    if (top > 0) c = std::min(c, scenario.I[static_cast<std::size_t>(m)] / top);
  }
  for (auto& T : d.solution.T) T *= std::sqrt(c);
  return d.solution.T;
}

ResultTable run_primary_experiment(const PrimarySpec& spec) {
  const Scenario& sec = spec.secondary;
  sec.validate();
  spec.solver.validate();
  if (spec.trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
  if (spec.primary_power.empty()) throw Error(ErrorCode::InvalidArgument, "primary powers must be nonempty");
  if (!spec.labels.empty() && spec.labels.size() != spec.primary_power.size())
    throw Error(ErrorCode::InvalidArgument, "one label per primary power is required");

  // Primary BS with its own antennas serving the M PUs as ZF users.
  Scenario prim;
  prim.N = spec.primary_antennas;
  prim.n = sec.n_pu;
  prim.seed = derive_seed(sec.seed, kPrimaryStream);
  prim.r = sec.r;
  for (double p : spec.primary_power) {
    prim.P_total = p;
    prim.validate();
  }

  const std::size_t npts = spec.primary_power.size();
  const auto T = static_cast<std::size_t>(spec.trials);
  std::vector<std::vector<double>> trace_rate(npts, std::vector<double>(T, kNaN));
  std::vector<std::vector<double>> lmax_rate(npts, std::vector<double>(T, kNaN));

  parallel_for(spec.trials, [&](int j) {
    const auto tj = static_cast<std::size_t>(j);
    std::vector<CMat> T_trace, T_lmax;
    ChannelSet ch;
    try {
      ch = generate_channels(sec, tj);
      T_trace = design_proposed(sec, ch, spec.solver).solution.T;
      T_lmax = lambda_max_precoders(sec, ch, spec.solver);
    } catch (const Error&) {
      return;
    }
    for (std::size_t p = 0; p < npts; ++p) {
      Scenario pp = prim;
      pp.P_total = spec.primary_power[p];
      try {
        const ChannelSet pch = generate_channels(pp, tj);
        const auto W = design_proposed(pp, pch, spec.solver).solution.T;
        trace_rate[p][tj] = primary_system_rate(pch.H, W, T_trace, ch.G);
        lmax_rate[p][tj] = primary_system_rate(pch.H, W, T_lmax, ch.G);
      } catch (const Error&) {
      }
    }
  });

  ResultTable table;
  const std::vector<int> no_iters(T, 0);
  for (std::size_t p = 0; p < npts; ++p) {
    const double label = spec.labels.empty() ? spec.primary_power[p] : spec.labels[p];
    for (int which = 0; which < 2; ++which) {
      ResultRow row;
      row.sweep_value = label;
      row.scheme = which == 0 ? "trace" : "lambda_max";
      summarize(row, which == 0 ? trace_rate[p] : lmax_rate[p], no_iters);
      row.mean_inner_iters = kNaN;
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

}  // namespace crp
