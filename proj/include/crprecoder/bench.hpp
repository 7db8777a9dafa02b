#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "crprecoder/baselines.hpp"

namespace crp {

enum class SweepAxis { P, I, N, M, NPu, R };
enum class Scheme { Proposed, Scheme1, Scheme2 };

SweepAxis parse_axis(const std::string& name);
std::string to_string(SweepAxis axis);
Scheme parse_scheme(const std::string& name);
std::string to_string(Scheme scheme);

/// Scenario obtained by setting one axis of `base` to `value` (linear units).
/// Changing M or N keeps the per-PU antenna count and threshold of the base
/// and resets the per-antenna split to P_total / N.
Scenario apply_sweep(const Scenario& base, SweepAxis axis, double value);

/// True when `scheme` has a nonempty design space for this scenario.
bool scheme_feasible(const Scenario& scenario, Scheme scheme);

DesignResult run_scheme(Scheme scheme, const Scenario& scenario, const ChannelSet& channels,
                        const SolverOptions& options);

struct ExperimentSpec {
  Scenario base;
  SweepAxis axis = SweepAxis::P;
  std::vector<double> values;  // linear, applied with apply_sweep
  std::vector<double> labels;  // written to the CSV; empty means `values`
  int trials = 200;
  std::vector<Scheme> schemes{Scheme::Proposed};
  SolverOptions solver;
  double max_failure_rate = 0.01;

  void validate() const;
};

struct ResultRow {
  double sweep_value = 0.0;
  std::string scheme;
  double mean_sr = 0.0;  // nats
  double std_error = 0.0;
  int trials = 0;
  double mean_inner_iters = 0.0;
  int failures = 0;
  std::vector<double> per_trial;  // NaN where the trial failed
};

struct ResultTable {
  std::vector<ResultRow> rows;

  const ResultRow& find(double sweep_value, const std::string& scheme) const;
  double failure_rate() const;
};

/// Number of worker threads: CR_PRECODER_THREADS if set and positive,
/// otherwise the hardware concurrency.
int worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads.
void parallel_for(int count, const std::function<void(int)>& body);

/// Monte-Carlo sweep. Trial j uses generate_channels(scenario, j) at every
/// sweep point and for every scheme. Solver errors are counted per row.
ResultTable run_experiment(const ExperimentSpec& spec);

bool failure_budget_exceeded(const ResultTable& table, double max_failure_rate);

void write_csv(const ResultTable& table, std::ostream& out);

/// One realization (trial index `trial`) solved with `options`; the trace of
/// every Newton iteration.
ConvergenceTrace convergence_run(const Scenario& scenario, const SolverOptions& options,
                                 std::uint64_t trial = 0);

void write_trace_csv(const ConvergenceTrace& trace, std::ostream& out);

/// log |I + (I + J)^{-1} F W W^H F^H| for one primary receiver.
double primary_user_rate(const CMat& F, const CMat& W, const CMat& J);

/// Sum over PUs of primary_user_rate with J_m = sum_k G_m T_k T_k^H G_m^H.
double primary_system_rate(const std::vector<CMat>& primary_channels,
                           const std::vector<CMat>& primary_precoders,
                           const std::vector<CMat>& secondary_precoders,
                           const std::vector<CMat>& cross_channels);

/// Secondary precoders meeting lambda_max(J_m) <= I_m: the design is solved
/// with trace thresholds I_m * n_pu_m and then scaled by
/// min(1, min_m I_m / lambda_max(J_m)).
std::vector<CMat> lambda_max_precoders(const Scenario& scenario, const ChannelSet& channels,
                                       const SolverOptions& options);

struct PrimarySpec {
  Scenario secondary;       // M PUs with n_pu antennas each are the primary receivers
  int primary_antennas = 10;
  std::vector<double> primary_power;  // linear
  std::vector<double> labels;
  int trials = 200;
  SolverOptions solver;
  double max_failure_rate = 0.01;
};

/// Mean primary sum rate versus primary BS power, with the secondary system
/// designed under the trace constraint ("trace") or the rescaled
/// lambda_max constraint ("lambda_max").
ResultTable run_primary_experiment(const PrimarySpec& spec);

}  // namespace crp
