#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crprecoder/bench.hpp"

namespace crp {

double db_to_linear(double db);

/// Everything a CLI run needs, read from a TOML file with [scenario],
/// [solver] and [experiment] tables. P, I and the primary powers are in dB
/// in the file and linear here.
struct RunConfig {
  Scenario scenario;
  SolverOptions solver;

  SweepAxis axis = SweepAxis::P;
  std::vector<double> sweep_values;  // as written in the file (dB for P and I)
  int trials = 200;
  std::vector<Scheme> schemes{Scheme::Proposed};
  double max_failure_rate = 0.01;
  std::uint64_t trial = 0;  // realization used by solve and convergence
  std::string output;       // empty: stdout
  std::string trace_output;

  int primary_antennas = 10;
  std::vector<double> primary_power_db;

  /// Sweep spec with file units converted.
  ExperimentSpec experiment() const;
  PrimarySpec primary() const;
};

/// Defaults reproduce the paper's convergence setting (N=10, K=2, n_k=2,
/// M=1, n_pu=2, P=10 dB, I=5 dB). Throws InvalidArgument on unknown keys,
/// wrong types or bad values.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& toml_text);

/// Parses "0,5,10" style lists.
std::vector<double> parse_value_list(const std::string& text);

}  // namespace crp
