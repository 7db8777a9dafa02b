// Command-line front end: solve | sweep | convergence | compare | primary.
//
// Exit codes: 0 success, 1 configuration error, 2 solver failure (or the
// experiment's failure budget was exceeded).

#include <CLI11.hpp>

#include <cstdio>
#include <sstream>
#include <fstream>
#include <iostream>
#include <optional>

#include "crprecoder/config.hpp"
#include "crprecoder/errors.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kSolverFailure = 2;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Overrides {
  std::string config;
  std::optional<long long> seed, trials, trial, max_inner;
  std::optional<double> gamma, t0, eps;
  std::string out, trace, axis, values, schemes, primary_power;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("-c,--config", o.config, "TOML configuration file")->check(CLI::ExistingFile);
  app->add_option("--seed", o.seed, "channel seed");
  app->add_option("--trials", o.trials, "Monte-Carlo trials");
  app->add_option("--gamma", o.gamma, "barrier growth factor (1 keeps t fixed)");
  app->add_option("--t0", o.t0, "initial barrier parameter");
  app->add_option("--eps", o.eps, "Newton residual tolerance");
  app->add_option("--max-inner", o.max_inner, "Newton iteration cap per centering");
  app->add_option("-o,--out", o.out, "output CSV (default stdout)");
}

crp::RunConfig resolve(const Overrides& o) {
  crp::RunConfig cfg = o.config.empty() ? crp::parse_config("") : crp::load_config(o.config);
  if (o.seed) {
    if (*o.seed < 0) throw ConfigError("--seed must be nonnegative");
    cfg.scenario.seed = static_cast<std::uint64_t>(*o.seed);
  }
  if (o.trials) cfg.trials = static_cast<int>(*o.trials);
  if (o.trial) {
    if (*o.trial < 0) throw ConfigError("--trial must be nonnegative");
    cfg.trial = static_cast<std::uint64_t>(*o.trial);
  }
  if (o.max_inner) cfg.solver.max_inner = static_cast<int>(*o.max_inner);
  if (o.gamma) cfg.solver.gamma = *o.gamma;
  if (o.t0) cfg.solver.t0 = *o.t0;
  if (o.eps) cfg.solver.eps_residual = *o.eps;
  if (!o.out.empty()) cfg.output = o.out;
  if (!o.trace.empty()) cfg.trace_output = o.trace;
  if (!o.axis.empty()) cfg.axis = crp::parse_axis(o.axis);
  if (!o.values.empty()) cfg.sweep_values = crp::parse_value_list(o.values);
  if (!o.primary_power.empty()) cfg.primary_power_db = crp::parse_value_list(o.primary_power);
  if (!o.schemes.empty()) {
    cfg.schemes.clear();
    std::stringstream ss(o.schemes);
    std::string item;
    while (std::getline(ss, item, ',')) cfg.schemes.push_back(crp::parse_scheme(item));
  }
  if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
  cfg.solver.validate();
  return cfg;
}

template <class Writer>
void emit(const std::string& path, Writer&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open '" + path + "' for writing");
  write(f);
}

int finish_table(const crp::ResultTable& table, const crp::RunConfig& cfg) {
  emit(cfg.output, [&](std::ostream& os) { crp::write_csv(table, os); });
  if (crp::failure_budget_exceeded(table, cfg.max_failure_rate)) {
    std::fprintf(stderr, "failure rate %.4f exceeds budget %.4f\n", table.failure_rate(), cfg.max_failure_rate);
    return kSolverFailure;
  }
  return kOk;
}

int cmd_solve(const crp::RunConfig& cfg, const std::string& scheme_name) {
  const crp::Scheme scheme = scheme_name.empty() ? crp::Scheme::Proposed : crp::parse_scheme(scheme_name);
  const crp::ChannelSet ch = crp::generate_channels(cfg.scenario, cfg.trial);
  const crp::DesignResult d = crp::run_scheme(scheme, cfg.scenario, ch, cfg.solver);
  const auto& sol = d.solution;
  std::printf("scheme            %s\n", crp::to_string(scheme).c_str());
  std::printf("sum_rate_nats     %.10g\n", sol.rate_total);
  std::printf("mac_objective     %.10g\n", d.saddle.objective);
  std::printf("inner_iterations  %d\n", d.saddle.trace.inner_iterations());
  std::printf("feasibility_scale %.10g\n", sol.feasibility_scale);
  std::printf("max_antenna_power %.10g\n", sol.per_antenna_power.size() ? sol.per_antenna_power.maxCoeff() : 0.0);
  for (Eigen::Index m = 0; m < sol.interference.size(); ++m)
    std::printf("interference[%ld]   %.10g\n", static_cast<long>(m), sol.interference(m));
  if (!cfg.trace_output.empty())
    emit(cfg.trace_output, [&](std::ostream& os) { crp::write_trace_csv(d.saddle.trace, os); });
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zero-forcing precoder design for cognitive-radio MIMO broadcast channels"};
  app.require_subcommand(1);

  Overrides o;
  std::string scheme;

  auto* solve = app.add_subcommand("solve", "design precoders for one channel realization");
  add_common(solve, o);
  solve->add_option("--trial", o.trial, "realization index");
  solve->add_option("--trace", o.trace, "write the Newton trace CSV here");
  solve->add_option("--scheme", scheme, "proposed | scheme1 | scheme2");

  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep over one scenario axis");
  add_common(sweep, o);
  sweep->add_option("--axis", o.axis, "P | I | N | M | n_pu | r");
  sweep->add_option("--values", o.values, "comma separated; dB for P and I");
  sweep->add_option("--schemes", o.schemes, "comma separated scheme names");

  auto* conv = app.add_subcommand("convergence", "Newton trace of one realization");
  add_common(conv, o);
  conv->add_option("--trial", o.trial, "realization index");

  auto* compare = app.add_subcommand("compare", "proposed design against both baselines versus r");
  add_common(compare, o);
  compare->add_option("--values", o.values, "correlation values");

  auto* primary = app.add_subcommand("primary", "primary-system rate under trace and lambda_max constraints");
  add_common(primary, o);
  primary->add_option("--primary-power", o.primary_power, "primary BS powers in dB, comma separated");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  crp::RunConfig cfg;
  try {
    cfg = resolve(o);
    if (compare->parsed()) {
      cfg.axis = crp::SweepAxis::R;
      if (o.values.empty()) cfg.sweep_values = {0.0, 0.3, 0.6, 0.9};
      cfg.schemes = {crp::Scheme::Proposed, crp::Scheme::Scheme1, crp::Scheme::Scheme2};
    }
    if (primary->parsed() && cfg.primary_power_db.empty()) cfg.primary_power_db = {0, 5, 10, 15, 20, 25, 30};
    if ((sweep->parsed() || compare->parsed()) && cfg.sweep_values.empty())
      throw ConfigError("no sweep values given (--values or [experiment].values)");
    if (sweep->parsed() || compare->parsed()) cfg.experiment().validate();
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const crp::Error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  }

  try {
    if (solve->parsed()) return cmd_solve(cfg, scheme);
    if (conv->parsed()) {
      const auto trace = crp::convergence_run(cfg.scenario, cfg.solver, cfg.trial);
      emit(cfg.output, [&](std::ostream& os) { crp::write_trace_csv(trace, os); });
      return kOk;
    }
    if (sweep->parsed() || compare->parsed()) return finish_table(crp::run_experiment(cfg.experiment()), cfg);
    if (primary->parsed()) return finish_table(crp::run_primary_experiment(cfg.primary()), cfg);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const crp::Error& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return e.code() == crp::ErrorCode::InvalidArgument ? kConfigError : kSolverFailure;
  }
  return kOk;
}
