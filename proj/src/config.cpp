#include "crprecoder/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "crprecoder/errors.hpp"

namespace crp {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); }

void check_keys(const toml::table& tbl, const std::string& name, const std::set<std::string>& allowed) {
  for (const auto& [key, _] : tbl)
    if (!allowed.count(std::string(key.str())))
      bad("unknown key '" + std::string(key.str()) + "' in [" + name + "]");
}

double get_number(const toml::node& node, const std::string& key) {
  if (auto v = node.value<double>()) return *v;
  bad("'" + key + "' must be a number");
}

long long get_int(const toml::node& node, const std::string& key) {
  if (auto v = node.value<long long>()) return *v;
  bad("'" + key + "' must be an integer");
}

std::string get_string(const toml::node& node, const std::string& key) {
  if (auto v = node.value<std::string>()) return *v;
  bad("'" + key + "' must be a string");
}

// A scalar or an array of numbers.
std::vector<double> get_numbers(const toml::node& node, const std::string& key) {
  if (const auto* arr = node.as_array()) {
    std::vector<double> out;
    for (const auto& e : *arr) out.push_back(get_number(e, key));
    return out;
  }
  return {get_number(node, key)};
}

std::vector<int> get_ints(const toml::node& node, const std::string& key) {
  std::vector<int> out;
  if (const auto* arr = node.as_array()) {
    for (const auto& e : *arr) out.push_back(static_cast<int>(get_int(e, key)));
  } else {
    out.push_back(static_cast<int>(get_int(node, key)));
  }
  return out;
}

std::vector<double> to_linear(const std::vector<double>& db) {
  std::vector<double> out;
  for (double v : db) out.push_back(db_to_linear(v));
  return out;
}

// Expands a scalar to `count` entries; arrays must already have that length.
template <class T>
std::vector<T> broadcast(const std::vector<T>& v, int count, const std::string& key) {
  if (v.size() == 1) return std::vector<T>(static_cast<std::size_t>(count), v.front());
  if (static_cast<int>(v.size()) != count)
    bad("'" + key + "' must have " + std::to_string(count) + " entries");
  return v;
}

}  // namespace

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::vector<double> parse_value_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      bad("cannot parse '" + item + "' as a number");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) bad("cannot parse '" + item + "' as a number");
    out.push_back(v);
  }
  if (out.empty()) bad("empty value list");
  return out;
}

ExperimentSpec RunConfig::experiment() const {
  ExperimentSpec spec;
  spec.base = scenario;
  spec.axis = axis;
  spec.labels = sweep_values;
  spec.values = (axis == SweepAxis::P || axis == SweepAxis::I) ? to_linear(sweep_values) : sweep_values;
  spec.trials = trials;
  spec.schemes = schemes;
  spec.solver = solver;
  spec.max_failure_rate = max_failure_rate;
  return spec;
}

PrimarySpec RunConfig::primary() const {
  PrimarySpec spec;
  spec.secondary = scenario;
  spec.primary_antennas = primary_antennas;
  spec.labels = primary_power_db;
  spec.primary_power = to_linear(primary_power_db);
  spec.trials = trials;
  spec.solver = solver;
  spec.max_failure_rate = max_failure_rate;
  return spec;
}

RunConfig parse_config(const std::string& toml_text) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "TOML parse error: " << e.description() << " at line " << e.source().begin.line;
    bad(os.str());
  }
  check_keys(root, "", {"scenario", "solver", "experiment"});

  RunConfig cfg;
  int N = 10, K = 2, M = 1;
  std::vector<int> n{2}, n_pu{2};
  std::vector<double> I_db{5.0}, per_antenna_db;
  double P_db = 10.0;
  Scenario& s = cfg.scenario;

  if (const auto* t = root["scenario"].as_table()) {
    check_keys(*t, "scenario", {"N", "K", "n_rx", "M", "n_pu", "P_dB", "I_dB", "per_antenna_dB", "r",
                                "seed", "power_mode"});
    for (const auto& [k, v] : *t) {
      const std::string key(k.str());
      if (key == "N") N = static_cast<int>(get_int(v, key));
      else if (key == "K") K = static_cast<int>(get_int(v, key));
      else if (key == "M") M = static_cast<int>(get_int(v, key));
      else if (key == "n_rx") n = get_ints(v, key);
      else if (key == "n_pu") n_pu = get_ints(v, key);
      else if (key == "P_dB") P_db = get_number(v, key);
      else if (key == "I_dB") I_db = get_numbers(v, key);
      else if (key == "per_antenna_dB") per_antenna_db = get_numbers(v, key);
      else if (key == "r") s.r = get_number(v, key);
      else if (key == "seed") {
        const long long seed = get_int(v, key);
        if (seed < 0) bad("'seed' must be nonnegative");
        s.seed = static_cast<std::uint64_t>(seed);
      } else if (key == "power_mode") {
        const std::string mode = get_string(v, key);
        if (mode == "per_antenna") s.power_mode = PowerMode::PerAntenna;
        else if (mode == "sum") s.power_mode = PowerMode::SumPower;
        else bad("'power_mode' must be \"per_antenna\" or \"sum\"");
      }
    }
  } else if (root.contains("scenario")) {
    bad("[scenario] must be a table");
  }
  if (K < 1 || M < 0 || N < 1) bad("N and K must be positive, M nonnegative");
  s.N = N;
  s.n = broadcast(n, K, "n_rx");
  s.n_pu = M == 0 ? std::vector<int>{} : broadcast(n_pu, M, "n_pu");
  s.I = M == 0 ? std::vector<double>{} : to_linear(broadcast(I_db, M, "I_dB"));
  s.P_total = db_to_linear(P_db);
  if (!per_antenna_db.empty()) s.per_antenna = to_linear(broadcast(per_antenna_db, N, "per_antenna_dB"));

  if (const auto* t = root["solver"].as_table()) {
    check_keys(*t, "solver", {"t0", "gamma", "eps_residual", "eps_gap", "alpha", "beta", "max_inner",
                              "max_outer"});
    SolverOptions& o = cfg.solver;
    for (const auto& [k, v] : *t) {
      const std::string key(k.str());
      if (key == "t0") o.t0 = get_number(v, key);
      else if (key == "gamma") o.gamma = get_number(v, key);
      else if (key == "eps_residual") o.eps_residual = get_number(v, key);
      else if (key == "eps_gap") o.eps_gap = get_number(v, key);
      else if (key == "alpha") o.alpha = get_number(v, key);
      else if (key == "beta") o.beta = get_number(v, key);
      else if (key == "max_inner") o.max_inner = static_cast<int>(get_int(v, key));
      else if (key == "max_outer") o.max_outer = static_cast<int>(get_int(v, key));
    }
  } else if (root.contains("solver")) {
    bad("[solver] must be a table");
  }

  if (const auto* t = root["experiment"].as_table()) {
    check_keys(*t, "experiment", {"axis", "values", "trials", "schemes", "max_failure_rate", "trial",
                                  "output", "trace", "primary_antennas", "primary_P_dB"});
    for (const auto& [k, v] : *t) {
      const std::string key(k.str());
      if (key == "axis") cfg.axis = parse_axis(get_string(v, key));
      else if (key == "values") cfg.sweep_values = get_numbers(v, key);
      else if (key == "trials") cfg.trials = static_cast<int>(get_int(v, key));
      else if (key == "max_failure_rate") cfg.max_failure_rate = get_number(v, key);
      else if (key == "trial") {
        const long long tr = get_int(v, key);
        if (tr < 0) bad("'trial' must be nonnegative");
        cfg.trial = static_cast<std::uint64_t>(tr);
      } else if (key == "output") cfg.output = get_string(v, key);
      else if (key == "trace") cfg.trace_output = get_string(v, key);
      else if (key == "primary_antennas") cfg.primary_antennas = static_cast<int>(get_int(v, key));
      else if (key == "primary_P_dB") cfg.primary_power_db = get_numbers(v, key);
      else if (key == "schemes") {
        const auto* arr = v.as_array();
        if (!arr) bad("'schemes' must be an array of strings");
        cfg.schemes.clear();
        for (const auto& e : *arr) cfg.schemes.push_back(parse_scheme(get_string(e, key)));
      }
    }
  } else if (root.contains("experiment")) {
    bad("[experiment] must be a table");
  }
  if (cfg.trials < 1) bad("'trials' must be >= 1");
  if (cfg.max_failure_rate < 0 || cfg.max_failure_rate > 1) bad("'max_failure_rate' must lie in [0, 1]");
  cfg.solver.validate();
  cfg.scenario.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace crp
