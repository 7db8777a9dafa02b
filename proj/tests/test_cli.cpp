#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(CLI_PATH) + " " + args + " 2>/dev/null";
  Run r{-1, {}};
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  while (std::fgets(buf, sizeof buf, p)) r.out += buf;
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "cr_precoder_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string read(const fs::path& p) {
  std::ifstream f(p);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("solve prints the rate and writes a trace") {
  const fs::path cfg = scratch("solve.toml"), trace = scratch("trace.csv");
  std::ofstream(cfg) << "[scenario]\n"
                        "N = 6\n"
                        "K = 2\n"
                        "n_rx = 2\n"
                        "M = 1\n"
                        "n_pu = 2\n"
                        "P_dB = 10\n"
                        "I_dB = 5\n"
                        "seed = 3\n"
                        "[solver]\n"
                        "gamma = 1\n"
                        "t0 = 50\n";
  const Run r = run("solve -c " + cfg.string() + " --trace " + trace.string());
  CHECK(r.code == 0);
  CHECK(r.out.find("sum_rate_nats") != std::string::npos);
  const std::string t = read(trace);
  CHECK(t.rfind("iter,t,residual,step,objective\n", 0) == 0);
  CHECK(count_lines(t) > 2);
}

TEST_CASE("sweep emits one row per value and scheme") {
  const Run r = run("sweep --axis P --values 0,10,20 --trials 3 --schemes proposed,scheme2");
  CHECK(r.code == 0);
  CHECK(count_lines(r.out) == 1 + 3 * 2);
  const fs::path out = scratch("sweep.csv");
  CHECK(run("sweep --axis P --values 0,10,20 --trials 3 --schemes proposed,scheme2 -o " + out.string()).code == 0);
  CHECK(read(out) == r.out);
}

TEST_CASE("convergence and compare subcommands") {
  const Run c = run("convergence --gamma 1");
  CHECK(c.code == 0);
  CHECK(c.out.rfind("iter,t,residual,step,objective\n", 0) == 0);
  const Run k = run("compare --values 0,0.9 --trials 2");
  CHECK(k.code == 0);
  CHECK(count_lines(k.out) == 1 + 2 * 3);
}

TEST_CASE("primary subcommand") {
  const Run r = run("primary --primary-power 10,20 --trials 2");
  CHECK(r.code == 0);
  CHECK(count_lines(r.out) == 1 + 2 * 2);
}

TEST_CASE("exit codes") {
  CHECK(run("sweep --axis Q --values 1").code == 1);
  CHECK(run("sweep --axis P").code == 1);
  CHECK(run("solve --gamma 0.5").code == 1);
  CHECK(run("frobnicate").code == 1);
  const fs::path bad = scratch("bad.toml");
  std::ofstream(bad) << "[scenario]\nunknown = 1\n";
  CHECK(run("solve -c " + bad.string()).code == 1);
  // Every trial hits the iteration cap.
  CHECK(run("sweep --axis P --values 10 --trials 2 --max-inner 1").code == 2);
  CHECK(run("solve --max-inner 1").code == 2);
}
