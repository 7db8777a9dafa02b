#include <doctest.h>

#include "crprecoder/baselines.hpp"
#include "crprecoder/errors.hpp"
#include "support.hpp"

using namespace crp;

TEST_CASE("scheme 1 nulls every primary user") {
  const Scenario s = make_uniform_scenario(10, 3, 2, 2, 2, 100.0, 3.0, 0.0, 3);
  const ChannelSet ch = generate_channels(s, 0);
  const DesignResult d = scheme1_full_zf(s, ch);
  for (int k = 0; k < 3; ++k) CHECK(d.problem.d(k) == 10 - 4 - 4);
  for (int m = 0; m < 2; ++m) CHECK(d.solution.interference(m) <= 1e-10);
  CHECK(d.problem.L() == 10);  // antenna rows only
}

TEST_CASE("scheme 1 needs a nonempty extended null space") {
  // 8 - 4 - 4 = 0 free dimensions.
  const Scenario s = make_uniform_scenario(8, 3, 2, 2, 2, 10.0, 3.0);
  const ChannelSet ch = generate_channels(s, 0);
  CHECK_THROWS_AS(scheme1_full_zf(s, ch), Error);
}

TEST_CASE("scheme 2 coincides with the proposed design when nbar_k = n_k") {
  const Scenario s = make_uniform_scenario(6, 3, 2, 1, 2, 10.0, 3.0, 0.0, 4);
  const ChannelSet ch = generate_channels(s, 0);
  const double a = design_proposed(s, ch).solution.rate_total;
  const double b = scheme2_svd_zf(s, ch).solution.rate_total;
  CHECK(b == doctest::Approx(a).epsilon(1e-4));
}

TEST_CASE("both baselines are dominated trial by trial and keep the constraints") {
  const SolverOptions o;
  for (double r : {0.0, 0.9}) {
    const Scenario s = make_uniform_scenario(10, 3, 2, 2, 2, 100.0, 3.16, r, 5);
    for (std::uint64_t trial = 0; trial < 4; ++trial) {
      const ChannelSet ch = generate_channels(s, trial);
      const double prop = design_proposed(s, ch, o).solution.rate_total;
      const DesignResult s1 = scheme1_full_zf(s, ch, o), s2 = scheme2_svd_zf(s, ch, o);
      CHECK(prop >= s1.solution.rate_total - o.eps_gap);
      CHECK(prop >= s2.solution.rate_total - o.eps_gap);
      for (int n = 0; n < s.N; ++n) CHECK(s2.solution.per_antenna_power(n) <= 10.0 * (1 + 1e-6));
      for (int m = 0; m < s.M(); ++m) CHECK(s2.solution.interference(m) <= 3.16 * (1 + 1e-6));
    }
  }
}

TEST_CASE("dense Newton step equals the block-eliminated step") {
  std::mt19937_64 rng(51);
  for (std::uint64_t seed : {6u, 7u, 8u}) {
    const Scenario s = make_uniform_scenario(6, 2, 2, 1, 2, 10.0, 3.0, 0.3, seed);
    const ChannelSet ch = generate_channels(s, 0);
    const MacProblem prob = build_mac_problem(build_zf_context(s, ch), s, ch);
    DualIterate it = initial_iterate(prob, 40.0);
    for (auto& Q : it.Q) Q = testing::random_hpd(rng, Q.rows());
    std::uniform_real_distribution<double> u(0.3, 2.0);
    for (Eigen::Index i = 0; i < it.psi.size(); ++i) it.psi(i) = u(rng);
    it.mu1 = 0.7;
    it.mu2 = 1.3;
    const NewtonStep a = assemble_newton(prob, it), b = dense_newton_step(prob, it);
    double scale = std::abs(a.dmu1) + std::abs(a.dmu2) + a.dpsi.norm();
    for (const auto& d : a.dQ) scale += d.norm();
    double diff = std::abs(a.dmu1 - b.dmu1) + std::abs(a.dmu2 - b.dmu2) + (a.dpsi - b.dpsi).norm();
    for (int k = 0; k < 2; ++k) diff += (a.dQ[k] - b.dQ[k]).norm();
    CHECK(diff <= 1e-8 * scale);
  }
}

TEST_CASE("naive oracle reaches the same saddle value") {
  const Scenario s = make_uniform_scenario(6, 2, 2, 1, 2, 10.0, 3.0, 0.0, 9);
  const ChannelSet ch = generate_channels(s, 0);
  const MacProblem prob = build_mac_problem(build_zf_context(s, ch), s, ch);
  CHECK(dense_variable_count(prob) == 2 * 4 + 7 + 2);
  const double a = solve_saddle(prob).objective, b = naive_newton_oracle(prob).objective;
  CHECK(b == doctest::Approx(a).epsilon(1e-4));
}

TEST_CASE("naive oracle refuses large problems") {
  const Scenario s = make_uniform_scenario(10, 3, 2, 2, 2, 10.0, 3.0);
  const ChannelSet ch = generate_channels(s, 0);
  const MacProblem small = build_mac_problem(build_zf_context(s, ch), s, ch);
  CHECK(dense_variable_count(small) <= 200);
  const Scenario big_s = make_uniform_scenario(60, 3, 8, 2, 2, 10.0, 3.0);
  const ChannelSet big_ch = generate_channels(big_s, 0);
  const MacProblem big = build_mac_problem(build_zf_context(big_s, big_ch), big_s, big_ch);
  CHECK(dense_variable_count(big) > 200);
  try {
    naive_newton_oracle(big);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SizeGuard);
  }
}
