#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "crprecoder/duality.hpp"
#include "crprecoder/errors.hpp"
#include "support.hpp"

using namespace crp;

namespace {

MacProblem proposed_problem(const Scenario& s, std::uint64_t trial = 0) {
  const ChannelSet ch = generate_channels(s, trial);
  return build_mac_problem(build_zf_context(s, ch), s, ch);
}

// Water-filling over a list of channel gains with total power P.
double waterfill_rate(std::vector<double> gains, double P) {
  std::sort(gains.begin(), gains.end(), std::greater<>());
  while (!gains.empty() && gains.back() <= 1e-14) gains.pop_back();
  for (std::size_t m = gains.size(); m >= 1; --m) {
    double inv = 0.0;
    for (std::size_t i = 0; i < m; ++i) inv += 1.0 / gains[i];
    const double level = (P + inv) / static_cast<double>(m);
    if (level > 1.0 / gains[m - 1]) {
      double rate = 0.0;
      for (std::size_t i = 0; i < m; ++i) rate += std::log(level * gains[i]);
      return rate;
    }
  }
  return 0.0;
}

SolverOptions tight() {
  SolverOptions o;
  o.eps_gap = 1e-8;
  o.eps_residual = 1e-8;
  return o;
}

}  // namespace

TEST_CASE("single-antenna user: per-antenna optimum is coherent full power") {
  // max |h^H w|^2 subject to |w_n|^2 <= P_n is (sum_n |h_n| sqrt(P_n))^2.
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const int N = 2 + trial % 3;
    const CMat h = testing::random_cmat(rng, 1, N);
    std::vector<double> Pn;
    double amp = 0.0, total = 0.0;
    std::uniform_real_distribution<double> u(0.2, 3.0);
    for (int n = 0; n < N; ++n) {
      Pn.push_back(u(rng));
      amp += std::abs(h(0, n)) * std::sqrt(Pn.back());
      total += Pn.back();
    }
    const MacProblem prob =
        make_mac_problem({CMat::Identity(N, N)}, {h}, {}, Pn, {}, total, PowerMode::PerAntenna);
    const SaddleResult res = solve_saddle(prob, tight());
    CHECK(res.objective == doctest::Approx(std::log1p(amp * amp)).epsilon(1e-7));
  }
}

TEST_CASE("sum-power constraint without PUs is water-filling over ZF singular values") {
  for (std::uint64_t seed : {4u, 5u, 6u}) {
    Scenario s = make_uniform_scenario(7, 2, 2, 0, 2, 20.0, 1.0, 0.4, seed);
    s.power_mode = PowerMode::SumPower;
    const ChannelSet ch = generate_channels(s, 0);
    const ZfContext ctx = build_zf_context(s, ch);
    std::vector<double> gains;
    for (const auto& He : ctx.Heff) {
      const RVec sv = Eigen::JacobiSVD<CMat>(He).singularValues();
      for (Eigen::Index i = 0; i < sv.size(); ++i) gains.push_back(sv(i) * sv(i));
    }
    const SaddleResult res = solve_saddle(build_spc_problem(ctx, s, ch), tight());
    CHECK(res.objective == doctest::Approx(waterfill_rate(gains, 20.0)).epsilon(1e-7));
  }
}

TEST_CASE("psi-gradient of the residual agrees with finite differences of the objective") {
  const MacProblem prob = proposed_problem(make_uniform_scenario(6, 2, 2, 1, 2, 5.0, 2.0, 0.0, 9));
  std::mt19937_64 rng(32);
  DualIterate it = initial_iterate(prob, 7.0);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  for (Eigen::Index i = 0; i < it.psi.size(); ++i) it.psi(i) = u(rng);
  it.Q[0] = testing::random_hpd(rng, 2);
  it.Q[1] = testing::random_hpd(rng, 2);
  it.mu2 = 0.3;
  const Residual r = kkt_residual(prob, it);
  const int P = prob.num_power_rows;
  for (int i = 0; i < prob.L(); ++i) {
    const double h = 1e-6;
    DualIterate a = it, b = it;
    a.psi(i) += h;
    b.psi(i) -= h;
    const double fd = (mac_objective(prob, a) - mac_objective(prob, b)) / (2 * h);
    const double ui = i < P ? r.parts.u(i) : r.parts.w(i - P);
    const double grad = ui + 1.0 / (it.t * it.psi(i)) - it.mu2 * prob.budget(i);
    CHECK(grad == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("the Newton step annihilates the linearized residual") {
  // Every residual block is driven to (1 - s) of its value to first order.
  const MacProblem prob = proposed_problem(make_uniform_scenario(6, 2, 2, 1, 2, 10.0, 3.0, 0.3, 10));
  std::mt19937_64 rng(33);
  DualIterate it = initial_iterate(prob, 20.0);
  it.Q[0] = testing::random_hpd(rng, 2, 0.5);
  it.Q[1] = testing::random_hpd(rng, 2, 0.5);
  const NewtonStep step = assemble_newton(prob, it);
  const double r0 = kkt_residual(prob, it).norm;
  for (double s : {1e-3, 1e-4}) {
    const double rs = kkt_residual(prob, advance(it, step, s)).norm;
    CHECK(std::abs(rs - (1 - s) * r0) < 50.0 * s * s * r0 + 1e-10);
  }
  CHECK(step.max_imag_entry < 1e-10);
}

TEST_CASE("converged iterate meets the tolerances and equality rows") {
  const MacProblem prob = proposed_problem(make_uniform_scenario(8, 2, 2, 2, 2, 10.0, 3.0, 0.0, 11));
  const SolverOptions o;
  const SaddleResult res = solve_saddle(prob, o);
  const Residual r = kkt_residual(prob, res.iterate);
  CHECK(r.norm < o.eps_residual);
  CHECK(std::abs(r.parts.trace_gap) <= 1e-6 * prob.P);
  CHECK(std::abs(r.parts.psi_gap) <= 1e-6 * prob.P);
  CHECK(res.trace.gap.back() <= o.eps_gap);
  CHECK(res.iterate.psi.minCoeff() > 0.0);
  for (const auto& Q : res.iterate.Q) CHECK(is_positive_definite(Q));
  // t grows by gamma between centerings.
  for (std::size_t j = 1; j < res.trace.rows.size(); ++j) {
    const double ratio = res.trace.rows[j].t / res.trace.rows[j - 1].t;
    CHECK((ratio == doctest::Approx(1.0) || ratio == doctest::Approx(o.gamma)));
  }
}

TEST_CASE("gamma = 1 runs a single centering at t0") {
  const MacProblem prob = proposed_problem(make_uniform_scenario(6, 2, 2, 1, 2, 10.0, 3.0));
  SolverOptions o;
  o.gamma = 1.0;
  const SaddleResult res = solve_saddle(prob, o);
  for (const auto& row : res.trace.rows) CHECK(row.t == 50.0);
  CHECK(res.trace.gap.size() == 1);
  CHECK(res.trace.rows.back().residual < 1e-5);
  CHECK(res.trace.rows.back().step == 0.0);
}

TEST_CASE("saddle certificate: no feasible deviation in Q or psi gains more than the gap") {
  const MacProblem prob = proposed_problem(make_uniform_scenario(6, 2, 2, 1, 2, 10.0, 3.0, 0.0, 12));
  const SolverOptions o;
  const SaddleResult res = solve_saddle(prob, o);
  const double f = res.objective, slack = 2 * o.eps_gap + 1e-9;
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    DualIterate q = res.iterate;
    double tr = 0.0;
    for (auto& Q : q.Q) {
      Q = testing::random_hpd(rng, Q.rows(), 0.01);
      tr += Q.trace().real();
    }
    for (auto& Q : q.Q) Q *= prob.P / tr;  // sum tr Q = P
    CHECK(mac_objective(prob, q) <= f + slack);

    DualIterate p = res.iterate;
    for (Eigen::Index i = 0; i < p.psi.size(); ++i) p.psi(i) = u(rng);
    p.psi *= prob.P / prob.budget.dot(p.psi);  // p^T psi = P
    CHECK(mac_objective(prob, p) >= f - slack);
  }
}

TEST_CASE("objective is invariant to a unitary change of each user's basis") {
  const Scenario s = make_uniform_scenario(7, 2, 2, 1, 2, 10.0, 3.0, 0.2, 13);
  const ChannelSet ch = generate_channels(s, 0);
  const ZfContext ctx = build_zf_context(s, ch);
  std::mt19937_64 rng(35);
  std::vector<CMat> rotated;
  for (const auto& V : ctx.Vbar) rotated.push_back(V * testing::random_unitary(rng, V.cols()));
  const MacProblem a = build_mac_problem(ctx, s, ch);
  const MacProblem b =
      make_mac_problem(rotated, ch.H, ch.G, s.antenna_powers(), s.I, s.P_total, PowerMode::PerAntenna);
  CHECK(solve_saddle(a).objective == doctest::Approx(solve_saddle(b).objective).epsilon(1e-6));
}

TEST_CASE("sum-power design dominates the per-antenna design") {
  for (std::uint64_t seed : {14u, 15u}) {
    Scenario s = make_uniform_scenario(6, 2, 2, 1, 2, 10.0, 3.0, 0.0, seed);
    const ChannelSet ch = generate_channels(s, 0);
    const ZfContext ctx = build_zf_context(s, ch);
    const double papc = solve_saddle(build_mac_problem(ctx, s, ch)).objective;
    const double spc = solve_saddle(build_spc_problem(ctx, s, ch)).objective;
    CHECK(spc >= papc - 1e-4);
  }
}

TEST_CASE("problem layout") {
  const Scenario s = make_uniform_scenario(6, 2, 2, 2, 2, 12.0, 3.0);
  const ChannelSet ch = generate_channels(s, 0);
  const ZfContext ctx = build_zf_context(s, ch);
  const MacProblem papc = build_mac_problem(ctx, s, ch);
  CHECK(papc.L() == 6 + 2);
  CHECK(papc.num_power_rows == 6);
  CHECK(papc.budget(0) == doctest::Approx(2.0));
  CHECK(papc.budget(7) == doctest::Approx(3.0));
  CHECK((papc.factor(1, 3) - ctx.Vbar[1].row(3)).norm() < 1e-15);
  CHECK((papc.factor(0, 6) - ch.G[0] * ctx.Vbar[0]).norm() < 1e-14);
  CHECK(papc.barrier_multiplicity() == 4 + 8);
  const MacProblem spc = build_spc_problem(ctx, s, ch);
  CHECK(spc.L() == 1 + 2);
  CHECK(spc.budget(0) == doctest::Approx(12.0));
}

TEST_CASE("iteration caps and option validation") {
  const MacProblem prob = proposed_problem(make_uniform_scenario(6, 2, 2, 1, 2, 10.0, 3.0));
  SolverOptions o;
  o.max_inner = 1;
  CHECK_THROWS_AS(solve_saddle(prob, o), Error);
  try {
    solve_saddle(prob, o);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MaxIterations);
  }
  ConvergenceTrace partial;
  CHECK_THROWS(solve_saddle(prob, o, &partial));
  CHECK_FALSE(partial.rows.empty());
  for (auto mutate : {+[](SolverOptions& x) { x.alpha = 0.6; }, +[](SolverOptions& x) { x.beta = 1.0; },
                      +[](SolverOptions& x) { x.gamma = 0.5; }, +[](SolverOptions& x) { x.t0 = 0.0; }}) {
    SolverOptions bad;
    mutate(bad);
    CHECK_THROWS_AS(bad.validate(), Error);
  }
}
