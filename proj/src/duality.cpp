#include "crprecoder/duality.hpp"

#include <algorithm>
#include <cmath>

#include "crprecoder/errors.hpp"

namespace crp {

double bc_sum_rate(const MacProblem& prob, const std::vector<CMat>& S) {
  if (static_cast<int>(S.size()) != prob.K())
    throw Error(ErrorCode::DimensionMismatch, "one covariance per user is required");
  double rate = 0.0;
  for (int k = 0; k < prob.K(); ++k) {
    const CMat& H = prob.Heff[static_cast<std::size_t>(k)];
    rate += logdet_hpd(hermitian_part(CMat::Identity(H.rows(), H.rows()) +
                                      H * S[static_cast<std::size_t>(k)] * H.adjoint()));
  }
  return rate;
}

CMat factor_precoder(const CMat& S, double rank_tol) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(S));
  const RVec& ev = es.eigenvalues();
  const double top = ev.size() ? ev.maxCoeff() : 0.0;
  if (!(top > 0.0)) return CMat::Zero(S.rows(), 0);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = ev.size() - 1; i >= 0; --i)
    if (ev(i) > rank_tol * top) keep.push_back(i);
  CMat T(S.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c)
    T.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]) * std::sqrt(ev(keep[c]));
  return T;
}

RVec constraint_values(const MacProblem& prob, const std::vector<CMat>& S) {
  RVec v = RVec::Zero(prob.L());
  for (int k = 0; k < prob.K(); ++k)
    for (int i = 0; i < prob.L(); ++i) {
      const auto Fi = prob.factor(k, i);
      v(i) += (Fi * S[static_cast<std::size_t>(k)] * Fi.adjoint()).trace().real();
    }
  return v;
}

PrecoderSolution recover_precoders(const MacProblem& prob, const DualIterate& saddle,
                                   const std::vector<CMat>& pu_channels) {
  PrecoderSolution sol;
  RVec w(prob.row_offset.back());
  for (int i = 0; i < prob.L(); ++i)
    w.segment(prob.row_offset[i], prob.rows(i)).setConstant(saddle.psi(i));

  for (int k = 0; k < prob.K(); ++k) {
    const auto ks = static_cast<std::size_t>(k);
    const CMat& F = prob.factors[ks];
    const CMat Omega = hermitian_part(F.adjoint() * w.asDiagonal() * F);
    if (!is_positive_definite(Omega))
      throw Error(ErrorCode::IllConditioned, "Omega_k is not positive definite");
    const CMat Om_is = hpd_roots(Omega).inv_sqrt;
    Eigen::JacobiSVD<CMat> svd(prob.Heff[ks] * Om_is, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const CMat UV = svd.matrixU() * svd.matrixV().adjoint();  // n_k x d_k
    const CMat inner = UV.adjoint() * saddle.Q[ks] * UV;
    sol.S.push_back(hermitian_part(Om_is * inner * Om_is));
  }

  sol.constraint_values = constraint_values(prob, sol.S);
  double worst = 1.0;
  for (int i = 0; i < prob.L(); ++i)
    worst = std::max(worst, sol.constraint_values(i) / prob.budget(i));
  if (worst > 1.0) {
    sol.feasibility_scale = 1.0 / worst;
    for (auto& S : sol.S) S *= sol.feasibility_scale;
    sol.constraint_values *= sol.feasibility_scale;
  }

  CMat cov = CMat::Zero(prob.N, prob.N);
  for (int k = 0; k < prob.K(); ++k) {
    const auto ks = static_cast<std::size_t>(k);
    sol.T.push_back(prob.basis[ks] * factor_precoder(sol.S[ks]));
    cov += sol.T.back() * sol.T.back().adjoint();
  }
  sol.per_antenna_power = cov.diagonal().real();
  sol.interference.resize(static_cast<Eigen::Index>(pu_channels.size()));
  for (std::size_t m = 0; m < pu_channels.size(); ++m)
    sol.interference(static_cast<Eigen::Index>(m)) =
        (pu_channels[m] * cov * pu_channels[m].adjoint()).trace().real();
  sol.rate_total = bc_sum_rate(prob, sol.S);
  return sol;
}


DesignResult solve_design(MacProblem problem, const std::vector<CMat>& pu_channels,
                          const SolverOptions& options) {
  DesignResult out;
  out.saddle = solve_saddle(problem, options);
  out.solution = recover_precoders(problem, out.saddle.iterate, pu_channels);
  out.problem = std::move(problem);
  return out;
}

DesignResult design_proposed(const Scenario& scenario, const ChannelSet& channels,
                             const SolverOptions& options) {
  const ZfContext ctx = build_zf_context(scenario, channels);
  return solve_design(build_mac_problem(ctx, scenario, channels), channels.G, options);
}

}  // namespace crp
