#include "accmarket/analytic_dynamics.hpp"

#include <stdexcept>

namespace accmarket {
namespace {

AnalyticStep step_of(std::size_t round, std::optional<std::size_t> mover, const std::array<double, 2>& taus,
                     const GaussianMarketSpec& spec) {
  const auto out = analytic_outcome(taus, spec);
  return AnalyticStep{round, mover, taus, {out.shares[0], out.shares[1]}, out.welfare};
}

}  // namespace

AnalyticTrajectory run_analytic_dynamics(const AnalyticDynamicsConfig& cfg) {
  cfg.spec.validate();
  if (!(cfg.lo < cfg.hi)) throw std::invalid_argument("analytic dynamics: interval must satisfy lo < hi");
  if (cfg.rounds < 1) throw std::invalid_argument("analytic dynamics needs at least one round");
  if (!((cfg.order[0] == 0 && cfg.order[1] == 1) || (cfg.order[0] == 1 && cfg.order[1] == 0))) {
    throw std::invalid_argument("analytic dynamics: order must be a permutation of {0, 1}");
  }
  if (!(cfg.epsilon >= 0.0)) throw std::invalid_argument("analytic dynamics: epsilon must be >= 0");

  AnalyticTrajectory traj;
  if (cfg.init) {
    traj.taus = *cfg.init;
  } else {
    const double h = optimal_threshold(cfg.spec);
    traj.taus = {h, h};
  }
  traj.steps.push_back(step_of(0, std::nullopt, traj.taus, cfg.spec));

  for (std::size_t round = 1; round <= cfg.rounds; ++round) {
    std::size_t adopted = 0;
    for (std::size_t i : cfg.order) {
      const double opp = traj.taus[1 - i];
      const auto br = analytic_best_response(cfg.spec, opp, cfg.lo, cfg.hi);
      const double held = analytic_threshold_share(traj.taus[i], opp, cfg.spec);
      if (br.share - held > cfg.epsilon) {
        traj.taus[i] = br.tau;
        ++adopted;
        traj.steps.push_back(step_of(round, i, traj.taus, cfg.spec));
      }
    }
    traj.adopted.push_back(adopted);
    traj.rounds_run = round;
    if (adopted == 0) {
      traj.converged = true;
      break;
    }
  }
  traj.outcome = analytic_outcome(traj.taus, cfg.spec);
  return traj;
}

}  // namespace accmarket
