#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "accmarket/threshold_games.hpp"

namespace accmarket {

/// Two threshold providers best-responding under the continuous distribution.
struct AnalyticDynamicsConfig {
  GaussianMarketSpec spec;
  double lo = kNegInf;
  double hi = kPosInf;
  std::size_t rounds = 10;
  std::array<std::size_t, 2> order{0, 1};
  /// Starting thresholds; both default to h_opt.
  std::optional<std::array<double, 2>> init;
  /// Minimum analytic share gain for a move to be adopted.
  double epsilon = kShareTieTolerance;
};

struct AnalyticStep {
  std::size_t round = 0;
  std::optional<std::size_t> mover;
  std::array<double, 2> taus{};
  std::array<double, 2> shares{};
  double welfare = 0.0;
};

struct AnalyticTrajectory {
  std::vector<AnalyticStep> steps;
  /// adopted[r - 1] = adopted moves in round r.
  std::vector<std::size_t> adopted;
  bool converged = false;
  std::size_t rounds_run = 0;
  std::array<double, 2> taus{};
  AnalyticOutcome outcome;
};

AnalyticTrajectory run_analytic_dynamics(const AnalyticDynamicsConfig& cfg);

}  // namespace accmarket
