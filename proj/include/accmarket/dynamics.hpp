#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "accmarket/classifier.hpp"
#include "accmarket/dataset.hpp"
#include "accmarket/learners.hpp"
#include "accmarket/market.hpp"

namespace accmarket {

/// Congestion-game potential with per-column cost -1/k, summed over example counts:
/// -sum_j H(kappa(j)) where H is the harmonic number.
double potential(const CorrectnessMatrix& c);

/// potential(c) * scale as an exact integer; scale must be divisible by 1..n.
std::int64_t scaled_potential(const CorrectnessMatrix& c, std::int64_t scale);
std::int64_t scaled_potential(std::span<const std::uint32_t> column_counts, std::int64_t scale);

enum class InitMode { SharedOptimum, IndependentFit, Explicit };

std::string to_string(InitMode mode);
InitMode parse_init_mode(const std::string& text);

struct DynamicsConfig {
  std::size_t providers = 2;
  /// Order of play within a round; empty means 0, 1, ..., n-1.
  std::vector<std::size_t> order;
  std::size_t rounds = 10;
  /// Minimum share gain for a move to be adopted. Defaults to 0 when every learner is exact
  /// and 1e-4 otherwise.
  std::optional<double> epsilon;
  InitMode init = InitMode::SharedOptimum;
  std::vector<Classifier> initial;  // Explicit
  /// One config shared by all providers, or one per provider.
  std::vector<LearnerConfig> learners{LearnerConfig{}};
  /// Per-provider feature prefix length; empty means all features.
  std::vector<std::size_t> feature_counts;
  /// Offsets the learner seeds of IndependentFit initialization.
  std::uint64_t seed = 0;

  void validate(const Dataset& data) const;
  std::vector<std::size_t> effective_order() const;
  double effective_epsilon() const;
  const LearnerConfig& learner(std::size_t i) const { return learners.size() == 1 ? learners[0] : learners[i]; }
};

struct TrajectoryStep {
  std::size_t round = 0;
  std::optional<std::size_t> mover;  // empty for the initial state
  std::string classifier;            // the mover's adopted classifier
  std::uint64_t fingerprint = 0;     // of the mover's train predictions
  std::vector<std::int64_t> numerators;
  std::vector<double> shares;
  double welfare = 0.0;
  std::optional<double> hhi;
  double potential = 0.0;
  std::int64_t scaled_potential = 0;
};

struct RoundSummary {
  std::size_t round = 0;  // 0 is the initial state
  std::size_t adopted = 0;
  std::size_t rejected = 0;
  MarketOutcome train;
  std::optional<MarketOutcome> test;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  std::vector<RoundSummary> rounds;
  bool converged = false;
  std::size_t rounds_run = 0;
  std::int64_t scale = 1;
  std::size_t examples = 0;
  std::vector<Classifier> initial_classifiers;
  std::vector<Classifier> final_classifiers;
  double epsilon = 0.0;

  const MarketOutcome& initial_train() const { return rounds.front().train; }
  const MarketOutcome& final_train() const { return rounds.back().train; }
  const std::optional<MarketOutcome>& final_test() const { return rounds.back().test; }
};

/// Sequential best-response dynamics. Each mover refits against competition weights from the
/// other providers' current predictions; the fit is adopted only if it raises the mover's exact
/// train share by more than epsilon. Stops after a round with no adopted move or after cfg.rounds.
Trajectory run_dynamics(const DynamicsConfig& cfg, const Dataset& train, const Dataset* test = nullptr);

/// Uniform-weight fit used for initialization, in the full feature space.
Classifier initial_fit(const LearnerConfig& learner, const Dataset& view, std::size_t full_dim);

}  // namespace accmarket
