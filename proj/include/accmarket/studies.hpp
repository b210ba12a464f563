#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "accmarket/dataset.hpp"
#include "accmarket/dynamics.hpp"
#include "accmarket/threshold_games.hpp"
#include "accmarket/util/stats.hpp"

namespace accmarket {

/// What one repetition of a study plays on.
struct DataSource {
  enum class Kind { Fixed, Gaussian };
  Kind kind = Kind::Gaussian;
  /// Fixed: the table; with test_fraction set, every repetition plays on its own seeded train split.
  std::optional<Dataset> data;
  std::optional<double> test_fraction;
  /// Gaussian: a fresh sample per repetition.
  GaussianMarketSpec spec;
  std::size_t samples = 1000;
};

struct RepetitionData {
  Dataset train;
  std::optional<Dataset> test;
};

RepetitionData repetition_data(const DataSource& source, std::uint64_t seed);

// ---- order of play ----

struct OrderStudyConfig {
  DynamicsConfig dynamics;
  DataSource source;
  std::size_t repetitions = 100;
  std::uint64_t seed = 0;
  /// Move positions (earlier, later), 0-based; empty compares every pair.
  std::vector<std::pair<std::size_t, std::size_t>> positions;
};

struct OrderRun {
  std::size_t repetition = 0;
  std::uint64_t seed = 0;
  std::vector<double> share_by_position;
  double welfare = 0.0;
  bool converged = false;
  std::size_t rounds = 0;
};

struct OrderPairSummary {
  std::size_t earlier = 0;
  std::size_t later = 0;
  Summary difference;  // share(later) - share(earlier)
};

struct OrderStudyResult {
  std::vector<OrderRun> runs;
  std::vector<OrderPairSummary> pairs;
};

OrderStudyResult run_order_of_play_study(const OrderStudyConfig& cfg);

// ---- overlap sweep ----

enum class SweepMode { Analytic, Sampled };

struct OverlapSweepConfig {
  std::vector<GaussianMarketSpec> specs;
  SweepMode mode = SweepMode::Analytic;
  std::size_t samples = 200000;
  std::uint64_t seed = 0;
  double lo = kNegInf;
  double hi = kPosInf;
  std::size_t rounds = 10;
};

struct OverlapRow {
  GaussianMarketSpec spec;
  double h_opt = 0.0;
  std::array<double, 2> taus{};
  std::array<double, 2> accuracies{};
  std::array<double, 2> shares{};
  double welfare = 0.0;
  bool converged = false;
  std::size_t rounds = 0;
  /// Whether the stationary ratio targets are attained inside [lo, hi].
  bool left_root_exists = false;
  bool right_root_exists = false;
  /// Lower / upper equilibrium threshold sits at the interval end (or outside the sample range).
  bool left_at_boundary = false;
  bool right_at_boundary = false;
  /// A boundary flag switched on relative to the previous row.
  bool jump = false;
};

std::vector<OverlapRow> run_overlap_sweep(const OverlapSweepConfig& cfg);

/// n specs with a evenly spaced from a_from to a_to (inclusive) and the given sigmas and prior.
std::vector<GaussianMarketSpec> overlap_grid(double a_from, double a_to, std::size_t points, double sigma_neg,
                                             double sigma_pos, double prior = 0.5);

// ---- capacity ----

struct CapacityConfig {
  DynamicsConfig dynamics;
  DataSource source;
  std::vector<std::size_t> feature_counts;
  std::size_t repetitions = 1;
  std::uint64_t seed = 0;
};

struct CapacityRow {
  std::size_t features = 0;
  std::size_t repetition = 0;
  std::uint64_t seed = 0;
  double welfare_initial = 0.0;
  double welfare_final = 0.0;
  std::optional<double> test_welfare_initial;
  std::optional<double> test_welfare_final;
  bool converged = false;
  std::size_t rounds = 0;
};

struct CapacitySummary {
  std::size_t features = 0;
  Summary welfare_initial;
  Summary welfare_final;
};

struct CapacityResult {
  std::vector<CapacityRow> rows;
  std::vector<CapacitySummary> summaries;
};

CapacityResult run_capacity_study(const CapacityConfig& cfg);

// ---- asymmetric power ----

struct AsymConfig {
  DynamicsConfig dynamics;
  DataSource source;
  std::size_t better_features = 1;
  std::size_t worse_features = 1;
  /// Move position of the advantaged provider, 0-based.
  std::size_t position = 0;
  std::size_t repetitions = 10;
  std::uint64_t seed = 0;
};

struct AsymRun {
  std::size_t repetition = 0;
  std::uint64_t seed = 0;
  double share_advantaged = 0.0;   // advantaged run
  double share_symmetric = 0.0;    // same provider, everyone on the worse features
  double lead_advantaged = 0.0;    // share minus best rival share, advantaged run
  double lead_symmetric = 0.0;
  double delta_self = 0.0;         // share_advantaged - share_symmetric
  double delta_next = 0.0;         // lead_advantaged - lead_symmetric
};

struct AsymResult {
  std::vector<AsymRun> runs;
  Summary delta_self;
  Summary delta_next;
};

/// Both configurations use independent uniform-weight initial fits on each provider's own features.
AsymResult run_asymmetric_power_study(const AsymConfig& cfg);

}  // namespace accmarket
