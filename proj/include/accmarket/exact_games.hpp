#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "accmarket/classifier.hpp"
#include "accmarket/dataset.hpp"
#include "accmarket/market.hpp"

namespace accmarket {

/// Two-provider game over the shared menu {h1, h2}, fully described by the
/// accuracies and the partial discrepancies of the two classifiers.
struct Game2x2 {
  double a1 = 0.0;
  double a2 = 0.0;
  double d12 = 0.0;
  double d21 = 0.0;

  /// Validates ranges and a1 - d12 == a2 - d21 (to 1e-9); throws std::invalid_argument.
  static Game2x2 make(double a1, double a2, double d12, double d21);
  static Game2x2 from_classifiers(const Classifier& h1, const Classifier& h2, const Dataset& data);
};

/// (row player's payoff, column player's payoff)
using PayoffPair = std::pair<double, double>;
/// entry[r][c]: row player plays h_{r+1}, column player plays h_{c+1}.
using PayoffMatrix = std::array<std::array<PayoffPair, 2>, 2>;

PayoffMatrix payoff_matrix(const Game2x2& g);

enum class EquilibriumKind { DominantStrategy, AntiCoordination };

/// Strategy index per player.
using StrategyProfile = std::vector<std::size_t>;

struct EquilibriumReport {
  EquilibriumKind kind = EquilibriumKind::AntiCoordination;
  std::optional<std::size_t> dominant;  // 0 for h1, 1 for h2
  std::vector<StrategyProfile> pne_states;  // lexicographic
  std::vector<PayoffPair> payoffs;          // parallel to pne_states
  /// |a1 - a2| sits on the anti-coordination boundary: some deviations are payoff ties
  /// and diagonal profiles may be weak equilibria as well.
  bool boundary = false;
};

/// Payoff comparisons treat differences below this as ties.
inline constexpr double kPayoffTieTolerance = 1e-12;

EquilibriumReport classify_2x2(const Game2x2& g);

struct FiniteBestResponse {
  std::size_t index = 0;
  Classifier classifier;
  double share = 0.0;
  std::int64_t numerator = 0;  // m * scale * share
  std::int64_t scale = 1;
};

/// Exact best response from a finite menu against the opponents' correctness rows.
/// Ties go to the lowest menu index.
FiniteBestResponse best_response_finite(std::span<const Classifier> menu, const CorrectnessMatrix& opponents,
                                        const Dataset& data);

/// Same selection rule on precomputed correctness rows; returns (index, numerator).
std::pair<std::size_t, std::int64_t> best_response_rows(std::span<const std::vector<std::uint8_t>> menu_rows,
                                                        std::span<const std::uint32_t> opponent_counts,
                                                        std::int64_t scale);

inline constexpr std::size_t kMaxProfiles = 1'000'000;

/// Every pure Nash equilibrium of the finite game, by exhaustive deviation checks.
std::vector<StrategyProfile> enumerate_pne(const std::vector<std::vector<Classifier>>& menus, const Dataset& data);

/// menus[i][k] is the correctness row of player i's k-th strategy.
std::vector<StrategyProfile> enumerate_pne_rows(
    const std::vector<std::vector<std::vector<std::uint8_t>>>& menus);

/// Exact shares of one profile over correctness rows.
ExactShares profile_shares(const std::vector<std::vector<std::vector<std::uint8_t>>>& menus,
                           const StrategyProfile& profile);

}  // namespace accmarket
