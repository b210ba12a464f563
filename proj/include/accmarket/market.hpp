#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "accmarket/classifier.hpp"
#include "accmarket/dataset.hpp"

namespace accmarket {

/// Exact share arithmetic scales every quantity by lcm(1..n); past 20 providers
/// that scale no longer fits comfortably in 64 bits.
inline constexpr std::size_t kMaxProviders = 20;

/// n x m table: entry (i, j) is true iff provider i is correct on example j.
/// n may be zero (an empty opponent set).
class CorrectnessMatrix {
 public:
  CorrectnessMatrix(std::size_t providers, std::size_t examples);
  static CorrectnessMatrix from_rows(const std::vector<std::vector<bool>>& rows);

  std::size_t providers() const { return providers_; }
  std::size_t examples() const { return examples_; }

  bool at(std::size_t i, std::size_t j) const { return cells_[i * examples_ + j] != 0; }
  void set(std::size_t i, std::size_t j, bool value) { cells_[i * examples_ + j] = value ? 1 : 0; }
  std::span<const std::uint8_t> row(std::size_t i) const {
    return {cells_.data() + i * examples_, examples_};
  }

  /// kappa(j): number of providers correct on example j.
  std::vector<std::uint32_t> column_counts() const;
  std::size_t row_count(std::size_t i) const;

  CorrectnessMatrix without_row(std::size_t i) const;
  CorrectnessMatrix with_row(std::size_t i, std::span<const std::uint8_t> replacement) const;
  CorrectnessMatrix appended(std::span<const std::uint8_t> extra_row) const;

  bool operator==(const CorrectnessMatrix&) const = default;

 private:
  std::size_t providers_;
  std::size_t examples_;
  std::vector<std::uint8_t> cells_;
};

std::vector<std::uint8_t> correctness_row(const Classifier& h, const Dataset& data);
CorrectnessMatrix compute_correctness(std::span<const Classifier> classifiers, const Dataset& data);

/// lcm(1, ..., max(n, 1)).
std::int64_t share_scale(std::size_t providers);

/// Market shares as integers: numerator_i = m * scale * mu_i exactly.
struct ExactShares {
  std::int64_t scale = 1;
  std::size_t examples = 0;
  std::vector<std::int64_t> numerators;
  std::size_t served = 0;

  double share(std::size_t i) const {
    return static_cast<double>(static_cast<long double>(numerators[i]) /
                               (static_cast<long double>(scale) * static_cast<long double>(examples)));
  }
};

ExactShares exact_shares(const CorrectnessMatrix& c);

/// mu_i = (1/m) sum_j C(i,j) / kappa(j), in expectation over uniform tie-breaking.
std::vector<double> market_shares(const CorrectnessMatrix& c);

/// Fraction of examples served by at least one provider.
double welfare(const CorrectnessMatrix& c);

double accuracy(const Classifier& h, const Dataset& data);

/// Mass of examples where h_i is correct and h_j is wrong.
double partial_discrepancy(const Classifier& h_i, const Classifier& h_j, const Dataset& data);

/// kappa_{-i}(j): providers other than i that are correct on example j.
std::vector<std::uint32_t> competitor_counts(const CorrectnessMatrix& c, std::size_t i);

/// w_i(x_j) = 1 / (1 + kappa_{-i}(j)).
std::vector<double> competition_weights(const CorrectnessMatrix& c, std::size_t i);

/// (1/m) sum_j w_i(x_j) C(i,j). Goes through the same integer reduction as
/// market_shares, so the two agree bit for bit.
double weighted_share_identity(const CorrectnessMatrix& c, std::size_t i);

/// m * scale * (share a responder with correctness `row` would earn) given the
/// per-example competitor counts. `scale` must be divisible by every 1 + count.
std::int64_t responder_numerator(std::span<const std::uint32_t> counts, std::span<const std::uint8_t> row,
                                 std::int64_t scale);

using Decomposition = std::map<std::uint32_t, double>;

/// Mass of examples whose set of correct providers is exactly each bitmask.
/// Subsets with zero mass are omitted.
Decomposition subset_decomposition(const CorrectnessMatrix& c);

struct MarketOutcome {
  std::vector<double> shares;
  std::vector<double> accuracies;
  double welfare = 0.0;
  std::optional<double> hhi;  // undefined when nobody is served
  Decomposition decomposition;
  ExactShares exact;
};

/// Herfindahl index over shares of the served market, sum_i (mu_i / W)^2.
/// Throws std::domain_error when welfare is zero.
double hhi(const MarketOutcome& outcome);

MarketOutcome evaluate_market(const CorrectnessMatrix& c);
MarketOutcome evaluate_market(std::span<const Classifier> classifiers, const Dataset& data);

}  // namespace accmarket
