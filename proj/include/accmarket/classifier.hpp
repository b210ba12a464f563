#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "accmarket/dataset.hpp"

namespace accmarket {

/// +1 iff x[feature] > tau. tau may be -inf (always +1) or +inf (always -1).
struct ThresholdRule {
  double tau = 0.0;
  std::size_t feature = 0;
  bool operator==(const ThresholdRule&) const = default;
};

/// +1 iff <weights, x> + bias > 0.
struct LinearRule {
  std::vector<double> weights;
  double bias = 0.0;
  bool operator==(const LinearRule&) const = default;
};

/// polarity iff x[feature] > tau, else -polarity.
struct StumpRule {
  std::size_t feature = 0;
  double tau = 0.0;
  int polarity = 1;
  bool operator==(const StumpRule&) const = default;
};

/// Fixed per-example predictions, valid only on the dataset they were bound to.
struct EnumeratedRule {
  std::vector<Label> predictions;
  std::uint64_t dataset_identity = 0;
  bool operator==(const EnumeratedRule&) const = default;
};

enum class ClassifierKind { Threshold, Linear, Stump, Enumerated };

class Classifier {
 public:
  using Rule = std::variant<ThresholdRule, LinearRule, StumpRule, EnumeratedRule>;

  Classifier() : rule_(ThresholdRule{}) {}
  explicit Classifier(Rule rule);

  static Classifier threshold(double tau, std::size_t feature = 0);
  static Classifier linear(std::vector<double> weights, double bias);
  static Classifier stump(std::size_t feature, double tau, int polarity);
  static Classifier enumerated(std::vector<Label> predictions, const Dataset& bound_to);
  static Classifier constant(Label label) { return threshold(label == kPositive ? -kInf : kInf); }

  ClassifierKind kind() const { return static_cast<ClassifierKind>(rule_.index()); }
  const Rule& rule() const { return rule_; }

  /// Throws std::invalid_argument when the classifier cannot be evaluated on `data`.
  void check_compatible(const Dataset& data) const;

  Label predict(const Dataset& data, std::size_t j) const;
  std::vector<Label> predict_all(const Dataset& data) const;

  /// Re-expresses a classifier trained on a feature prefix in a wider feature space.
  Classifier lifted_to(std::size_t dim) const;

  std::string describe() const;

  bool operator==(const Classifier&) const = default;

  static constexpr double kInf = std::numeric_limits<double>::infinity();

 private:
  Rule rule_;
};

/// FNV-1a over a prediction vector; identifies a strategy by its behaviour on a sample.
std::uint64_t prediction_fingerprint(const std::vector<Label>& predictions);

}  // namespace accmarket
