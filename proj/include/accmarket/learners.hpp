#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "accmarket/classifier.hpp"
#include "accmarket/dataset.hpp"

namespace accmarket {

enum class LearnerKind { WeightedLinear, WeightedStump, FiniteMenu, Threshold };
enum class Loss { Logistic, Hinge };

std::string to_string(LearnerKind kind);
std::string to_string(Loss loss);
LearnerKind parse_learner_kind(const std::string& text);
Loss parse_loss(const std::string& text);

struct LearnerConfig {
  LearnerKind kind = LearnerKind::WeightedStump;
  Loss loss = Loss::Logistic;
  double lambda = 1e-4;
  double learning_rate = 0.1;
  std::size_t max_iters = 5000;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  /// Random initial parameters (seeded) instead of zeros. Linear only.
  bool random_init = false;
  /// Feature used by the Threshold kind.
  std::size_t feature = 0;
  /// Strategies for the FiniteMenu kind.
  std::vector<Classifier> menu;
  /// Keep the objective value of every iterate in FitReport::trace. Linear only.
  bool record_trace = false;

  void validate() const;
  /// True for kinds whose fit is an exact weighted-accuracy maximizer.
  bool exact() const { return kind != LearnerKind::WeightedLinear; }
};

struct FitReport {
  Classifier classifier;
  double final_objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

/// sum_j w_j [h(x_j) = y_j] / m
double weighted_accuracy(const Classifier& h, const Dataset& data, std::span<const double> weights);

/// Throws std::invalid_argument unless weights has length m, is finite, nonnegative and not all zero.
void check_weights(std::span<const double> weights, std::size_t m);

/// Weighted ERM. Linear kinds minimize (1/m) sum_j w_j loss(y_j, <theta, x_j> + b) + lambda |theta|^2 by
/// full-batch gradient descent; the other kinds return an exact maximizer of weighted accuracy.
/// Throws std::runtime_error when the objective becomes non-finite.
FitReport fit(const LearnerConfig& cfg, const Dataset& data, std::span<const double> weights);

/// Regularized weighted proxy loss of a linear classifier. Throws for other kinds.
double objective(const LearnerConfig& cfg, const Dataset& data, std::span<const double> weights,
                 const Classifier& h);

/// Gradient of objective() with respect to (weights..., bias).
std::vector<double> objective_gradient(const LearnerConfig& cfg, const Dataset& data,
                                       std::span<const double> weights, const LinearRule& rule);

struct StumpFit {
  Classifier classifier;
  double score = 0.0;  // weighted accuracy
};

/// Exact weighted stump over every feature, every threshold in {-inf} and the midpoints between
/// consecutive distinct values, and both polarities. Ties go to the lowest feature, then the lowest
/// threshold, then polarity +1.
StumpFit fit_weighted_stump(const Dataset& data, std::span<const double> weights);

/// Menu element with the largest weighted accuracy; ties go to the lowest index.
std::size_t select_from_menu(std::span<const Classifier> menu, const Dataset& data,
                             std::span<const double> weights);

}  // namespace accmarket
