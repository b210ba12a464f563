#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "accmarket/dataset.hpp"

namespace accmarket {

/// Class-conditional Gaussians: x | y ~ Normal(a * y, sigma_y), P(y = +1) = prior.
/// sigma_neg and sigma_pos are standard deviations.
struct GaussianMarketSpec {
  double a = 1.0;
  double sigma_neg = 1.0;
  double sigma_pos = 1.0;
  double prior = 0.5;

  /// Throws std::invalid_argument unless sigmas > 0 and prior in (0, 1).
  void validate() const;
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

/// log rho(x) = A x^2 + B x + C.
struct LogRatioQuadratic {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
};

LogRatioQuadratic log_ratio_quadratic(const GaussianMarketSpec& spec);

double log_rho(const GaussianMarketSpec& spec, double x);
/// f_+(x) / f_-(x); clamped away from 0 and infinity for finite x.
double rho(const GaussianMarketSpec& spec, double x);
/// d/dx log rho; has the sign of rho'.
double log_rho_slope(const GaussianMarketSpec& spec, double x);

/// Every x in [lo, hi] with rho(x) = z and rho'(x) > 0, ascending.
std::vector<double> rho_inverse(const GaussianMarketSpec& spec, double z, double lo = kNegInf,
                                double hi = kPosInf);

/// P(x <= t | y) for extended t.
double class_cdf(const GaussianMarketSpec& spec, Label y, double t);
/// P(lo < x <= hi | y), accurate in both tails.
double class_mass(const GaussianMarketSpec& spec, Label y, double lo, double hi);

double threshold_accuracy(double tau, const GaussianMarketSpec& spec);

/// Accuracy-maximizing threshold over the extended reals.
double optimal_threshold(const GaussianMarketSpec& spec);

/// Expected share of h_{tau_self} against h_{tau_opp} under the continuous distribution.
double analytic_threshold_share(double tau_self, double tau_opp, const GaussianMarketSpec& spec);

struct AnalyticOutcome {
  std::vector<double> shares;
  std::vector<double> accuracies;
  double welfare = 0.0;
};

/// Shares of any number of threshold providers, integrated interval by interval.
AnalyticOutcome analytic_outcome(std::span<const double> taus, const GaussianMarketSpec& spec);

/// Ratio targets at which a responder's share is stationary, left and right of the opponent.
/// (1/2, 2) for a balanced prior.
std::pair<double, double> response_targets(const GaussianMarketSpec& spec);

struct ThresholdResponse {
  double tau = 0.0;
  double share = 0.0;
};

inline constexpr double kShareTieTolerance = 1e-12;

/// Candidate thresholds for a best response within [lo, hi].
std::vector<double> best_response_candidates(const GaussianMarketSpec& spec, double tau_opp, double lo = kNegInf,
                                             double hi = kPosInf);

/// Maximizer over the candidate set; ties go to the candidate nearest tau_opp, then the smaller one.
ThresholdResponse analytic_best_response(const GaussianMarketSpec& spec, double tau_opp, double lo = kNegInf,
                                         double hi = kPosInf);

/// Exact weighted ERM over thresholds on one feature: maximizes sum_j w_j [h(x_j) = y_j] / m over
/// -inf, midpoints between consecutive distinct values, and +inf. Ties go to the leftmost candidate.
ThresholdResponse empirical_threshold_br(std::span<const double> xs, std::span<const Label> labels,
                                         std::span<const double> weights);

}  // namespace accmarket
