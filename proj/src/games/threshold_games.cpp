#include "accmarket/threshold_games.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace accmarket {
namespace {

constexpr double kLogClamp = 700.0;

double std_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double std_upper(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double mean_of(const GaussianMarketSpec& s, Label y) { return y == kPositive ? s.a : -s.a; }
double sigma_of(const GaussianMarketSpec& s, Label y) { return y == kPositive ? s.sigma_pos : s.sigma_neg; }

double distance(double c, double ref) {
  if (c == ref) return 0.0;
  return std::abs(c - ref);
}

}  // namespace

void GaussianMarketSpec::validate() const {
  if (!std::isfinite(a)) throw std::invalid_argument("gaussian spec: a must be finite");
  if (!(sigma_neg > 0.0) || !std::isfinite(sigma_neg)) {
    throw std::invalid_argument("gaussian spec: sigma_neg must be positive");
  }
  if (!(sigma_pos > 0.0) || !std::isfinite(sigma_pos)) {
    throw std::invalid_argument("gaussian spec: sigma_pos must be positive");
  }
  if (!(prior > 0.0 && prior < 1.0)) throw std::invalid_argument("gaussian spec: prior must lie in (0, 1)");
}

LogRatioQuadratic log_ratio_quadratic(const GaussianMarketSpec& s) {
  const double vn = s.sigma_neg * s.sigma_neg;
  const double vp = s.sigma_pos * s.sigma_pos;
  LogRatioQuadratic q;
  q.A = 1.0 / (2.0 * vn) - 1.0 / (2.0 * vp);
  q.B = s.a / vp + s.a / vn;
  q.C = std::log(s.sigma_neg / s.sigma_pos) + s.a * s.a / (2.0 * vn) - s.a * s.a / (2.0 * vp);
  return q;
}

double log_rho(const GaussianMarketSpec& s, double x) {
  const double dp = (x - s.a) / s.sigma_pos;
  const double dn = (x + s.a) / s.sigma_neg;
  return std::log(s.sigma_neg / s.sigma_pos) - 0.5 * dp * dp + 0.5 * dn * dn;
}

double rho(const GaussianMarketSpec& s, double x) {
  return std::exp(std::clamp(log_rho(s, x), -kLogClamp, kLogClamp));
}

double log_rho_slope(const GaussianMarketSpec& s, double x) {
  const auto q = log_ratio_quadratic(s);
  return 2.0 * q.A * x + q.B;
}

std::vector<double> rho_inverse(const GaussianMarketSpec& spec, double z, double lo, double hi) {
  if (!(z > 0.0)) throw std::invalid_argument("rho_inverse: target must be positive");
  if (!(lo < hi)) throw std::invalid_argument("rho_inverse: interval must satisfy lo < hi");
  const auto q = log_ratio_quadratic(spec);
  const double c0 = q.C - std::log(z);

  double root = 0.0;
  if (q.A == 0.0) {
    if (!(q.B > 0.0)) return {};
    root = -c0 / q.B;
  } else {
    const double disc = q.B * q.B - 4.0 * q.A * c0;
    if (!(disc > 0.0)) return {};
    const double sq = std::sqrt(disc);
    // The root where 2Ax + B = +sqrt(disc).
    root = q.B >= 0.0 ? 2.0 * c0 / (-q.B - sq) : (-q.B + sq) / (2.0 * q.A);
  }
  if (!std::isfinite(root)) return {};
  const double slope = 2.0 * q.A * root + q.B;
  if (!(slope > 0.0)) return {};
  root -= (log_rho(spec, root) - std::log(z)) / slope;
  if (root < lo || root > hi) return {};
  return {root};
}

double class_cdf(const GaussianMarketSpec& spec, Label y, double t) {
  if (t == kNegInf) return 0.0;
  if (t == kPosInf) return 1.0;
  return std_cdf((t - mean_of(spec, y)) / sigma_of(spec, y));
}

double class_mass(const GaussianMarketSpec& spec, Label y, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  const double mu = mean_of(spec, y);
  const double sd = sigma_of(spec, y);
  const double zl = lo == kNegInf ? kNegInf : (lo - mu) / sd;
  const double zh = hi == kPosInf ? kPosInf : (hi - mu) / sd;
  if (zl >= 0.0) return std_upper(zl) - std_upper(zh);
  return std_cdf(zh) - std_cdf(zl);
}

double threshold_accuracy(double tau, const GaussianMarketSpec& spec) {
  return spec.prior * class_mass(spec, kPositive, tau, kPosInf) +
         (1.0 - spec.prior) * class_mass(spec, kNegative, kNegInf, tau);
}

double optimal_threshold(const GaussianMarketSpec& spec) {
  spec.validate();
  std::vector<double> candidates = rho_inverse(spec, (1.0 - spec.prior) / spec.prior);
  candidates.push_back(kNegInf);
  candidates.push_back(kPosInf);
  double best = candidates.front();
  double best_acc = threshold_accuracy(best, spec);
  for (std::size_t k = 1; k < candidates.size(); ++k) {
    const double acc = threshold_accuracy(candidates[k], spec);
    if (acc > best_acc) {
      best = candidates[k];
      best_acc = acc;
    }
  }
  return best;
}

double analytic_threshold_share(double tau_self, double tau_opp, const GaussianMarketSpec& spec) {
  const double acc = threshold_accuracy(tau_self, spec);
  double delta = 0.0;
  if (tau_self < tau_opp) {
    delta = spec.prior * class_mass(spec, kPositive, tau_self, tau_opp);
  } else if (tau_self > tau_opp) {
    delta = (1.0 - spec.prior) * class_mass(spec, kNegative, tau_opp, tau_self);
  }
  return 0.5 * (acc + delta);
}

AnalyticOutcome analytic_outcome(std::span<const double> taus, const GaussianMarketSpec& spec) {
  spec.validate();
  const std::size_t n = taus.size();
  for (double t : taus) {
    if (std::isnan(t)) throw std::invalid_argument("analytic_outcome: threshold is NaN");
  }
  std::vector<double> pts(taus.begin(), taus.end());
  pts.push_back(kNegInf);
  pts.push_back(kPosInf);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  AnalyticOutcome out;
  out.shares.assign(n, 0.0);
  out.accuracies.assign(n, 0.0);
  const double p = spec.prior;
  const double q = 1.0 - spec.prior;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double lo = pts[k];
    const double hi = pts[k + 1];
    const double pos = p * class_mass(spec, kPositive, lo, hi);
    const double neg = q * class_mass(spec, kNegative, lo, hi);
    std::size_t says_pos = 0;
    for (double t : taus) says_pos += t <= lo ? 1 : 0;
    const std::size_t says_neg = n - says_pos;
    if (says_pos > 0) out.welfare += pos;
    if (says_neg > 0) out.welfare += neg;
    for (std::size_t i = 0; i < n; ++i) {
      if (taus[i] <= lo) {
        out.accuracies[i] += pos;
        out.shares[i] += pos / static_cast<double>(says_pos);
      } else {
        out.accuracies[i] += neg;
        out.shares[i] += neg / static_cast<double>(says_neg);
      }
    }
  }
  return out;
}

std::pair<double, double> response_targets(const GaussianMarketSpec& spec) {
  const double r = (1.0 - spec.prior) / spec.prior;
  return {0.5 * r, 2.0 * r};
}

std::vector<double> best_response_candidates(const GaussianMarketSpec& spec, double tau_opp, double lo,
                                             double hi) {
  spec.validate();
  if (!(lo < hi)) throw std::invalid_argument("best response interval must satisfy lo < hi");
  std::vector<double> c{lo, hi};
  if (tau_opp >= lo && tau_opp <= hi) c.push_back(tau_opp);
  const auto [z_left, z_right] = response_targets(spec);
  for (double r : rho_inverse(spec, z_left, lo, hi)) c.push_back(r);
  for (double r : rho_inverse(spec, z_right, lo, hi)) c.push_back(r);
  return c;
}

ThresholdResponse analytic_best_response(const GaussianMarketSpec& spec, double tau_opp, double lo, double hi) {
  const auto candidates = best_response_candidates(spec, tau_opp, lo, hi);
  std::vector<double> shares(candidates.size());
  double top = -1.0;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    shares[k] = analytic_threshold_share(candidates[k], tau_opp, spec);
    top = std::max(top, shares[k]);
  }
  std::size_t pick = candidates.size();
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (shares[k] < top - kShareTieTolerance) continue;
    if (pick == candidates.size()) {
      pick = k;
      continue;
    }
    const double dk = distance(candidates[k], tau_opp);
    const double dp = distance(candidates[pick], tau_opp);
    if (dk < dp || (dk == dp && candidates[k] < candidates[pick])) pick = k;
  }
  return {candidates[pick], shares[pick]};
}

ThresholdResponse empirical_threshold_br(std::span<const double> xs, std::span<const Label> labels,
                                         std::span<const double> weights) {
  const std::size_t m = xs.size();
  if (m == 0) throw std::invalid_argument("threshold best response needs at least one example");
  if (labels.size() != m || weights.size() != m) {
    throw std::invalid_argument("threshold best response: xs, labels and weights differ in length");
  }
  double total = 0.0;
  double score = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    if (std::isnan(xs[j])) throw std::invalid_argument("threshold best response: NaN feature");
    if (!(weights[j] >= 0.0) || !std::isfinite(weights[j])) {
      throw std::invalid_argument("threshold best response: weight " + std::to_string(j) + " is invalid");
    }
    total += weights[j];
    if (labels[j] == kPositive) score += weights[j];
  }
  const double tol = 1e-12 * std::max(total, 1.0);

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return xs[l] < xs[r]; });

  double best = score;
  double best_tau = kNegInf;
  std::size_t i = 0;
  while (i < m) {
    const double v = xs[order[i]];
    std::size_t j = i;
    for (; j < m && xs[order[j]] == v; ++j) {
      const std::size_t e = order[j];
      score += labels[e] == kNegative ? weights[e] : -weights[e];
    }
    double tau = kPosInf;
    if (j < m) {
      const double next = xs[order[j]];
      tau = v + (next - v) / 2.0;
      if (tau >= next) tau = v;
    }
    if (score > best + tol) {
      best = score;
      best_tau = tau;
    }
    i = j;
  }

  double exact = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const Label pred = xs[j] > best_tau ? kPositive : kNegative;
    if (pred == labels[j]) exact += weights[j];
  }
  return {best_tau, exact / static_cast<double>(m)};
}

}  // namespace accmarket
