#include "accmarket/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "accmarket/threshold_games.hpp"

namespace accmarket {
namespace {

double softplus(double u) { return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u)); }

double sigmoid(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

double tie_tolerance(std::span<const double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  return 1e-12 * std::max(total, 1.0);
}

// Objective at (theta, b); fills grad (size d + 1) when non-null.
double evaluate(const LearnerConfig& cfg, const Dataset& data, std::span<const double> weights,
                std::span<const double> theta, double b, std::vector<double>* grad) {
  const std::size_t m = data.size();
  const std::size_t d = data.dim();
  if (grad) grad->assign(d + 1, 0.0);
  double loss = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    if (weights[j] == 0.0) continue;
    const auto x = data.row(j);
    double s = b;
    for (std::size_t f = 0; f < d; ++f) s += theta[f] * x[f];
    const double y = data.label(j);
    double dl = 0.0;
    if (cfg.loss == Loss::Logistic) {
      loss += weights[j] * softplus(-y * s);
      dl = -y * sigmoid(-y * s);
    } else {
      const double margin = 1.0 - y * s;
      if (margin > 0.0) {
        loss += weights[j] * margin;
        dl = -y;
      }
    }
    if (grad && dl != 0.0) {
      const double c = weights[j] * dl;
      for (std::size_t f = 0; f < d; ++f) (*grad)[f] += c * x[f];
      (*grad)[d] += c;
    }
  }
  const double inv_m = 1.0 / static_cast<double>(m);
  double reg = 0.0;
  for (double t : theta) reg += t * t;
  if (grad) {
    for (std::size_t f = 0; f < d; ++f) (*grad)[f] = (*grad)[f] * inv_m + 2.0 * cfg.lambda * theta[f];
    (*grad)[d] *= inv_m;
  }
  return loss * inv_m + cfg.lambda * reg;
}

FitReport fit_linear(const LearnerConfig& cfg, const Dataset& data, std::span<const double> weights) {
  const std::size_t d = data.dim();
  std::vector<double> theta(d, 0.0);
  double b = 0.0;
  if (cfg.random_init) {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> g(0.0, 0.01);
    for (auto& t : theta) t = g(rng);
    b = g(rng);
  }

  FitReport report;
  std::vector<double> grad;
  double obj = 0.0;
  while (true) {
    obj = evaluate(cfg, data, weights, theta, b, &grad);
    if (!std::isfinite(obj)) {
      throw std::runtime_error("linear learner diverged at iteration " + std::to_string(report.iterations) +
                               " (objective is not finite; lower the learning rate)");
    }
    if (cfg.record_trace) report.trace.push_back(obj);
    double norm2 = 0.0;
    for (double g : grad) norm2 += g * g;
    if (std::sqrt(norm2) < cfg.tol) {
      report.converged = true;
      break;
    }
    if (report.iterations >= cfg.max_iters) break;
    for (std::size_t f = 0; f < d; ++f) theta[f] -= cfg.learning_rate * grad[f];
    b -= cfg.learning_rate * grad[d];
    ++report.iterations;
  }
  for (double t : theta) {
    if (!std::isfinite(t)) throw std::runtime_error("linear learner produced non-finite parameters");
  }
  report.final_objective = obj;
  report.classifier = Classifier::linear(std::move(theta), b);
  return report;
}

}  // namespace

std::string to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::WeightedLinear: return "linear";
    case LearnerKind::WeightedStump: return "stump";
    case LearnerKind::FiniteMenu: return "menu";
    case LearnerKind::Threshold: return "threshold";
  }
  return "unknown";
}

std::string to_string(Loss loss) { return loss == Loss::Logistic ? "logistic" : "hinge"; }

LearnerKind parse_learner_kind(const std::string& text) {
  if (text == "linear") return LearnerKind::WeightedLinear;
  if (text == "stump") return LearnerKind::WeightedStump;
  if (text == "menu") return LearnerKind::FiniteMenu;
  if (text == "threshold") return LearnerKind::Threshold;
  throw std::invalid_argument("unknown learner kind '" + text + "' (expected linear, stump, menu or threshold)");
}

Loss parse_loss(const std::string& text) {
  if (text == "logistic") return Loss::Logistic;
  if (text == "hinge") return Loss::Hinge;
  throw std::invalid_argument("unknown loss '" + text + "' (expected logistic or hinge)");
}

void LearnerConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("learner lambda must be >= 0");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("learner learning_rate must be > 0");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("learner tol must be > 0");
  if (kind == LearnerKind::FiniteMenu && menu.empty()) {
    throw std::invalid_argument("menu learner needs a nonempty menu");
  }
}

void check_weights(std::span<const double> weights, std::size_t m) {
  if (weights.size() != m) {
    throw std::invalid_argument("weights have length " + std::to_string(weights.size()) + " but data has " +
                                std::to_string(m) + " examples");
  }
  bool any = false;
  for (std::size_t j = 0; j < m; ++j) {
    if (!std::isfinite(weights[j]) || weights[j] < 0.0) {
      throw std::invalid_argument("weight " + std::to_string(j) + " is negative or not finite");
    }
    any = any || weights[j] > 0.0;
  }
  if (!any) throw std::invalid_argument("all weights are zero");
}

double weighted_accuracy(const Classifier& h, const Dataset& data, std::span<const double> weights) {
  h.check_compatible(data);
  if (weights.size() != data.size()) throw std::invalid_argument("weights do not match the dataset size");
  double total = 0.0;
  for (std::size_t j = 0; j < data.size(); ++j) {
    if (h.predict(data, j) == data.label(j)) total += weights[j];
  }
  return total / static_cast<double>(data.size());
}

double objective(const LearnerConfig& cfg, const Dataset& data, std::span<const double> weights,
                 const Classifier& h) {
  const auto* rule = std::get_if<LinearRule>(&h.rule());
  if (!rule) throw std::invalid_argument("the proxy objective is defined for linear classifiers only");
  h.check_compatible(data);
  check_weights(weights, data.size());
  return evaluate(cfg, data, weights, rule->weights, rule->bias, nullptr);
}

std::vector<double> objective_gradient(const LearnerConfig& cfg, const Dataset& data,
                                       std::span<const double> weights, const LinearRule& rule) {
  if (rule.weights.size() != data.dim()) throw std::invalid_argument("gradient: dimension mismatch");
  check_weights(weights, data.size());
  std::vector<double> grad;
  evaluate(cfg, data, weights, rule.weights, rule.bias, &grad);
  return grad;
}

StumpFit fit_weighted_stump(const Dataset& data, std::span<const double> weights) {
  check_weights(weights, data.size());
  const std::size_t m = data.size();
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  const double tol = tie_tolerance(weights);
  double pos_total = 0.0;
  for (std::size_t j = 0; j < m; ++j) pos_total += data.label(j) == kPositive ? weights[j] : 0.0;

  double best = -1.0;
  std::size_t best_feature = 0;
  double best_tau = kNegInf;
  int best_polarity = 1;
  auto offer = [&](double score, std::size_t f, double tau, int pol) {
    if (score > best + tol) {
      best = score;
      best_feature = f;
      best_tau = tau;
      best_polarity = pol;
    }
  };

  std::vector<std::size_t> order(m);
  for (std::size_t f = 0; f < data.dim(); ++f) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return data.at(l, f) < data.at(r, f); });
    // score of polarity +1 at the current threshold
    double plus = pos_total;
    offer(plus, f, kNegInf, 1);
    offer(total - plus, f, kNegInf, -1);
    std::size_t i = 0;
    while (i < m) {
      const double v = data.at(order[i], f);
      std::size_t j = i;
      for (; j < m && data.at(order[j], f) == v; ++j) {
        const std::size_t e = order[j];
        plus += data.label(e) == kNegative ? weights[e] : -weights[e];
      }
      if (j == m) break;
      const double next = data.at(order[j], f);
      double tau = v + (next - v) / 2.0;
      if (tau >= next) tau = v;
      offer(plus, f, tau, 1);
      offer(total - plus, f, tau, -1);
      i = j;
    }
  }

  StumpFit out;
  out.classifier = Classifier::stump(best_feature, best_tau, best_polarity);
  out.score = weighted_accuracy(out.classifier, data, weights);
  return out;
}

std::size_t select_from_menu(std::span<const Classifier> menu, const Dataset& data,
                             std::span<const double> weights) {
  if (menu.empty()) throw std::invalid_argument("menu learner needs a nonempty menu");
  check_weights(weights, data.size());
  const double tol = tie_tolerance(weights);
  std::size_t best = 0;
  double best_score = weighted_accuracy(menu[0], data, weights);
  for (std::size_t k = 1; k < menu.size(); ++k) {
    const double s = weighted_accuracy(menu[k], data, weights);
    if (s > best_score + tol / static_cast<double>(data.size())) {
      best = k;
      best_score = s;
    }
  }
  return best;
}

FitReport fit(const LearnerConfig& cfg, const Dataset& data, std::span<const double> weights) {
  cfg.validate();
  check_weights(weights, data.size());
  switch (cfg.kind) {
    case LearnerKind::WeightedLinear:
      return fit_linear(cfg, data, weights);
    case LearnerKind::WeightedStump: {
      auto s = fit_weighted_stump(data, weights);
      return FitReport{s.classifier, -s.score, 0, true, {}};
    }
    case LearnerKind::FiniteMenu: {
      const std::size_t k = select_from_menu(cfg.menu, data, weights);
      return FitReport{cfg.menu[k], -weighted_accuracy(cfg.menu[k], data, weights), 0, true, {}};
    }
    case LearnerKind::Threshold: {
      if (cfg.feature >= data.dim()) {
        throw std::invalid_argument("threshold learner feature " + std::to_string(cfg.feature) +
                                    " out of range for dimension " + std::to_string(data.dim()));
      }
      std::vector<double> xs(data.size());
      for (std::size_t j = 0; j < data.size(); ++j) xs[j] = data.at(j, cfg.feature);
      const auto r = empirical_threshold_br(xs, data.labels(), weights);
      return FitReport{Classifier::threshold(r.tau, cfg.feature), -r.share, 0, true, {}};
    }
  }
  throw std::logic_error("unhandled learner kind");
}

}  // namespace accmarket
