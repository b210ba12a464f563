#include <algorithm>
#include <cmath>
#include <string>

#include "accmarket/learners.hpp"
#include "accmarket/threshold_games.hpp"
#include "accmarket/verify.hpp"
#include "verify_util.hpp"

namespace accmarket {
namespace {

using namespace detail;

void note_failure(PropertyResult& r, const std::string& what) {
  if (r.passed) r.detail = what;
  r.passed = false;
}

// Features are drawn from a coarse grid part of the time so that ties are common.
Dataset random_dataset(Rng& rng, std::size_t m, std::size_t d, bool coarse) {
  std::vector<double> xs(m * d);
  std::vector<Label> ys(m);
  for (auto& x : xs) x = coarse ? std::round(uniform_real(rng, -3.0, 3.0)) : uniform_real(rng, -1.0, 1.0);
  for (std::size_t j = 0; j < m; ++j) {
    const double s = xs[j * d] + 0.5 * uniform_real(rng, -1.0, 1.0);
    ys[j] = s > 0.0 ? kPositive : kNegative;
  }
  return Dataset(std::move(xs), d, std::move(ys));
}

// Weights of the form 1 / (1 + k), as produced by competitors.
std::vector<double> random_weights(Rng& rng, std::size_t m) {
  std::vector<double> w(m);
  for (auto& v : w) v = 1.0 / (1.0 + static_cast<double>(uniform_index(rng, 0, 3)));
  return w;
}

// Every stump x[f] > v (or the constant) with both polarities, scored directly.
double stump_oracle(const Dataset& data, const std::vector<double>& w) {
  const std::size_t m = data.size();
  double best = 0.0;
  for (std::size_t f = 0; f < data.dim(); ++f) {
    std::vector<double> cuts{kNegInf};
    for (std::size_t j = 0; j < m; ++j) cuts.push_back(data.at(j, f));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (double v : cuts) {
      double plus = 0.0;
      double minus = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const Label pred = data.at(j, f) > v ? kPositive : kNegative;
        (pred == data.label(j) ? plus : minus) += w[j];
      }
      best = std::max({best, plus, minus});
    }
  }
  return best / static_cast<double>(m);
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

std::vector<PropertyResult> verify_learners(const VerifyOptions& opts) {
  const bool full = opts.scale == Scale::Full;
  std::vector<PropertyResult> out;

  out.push_back(timed_property("learners: weighted stump matches exhaustive search", [&](PropertyResult& r) {
    Rng rng(opts.seed ^ 0x41);
    const std::size_t count = full ? 5000 : 1000;
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t m = uniform_index(rng, 1, 200);
      const std::size_t d = uniform_index(rng, 1, 5);
      const Dataset data = random_dataset(rng, m, d, k % 2 == 0);
      const auto w = random_weights(rng, m);
      const auto fitted = fit_weighted_stump(data, w);
      const double oracle = stump_oracle(data, w);
      const double direct = weighted_accuracy(fitted.classifier, data, w);
      if (std::abs(fitted.score - oracle) > 1e-12 || direct != fitted.score) {
        note_failure(r, "m=" + std::to_string(m) + " d=" + std::to_string(d) + ": fit " +
                            std::to_string(fitted.score) + " vs oracle " + std::to_string(oracle));
      }
      ++r.cases;
    }
  }));

  out.push_back(timed_property("learners: proxy gradient matches finite differences", [&](PropertyResult& r) {
    Rng rng(opts.seed ^ 0x42);
    std::size_t k = 0;
    while (r.cases < 100) {
      LearnerConfig cfg;
      cfg.kind = LearnerKind::WeightedLinear;
      cfg.loss = k++ % 2 == 0 ? Loss::Logistic : Loss::Hinge;
      cfg.lambda = uniform_real(rng, 0.0, 0.1);
      const std::size_t m = uniform_index(rng, 5, 40);
      const std::size_t d = uniform_index(rng, 1, 4);
      const Dataset data = random_dataset(rng, m, d, false);
      const auto w = random_weights(rng, m);
      LinearRule rule;
      for (std::size_t f = 0; f < d; ++f) rule.weights.push_back(uniform_real(rng, -2.0, 2.0));
      rule.bias = uniform_real(rng, -1.0, 1.0);
      if (cfg.loss == Loss::Hinge) {
        // stay away from the kink so the difference quotient is meaningful
        bool near_kink = false;
        for (std::size_t j = 0; j < m; ++j) {
          double s = rule.bias;
          for (std::size_t f = 0; f < d; ++f) s += rule.weights[f] * data.at(j, f);
          near_kink = near_kink || std::abs(1.0 - data.label(j) * s) < 1e-3;
        }
        if (near_kink) continue;
      }
      const auto g = objective_gradient(cfg, data, w, rule);
      std::vector<double> fd(d + 1);
      constexpr double h = 1e-6;
      for (std::size_t p = 0; p <= d; ++p) {
        LinearRule up = rule;
        LinearRule down = rule;
        (p < d ? up.weights[p] : up.bias) += h;
        (p < d ? down.weights[p] : down.bias) -= h;
        fd[p] = (objective(cfg, data, w, Classifier(up)) - objective(cfg, data, w, Classifier(down))) / (2.0 * h);
      }
      std::vector<double> diff(d + 1);
      for (std::size_t p = 0; p <= d; ++p) diff[p] = g[p] - fd[p];
      const double rel = norm(diff) / std::max(norm(g), 1e-8);
      if (rel > 1e-4) note_failure(r, to_string(cfg.loss) + " relative error " + std::to_string(rel));
      ++r.cases;
    }
  }));

  out.push_back(timed_property("learners: logistic descent never increases the objective", [&](PropertyResult& r) {
    Rng rng(opts.seed ^ 0x43);
    for (std::size_t k = 0; k < 50; ++k) {
      LearnerConfig cfg;
      cfg.kind = LearnerKind::WeightedLinear;
      cfg.lambda = uniform_real(rng, 0.0, 0.01);
      cfg.max_iters = 300;
      cfg.record_trace = true;
      cfg.random_init = k % 2 == 1;
      cfg.seed = k;
      const std::size_t m = uniform_index(rng, 10, 100);
      const Dataset data = random_dataset(rng, m, uniform_index(rng, 1, 3), false);
      const auto w = random_weights(rng, m);
      const auto rep = fit(cfg, data, w);
      for (std::size_t t = 1; t < rep.trace.size(); ++t) {
        if (rep.trace[t] > rep.trace[t - 1] + 1e-15 * std::abs(rep.trace[t - 1])) {
          note_failure(r, "objective rose at iteration " + std::to_string(t));
          break;
        }
      }
      ++r.cases;
    }
  }));

  out.push_back(timed_property("learners: scaling weights leaves the fit unchanged", [&](PropertyResult& r) {
    Rng rng(opts.seed ^ 0x44);
    constexpr double c = 4.0;
    for (std::size_t k = 0; k < 200; ++k) {
      const std::size_t m = uniform_index(rng, 10, 80);
      const Dataset data = random_dataset(rng, m, uniform_index(rng, 1, 3), k % 2 == 0);
      const auto w = random_weights(rng, m);
      std::vector<double> cw(w);
      for (auto& v : cw) v *= c;

      const auto s1 = fit_weighted_stump(data, w).classifier;
      const auto s2 = fit_weighted_stump(data, cw).classifier;
      if (!(s1 == s2)) note_failure(r, "stump changed: " + s1.describe() + " vs " + s2.describe());

      LearnerConfig th;
      th.kind = LearnerKind::Threshold;
      if (!(fit(th, data, w).classifier == fit(th, data, cw).classifier)) note_failure(r, "threshold changed");

      LearnerConfig menu;
      menu.kind = LearnerKind::FiniteMenu;
      for (std::size_t s = 0; s < 5; ++s) {
        menu.menu.push_back(Classifier::stump(0, uniform_real(rng, -3.0, 3.0), s % 2 ? 1 : -1));
      }
      if (!(fit(menu, data, w).classifier == fit(menu, data, cw).classifier)) note_failure(r, "menu choice changed");

      if (k < 50) {
        LearnerConfig lin;
        lin.kind = LearnerKind::WeightedLinear;
        lin.lambda = 0.0;
        lin.max_iters = 200;
        lin.tol = 1e-300;
        LearnerConfig scaled = lin;
        scaled.learning_rate = lin.learning_rate / c;
        const auto a = fit(lin, data, w).classifier;
        const auto b = fit(scaled, data, cw).classifier;
        if (!(a == b)) note_failure(r, "linear iterates differ: " + a.describe() + " vs " + b.describe());
      }
      ++r.cases;
    }
  }));

  return out;
}

}  // namespace accmarket
