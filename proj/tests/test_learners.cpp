#include <doctest.h>

#include <cmath>
#include <random>

#include "accmarket/learners.hpp"
#include "accmarket/market.hpp"
#include "test_util.hpp"

using namespace accmarket;

namespace {

Dataset separable_2d() {
  std::vector<std::vector<double>> rows;
  std::vector<Label> ys;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  while (rows.size() < 40) {
    const double x = u(rng);
    const double y = u(rng);
    const double s = x + 2.0 * y;
    if (std::abs(s) < 0.3) continue;
    rows.push_back({x, y});
    ys.push_back(s > 0 ? kPositive : kNegative);
  }
  return Dataset::from_rows(rows, ys);
}

}  // namespace

TEST_CASE("logistic fit separates separable data") {
  const auto data = separable_2d();
  LearnerConfig cfg;
  cfg.kind = LearnerKind::WeightedLinear;
  cfg.lambda = 0.0;
  cfg.learning_rate = 0.5;
  cfg.max_iters = 20000;
  const std::vector<double> w(data.size(), 1.0);
  const auto rep = fit(cfg, data, w);
  CHECK(accuracy(rep.classifier, data) == 1.0);
  CHECK(weighted_accuracy(rep.classifier, data, w) == 1.0);
}

TEST_CASE("all weight on one example") {
  const Dataset data({-2.0, -1.0, 0.5, 1.0, 3.0}, 1, {kNegative, kPositive, kNegative, kPositive, kPositive});
  for (std::size_t k = 0; k < data.size(); ++k) {
    std::vector<double> w(data.size(), 0.0);
    w[k] = 1.0;
    for (auto kind : {LearnerKind::WeightedLinear, LearnerKind::WeightedStump, LearnerKind::Threshold}) {
      LearnerConfig cfg;
      cfg.kind = kind;
      const auto h = fit(cfg, data, w).classifier;
      CHECK(h.predict(data, k) == data.label(k));
    }
  }
}

TEST_CASE("weighted stump equals brute force on a 50 x 3 sample") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::vector<double>> rows;
  std::vector<Label> ys;
  std::vector<double> w;
  for (int j = 0; j < 50; ++j) {
    rows.push_back({g(rng), std::round(g(rng) * 2.0), g(rng)});
    ys.push_back(rows.back()[0] + rows.back()[2] + g(rng) > 0 ? kPositive : kNegative);
    w.push_back(1.0 / (1.0 + static_cast<double>(rng() % 3)));
  }
  const auto data = Dataset::from_rows(rows, ys);
  double best = 0.0;
  for (std::size_t f = 0; f < 3; ++f) {
    std::vector<double> cuts{-Classifier::kInf};
    for (const auto& r : rows) cuts.push_back(r[f]);
    for (double c : cuts) {
      for (int pol : {1, -1}) best = std::max(best, weighted_accuracy(Classifier::stump(f, c, pol), data, w));
    }
  }
  const auto s = fit_weighted_stump(data, w);
  CHECK(s.score == doctest::Approx(best).epsilon(1e-14));
}

TEST_CASE("stump tie order") {
  // two identical features: the first one wins
  const auto data = Dataset::from_rows({{0, 0}, {1, 1}, {2, 2}}, {kNegative, kPositive, kPositive});
  const std::vector<double> w{1, 1, 1};
  const auto s = fit_weighted_stump(data, w);
  const auto& rule = std::get<StumpRule>(s.classifier.rule());
  CHECK(rule.feature == 0);
  CHECK(rule.tau == 0.5);
  CHECK(rule.polarity == 1);
  CHECK(s.score == 1.0);
}

TEST_CASE("objective reference values") {
  const auto data = separable_2d();
  std::vector<double> w(data.size());
  double total = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) total += (w[j] = 0.25 + 0.05 * static_cast<double>(j % 4));
  LearnerConfig cfg;
  cfg.kind = LearnerKind::WeightedLinear;
  cfg.lambda = 0.0;
  const double zero = objective(cfg, data, w, Classifier::linear({0.0, 0.0}, 0.0));
  CHECK(zero == doctest::Approx(total / static_cast<double>(data.size()) * std::log(2.0)).epsilon(1e-14));

  cfg.loss = Loss::Hinge;
  // margins |x + 2y| >= 0.3, so scaling by 10 puts every margin at >= 3
  CHECK(objective(cfg, data, w, Classifier::linear({10.0, 20.0}, 0.0)) == 0.0);
  CHECK_THROWS_AS(objective(cfg, data, w, Classifier::threshold(0.0)), std::invalid_argument);
}

TEST_CASE("gradient against central differences at one point") {
  const auto data = separable_2d();
  const std::vector<double> w(data.size(), 0.7);
  LearnerConfig cfg;
  cfg.kind = LearnerKind::WeightedLinear;
  cfg.lambda = 0.05;
  const LinearRule rule{{0.3, -0.8}, 0.2};
  const auto g = objective_gradient(cfg, data, w, rule);
  const double h = 1e-6;
  for (std::size_t p = 0; p < 3; ++p) {
    LinearRule up = rule;
    LinearRule dn = rule;
    (p < 2 ? up.weights[p] : up.bias) += h;
    (p < 2 ? dn.weights[p] : dn.bias) -= h;
    const double fd = (objective(cfg, data, w, Classifier(up)) - objective(cfg, data, w, Classifier(dn))) / (2 * h);
    CHECK(g[p] == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("menu selection") {
  const Dataset data({0, 1, 2, 3}, 1, {kNegative, kNegative, kPositive, kPositive});
  const std::vector<Classifier> menu{Classifier::threshold(0.5), Classifier::threshold(1.5), Classifier::threshold(1.7)};
  const std::vector<double> w{1, 1, 1, 1};
  CHECK(select_from_menu(menu, data, w) == 1);
  const std::vector<double> lopsided{0.0, 1.0, 0.0, 0.0};
  CHECK(select_from_menu(menu, data, lopsided) == 1);
  const std::vector<double> first{1.0, 0.0, 0.0, 0.0};
  CHECK(select_from_menu(menu, data, first) == 0);
}

TEST_CASE("bad inputs") {
  const Dataset data({0, 1}, 1, {kNegative, kPositive});
  LearnerConfig cfg;
  CHECK_THROWS_AS(fit(cfg, data, std::vector<double>{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit(cfg, data, std::vector<double>{0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit(cfg, data, std::vector<double>{-1.0, 2.0}), std::invalid_argument);
  cfg.kind = LearnerKind::FiniteMenu;
  CHECK_THROWS_AS(fit(cfg, data, std::vector<double>{1.0, 1.0}), std::invalid_argument);
  LearnerConfig lin;
  lin.kind = LearnerKind::WeightedLinear;
  lin.learning_rate = 1e6;
  lin.lambda = 1.0;
  const Dataset big({1e3, -1e3}, 1, {kPositive, kNegative});
  CHECK_THROWS_AS(fit(lin, big, std::vector<double>{1.0, 1.0}), std::runtime_error);
  CHECK(parse_learner_kind("stump") == LearnerKind::WeightedStump);
  CHECK_THROWS_AS(parse_learner_kind("forest"), std::invalid_argument);
}
