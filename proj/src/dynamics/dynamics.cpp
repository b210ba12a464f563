#include "accmarket/dynamics.hpp"

#include <algorithm>
#include <stdexcept>

#include "accmarket/exact_games.hpp"

namespace accmarket {
namespace {

std::vector<Label> predictions_of(const Classifier& h, const Dataset& data) { return h.predict_all(data); }

TrajectoryStep snapshot(std::size_t round, std::optional<std::size_t> mover, const std::vector<std::vector<std::uint8_t>>& rows,
                        const std::vector<std::uint32_t>& kappa, std::int64_t scale) {
  const std::size_t n = rows.size();
  const std::size_t m = kappa.size();
  TrajectoryStep s;
  s.round = round;
  s.mover = mover;
  s.numerators.assign(n, 0);
  std::size_t served = 0;
  for (std::size_t j = 0; j < m; ++j) {
    if (kappa[j] == 0) continue;
    ++served;
    const std::int64_t unit = scale / kappa[j];
    for (std::size_t i = 0; i < n; ++i) {
      if (rows[i][j]) s.numerators[i] += unit;
    }
  }
  const long double denom = static_cast<long double>(scale) * static_cast<long double>(m);
  s.shares.resize(n);
  long double hhi = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    s.shares[i] = static_cast<double>(static_cast<long double>(s.numerators[i]) / denom);
    if (served > 0) {
      const long double f = static_cast<long double>(s.numerators[i]) /
                            (static_cast<long double>(scale) * static_cast<long double>(served));
      hhi += f * f;
    }
  }
  s.welfare = static_cast<double>(served) / static_cast<double>(m);
  if (served > 0) s.hhi = static_cast<double>(hhi);
  s.scaled_potential = scaled_potential(kappa, scale);
  s.potential = static_cast<double>(static_cast<long double>(s.scaled_potential) / static_cast<long double>(scale));
  return s;
}

CorrectnessMatrix matrix_of(const std::vector<std::vector<std::uint8_t>>& rows, std::size_t m) {
  CorrectnessMatrix c(rows.size(), m);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < m; ++j) c.set(i, j, rows[i][j] != 0);
  }
  return c;
}

MarketOutcome test_outcome(const std::vector<Classifier>& hs, const Dataset& test) {
  return evaluate_market(compute_correctness(hs, test));
}

}  // namespace

double potential(const CorrectnessMatrix& c) {
  double phi = 0.0;
  for (std::uint32_t k : c.column_counts()) {
    for (std::uint32_t t = 1; t <= k; ++t) phi -= 1.0 / static_cast<double>(t);
  }
  return phi;
}

std::int64_t scaled_potential(std::span<const std::uint32_t> column_counts, std::int64_t scale) {
  std::int64_t phi = 0;
  for (std::uint32_t k : column_counts) {
    for (std::uint32_t t = 1; t <= k; ++t) {
      if (scale % t != 0) throw std::invalid_argument("scale is not divisible by every column count");
      phi -= scale / static_cast<std::int64_t>(t);
    }
  }
  return phi;
}

std::int64_t scaled_potential(const CorrectnessMatrix& c, std::int64_t scale) {
  return scaled_potential(c.column_counts(), scale);
}

std::string to_string(InitMode mode) {
  switch (mode) {
    case InitMode::SharedOptimum: return "shared";
    case InitMode::IndependentFit: return "independent";
    case InitMode::Explicit: return "explicit";
  }
  return "unknown";
}

InitMode parse_init_mode(const std::string& text) {
  if (text == "shared") return InitMode::SharedOptimum;
  if (text == "independent") return InitMode::IndependentFit;
  if (text == "explicit") return InitMode::Explicit;
  throw std::invalid_argument("unknown init mode '" + text + "' (expected shared, independent or explicit)");
}

std::vector<std::size_t> DynamicsConfig::effective_order() const {
  if (!order.empty()) return order;
  std::vector<std::size_t> o(providers);
  for (std::size_t i = 0; i < providers; ++i) o[i] = i;
  return o;
}

double DynamicsConfig::effective_epsilon() const {
  if (epsilon) return *epsilon;
  for (std::size_t i = 0; i < providers; ++i) {
    if (!learner(i).exact()) return 1e-4;
  }
  return 0.0;
}

void DynamicsConfig::validate(const Dataset& data) const {
  if (providers < 1) throw std::invalid_argument("dynamics needs at least one provider");
  if (providers > kMaxProviders) {
    throw std::invalid_argument("at most " + std::to_string(kMaxProviders) + " providers are supported");
  }
  if (rounds < 1) throw std::invalid_argument("dynamics needs at least one round");
  if (epsilon && (!(*epsilon >= 0.0))) throw std::invalid_argument("epsilon must be >= 0");
  if (!order.empty()) {
    if (order.size() != providers) throw std::invalid_argument("order must list every provider once");
    std::vector<bool> seen(providers, false);
    for (std::size_t i : order) {
      if (i >= providers || seen[i]) throw std::invalid_argument("order must be a permutation of the providers");
      seen[i] = true;
    }
  }
  if (learners.size() != 1 && learners.size() != providers) {
    throw std::invalid_argument("give one learner config for all providers or one per provider");
  }
  for (const auto& l : learners) l.validate();
  if (!feature_counts.empty()) {
    if (feature_counts.size() != providers) throw std::invalid_argument("feature_counts needs one entry per provider");
    for (std::size_t k : feature_counts) {
      if (k < 1 || k > data.dim()) {
        throw std::invalid_argument("feature count " + std::to_string(k) + " outside [1, " +
                                    std::to_string(data.dim()) + "]");
      }
    }
  }
  for (std::size_t i = 0; i < providers; ++i) {
    const auto& l = learner(i);
    const std::size_t k = feature_counts.empty() ? data.dim() : feature_counts[i];
    if (l.kind == LearnerKind::FiniteMenu && k != data.dim()) {
      throw std::invalid_argument("menu providers cannot be restricted to a feature prefix");
    }
    if (l.kind == LearnerKind::Threshold && l.feature >= k) {
      throw std::invalid_argument("threshold learner feature lies outside provider " + std::to_string(i) +
                                  "'s features");
    }
    if (l.kind == LearnerKind::FiniteMenu) {
      for (const auto& h : l.menu) h.check_compatible(data);
    }
  }
  if (init == InitMode::SharedOptimum && !feature_counts.empty()) {
    for (std::size_t k : feature_counts) {
      if (k != feature_counts.front()) {
        throw std::invalid_argument("shared initialization needs every provider to see the same features");
      }
    }
  }
  if (init == InitMode::Explicit) {
    if (initial.size() != providers) throw std::invalid_argument("explicit init needs one classifier per provider");
    for (const auto& h : initial) h.check_compatible(data);
  }
}

Classifier initial_fit(const LearnerConfig& learner, const Dataset& view, std::size_t full_dim) {
  const std::vector<double> uniform(view.size(), 1.0);
  auto h = fit(learner, view, uniform).classifier;
  return view.dim() == full_dim ? h : h.lifted_to(full_dim);
}

Trajectory run_dynamics(const DynamicsConfig& cfg, const Dataset& train, const Dataset* test) {
  cfg.validate(train);
  if (test && test->dim() != train.dim()) throw std::invalid_argument("test data dimension differs from train");

  const std::size_t n = cfg.providers;
  const std::size_t m = train.size();
  const std::size_t d = train.dim();
  const std::int64_t scale = share_scale(n);
  const auto order = cfg.effective_order();

  std::vector<Dataset> views;
  views.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = cfg.feature_counts.empty() ? d : cfg.feature_counts[i];
    views.push_back(train.prefix_features(k));
  }

  std::vector<std::vector<std::vector<std::uint8_t>>> menu_rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& l = cfg.learner(i);
    if (l.kind != LearnerKind::FiniteMenu) continue;
    for (const auto& h : l.menu) menu_rows[i].push_back(correctness_row(h, train));
  }

  Trajectory traj;
  traj.scale = scale;
  traj.examples = m;
  traj.epsilon = cfg.effective_epsilon();

  std::vector<Classifier> hs(n);
  switch (cfg.init) {
    case InitMode::SharedOptimum: {
      const Classifier h = initial_fit(cfg.learner(0), views[0], d);
      std::fill(hs.begin(), hs.end(), h);
      break;
    }
    case InitMode::IndependentFit:
      for (std::size_t i = 0; i < n; ++i) {
        LearnerConfig l = cfg.learner(i);
        l.seed += cfg.seed + i;
        hs[i] = initial_fit(l, views[i], d);
      }
      break;
    case InitMode::Explicit:
      hs = cfg.initial;
      break;
  }
  if (test) {
    for (const auto& h : hs) h.check_compatible(*test);
  }
  traj.initial_classifiers = hs;

  std::vector<std::vector<std::uint8_t>> rows(n);
  std::vector<std::uint32_t> kappa(m, 0);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i] = correctness_row(hs[i], train);
    for (std::size_t j = 0; j < m; ++j) kappa[j] += rows[i][j];
  }

  traj.steps.push_back(snapshot(0, std::nullopt, rows, kappa, scale));
  {
    RoundSummary r0;
    r0.train = evaluate_market(matrix_of(rows, m));
    if (test) r0.test = test_outcome(hs, *test);
    traj.rounds.push_back(std::move(r0));
  }

  const long double denom = static_cast<long double>(scale) * static_cast<long double>(m);
  std::vector<std::uint32_t> others(m);
  std::vector<double> weights(m);
  for (std::size_t round = 1; round <= cfg.rounds; ++round) {
    RoundSummary summary;
    summary.round = round;
    for (std::size_t i : order) {
      for (std::size_t j = 0; j < m; ++j) others[j] = kappa[j] - rows[i][j];
      Classifier candidate;
      std::vector<std::uint8_t> candidate_row;
      const auto& l = cfg.learner(i);
      try {
        if (l.kind == LearnerKind::FiniteMenu) {
          const auto [k, num] = best_response_rows(menu_rows[i], others, scale);
          (void)num;
          candidate = l.menu[k];
          candidate_row = menu_rows[i][k];
        } else {
          for (std::size_t j = 0; j < m; ++j) weights[j] = 1.0 / (1.0 + static_cast<double>(others[j]));
          candidate = fit(l, views[i], weights).classifier.lifted_to(d);
          candidate_row = correctness_row(candidate, train);
        }
      } catch (const std::exception& e) {
        throw std::runtime_error("provider " + std::to_string(i) + " failed to respond in round " +
                                 std::to_string(round) + ": " + e.what());
      }
      const std::int64_t held = responder_numerator(others, rows[i], scale);
      const std::int64_t offered = responder_numerator(others, candidate_row, scale);
      const bool improves =
          traj.epsilon == 0.0
              ? offered > held
              : static_cast<long double>(offered - held) / denom > static_cast<long double>(traj.epsilon);
      if (!improves) {
        ++summary.rejected;
        continue;
      }
      ++summary.adopted;
      for (std::size_t j = 0; j < m; ++j) kappa[j] = others[j] + candidate_row[j];
      rows[i] = std::move(candidate_row);
      hs[i] = std::move(candidate);
      auto step = snapshot(round, i, rows, kappa, scale);
      step.classifier = hs[i].describe();
      step.fingerprint = prediction_fingerprint(predictions_of(hs[i], train));
      traj.steps.push_back(std::move(step));
    }
    summary.train = evaluate_market(matrix_of(rows, m));
    if (test) summary.test = test_outcome(hs, *test);
    const bool quiet = summary.adopted == 0;
    traj.rounds.push_back(std::move(summary));
    traj.rounds_run = round;
    if (quiet) {
      traj.converged = true;
      break;
    }
  }
  traj.final_classifiers = hs;
  return traj;
}

}  // namespace accmarket
