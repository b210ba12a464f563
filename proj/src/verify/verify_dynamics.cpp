#include <algorithm>
#include <cmath>
#include <string>

#include "accmarket/data_io.hpp"
#include "accmarket/dynamics.hpp"
#include "accmarket/exact_games.hpp"
#include "accmarket/verify.hpp"
#include "verify_util.hpp"

namespace accmarket {
namespace {

using namespace detail;

void note_failure(PropertyResult& r, const std::string& what) {
  if (r.passed) r.detail = what;
  r.passed = false;
}

struct Instance {
  std::string label;
  DynamicsConfig cfg;
  Dataset data;
};

Dataset gaussian_features(Rng& rng, std::size_t m, std::size_t d) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> xs(m * d);
  std::vector<Label> ys(m);
  for (std::size_t j = 0; j < m; ++j) {
    double s = 0.0;
    for (std::size_t f = 0; f < d; ++f) {
      xs[j * d + f] = g(rng);
      s += xs[j * d + f] / static_cast<double>(f + 1);
    }
    ys[j] = s + 0.7 * g(rng) > 0.0 ? kPositive : kNegative;
  }
  return Dataset(std::move(xs), d, std::move(ys));
}

std::vector<Instance> corpus(const VerifyOptions& opts) {
  const bool full = opts.scale == Scale::Full;
  Rng rng(opts.seed ^ 0x51);
  std::vector<Instance> out;

  for (std::size_t k = 0, count = full ? 1000 : 300; k < count; ++k) {
    const std::size_t m = uniform_index(rng, 2, 30);
    Dataset data = random_points(rng, m);
    LearnerConfig l;
    l.kind = LearnerKind::FiniteMenu;
    const double p = uniform_real(rng, 0.3, 0.8);
    for (std::size_t s = 0, size = uniform_index(rng, 2, 6); s < size; ++s) {
      l.menu.push_back(Classifier::enumerated(predictions_for(random_row(rng, m, p), data), data));
    }
    DynamicsConfig cfg;
    cfg.providers = uniform_index(rng, 2, 5);
    cfg.rounds = 50;
    cfg.learners = {l};
    if (k % 3 == 2) {
      cfg.init = InitMode::Explicit;
      for (std::size_t i = 0; i < cfg.providers; ++i) cfg.initial.push_back(l.menu[uniform_index(rng, 0, l.menu.size() - 1)]);
    }
    out.push_back({"menu #" + std::to_string(k), std::move(cfg), std::move(data)});
  }

  for (std::size_t k = 0, count = full ? 200 : 60; k < count; ++k) {
    const std::size_t d = uniform_index(rng, 1, 3);
    Dataset data = gaussian_features(rng, uniform_index(rng, 50, 150), d);
    LearnerConfig l;
    l.kind = LearnerKind::WeightedStump;
    DynamicsConfig cfg;
    cfg.providers = uniform_index(rng, 2, 4);
    cfg.rounds = 30;
    cfg.learners = {l};
    cfg.init = k % 2 ? InitMode::IndependentFit : InitMode::SharedOptimum;
    out.push_back({"stump #" + std::to_string(k), std::move(cfg), std::move(data)});
  }

  for (std::size_t k = 0, count = full ? 200 : 60; k < count; ++k) {
    GaussianMarketSpec spec{uniform_real(rng, 0.3, 2.0), uniform_real(rng, 0.5, 2.0), uniform_real(rng, 0.5, 2.0), 0.5};
    Dataset data = sample_gaussian_market(spec, uniform_index(rng, 50, 300), rng());
    LearnerConfig l;
    l.kind = LearnerKind::Threshold;
    DynamicsConfig cfg;
    cfg.providers = uniform_index(rng, 2, 4);
    cfg.rounds = 30;
    cfg.learners = {l};
    out.push_back({"threshold #" + std::to_string(k), std::move(cfg), std::move(data)});
  }

  for (std::size_t k = 0, count = full ? 20 : 6; k < count; ++k) {
    Dataset data = gaussian_features(rng, 60, 2);
    LearnerConfig l;
    l.kind = LearnerKind::WeightedLinear;
    l.loss = k % 2 ? Loss::Hinge : Loss::Logistic;
    l.max_iters = 200;
    DynamicsConfig cfg;
    cfg.providers = 2;
    cfg.rounds = 5;
    cfg.learners = {l};
    out.push_back({"linear #" + std::to_string(k), std::move(cfg), std::move(data)});
  }
  return out;
}

}  // namespace

std::vector<PropertyResult> verify_dynamics(const VerifyOptions& opts) {
  const auto instances = corpus(opts);
  std::vector<Trajectory> runs;
  runs.reserve(instances.size());
  for (const auto& inst : instances) runs.push_back(run_dynamics(inst.cfg, inst.data));

  std::vector<PropertyResult> out;

  out.push_back(timed_property("dynamics: every adopted move lowers the potential by the mover's gain",
                               [&](PropertyResult& r) {
    for (std::size_t k = 0; k < runs.size(); ++k) {
      const auto& steps = runs[k].steps;
      for (std::size_t s = 1; s < steps.size(); ++s) {
        const std::size_t i = *steps[s].mover;
        const std::int64_t dphi = steps[s].scaled_potential - steps[s - 1].scaled_potential;
        const std::int64_t gain = steps[s].numerators[i] - steps[s - 1].numerators[i];
        if (dphi != -gain || dphi >= 0) {
          note_failure(r, instances[k].label + " step " + std::to_string(s) + ": dphi=" + std::to_string(dphi) +
                              " gain=" + std::to_string(gain));
        }
        ++r.cases;
      }
      // closing potential recomputed from the final profile in floating point
      const auto c = compute_correctness(runs[k].final_classifiers, instances[k].data);
      const double phi = potential(c);
      if (std::abs(phi - steps.back().potential) > 1e-9 * std::max(1.0, std::abs(phi))) {
        note_failure(r, instances[k].label + ": final potential mismatch");
      }
    }
  }));

  out.push_back(timed_property("dynamics: adopted moves beat the threshold", [&](PropertyResult& r) {
    for (std::size_t k = 0; k < runs.size(); ++k) {
      const auto& t = runs[k];
      for (std::size_t s = 1; s < t.steps.size(); ++s) {
        const std::size_t i = *t.steps[s].mover;
        const double gain = t.steps[s].shares[i] - t.steps[s - 1].shares[i];
        const bool ok = t.epsilon == 0.0 ? t.steps[s].numerators[i] > t.steps[s - 1].numerators[i]
                                         : gain > t.epsilon - 1e-15;
        if (!ok) note_failure(r, instances[k].label + " step " + std::to_string(s));
        ++r.cases;
      }
    }
  }));

  out.push_back(timed_property("dynamics: from a shared start every share and welfare rise", [&](PropertyResult& r) {
    for (std::size_t k = 0; k < runs.size(); ++k) {
      const auto& inst = instances[k];
      bool exact = true;
      for (std::size_t i = 0; i < inst.cfg.providers; ++i) exact = exact && inst.cfg.learner(i).exact();
      if (!exact || inst.cfg.init != InitMode::SharedOptimum || !runs[k].converged) continue;
      const auto& first = runs[k].steps.front();
      const auto& last = runs[k].steps.back();
      bool ok = last.welfare >= first.welfare;
      for (std::size_t i = 0; i < inst.cfg.providers; ++i) {
        ok = ok && last.numerators[i] >= first.numerators[i];
      }
      if (!ok) note_failure(r, inst.label);
      ++r.cases;
    }
  }));

  out.push_back(timed_property("dynamics: converged profiles admit no improving response", [&](PropertyResult& r) {
    for (std::size_t k = 0; k < runs.size(); ++k) {
      const auto& inst = instances[k];
      const auto& t = runs[k];
      if (!t.converged || !inst.cfg.learner(0).exact()) continue;
      const std::size_t n = inst.cfg.providers;
      const auto c = compute_correctness(t.final_classifiers, inst.data);
      const auto ex = exact_shares(c);
      if (inst.cfg.learner(0).kind == LearnerKind::FiniteMenu) {
        // brute-force equilibrium check over the menus
        const auto& menu = inst.cfg.learner(0).menu;
        StrategyProfile profile;
        for (const auto& h : t.final_classifiers) {
          profile.push_back(static_cast<std::size_t>(std::find(menu.begin(), menu.end(), h) - menu.begin()));
        }
        const auto pnes = enumerate_pne(std::vector<std::vector<Classifier>>(n, menu), inst.data);
        if (std::find(pnes.begin(), pnes.end(), profile) == pnes.end()) note_failure(r, inst.label);
      } else {
        for (std::size_t i = 0; i < n; ++i) {
          const auto others = c.without_row(i);
          const auto counts = others.column_counts();
          std::vector<double> w(inst.data.size());
          for (std::size_t j = 0; j < w.size(); ++j) w[j] = 1.0 / (1.0 + counts[j]);
          const auto refit = fit(inst.cfg.learner(i), inst.data, w).classifier;
          const auto num = responder_numerator(counts, correctness_row(refit, inst.data), ex.scale);
          if (num > ex.numerators[i]) note_failure(r, inst.label + " provider " + std::to_string(i));
        }
      }
      ++r.cases;
    }
  }));

  out.push_back(timed_property("dynamics: reruns are identical", [&](PropertyResult& r) {
    for (std::size_t k = 0; k < runs.size(); k += 5) {
      const auto again = run_dynamics(instances[k].cfg, instances[k].data);
      bool same = again.steps.size() == runs[k].steps.size() && again.final_classifiers == runs[k].final_classifiers;
      for (std::size_t s = 0; same && s < again.steps.size(); ++s) {
        same = again.steps[s].numerators == runs[k].steps[s].numerators &&
               again.steps[s].fingerprint == runs[k].steps[s].fingerprint;
      }
      if (!same) note_failure(r, instances[k].label);
      ++r.cases;
    }
  }));

  return out;
}

}  // namespace accmarket
