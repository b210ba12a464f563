#include "accmarket/studies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "accmarket/analytic_dynamics.hpp"
#include "accmarket/data_io.hpp"
#include "accmarket/util/parallel.hpp"

namespace accmarket {

RepetitionData repetition_data(const DataSource& source, std::uint64_t seed) {
  if (source.kind == DataSource::Kind::Gaussian) {
    Dataset sample = sample_gaussian_market(source.spec, source.samples, seed);
    if (source.test_fraction) {
      auto [tr, te] = split(sample, SplitSpec{*source.test_fraction, seed});
      return {std::move(tr), std::move(te)};
    }
    return {std::move(sample), std::nullopt};
  }
  if (!source.data) throw std::invalid_argument("fixed data source has no dataset");
  if (source.test_fraction) {
    auto [tr, te] = split(*source.data, SplitSpec{*source.test_fraction, seed});
    return {std::move(tr), std::move(te)};
  }
  return {*source.data, std::nullopt};
}

OrderStudyResult run_order_of_play_study(const OrderStudyConfig& cfg) {
  if (cfg.repetitions < 1) throw std::invalid_argument("order study needs at least one repetition");
  const std::size_t n = cfg.dynamics.providers;
  auto positions = cfg.positions;
  if (positions.empty()) {
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) positions.emplace_back(p, q);
    }
  }
  for (const auto& [p, q] : positions) {
    if (p >= n || q >= n || p == q) throw std::invalid_argument("order study positions must be distinct and < n");
  }
  const auto order = cfg.dynamics.effective_order();

  OrderStudyResult result;
  result.runs = parallel_map<OrderRun>(cfg.repetitions, [&](std::size_t r) {
    const std::uint64_t seed = derive_seed(cfg.seed, r);
    const auto data = repetition_data(cfg.source, seed);
    DynamicsConfig dc = cfg.dynamics;
    dc.seed = seed;
    const auto traj = run_dynamics(dc, data.train);
    OrderRun run;
    run.repetition = r;
    run.seed = seed;
    run.share_by_position.resize(n);
    for (std::size_t p = 0; p < n; ++p) run.share_by_position[p] = traj.final_train().shares[order[p]];
    run.welfare = traj.final_train().welfare;
    run.converged = traj.converged;
    run.rounds = traj.rounds_run;
    return run;
  });

  for (const auto& [p, q] : positions) {
    std::vector<double> diffs;
    diffs.reserve(result.runs.size());
    for (const auto& run : result.runs) diffs.push_back(run.share_by_position[q] - run.share_by_position[p]);
    result.pairs.push_back({p, q, summarize(diffs)});
  }
  return result;
}

std::vector<GaussianMarketSpec> overlap_grid(double a_from, double a_to, std::size_t points, double sigma_neg,
                                             double sigma_pos, double prior) {
  if (points < 1) throw std::invalid_argument("overlap grid needs at least one point");
  std::vector<GaussianMarketSpec> specs;
  for (std::size_t k = 0; k < points; ++k) {
    const double t = points == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(points - 1);
    specs.push_back({a_from + t * (a_to - a_from), sigma_neg, sigma_pos, prior});
  }
  return specs;
}

std::vector<OverlapRow> run_overlap_sweep(const OverlapSweepConfig& cfg) {
  if (!(cfg.lo < cfg.hi)) throw std::invalid_argument("overlap sweep interval must satisfy lo < hi");
  for (const auto& s : cfg.specs) s.validate();

  auto rows = parallel_map<OverlapRow>(cfg.specs.size(), [&](std::size_t k) {
    const auto& spec = cfg.specs[k];
    OverlapRow row;
    row.spec = spec;
    row.h_opt = optimal_threshold(spec);
    const auto [zl, zr] = response_targets(spec);
    row.left_root_exists = !rho_inverse(spec, zl, cfg.lo, cfg.hi).empty();
    row.right_root_exists = !rho_inverse(spec, zr, cfg.lo, cfg.hi).empty();

    double lower_edge = cfg.lo;
    double upper_edge = cfg.hi;
    if (cfg.mode == SweepMode::Analytic) {
      AnalyticDynamicsConfig ac;
      ac.spec = spec;
      ac.lo = cfg.lo;
      ac.hi = cfg.hi;
      ac.rounds = cfg.rounds;
      if (row.h_opt < cfg.lo || row.h_opt > cfg.hi) {
        const double h = std::clamp(row.h_opt, cfg.lo, cfg.hi);
        ac.init = std::array<double, 2>{h, h};
      }
      const auto traj = run_analytic_dynamics(ac);
      row.taus = traj.taus;
      row.accuracies = {traj.outcome.accuracies[0], traj.outcome.accuracies[1]};
      row.shares = {traj.outcome.shares[0], traj.outcome.shares[1]};
      row.welfare = traj.outcome.welfare;
      row.converged = traj.converged;
      row.rounds = traj.rounds_run;
    } else {
      const Dataset data = sample_gaussian_market(spec, cfg.samples, derive_seed(cfg.seed, k));
      DynamicsConfig dc;
      dc.providers = 2;
      dc.rounds = cfg.rounds;
      LearnerConfig l;
      l.kind = LearnerKind::Threshold;
      dc.learners = {l};
      const auto traj = run_dynamics(dc, data);
      for (std::size_t i = 0; i < 2; ++i) {
        row.taus[i] = std::get<ThresholdRule>(traj.final_classifiers[i].rule()).tau;
        row.accuracies[i] = traj.final_train().accuracies[i];
        row.shares[i] = traj.final_train().shares[i];
      }
      row.welfare = traj.final_train().welfare;
      row.converged = traj.converged;
      row.rounds = traj.rounds_run;
      const auto xs = data.features();
      lower_edge = std::max(lower_edge, *std::min_element(xs.begin(), xs.end()));
      upper_edge = std::min(upper_edge, *std::max_element(xs.begin(), xs.end()));
    }
    const double lower = std::min(row.taus[0], row.taus[1]);
    const double upper = std::max(row.taus[0], row.taus[1]);
    row.left_at_boundary = lower <= lower_edge;
    row.right_at_boundary = upper >= upper_edge;
    return row;
  });

  for (std::size_t k = 1; k < rows.size(); ++k) {
    rows[k].jump = (rows[k].left_at_boundary && !rows[k - 1].left_at_boundary) ||
                   (rows[k].right_at_boundary && !rows[k - 1].right_at_boundary);
  }
  return rows;
}

CapacityResult run_capacity_study(const CapacityConfig& cfg) {
  if (cfg.feature_counts.empty()) throw std::invalid_argument("capacity study needs at least one feature count");
  if (cfg.repetitions < 1) throw std::invalid_argument("capacity study needs at least one repetition");
  const std::size_t reps = cfg.repetitions;
  const std::size_t ks = cfg.feature_counts.size();

  CapacityResult result;
  result.rows = parallel_map<CapacityRow>(ks * reps, [&](std::size_t idx) {
    const std::size_t ki = idx / reps;
    const std::size_t r = idx % reps;
    const std::size_t k = cfg.feature_counts[ki];
    const std::uint64_t seed = derive_seed(cfg.seed, r);
    const auto data = repetition_data(cfg.source, seed);
    if (k < 1 || k > data.train.dim()) {
      throw std::invalid_argument("feature count " + std::to_string(k) + " outside [1, " +
                                  std::to_string(data.train.dim()) + "]");
    }
    const Dataset train = restrict_features(data.train, k);
    std::optional<Dataset> test;
    if (data.test) test = restrict_features(*data.test, k);
    DynamicsConfig dc = cfg.dynamics;
    dc.seed = seed;
    dc.feature_counts.clear();
    const auto traj = run_dynamics(dc, train, test ? &*test : nullptr);
    CapacityRow row;
    row.features = k;
    row.repetition = r;
    row.seed = seed;
    row.welfare_initial = traj.initial_train().welfare;
    row.welfare_final = traj.final_train().welfare;
    if (test) {
      row.test_welfare_initial = traj.rounds.front().test->welfare;
      row.test_welfare_final = traj.final_test()->welfare;
    }
    row.converged = traj.converged;
    row.rounds = traj.rounds_run;
    return row;
  });

  for (std::size_t ki = 0; ki < ks; ++ki) {
    std::vector<double> init;
    std::vector<double> fin;
    for (std::size_t r = 0; r < reps; ++r) {
      init.push_back(result.rows[ki * reps + r].welfare_initial);
      fin.push_back(result.rows[ki * reps + r].welfare_final);
    }
    result.summaries.push_back({cfg.feature_counts[ki], summarize(init), summarize(fin)});
  }
  return result;
}

namespace {

double best_rival(const std::vector<double>& shares, std::size_t self) {
  double best = -1.0;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    if (i != self) best = std::max(best, shares[i]);
  }
  return best;
}

}  // namespace

AsymResult run_asymmetric_power_study(const AsymConfig& cfg) {
  const std::size_t n = cfg.dynamics.providers;
  if (n < 2) throw std::invalid_argument("asymmetric power study needs at least two providers");
  if (cfg.position >= n) throw std::invalid_argument("advantaged position must be < number of providers");
  if (cfg.repetitions < 1) throw std::invalid_argument("asymmetric power study needs at least one repetition");
  const std::size_t who = cfg.dynamics.effective_order()[cfg.position];

  AsymResult result;
  result.runs = parallel_map<AsymRun>(cfg.repetitions, [&](std::size_t r) {
    const std::uint64_t seed = derive_seed(cfg.seed, r);
    const auto data = repetition_data(cfg.source, seed);
    const std::size_t d = data.train.dim();
    if (cfg.better_features < 1 || cfg.better_features > d || cfg.worse_features < 1 || cfg.worse_features > d) {
      throw std::invalid_argument("feature counts must lie in [1, " + std::to_string(d) + "]");
    }
    DynamicsConfig sym = cfg.dynamics;
    sym.seed = seed;
    sym.init = InitMode::IndependentFit;
    sym.feature_counts.assign(n, cfg.worse_features);
    DynamicsConfig adv = sym;
    adv.feature_counts[who] = cfg.better_features;

    const auto t_adv = run_dynamics(adv, data.train);
    const auto t_sym = run_dynamics(sym, data.train);
    const auto& s_adv = t_adv.final_train().shares;
    const auto& s_sym = t_sym.final_train().shares;
    AsymRun run;
    run.repetition = r;
    run.seed = seed;
    run.share_advantaged = s_adv[who];
    run.share_symmetric = s_sym[who];
    run.lead_advantaged = s_adv[who] - best_rival(s_adv, who);
    run.lead_symmetric = s_sym[who] - best_rival(s_sym, who);
    run.delta_self = run.share_advantaged - run.share_symmetric;
    run.delta_next = run.lead_advantaged - run.lead_symmetric;
    return run;
  });

  std::vector<double> ds;
  std::vector<double> dn;
  for (const auto& run : result.runs) {
    ds.push_back(run.delta_self);
    dn.push_back(run.delta_next);
  }
  result.delta_self = summarize(ds);
  result.delta_next = summarize(dn);
  return result;
}

}  // namespace accmarket
