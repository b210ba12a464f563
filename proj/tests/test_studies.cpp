#include <doctest.h>

#include <cmath>
#include <random>

#include "accmarket/data_io.hpp"
#include "accmarket/studies.hpp"
#include "test_util.hpp"

using namespace accmarket;

namespace {

DynamicsConfig thresholds() {
  DynamicsConfig cfg;
  cfg.learners[0].kind = LearnerKind::Threshold;
  return cfg;
}

DynamicsConfig stumps(std::size_t n) {
  DynamicsConfig cfg;
  cfg.providers = n;
  cfg.learners[0].kind = LearnerKind::WeightedStump;
  return cfg;
}

// Label depends on the first two columns; the remaining columns are independent noise.
Dataset tabular(std::size_t m, std::size_t noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::vector<double>> rows;
  std::vector<Label> ys;
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> r{g(rng), g(rng)};
    for (std::size_t k = 0; k < noise; ++k) r.push_back(g(rng));
    ys.push_back(r[0] + 0.7 * r[1] + 0.5 * g(rng) > 0 ? kPositive : kNegative);
    rows.push_back(std::move(r));
  }
  return Dataset::from_rows(rows, ys);
}

}  // namespace

TEST_CASE("order of play: the later mover gains") {
  OrderStudyConfig cfg;
  cfg.dynamics = thresholds();
  cfg.source.spec = {1.0, 2.0, 1.0, 0.5};
  cfg.source.samples = 20000;
  cfg.repetitions = 20;
  cfg.seed = 5;
  const auto r = run_order_of_play_study(cfg);
  REQUIRE(r.pairs.size() == 1);
  CHECK(r.pairs[0].difference.count == 20);
  // single sampled runs are noisy at this size; the average is not
  CHECK(r.pairs[0].difference.mean > 0.0);
}

TEST_CASE("order of play: edge cases") {
  OrderStudyConfig one;
  one.dynamics = thresholds();
  one.dynamics.providers = 1;
  one.repetitions = 3;
  CHECK(run_order_of_play_study(one).pairs.empty());

  // a symmetric anti-coordination menu: both equilibria pay the same
  const auto ten = testutil::line_points(8);
  OrderStudyConfig sym;
  sym.dynamics.learners[0].kind = LearnerKind::FiniteMenu;
  sym.dynamics.learners[0].menu = {testutil::correct_on("TTTTFFFF", ten), testutil::correct_on("FFTTTTFF", ten)};
  sym.source.kind = DataSource::Kind::Fixed;
  sym.source.data = ten;
  sym.repetitions = 4;
  const auto r = run_order_of_play_study(sym);
  CHECK(r.pairs[0].difference.min == 0.0);
  CHECK(r.pairs[0].difference.max == 0.0);
}

TEST_CASE("overlap sweep regimes") {
  OverlapSweepConfig far;
  far.specs = {{12.0, 1.0, 1.0, 0.5}};
  const auto row = run_overlap_sweep(far).front();
  CHECK(row.taus[0] == row.h_opt);
  CHECK(row.taus[1] == row.h_opt);
  CHECK(row.welfare == doctest::Approx(1.0).epsilon(1e-12));

  // equal variances: the roots sit at +-ln2 / (2a), far out when the classes overlap
  OverlapSweepConfig near;
  near.specs = {{0.05, 1.0, 1.0, 0.5}};
  const auto open = run_overlap_sweep(near).front();
  CHECK(open.taus[0] == doctest::Approx(-std::log(2.0) / 0.1).epsilon(1e-9));
  CHECK(open.taus[1] == doctest::Approx(std::log(2.0) / 0.1).epsilon(1e-9));
  near.lo = -3.0;
  near.hi = 3.0;
  const auto boxed = run_overlap_sweep(near).front();
  CHECK(boxed.taus[0] == -3.0);
  CHECK(boxed.taus[1] == 3.0);
  CHECK(boxed.left_at_boundary);
  CHECK(boxed.right_at_boundary);
  CHECK(boxed.welfare < 1.0);

  OverlapSweepConfig asym;
  asym.specs = overlap_grid(2.0, 0.1, 20, 2.0, 1.0);
  const auto rows = run_overlap_sweep(asym);
  std::size_t jumps = 0;
  for (const auto& r : rows) jumps += r.jump;
  CHECK(jumps == 1);
}

TEST_CASE("capacity with every feature equals the plain run") {
  const auto data = tabular(300, 2, 1);
  CapacityConfig cfg;
  cfg.dynamics = stumps(3);
  cfg.source.kind = DataSource::Kind::Fixed;
  cfg.source.data = data;
  cfg.feature_counts = {data.dim()};
  cfg.seed = 4;
  const auto r = run_capacity_study(cfg);
  REQUIRE(r.rows.size() == 1);
  DynamicsConfig dc = stumps(3);
  dc.seed = derive_seed(4, 0);
  const auto t = run_dynamics(dc, data);
  CHECK(r.rows[0].welfare_final == t.final_train().welfare);
  CHECK(r.rows[0].welfare_initial == t.initial_train().welfare);
  CHECK(r.rows[0].rounds == t.rounds_run);
}

TEST_CASE("capacity: starting welfare grows with visible features") {
  CapacityConfig cfg;
  cfg.dynamics = stumps(2);
  cfg.source.kind = DataSource::Kind::Fixed;
  cfg.source.data = tabular(400, 0, 2);
  cfg.source.test_fraction = 0.3;
  cfg.feature_counts = {1, 2};
  cfg.repetitions = 5;
  const auto r = run_capacity_study(cfg);
  CHECK(r.summaries[0].welfare_initial.mean <= r.summaries[1].welfare_initial.mean);
}

TEST_CASE("asymmetric power bookkeeping") {
  AsymConfig same;
  same.dynamics = stumps(2);
  same.source.kind = DataSource::Kind::Fixed;
  same.source.data = tabular(200, 2, 3);
  same.better_features = same.worse_features = 2;
  same.repetitions = 3;
  const auto r = run_asymmetric_power_study(same);
  for (const auto& run : r.runs) {
    CHECK(run.delta_self == 0.0);
    CHECK(run.delta_next == 0.0);
    CHECK(run.delta_self == run.share_advantaged - run.share_symmetric);
  }
}

TEST_CASE("asymmetric power: noise features do not help") {
  AsymConfig cfg;
  cfg.dynamics = stumps(2);
  cfg.source.kind = DataSource::Kind::Fixed;
  cfg.source.data = tabular(400, 3, 6);
  cfg.source.test_fraction = 0.25;
  cfg.better_features = 5;
  cfg.worse_features = 2;
  cfg.repetitions = 10;
  cfg.seed = 17;
  const auto r = run_asymmetric_power_study(cfg);
  CHECK(std::abs(r.delta_self.mean) <= 2.0 * r.delta_self.std_error + 1e-12);
}
