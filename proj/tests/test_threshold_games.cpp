#include <doctest.h>

#include <cmath>

#include "accmarket/analytic_dynamics.hpp"
#include "accmarket/threshold_games.hpp"
#include "test_util.hpp"

using namespace accmarket;

namespace {

const GaussianMarketSpec kSym{1.0, 1.0, 1.0, 0.5};
const GaussianMarketSpec kWideNeg{1.0, 2.0, 1.0, 0.5};
const double kHalfLn2 = std::log(2.0) / 2.0;

}  // namespace

TEST_CASE("likelihood ratio values") {
  CHECK(rho(kSym, 0.0) == doctest::Approx(1.0));
  CHECK(rho(kSym, 0.7) == doctest::Approx(std::exp(1.4)));
  CHECK(rho(kWideNeg, 0.0) == doctest::Approx(2.0 * std::exp(-3.0 / 8.0)));
  // against the raw density ratio
  for (double x : {-2.0, -0.3, 0.0, 1.1, 2.5}) {
    const double direct = testutil::normal_pdf(x, 1.0, 1.0) / testutil::normal_pdf(x, -1.0, 2.0);
    CHECK(rho(kWideNeg, x) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("ratio inverse") {
  auto two = rho_inverse(kSym, 2.0);
  auto half = rho_inverse(kSym, 0.5);
  REQUIRE(two.size() == 1);
  REQUIRE(half.size() == 1);
  CHECK(two[0] == doctest::Approx(kHalfLn2).epsilon(1e-14));
  CHECK(half[0] == doctest::Approx(-kHalfLn2).epsilon(1e-14));
  CHECK(rho_inverse(kSym, 1.0) == std::vector<double>{0.0});

  // 3x^2 - 10x + 3 = 0 has roots 1/3 and 3; only 1/3 has rho increasing
  const auto up = rho_inverse(kWideNeg, 2.0, -10.0, 10.0);
  REQUIRE(up.size() == 1);
  CHECK(up[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(rho(kWideNeg, up[0]) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(log_rho_slope(kWideNeg, up[0]) > 0.0);
  CHECK(rho_inverse(kWideNeg, 0.5)[0] == doctest::Approx(testutil::ratio_root(kWideNeg, 0.5)).epsilon(1e-12));

  CHECK(rho_inverse(kWideNeg, 2.0, 0.5, 10.0).empty());
  // ratio peaks at exp(2/3 + log 2) = 3.895...
  CHECK(rho_inverse(kWideNeg, 4.0).empty());
}

TEST_CASE("accuracy-optimal threshold") {
  CHECK(optimal_threshold(kSym) == doctest::Approx(0.0));
  CHECK(optimal_threshold(kWideNeg) == doctest::Approx(testutil::ratio_root(kWideNeg, 1.0)).epsilon(1e-12));
  CHECK(optimal_threshold(kWideNeg) == doctest::Approx(-0.237584).epsilon(1e-5));
  const double h = optimal_threshold(kWideNeg);
  for (double t : {h - 0.01, h + 0.01, -3.0, 2.0}) CHECK(threshold_accuracy(t, kWideNeg) < threshold_accuracy(h, kWideNeg));
}

TEST_CASE("analytic shares") {
  const double phi1 = 0.5 * std::erfc(-1.0 / std::sqrt(2.0));
  CHECK(analytic_threshold_share(0.0, 0.0, kSym) == doctest::Approx(0.5 * phi1).epsilon(1e-14));
  CHECK(analytic_threshold_share(kNegInf, kPosInf, kSym) == doctest::Approx(0.5));
  const GaussianMarketSpec skew{1.0, 1.0, 1.0, 0.3};
  CHECK(analytic_threshold_share(kNegInf, kPosInf, skew) == doctest::Approx(0.3));
  CHECK(analytic_threshold_share(0.4, 0.4, kWideNeg) == doctest::Approx(0.5 * threshold_accuracy(0.4, kWideNeg)));

  // against direct numerical integration of the densities
  const GaussianMarketSpec odd{0.8, 1.7, 0.6, 0.35};
  for (auto [s, o] : {std::pair{0.1, -0.4}, {-1.0, 0.9}, {0.0, kNegInf}, {kPosInf, 0.3}}) {
    CHECK(analytic_threshold_share(s, o, odd) == doctest::Approx(testutil::numeric_share(s, o, odd)).epsilon(1e-8));
  }
}

TEST_CASE("analytic best response") {
  const auto br = analytic_best_response(kSym, 0.0);
  CHECK(br.tau == doctest::Approx(-kHalfLn2).epsilon(1e-14));
  CHECK(analytic_threshold_share(kHalfLn2, 0.0, kSym) == doctest::Approx(br.share).epsilon(1e-14));

  const double left = rho_inverse(kSym, 0.5)[0];
  CHECK(analytic_best_response(kSym, left).tau == doctest::Approx(kHalfLn2).epsilon(1e-14));

  const GaussianMarketSpec apart{12.0, 1.0, 1.0, 0.5};
  const auto stay = analytic_best_response(apart, optimal_threshold(apart));
  CHECK(stay.tau == optimal_threshold(apart));

  // interval ends are candidates
  const auto boxed = analytic_best_response(kSym, 0.0, -0.1, 0.1);
  CHECK(std::abs(boxed.tau) == doctest::Approx(0.1));
}

TEST_CASE("sampled threshold response") {
  const std::vector<double> one{0.0};
  const std::vector<Label> pos{kPositive};
  const std::vector<double> w1{1.0};
  const auto a = empirical_threshold_br(one, pos, w1);
  CHECK(a.tau == kNegInf);
  CHECK(a.share == 1.0);

  const std::vector<double> xs{-1.0, 1.0};
  const std::vector<Label> ys{kNegative, kPositive};
  const std::vector<double> w2{1.0, 1.0};
  const auto b = empirical_threshold_br(xs, ys, w2);
  CHECK(b.tau == 0.0);
  CHECK(b.share == 1.0);

  const std::vector<double> x4{0, 1, 2, 3};
  const std::vector<Label> y4{kPositive, kNegative, kPositive, kNegative};
  const std::vector<double> w4{1, 1, 1, 1};
  const auto c = empirical_threshold_br(x4, y4, w4);
  CHECK(c.tau == kNegInf);
  CHECK(c.share == 0.5);
}

TEST_CASE("analytic dynamics on the two reference specs") {
  AnalyticDynamicsConfig cfg;
  cfg.spec = kSym;
  const auto t = run_analytic_dynamics(cfg);
  CHECK(t.converged);
  CHECK(t.rounds_run == 2);
  CHECK(t.adopted[1] == 0);
  CHECK(t.taus[0] == doctest::Approx(-kHalfLn2).epsilon(1e-12));
  CHECK(t.taus[1] == doctest::Approx(kHalfLn2).epsilon(1e-12));

  cfg.spec = kWideNeg;
  const auto f = run_analytic_dynamics(cfg);
  CHECK(f.adopted[1] == 0);
  CHECK(f.taus[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(f.taus[1] == doctest::Approx(testutil::ratio_root(kWideNeg, 0.5)).epsilon(1e-12));
  CHECK(f.outcome.shares[1] > f.outcome.shares[0]);
}
