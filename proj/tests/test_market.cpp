#include <doctest.h>

#include <cmath>

#include "accmarket/market.hpp"
#include "test_util.hpp"

using namespace accmarket;
using testutil::matrix;

namespace {

// Four 2-D points, all labeled -1; stumps on each coordinate give the table [[TTFF],[TFTF]].
struct FourPoints {
  Dataset data = Dataset::from_rows({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, {kNegative, kNegative, kNegative, kNegative});
  Classifier h1 = Classifier::stump(0, 0.5, 1);
  Classifier h2 = Classifier::stump(1, 0.5, 1);
};

}  // namespace

TEST_CASE("correctness table of hand-built classifiers") {
  const Dataset pos({0.0, 1.0}, 1, {kPositive, kPositive});
  const std::vector<Classifier> always{Classifier::constant(kPositive)};
  CHECK(compute_correctness(always, pos) == matrix("TT"));

  const Dataset sep({-1.0, 1.0}, 1, {kNegative, kPositive});
  const std::vector<Classifier> at_zero{Classifier::threshold(0.0)};
  CHECK(compute_correctness(at_zero, sep) == matrix("TT"));

  FourPoints f;
  const std::vector<Classifier> both{f.h1, f.h2};
  CHECK(compute_correctness(both, f.data) == matrix("TTFF TFTF"));
}

TEST_CASE("shares, welfare and decomposition of the four-column table") {
  const auto c = matrix("TTFF TFTF");
  const auto mu = market_shares(c);
  CHECK(mu[0] == doctest::Approx(3.0 / 8.0).epsilon(1e-15));
  CHECK(mu[1] == doctest::Approx(3.0 / 8.0).epsilon(1e-15));
  CHECK(welfare(c) == 0.75);

  const auto w = competition_weights(c, 0);
  CHECK(w == std::vector<double>{0.5, 1.0, 0.5, 1.0});
  CHECK(weighted_share_identity(c, 0) == mu[0]);

  const auto dec = subset_decomposition(c);
  CHECK(dec.size() == 4);
  for (std::uint32_t mask : {0u, 1u, 2u, 3u}) CHECK(dec.at(mask) == 0.25);

  const auto o = evaluate_market(c);
  REQUIRE(o.hhi);
  CHECK(*o.hhi == doctest::Approx(0.5));
  CHECK(hhi(o) == doctest::Approx(0.5));

  // exact integers: scale lcm(1,2) = 2, numerator = m * 2 * 3/8 = 3
  CHECK(o.exact.scale == 2);
  CHECK(o.exact.numerators == std::vector<std::int64_t>{3, 3});
}

TEST_CASE("degenerate markets") {
  CHECK(market_shares(matrix("TTTTT")) == std::vector<double>{1.0});
  CHECK(market_shares(matrix("FFF FFF")) == std::vector<double>{0.0, 0.0});
  CHECK(welfare(matrix("TT TT")) == 1.0);
  CHECK(welfare(matrix("FF FF")) == 0.0);
  CHECK(competition_weights(matrix("TFT"), 0) == std::vector<double>{1.0, 1.0, 1.0});
  // column where every other provider is correct gets weight 1/n
  CHECK(competition_weights(matrix("F T T"), 0)[0] == doctest::Approx(1.0 / 3.0));
  CHECK(weighted_share_identity(matrix("FFFF TTFT"), 0) == 0.0);
  CHECK(weighted_share_identity(matrix("TTT"), 0) == 1.0);

  const auto allt = subset_decomposition(matrix("TT TT TT"));
  CHECK(allt.size() == 1);
  CHECK(allt.at(7u) == 1.0);
  const auto mono = subset_decomposition(matrix("TFTT"));
  CHECK(mono.at(0u) == 0.25);
  CHECK(mono.at(1u) == 0.75);

  CHECK(hhi(evaluate_market(matrix("TFT"))) == 1.0);
  CHECK(hhi(evaluate_market(matrix("TF FT TF FT"))) == doctest::Approx(0.25));
  const auto nobody = evaluate_market(matrix("FF FF"));
  CHECK_FALSE(nobody.hhi);
  CHECK_THROWS_AS(hhi(nobody), std::domain_error);
}

TEST_CASE("accuracy and partial discrepancy") {
  const Dataset d({0, 1, 2, 3, 4}, 1, {kPositive, kPositive, kPositive, kNegative, kNegative});
  CHECK(accuracy(Classifier::threshold(-Classifier::kInf), d) == doctest::Approx(0.6));
  CHECK(accuracy(Classifier::enumerated(std::vector<Label>(d.labels().begin(), d.labels().end()), d), d) == 1.0);

  FourPoints f;
  CHECK(accuracy(f.h1, f.data) == 0.5);
  CHECK(partial_discrepancy(f.h1, f.h2, f.data) == 0.25);
  CHECK(partial_discrepancy(f.h2, f.h1, f.data) == 0.25);
  CHECK(partial_discrepancy(f.h1, f.h1, f.data) == 0.0);

  const auto perfect = testutil::correct_on("TTTTT", d);
  const auto wrong = testutil::correct_on("FFFFF", d);
  CHECK(partial_discrepancy(perfect, wrong, d) == 1.0);
}

TEST_CASE("share scale and provider limit") {
  CHECK(share_scale(1) == 1);
  CHECK(share_scale(4) == 12);
  CHECK(share_scale(6) == 60);
  CHECK(share_scale(20) == 232792560);
  CHECK_THROWS_AS(exact_shares(CorrectnessMatrix(kMaxProviders + 1, 3)), std::length_error);
}

TEST_CASE("enumerated classifiers refuse other datasets") {
  const auto d1 = testutil::line_points(3);
  const auto d2 = testutil::line_points(4);
  const auto h = testutil::correct_on("TFT", d1);
  CHECK_NOTHROW(h.check_compatible(testutil::line_points(3)));
  CHECK_THROWS_AS(h.check_compatible(d2), std::invalid_argument);
}
