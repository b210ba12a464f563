#include <bit>
#include <cmath>
#include <string>

#include "accmarket/market.hpp"
#include "accmarket/verify.hpp"
#include "verify_util.hpp"

namespace accmarket {
namespace {

using namespace detail;

struct Corpus {
  std::size_t exhaustive_n = 3;
  std::size_t exhaustive_m = 4;
  std::size_t random_count = 10000;
  std::size_t max_n = 6;
  std::size_t max_m = 500;
};

Corpus corpus_for(Scale s) {
  Corpus c;
  if (s == Scale::Full) {
    c.exhaustive_m = 5;
    c.random_count = 50000;
  }
  return c;
}

void note_failure(PropertyResult& r, const std::string& what) {
  if (r.passed) r.detail = what;
  r.passed = false;
}

// Visits the exhaustive small space and then the random corpus.
template <class Fn>
void over_corpus(const VerifyOptions& opts, std::uint64_t salt, PropertyResult& r, Fn fn) {
  const Corpus c = corpus_for(opts.scale);
  r.cases += for_each_small_matrix(c.exhaustive_n, c.exhaustive_m, [&](const CorrectnessMatrix& m) { fn(m); });
  Rng rng(opts.seed ^ salt);
  for (std::size_t k = 0; k < c.random_count; ++k) {
    const std::size_t n = uniform_index(rng, 1, c.max_n);
    const std::size_t m = uniform_index(rng, 1, c.max_m);
    fn(random_matrix(rng, n, m));
    ++r.cases;
  }
}

}  // namespace

std::vector<PropertyResult> verify_market(const VerifyOptions& opts) {
  std::vector<PropertyResult> out;

  out.push_back(timed_property("market: shares sum to welfare", [&](PropertyResult& r) {
    over_corpus(opts, 0x11, r, [&](const CorrectnessMatrix& c) {
      const auto ex = exact_shares(c);
      std::int64_t total = 0;
      for (auto v : ex.numerators) total += v;
      const double w = welfare(c);
      double sum = 0.0;
      for (double mu : market_shares(c)) sum += mu;
      if (total != static_cast<std::int64_t>(ex.served) * ex.scale || std::abs(sum - w) > 1e-12) {
        note_failure(r, "sum of shares " + std::to_string(sum) + " != welfare " + std::to_string(w) + " on " +
                            describe_matrix(c));
      }
    });
  }));

  out.push_back(timed_property("market: duopoly share is half of accuracy plus discrepancy", [&](PropertyResult& r) {
    over_corpus(opts, 0x12, r, [&](const CorrectnessMatrix& c) {
      if (c.providers() != 2) return;
      const auto ex = exact_shares(c);
      for (std::size_t i = 0; i < 2; ++i) {
        std::int64_t correct = 0;
        std::int64_t exclusive = 0;
        for (std::size_t j = 0; j < c.examples(); ++j) {
          correct += c.at(i, j);
          exclusive += c.at(i, j) && !c.at(1 - i, j);
        }
        // m * 2 * mu_i == m * (a_i + delta_ij)
        if (ex.numerators[i] != correct + exclusive) {
          note_failure(r, "provider " + std::to_string(i) + " on " + describe_matrix(c));
        }
      }
    });
  }));

  out.push_back(timed_property("market: higher accuracy iff higher duopoly share", [&](PropertyResult& r) {
    over_corpus(opts, 0x13, r, [&](const CorrectnessMatrix& c) {
      if (c.providers() != 2) return;
      const auto ex = exact_shares(c);
      const auto a0 = c.row_count(0);
      const auto a1 = c.row_count(1);
      const int share_order = (ex.numerators[0] > ex.numerators[1]) - (ex.numerators[0] < ex.numerators[1]);
      const int acc_order = (a0 > a1) - (a0 < a1);
      if (share_order != acc_order) note_failure(r, describe_matrix(c));
    });
  }));

  out.push_back(timed_property("market: weighted share identity is exact", [&](PropertyResult& r) {
    over_corpus(opts, 0x14, r, [&](const CorrectnessMatrix& c) {
      const auto mu = market_shares(c);
      for (std::size_t i = 0; i < c.providers(); ++i) {
        const double via_weights = weighted_share_identity(c, i);
        // independent floating accumulation of (1/m) sum_j w_i(x_j) C(i, j)
        const auto w = competition_weights(c, i);
        double naive = 0.0;
        for (std::size_t j = 0; j < c.examples(); ++j) naive += c.at(i, j) ? w[j] : 0.0;
        naive /= static_cast<double>(c.examples());
        if (via_weights != mu[i] || std::abs(naive - mu[i]) > 1e-12) {
          note_failure(r, "provider " + std::to_string(i) + " on " + describe_matrix(c));
          return;
        }
      }
    });
  }));

  out.push_back(timed_property("market: decomposition reconstructs shares", [&](PropertyResult& r) {
    over_corpus(opts, 0x15, r, [&](const CorrectnessMatrix& c) {
      const auto dec = subset_decomposition(c);
      const auto mu = market_shares(c);
      double mass = 0.0;
      std::vector<double> rebuilt(c.providers(), 0.0);
      for (const auto& [mask, m] : dec) {
        mass += m;
        const int size = std::popcount(mask);
        for (std::size_t i = 0; i < c.providers(); ++i) {
          if (mask & (1U << i)) rebuilt[i] += m / size;
        }
      }
      bool ok = std::abs(mass - 1.0) <= 1e-12;
      for (std::size_t i = 0; i < c.providers(); ++i) ok = ok && std::abs(rebuilt[i] - mu[i]) <= 1e-12;
      if (!ok) note_failure(r, describe_matrix(c));
    });
  }));

  out.push_back(timed_property("market: share at most accuracy, concentration in (0, 1]", [&](PropertyResult& r) {
    over_corpus(opts, 0x16, r, [&](const CorrectnessMatrix& c) {
      const auto o = evaluate_market(c);
      bool ok = true;
      for (std::size_t i = 0; i < c.providers(); ++i) ok = ok && o.shares[i] <= o.accuracies[i] + 1e-15;
      if (o.welfare > 0.0) {
        ok = ok && o.hhi && *o.hhi > 0.0 && *o.hhi <= 1.0 + 1e-12;
      } else {
        ok = ok && !o.hhi;
      }
      if (!ok) note_failure(r, describe_matrix(c));
    });
  }));

  return out;
}

}  // namespace accmarket
