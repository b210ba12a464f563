#include <algorithm>
#include <string>

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

std::string pair_text(const std::vector<std::uint8_t>& r1, const std::vector<std::uint8_t>& r2) {
  return "h1=" + describe_row(r1) + " h2=" + describe_row(r2);
}

// Every pair of correctness rows with m <= max_m, then random pairs with m <= 12.
template <class Fn>
void over_row_pairs(const VerifyOptions& opts, std::uint64_t salt, std::size_t max_m, std::size_t random_count,
                    PropertyResult& r, Fn fn) {
  for (std::size_t m = 1; m <= max_m; ++m) {
    const std::uint64_t total = std::uint64_t{1} << (2 * m);
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      std::vector<std::uint8_t> r1(m);
      std::vector<std::uint8_t> r2(m);
      for (std::size_t j = 0; j < m; ++j) {
        r1[j] = (mask >> j) & 1U;
        r2[j] = (mask >> (m + j)) & 1U;
      }
      fn(r1, r2);
      ++r.cases;
    }
  }
  Rng rng(opts.seed ^ salt);
  for (std::size_t k = 0; k < random_count; ++k) {
    const std::size_t m = uniform_index(rng, 1, 12);
    const double p = uniform_real(rng, 0.1, 0.9);
    fn(random_row(rng, m, p), random_row(rng, m, p));
    ++r.cases;
  }
}

}  // namespace

std::vector<PropertyResult> verify_games(const VerifyOptions& opts) {
  std::vector<PropertyResult> out;
  const std::size_t random_count = opts.scale == Scale::Full ? 50000 : 10000;
  const std::size_t max_m = opts.scale == Scale::Full ? 6 : 4;

  out.push_back(timed_property("games: 2x2 classification matches brute-force equilibria", [&](PropertyResult& r) {
    Rng labels(opts.seed ^ 0x21);
    over_row_pairs(opts, 0x22, max_m, random_count, r, [&](const auto& r1, const auto& r2) {
      // Realize the rows as enumerated classifiers on a random labeled sample.
      const Dataset data = random_points(labels, r1.size());
      const Classifier h1 = Classifier::enumerated(predictions_for(r1, data), data);
      const Classifier h2 = Classifier::enumerated(predictions_for(r2, data), data);
      const Game2x2 g = Game2x2::from_classifiers(h1, h2, data);
      const auto report = classify_2x2(g);
      const auto brute = enumerate_pne({{h1, h2}, {h1, h2}}, data);

      long c1 = 0, c2 = 0, e12 = 0, e21 = 0;
      for (std::size_t j = 0; j < r1.size(); ++j) {
        c1 += r1[j];
        c2 += r2[j];
        e12 += r1[j] && !r2[j];
        e21 += r2[j] && !r1[j];
      }
      const bool anti_counts = 3 * std::abs(c1 - c2) <= e12 + e21;
      const bool anti = report.kind == EquilibriumKind::AntiCoordination;
      if (report.pne_states != brute || anti != anti_counts) {
        note_failure(r, pair_text(r1, r2));
        return;
      }
      const StrategyProfile off1{0, 1};
      const StrategyProfile off2{1, 0};
      const auto has = [&](const StrategyProfile& s) {
        return std::find(brute.begin(), brute.end(), s) != brute.end();
      };
      if (anti) {
        const bool distinct = r1 != r2;
        if (!has(off1) || !has(off2)) note_failure(r, "anti-coordination without both off-diagonal equilibria: " +
                                                          pair_text(r1, r2));
        if (distinct && !report.boundary && brute.size() != 2) {
          note_failure(r, "strict anti-coordination with extra equilibria: " + pair_text(r1, r2));
        }
      } else {
        const std::size_t h = *report.dominant;
        if (!has(StrategyProfile{h, h})) note_failure(r, "dominant profile missing: " + pair_text(r1, r2));
      }
    });
  }));

  out.push_back(timed_property("games: more accurate strategy earns more at anti-coordination", [&](PropertyResult& r) {
    over_row_pairs(opts, 0x23, max_m, random_count, r, [&](const auto& r1, const auto& r2) {
      const std::size_t m = r1.size();
      long c1 = 0, c2 = 0, e12 = 0, e21 = 0;
      for (std::size_t j = 0; j < m; ++j) {
        c1 += r1[j];
        c2 += r2[j];
        e12 += r1[j] && !r2[j];
        e21 += r2[j] && !r1[j];
      }
      const double md = static_cast<double>(m);
      const auto g = Game2x2::make(c1 / md, c2 / md, e12 / md, e21 / md);
      const auto report = classify_2x2(g);
      if (report.kind != EquilibriumKind::AntiCoordination || c1 == c2) return;
      const std::size_t better = c1 > c2 ? 0 : 1;
      for (std::size_t k = 0; k < report.pne_states.size(); ++k) {
        const auto& s = report.pne_states[k];
        if (s[0] == s[1]) continue;
        // payoff of whichever player holds the better strategy
        const double mine = s[0] == better ? report.payoffs[k].first : report.payoffs[k].second;
        const double theirs = s[0] == better ? report.payoffs[k].second : report.payoffs[k].first;
        if (!(mine > theirs)) note_failure(r, pair_text(r1, r2));
      }
    });
  }));

  out.push_back(timed_property("games: no equilibrium player holds more than 2/3 of welfare", [&](PropertyResult& r) {
    Rng rng(opts.seed ^ 0x24);
    for (std::size_t k = 0; k < random_count; ++k) {
      const std::size_t m = uniform_index(rng, 1, 12);
      const std::size_t size = uniform_index(rng, 2, 5);
      const double p = uniform_real(rng, 0.1, 0.9);
      std::vector<std::vector<std::uint8_t>> menu;
      for (std::size_t s = 0; s < size; ++s) menu.push_back(random_row(rng, m, p));
      const std::vector<std::vector<std::vector<std::uint8_t>>> menus{menu, menu};
      const auto pnes = enumerate_pne_rows(menus);
      if (pnes.empty()) note_failure(r, "no pure equilibrium found");
      for (const auto& s : pnes) {
        const auto ex = profile_shares(menus, s);
        const auto hi = std::max(ex.numerators[0], ex.numerators[1]);
        const auto lo = std::min(ex.numerators[0], ex.numerators[1]);
        const double welfare = static_cast<double>(ex.served) / static_cast<double>(m);
        const double top = ex.share(ex.numerators[0] >= ex.numerators[1] ? 0 : 1);
        if (hi > 2 * lo || top > 2.0 / 3.0 * welfare + 1e-12) {
          note_failure(r, "profile (" + std::to_string(s[0]) + "," + std::to_string(s[1]) + ") shares " +
                              std::to_string(ex.share(0)) + "/" + std::to_string(ex.share(1)));
        }
      }
      ++r.cases;
    }
  }));

  out.push_back(timed_property("games: best response is never worse than staying", [&](PropertyResult& r) {
    Rng rng(opts.seed ^ 0x25);
    for (std::size_t k = 0; k < random_count; ++k) {
      const std::size_t m = uniform_index(rng, 1, 20);
      const std::size_t others = uniform_index(rng, 0, 4);
      const double p = uniform_real(rng, 0.1, 0.9);
      const Dataset data = random_points(rng, m);
      std::vector<Classifier> menu;
      for (std::size_t s = 0, size = uniform_index(rng, 1, 6); s < size; ++s) {
        menu.push_back(Classifier::enumerated(predictions_for(random_row(rng, m, p), data), data));
      }
      CorrectnessMatrix opp(others, m);
      for (std::size_t i = 0; i < others; ++i) {
        const auto row = random_row(rng, m, p);
        for (std::size_t j = 0; j < m; ++j) opp.set(i, j, row[j] != 0);
      }
      const auto br = best_response_finite(menu, opp, data);
      const auto counts = opp.column_counts();
      const std::size_t current = uniform_index(rng, 0, menu.size() - 1);
      const auto held = responder_numerator(counts, correctness_row(menu[current], data), br.scale);
      const auto full = exact_shares(opp.appended(correctness_row(br.classifier, data)));
      if (br.numerator < held || full.numerators.back() * br.scale != br.numerator * full.scale) {
        note_failure(r, "menu of " + std::to_string(menu.size()) + " against " + std::to_string(others) +
                            " opponents on m=" + std::to_string(m));
      }
      ++r.cases;
    }
  }));

  return out;
}

}  // namespace accmarket
