#include "accmarket/exact_games.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace accmarket {
namespace {

constexpr double kRealizabilityTolerance = 1e-9;

void check_unit(double v, const char* name) {
  if (!(v >= -kRealizabilityTolerance && v <= 1.0 + kRealizabilityTolerance)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
  }
}

}  // namespace

Game2x2 Game2x2::make(double a1, double a2, double d12, double d21) {
  check_unit(a1, "a1");
  check_unit(a2, "a2");
  check_unit(d12, "d12");
  check_unit(d21, "d21");
  if (d12 > a1 + kRealizabilityTolerance || d21 > a2 + kRealizabilityTolerance) {
    throw std::invalid_argument("partial discrepancy cannot exceed accuracy");
  }
  if (std::abs((a1 - d12) - (a2 - d21)) > kRealizabilityTolerance) {
    throw std::invalid_argument("unrealizable game: a1 - d12 must equal a2 - d21");
  }
  if (a1 + d21 > 1.0 + kRealizabilityTolerance) {
    throw std::invalid_argument("unrealizable game: a1 + d21 exceeds 1");
  }
  return Game2x2{a1, a2, d12, d21};
}

Game2x2 Game2x2::from_classifiers(const Classifier& h1, const Classifier& h2, const Dataset& data) {
  return make(accuracy(h1, data), accuracy(h2, data), partial_discrepancy(h1, h2, data),
              partial_discrepancy(h2, h1, data));
}

PayoffMatrix payoff_matrix(const Game2x2& g) {
  const double same1 = 0.5 * g.a1;
  const double same2 = 0.5 * g.a2;
  const double u1 = 0.5 * (g.a1 + g.d12);
  const double u2 = 0.5 * (g.a2 + g.d21);
  PayoffMatrix p{};
  p[0][0] = {same1, same1};
  p[0][1] = {u1, u2};
  p[1][0] = {u2, u1};
  p[1][1] = {same2, same2};
  return p;
}

EquilibriumReport classify_2x2(const Game2x2& g) {
  const PayoffMatrix p = payoff_matrix(g);
  EquilibriumReport report;

  const double gap = std::abs(g.a1 - g.a2);
  const double bound = (g.d12 + g.d21) / 3.0;
  report.boundary = std::abs(gap - bound) <= kPayoffTieTolerance;
  const bool anti = gap <= bound + kPayoffTieTolerance;

  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 2; ++c) {
      const bool row_ok = p[r][c].first >= p[1 - r][c].first - kPayoffTieTolerance;
      const bool col_ok = p[r][c].second >= p[r][1 - c].second - kPayoffTieTolerance;
      if (row_ok && col_ok) {
        report.pne_states.push_back({r, c});
        report.payoffs.push_back(p[r][c]);
      }
    }
  }

  if (anti) {
    report.kind = EquilibriumKind::AntiCoordination;
  } else {
    report.kind = EquilibriumKind::DominantStrategy;
    // h1 is dominant iff playing it against h1 beats switching to h2.
    report.dominant = p[0][0].first > p[1][0].first ? 0 : 1;
  }
  return report;
}

std::pair<std::size_t, std::int64_t> best_response_rows(std::span<const std::vector<std::uint8_t>> menu_rows,
                                                        std::span<const std::uint32_t> opponent_counts,
                                                        std::int64_t scale) {
  if (menu_rows.empty()) throw std::invalid_argument("best response needs a nonempty menu");
  std::size_t best = 0;
  std::int64_t best_num = responder_numerator(opponent_counts, menu_rows[0], scale);
  for (std::size_t k = 1; k < menu_rows.size(); ++k) {
    const std::int64_t num = responder_numerator(opponent_counts, menu_rows[k], scale);
    if (num > best_num) {
      best = k;
      best_num = num;
    }
  }
  return {best, best_num};
}

FiniteBestResponse best_response_finite(std::span<const Classifier> menu, const CorrectnessMatrix& opponents,
                                        const Dataset& data) {
  if (menu.empty()) throw std::invalid_argument("best response needs a nonempty menu");
  if (opponents.examples() != data.size()) {
    throw std::invalid_argument("opponent correctness matrix does not match the dataset size");
  }
  std::vector<std::vector<std::uint8_t>> rows;
  rows.reserve(menu.size());
  for (const auto& h : menu) rows.push_back(correctness_row(h, data));
  const auto counts = opponents.column_counts();
  const std::int64_t scale = share_scale(opponents.providers() + 1);
  const auto [index, numerator] = best_response_rows(rows, counts, scale);

  FiniteBestResponse out;
  out.index = index;
  out.classifier = menu[index];
  out.numerator = numerator;
  out.scale = scale;
  out.share = static_cast<double>(static_cast<long double>(numerator) /
                                  (static_cast<long double>(scale) * static_cast<long double>(data.size())));
  return out;
}

ExactShares profile_shares(const std::vector<std::vector<std::vector<std::uint8_t>>>& menus,
                           const StrategyProfile& profile) {
  const std::size_t n = menus.size();
  const std::size_t m = menus.front().front().size();
  CorrectnessMatrix c(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = menus[i][profile[i]];
    for (std::size_t j = 0; j < m; ++j) c.set(i, j, row[j] != 0);
  }
  return exact_shares(c);
}

std::vector<StrategyProfile> enumerate_pne_rows(
    const std::vector<std::vector<std::vector<std::uint8_t>>>& menus) {
  const std::size_t n = menus.size();
  if (n == 0) throw std::invalid_argument("equilibrium enumeration needs at least one player");
  std::size_t total = 1;
  for (const auto& menu : menus) {
    if (menu.empty()) throw std::invalid_argument("every player needs a nonempty menu");
    if (total > kMaxProfiles / menu.size()) {
      throw std::length_error("strategy profile space exceeds " + std::to_string(kMaxProfiles) + " profiles");
    }
    total *= menu.size();
  }
  const std::size_t m = menus.front().front().size();
  for (const auto& menu : menus) {
    for (const auto& row : menu) {
      if (row.size() != m) throw std::invalid_argument("correctness rows must share one length");
    }
  }
  const std::int64_t scale = share_scale(n);

  std::vector<StrategyProfile> out;
  StrategyProfile profile(n, 0);
  std::vector<std::uint32_t> kappa(m);
  for (std::size_t visited = 0; visited < total; ++visited) {
    std::fill(kappa.begin(), kappa.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& row = menus[i][profile[i]];
      for (std::size_t j = 0; j < m; ++j) kappa[j] += row[j];
    }

    bool stable = true;
    std::vector<std::uint32_t> others(m);
    for (std::size_t i = 0; i < n && stable; ++i) {
      const auto& current = menus[i][profile[i]];
      for (std::size_t j = 0; j < m; ++j) others[j] = kappa[j] - current[j];
      const std::int64_t held = responder_numerator(others, current, scale);
      for (std::size_t k = 0; k < menus[i].size(); ++k) {
        if (k == profile[i]) continue;
        if (responder_numerator(others, menus[i][k], scale) > held) {
          stable = false;
          break;
        }
      }
    }
    if (stable) out.push_back(profile);

    // Odometer with player 0 as the most significant digit.
    for (std::size_t i = n; i-- > 0;) {
      if (++profile[i] < menus[i].size()) break;
      profile[i] = 0;
    }
  }
  return out;
}

std::vector<StrategyProfile> enumerate_pne(const std::vector<std::vector<Classifier>>& menus, const Dataset& data) {
  std::vector<std::vector<std::vector<std::uint8_t>>> rows(menus.size());
  for (std::size_t i = 0; i < menus.size(); ++i) {
    for (const auto& h : menus[i]) rows[i].push_back(correctness_row(h, data));
  }
  return enumerate_pne_rows(rows);
}

}  // namespace accmarket
