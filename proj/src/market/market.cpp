#include "accmarket/market.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace accmarket {

CorrectnessMatrix::CorrectnessMatrix(std::size_t providers, std::size_t examples)
    : providers_(providers), examples_(examples), cells_(providers * examples, 0) {
  if (examples == 0) throw std::invalid_argument("correctness matrix needs at least one example");
}

CorrectnessMatrix CorrectnessMatrix::from_rows(const std::vector<std::vector<bool>>& rows) {
  if (rows.empty()) throw std::invalid_argument("correctness matrix needs at least one row");
  CorrectnessMatrix c(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != c.examples_) throw std::invalid_argument("ragged correctness rows");
    for (std::size_t j = 0; j < c.examples_; ++j) c.set(i, j, rows[i][j]);
  }
  return c;
}

std::vector<std::uint32_t> CorrectnessMatrix::column_counts() const {
  std::vector<std::uint32_t> counts(examples_, 0);
  for (std::size_t i = 0; i < providers_; ++i) {
    const std::uint8_t* r = cells_.data() + i * examples_;
    for (std::size_t j = 0; j < examples_; ++j) counts[j] += r[j];
  }
  return counts;
}

std::size_t CorrectnessMatrix::row_count(std::size_t i) const {
  auto r = row(i);
  return static_cast<std::size_t>(std::accumulate(r.begin(), r.end(), std::size_t{0}));
}

CorrectnessMatrix CorrectnessMatrix::without_row(std::size_t i) const {
  if (i >= providers_) throw std::out_of_range("provider index out of range");
  CorrectnessMatrix out(providers_ - 1, examples_);
  std::size_t dst = 0;
  for (std::size_t r = 0; r < providers_; ++r) {
    if (r == i) continue;
    std::copy_n(cells_.begin() + static_cast<std::ptrdiff_t>(r * examples_), examples_,
                out.cells_.begin() + static_cast<std::ptrdiff_t>(dst * examples_));
    ++dst;
  }
  return out;
}

CorrectnessMatrix CorrectnessMatrix::with_row(std::size_t i, std::span<const std::uint8_t> replacement) const {
  if (i >= providers_) throw std::out_of_range("provider index out of range");
  if (replacement.size() != examples_) throw std::invalid_argument("replacement row has wrong length");
  CorrectnessMatrix out = *this;
  for (std::size_t j = 0; j < examples_; ++j) out.cells_[i * examples_ + j] = replacement[j] ? 1 : 0;
  return out;
}

CorrectnessMatrix CorrectnessMatrix::appended(std::span<const std::uint8_t> extra_row) const {
  if (extra_row.size() != examples_) throw std::invalid_argument("appended row has wrong length");
  CorrectnessMatrix out(providers_ + 1, examples_);
  std::copy(cells_.begin(), cells_.end(), out.cells_.begin());
  for (std::size_t j = 0; j < examples_; ++j) out.cells_[providers_ * examples_ + j] = extra_row[j] ? 1 : 0;
  return out;
}

std::vector<std::uint8_t> correctness_row(const Classifier& h, const Dataset& data) {
  h.check_compatible(data);
  std::vector<std::uint8_t> row(data.size());
  for (std::size_t j = 0; j < data.size(); ++j) row[j] = h.predict(data, j) == data.label(j) ? 1 : 0;
  return row;
}

CorrectnessMatrix compute_correctness(std::span<const Classifier> classifiers, const Dataset& data) {
  CorrectnessMatrix c(classifiers.size(), data.size());
  for (std::size_t i = 0; i < classifiers.size(); ++i) {
    auto row = correctness_row(classifiers[i], data);
    for (std::size_t j = 0; j < row.size(); ++j) c.set(i, j, row[j] != 0);
  }
  return c;
}

std::int64_t share_scale(std::size_t providers) {
  if (providers > kMaxProviders) {
    throw std::length_error("at most " + std::to_string(kMaxProviders) + " providers are supported, got " +
                            std::to_string(providers));
  }
  std::int64_t l = 1;
  for (std::int64_t k = 2; k <= static_cast<std::int64_t>(providers); ++k) l = std::lcm(l, k);
  return l;
}

std::int64_t responder_numerator(std::span<const std::uint32_t> counts, std::span<const std::uint8_t> row,
                                 std::int64_t scale) {
  std::int64_t total = 0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (row[j]) total += scale / (1 + static_cast<std::int64_t>(counts[j]));
  }
  return total;
}

ExactShares exact_shares(const CorrectnessMatrix& c) {
  ExactShares out;
  out.scale = share_scale(c.providers());
  out.examples = c.examples();
  out.numerators.assign(c.providers(), 0);
  const auto kappa = c.column_counts();
  for (std::size_t j = 0; j < c.examples(); ++j) {
    if (kappa[j] == 0) continue;
    ++out.served;
    const std::int64_t unit = out.scale / kappa[j];
    for (std::size_t i = 0; i < c.providers(); ++i) {
      if (c.at(i, j)) out.numerators[i] += unit;
    }
  }
  return out;
}

std::vector<double> market_shares(const CorrectnessMatrix& c) {
  if (c.providers() == 0) throw std::invalid_argument("market shares need at least one provider");
  const ExactShares exact = exact_shares(c);
  std::vector<double> mu(c.providers());
  for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = exact.share(i);
  return mu;
}

double welfare(const CorrectnessMatrix& c) {
  if (c.providers() == 0) throw std::invalid_argument("welfare needs at least one provider");
  const auto kappa = c.column_counts();
  std::size_t served = 0;
  for (auto k : kappa) served += k > 0 ? 1 : 0;
  return static_cast<double>(served) / static_cast<double>(c.examples());
}

double accuracy(const Classifier& h, const Dataset& data) {
  const auto row = correctness_row(h, data);
  std::size_t correct = 0;
  for (auto v : row) correct += v;
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double partial_discrepancy(const Classifier& h_i, const Classifier& h_j, const Dataset& data) {
  const auto ri = correctness_row(h_i, data);
  const auto rj = correctness_row(h_j, data);
  std::size_t count = 0;
  for (std::size_t k = 0; k < ri.size(); ++k) count += (ri[k] && !rj[k]) ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(data.size());
}

std::vector<std::uint32_t> competitor_counts(const CorrectnessMatrix& c, std::size_t i) {
  if (i >= c.providers()) {
    throw std::out_of_range("provider index " + std::to_string(i) + " out of range for " +
                            std::to_string(c.providers()) + " providers");
  }
  auto counts = c.column_counts();
  auto own = c.row(i);
  for (std::size_t j = 0; j < counts.size(); ++j) counts[j] -= own[j];
  return counts;
}

std::vector<double> competition_weights(const CorrectnessMatrix& c, std::size_t i) {
  const auto counts = competitor_counts(c, i);
  std::vector<double> w(counts.size());
  for (std::size_t j = 0; j < counts.size(); ++j) w[j] = 1.0 / (1.0 + static_cast<double>(counts[j]));
  return w;
}

double weighted_share_identity(const CorrectnessMatrix& c, std::size_t i) {
  const auto counts = competitor_counts(c, i);
  ExactShares exact;
  exact.scale = share_scale(c.providers());
  exact.examples = c.examples();
  exact.numerators = {responder_numerator(counts, c.row(i), exact.scale)};
  return exact.share(0);
}

Decomposition subset_decomposition(const CorrectnessMatrix& c) {
  if (c.providers() > kMaxProviders) {
    throw std::length_error("subset decomposition supports at most " + std::to_string(kMaxProviders) +
                            " providers");
  }
  std::map<std::uint32_t, std::size_t> counts;
  for (std::size_t j = 0; j < c.examples(); ++j) {
    std::uint32_t mask = 0;
    for (std::size_t i = 0; i < c.providers(); ++i) {
      if (c.at(i, j)) mask |= (1U << i);
    }
    ++counts[mask];
  }
  Decomposition out;
  for (auto [mask, count] : counts) {
    out[mask] = static_cast<double>(count) / static_cast<double>(c.examples());
  }
  return out;
}

double hhi(const MarketOutcome& outcome) {
  if (!(outcome.welfare > 0.0)) {
    throw std::domain_error("market concentration is undefined when no user is served");
  }
  // Shares of the served market, from the exact numerators when available.
  const auto& ex = outcome.exact;
  const bool have_exact = ex.numerators.size() == outcome.shares.size() && ex.served > 0;
  long double total = 0.0L;
  for (std::size_t i = 0; i < outcome.shares.size(); ++i) {
    const long double s = have_exact
                              ? static_cast<long double>(ex.numerators[i]) /
                                    (static_cast<long double>(ex.scale) * static_cast<long double>(ex.served))
                              : static_cast<long double>(outcome.shares[i]) / outcome.welfare;
    total += s * s;
  }
  return static_cast<double>(total);
}

MarketOutcome evaluate_market(const CorrectnessMatrix& c) {
  MarketOutcome out;
  out.exact = exact_shares(c);
  out.shares.resize(c.providers());
  out.accuracies.resize(c.providers());
  for (std::size_t i = 0; i < c.providers(); ++i) {
    out.shares[i] = out.exact.share(i);
    out.accuracies[i] = static_cast<double>(c.row_count(i)) / static_cast<double>(c.examples());
  }
  out.welfare = static_cast<double>(out.exact.served) / static_cast<double>(c.examples());
  if (out.exact.served > 0) out.hhi = hhi(out);
  out.decomposition = subset_decomposition(c);
  return out;
}

MarketOutcome evaluate_market(std::span<const Classifier> classifiers, const Dataset& data) {
  return evaluate_market(compute_correctness(classifiers, data));
}

}  // namespace accmarket
