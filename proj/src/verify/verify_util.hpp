#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "accmarket/dataset.hpp"
#include "accmarket/market.hpp"

namespace accmarket::detail {

using Rng = std::mt19937_64;

inline std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::vector<std::uint8_t> random_row(Rng& rng, std::size_t m, double p) {
  std::bernoulli_distribution coin(p);
  std::vector<std::uint8_t> row(m);
  for (auto& v : row) v = coin(rng) ? 1 : 0;
  return row;
}

inline CorrectnessMatrix random_matrix(Rng& rng, std::size_t n, std::size_t m) {
  const double p = uniform_real(rng, 0.05, 0.95);
  CorrectnessMatrix c(n, m);
  std::bernoulli_distribution coin(p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) c.set(i, j, coin(rng));
  }
  return c;
}

/// Matrix whose bits are the binary digits of mask, row-major.
inline CorrectnessMatrix matrix_from_mask(std::size_t n, std::size_t m, std::uint64_t mask) {
  CorrectnessMatrix c(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) c.set(i, j, (mask >> (i * m + j)) & 1U);
  }
  return c;
}

/// Calls fn on every n x m boolean matrix with n in [1, max_n], m in [1, max_m].
template <class Fn>
std::size_t for_each_small_matrix(std::size_t max_n, std::size_t max_m, Fn fn) {
  std::size_t count = 0;
  for (std::size_t n = 1; n <= max_n; ++n) {
    for (std::size_t m = 1; m <= max_m; ++m) {
      const std::uint64_t total = std::uint64_t{1} << (n * m);
      for (std::uint64_t mask = 0; mask < total; ++mask) {
        fn(matrix_from_mask(n, m, mask));
        ++count;
      }
    }
  }
  return count;
}

/// Random labels and one-dimensional features on m points.
inline Dataset random_points(Rng& rng, std::size_t m) {
  std::vector<double> xs(m);
  std::vector<Label> ys(m);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t j = 0; j < m; ++j) {
    xs[j] = static_cast<double>(j);
    ys[j] = coin(rng) ? kPositive : kNegative;
  }
  return Dataset(std::move(xs), 1, std::move(ys));
}

/// Predictions that are correct exactly where row is 1.
inline std::vector<Label> predictions_for(const std::vector<std::uint8_t>& row, const Dataset& data) {
  std::vector<Label> p(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) p[j] = row[j] ? data.label(j) : static_cast<Label>(-data.label(j));
  return p;
}

inline std::string describe_matrix(const CorrectnessMatrix& c) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < c.providers(); ++i) {
    if (i) os << " ";
    for (std::size_t j = 0; j < c.examples(); ++j) os << (c.at(i, j) ? 'T' : 'F');
  }
  os << "]";
  return os.str();
}

inline std::string describe_row(const std::vector<std::uint8_t>& row) {
  std::string s;
  for (auto v : row) s += v ? 'T' : 'F';
  return s;
}

}  // namespace accmarket::detail
