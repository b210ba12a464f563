#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "accmarket/dataset.hpp"
#include "accmarket/threshold_games.hpp"

namespace accmarket {

/// One-dimensional sample: y = +1 with probability prior, x | y ~ Normal(a * y, sigma_y).
/// prior may be 0 or 1 here (single-class samples).
Dataset sample_gaussian_market(const GaussianMarketSpec& spec, std::size_t m, std::uint64_t seed);

/// Reads a numeric CSV with one header row. Lines starting with '#' before the header are skipped.
/// The label column becomes +1 where it equals positive_label (numerically when both parse as
/// numbers) and -1 otherwise; every other column is a feature, in file order.
Dataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                 const std::string& positive_label = "1");
Dataset parse_csv(std::istream& in, const std::string& label_column, const std::string& positive_label = "1",
                  const std::string& source = "<stream>");

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Header of feature names (x0, x1, ... when unnamed) plus the label column; labels written as 1 / -1.
/// Each comment becomes a leading "# " line.
std::string to_csv(const Dataset& data, const std::string& label_column = "label",
                   const std::vector<std::string>& comments = {});
void write_csv(const Dataset& data, const std::filesystem::path& path, const std::string& label_column = "label",
               const std::vector<std::string>& comments = {});

/// Writes to a sibling temporary file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

struct SplitSpec {
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
  void validate() const;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded shuffle, then the first ceil(m (1 - f)) indices train; both parts are kept nonempty.
SplitIndices split_indices(std::size_t m, const SplitSpec& spec);
std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec);

/// Duplicates random examples of the under-represented class until the positive ratio is within
/// 1/m of target. Original rows come first, in order.
Dataset rebalance(const Dataset& data, double target_positive_ratio, std::uint64_t seed);

/// First k feature columns.
Dataset restrict_features(const Dataset& data, std::size_t k);

/// k rows drawn without replacement, kept in original order.
Dataset subsample(const Dataset& data, std::size_t k, std::uint64_t seed);

/// Stream of independent seeds derived from one base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace accmarket
