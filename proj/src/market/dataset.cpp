#include "accmarket/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace accmarket {
namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void mix(std::uint64_t& h, std::uint64_t value) {
  for (int b = 0; b < 8; ++b) {
    h ^= (value >> (8 * b)) & 0xffU;
    h *= kFnvPrime;
  }
}

std::uint64_t fingerprint(std::span<const double> features, std::size_t dim,
                          std::span<const Label> labels) {
  std::uint64_t h = kFnvOffset;
  mix(h, dim);
  mix(h, labels.size());
  for (double v : features) mix(h, std::bit_cast<std::uint64_t>(v));
  for (Label y : labels) mix(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(y)));
  return h;
}

}  // namespace

Dataset::Dataset(std::vector<double> features, std::size_t dim, std::vector<Label> labels,
                 std::string name, std::vector<std::string> feature_names)
    : features_(std::move(features)),
      dim_(dim),
      labels_(std::move(labels)),
      name_(std::move(name)),
      feature_names_(std::move(feature_names)) {
  if (labels_.empty()) throw std::invalid_argument("dataset must contain at least one example");
  if (dim_ == 0) throw std::invalid_argument("dataset dimension must be at least 1");
  if (features_.size() != labels_.size() * dim_) {
    throw std::invalid_argument("feature buffer size " + std::to_string(features_.size()) +
                                " does not match m*d = " + std::to_string(labels_.size()) + "*" +
                                std::to_string(dim_));
  }
  for (std::size_t j = 0; j < labels_.size(); ++j) {
    if (labels_[j] != kPositive && labels_[j] != kNegative) {
      throw std::invalid_argument("label at row " + std::to_string(j) + " is not -1 or +1");
    }
  }
  for (std::size_t k = 0; k < features_.size(); ++k) {
    if (!std::isfinite(features_[k])) {
      throw std::invalid_argument("non-finite feature at row " + std::to_string(k / dim_) +
                                  ", column " + std::to_string(k % dim_));
    }
  }
  if (!feature_names_.empty() && feature_names_.size() != dim_) {
    throw std::invalid_argument("feature name count does not match dimension");
  }
  identity_ = fingerprint(features_, dim_, labels_);
}

Dataset Dataset::from_rows(const std::vector<std::vector<double>>& rows, std::vector<Label> labels,
                           std::string name) {
  if (rows.size() != labels.size()) throw std::invalid_argument("row count does not match label count");
  const std::size_t dim = rows.empty() ? 0 : rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * dim);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (rows[j].size() != dim) {
      throw std::invalid_argument("row " + std::to_string(j) + " has " + std::to_string(rows[j].size()) +
                                  " entries, expected " + std::to_string(dim));
    }
    flat.insert(flat.end(), rows[j].begin(), rows[j].end());
  }
  return Dataset(std::move(flat), dim, std::move(labels), std::move(name));
}

std::size_t Dataset::positives() const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), kPositive));
}

Dataset Dataset::select_rows(std::span<const std::size_t> indices, std::string name) const {
  std::vector<double> flat;
  std::vector<Label> labels;
  flat.reserve(indices.size() * dim_);
  labels.reserve(indices.size());
  for (std::size_t idx : indices) {
    if (idx >= size()) throw std::out_of_range("row index " + std::to_string(idx) + " out of range");
    auto r = row(idx);
    flat.insert(flat.end(), r.begin(), r.end());
    labels.push_back(labels_[idx]);
  }
  return Dataset(std::move(flat), dim_, std::move(labels), name.empty() ? name_ : std::move(name),
                 feature_names_);
}

Dataset Dataset::prefix_features(std::size_t k) const {
  if (k < 1 || k > dim_) {
    throw std::invalid_argument("feature count " + std::to_string(k) + " outside [1, " +
                            std::to_string(dim_) + "]");
  }
  if (k == dim_) return *this;
  std::vector<double> flat;
  flat.reserve(size() * k);
  for (std::size_t j = 0; j < size(); ++j) {
    auto r = row(j);
    flat.insert(flat.end(), r.begin(), r.begin() + static_cast<std::ptrdiff_t>(k));
  }
  std::vector<std::string> names;
  if (!feature_names_.empty()) names.assign(feature_names_.begin(), feature_names_.begin() + static_cast<std::ptrdiff_t>(k));
  return Dataset(std::move(flat), k, labels_, name_, std::move(names));
}

}  // namespace accmarket
