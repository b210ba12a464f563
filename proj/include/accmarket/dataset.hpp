#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace accmarket {

/// Binary labels are always stored as -1 / +1.
using Label = std::int8_t;
inline constexpr Label kPositive = 1;
inline constexpr Label kNegative = -1;

/// A labeled sample of users: m feature vectors of dimension d, row-major.
///
/// The identity token is a content fingerprint. Two datasets with identical
/// features and labels share it, so classifiers bound to one dataset can be
/// evaluated on an equal copy but never on a different sample.
class Dataset {
 public:
  Dataset(std::vector<double> features, std::size_t dim, std::vector<Label> labels,
          std::string name = {}, std::vector<std::string> feature_names = {});

  static Dataset from_rows(const std::vector<std::vector<double>>& rows,
                           std::vector<Label> labels, std::string name = {});

  std::size_t size() const { return labels_.size(); }
  std::size_t dim() const { return dim_; }

  std::span<const double> row(std::size_t j) const {
    return {features_.data() + j * dim_, dim_};
  }
  double at(std::size_t j, std::size_t feature) const { return features_[j * dim_ + feature]; }
  Label label(std::size_t j) const { return labels_[j]; }

  std::span<const double> features() const { return features_; }
  std::span<const Label> labels() const { return labels_; }

  const std::string& name() const { return name_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  std::uint64_t identity() const { return identity_; }

  std::size_t positives() const;

  /// Rows selected by index (duplicates allowed), same columns.
  Dataset select_rows(std::span<const std::size_t> indices, std::string name = {}) const;

  /// Keeps the first k feature columns.
  Dataset prefix_features(std::size_t k) const;

  bool operator==(const Dataset& other) const {
    return dim_ == other.dim_ && features_ == other.features_ && labels_ == other.labels_;
  }

 private:
  std::vector<double> features_;
  std::size_t dim_;
  std::vector<Label> labels_;
  std::string name_;
  std::vector<std::string> feature_names_;
  std::uint64_t identity_ = 0;
};

}  // namespace accmarket
