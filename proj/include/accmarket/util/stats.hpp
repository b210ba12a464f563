#pragma once

#include <cstddef>
#include <span>

namespace accmarket {

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double min = 0.0;
  double max = 0.0;
  double std_error = 0.0;  // sample sd / sqrt(count); 0 for a single value
};

/// Quartiles interpolate linearly between order statistics. Empty input gives count 0 and zeros.
Summary summarize(std::span<const double> values);

}  // namespace accmarket
