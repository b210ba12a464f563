#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace accmarket {

enum class Scale { Quick, Full };

Scale parse_scale(const std::string& text);
std::string to_string(Scale scale);

struct PropertyResult {
  std::string name;
  bool passed = true;
  std::size_t cases = 0;
  /// Counterexample on failure, a short summary otherwise.
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  Scale scale = Scale::Quick;
  std::uint64_t seed = 20240601;
};

std::vector<PropertyResult> verify_market(const VerifyOptions& opts);
std::vector<PropertyResult> verify_games(const VerifyOptions& opts);
std::vector<PropertyResult> verify_threshold(const VerifyOptions& opts);
std::vector<PropertyResult> verify_learners(const VerifyOptions& opts);
std::vector<PropertyResult> verify_dynamics(const VerifyOptions& opts);

/// Every suite, in the order above.
std::vector<PropertyResult> verify_all(const VerifyOptions& opts);

/// One line per property: "PASS name (cases, seconds): detail".
void print_results(std::ostream& out, const std::vector<PropertyResult>& results);

/// Runs body and times it; body fills cases / passed / detail.
PropertyResult timed_property(const std::string& name, const std::function<void(PropertyResult&)>& body);

}  // namespace accmarket
