#include "accmarket/verify.hpp"

#include <chrono>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace accmarket {

Scale parse_scale(const std::string& text) {
  if (text == "quick") return Scale::Quick;
  if (text == "full") return Scale::Full;
  throw std::invalid_argument("unknown scale '" + text + "' (expected quick or full)");
}

std::string to_string(Scale scale) { return scale == Scale::Quick ? "quick" : "full"; }

PropertyResult timed_property(const std::string& name, const std::function<void(PropertyResult&)>& body) {
  PropertyResult r;
  r.name = name;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<PropertyResult> verify_all(const VerifyOptions& opts) {
  std::vector<PropertyResult> all;
  for (auto* suite : {&verify_market, &verify_games, &verify_threshold, &verify_learners, &verify_dynamics}) {
    auto part = suite(opts);
    all.insert(all.end(), part.begin(), part.end());
  }
  return all;
}

void print_results(std::ostream& out, const std::vector<PropertyResult>& results) {
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.cases << " cases, " << std::fixed
        << std::setprecision(2) << r.seconds << "s)";
    out.unsetf(std::ios::fixed);
    if (!r.detail.empty()) out << ": " << r.detail;
    out << "\n";
  }
}

}  // namespace accmarket
