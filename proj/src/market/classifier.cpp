#include "accmarket/classifier.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace accmarket {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

Classifier::Classifier(Rule rule) : rule_(std::move(rule)) {
  std::visit(overloaded{
                 [](const ThresholdRule& r) {
                   if (std::isnan(r.tau)) throw std::invalid_argument("threshold tau is NaN");
                 },
                 [](const LinearRule& r) {
                   if (r.weights.empty()) throw std::invalid_argument("linear rule needs at least one weight");
                   for (double w : r.weights) {
                     if (!std::isfinite(w)) throw std::invalid_argument("linear weight is not finite");
                   }
                   if (!std::isfinite(r.bias)) throw std::invalid_argument("linear bias is not finite");
                 },
                 [](const StumpRule& r) {
                   if (std::isnan(r.tau)) throw std::invalid_argument("stump tau is NaN");
                   if (r.polarity != 1 && r.polarity != -1) {
                     throw std::invalid_argument("stump polarity must be +1 or -1");
                   }
                 },
                 [](const EnumeratedRule& r) {
                   for (Label y : r.predictions) {
                     if (y != kPositive && y != kNegative) {
                       throw std::invalid_argument("enumerated prediction is not -1 or +1");
                     }
                   }
                 },
             },
             rule_);
}

Classifier Classifier::threshold(double tau, std::size_t feature) {
  return Classifier(ThresholdRule{tau, feature});
}

Classifier Classifier::linear(std::vector<double> weights, double bias) {
  return Classifier(LinearRule{std::move(weights), bias});
}

Classifier Classifier::stump(std::size_t feature, double tau, int polarity) {
  return Classifier(StumpRule{feature, tau, polarity});
}

Classifier Classifier::enumerated(std::vector<Label> predictions, const Dataset& bound_to) {
  if (predictions.size() != bound_to.size()) {
    throw std::invalid_argument("enumerated predictions have length " + std::to_string(predictions.size()) +
                                " but the dataset has " + std::to_string(bound_to.size()) + " examples");
  }
  return Classifier(EnumeratedRule{std::move(predictions), bound_to.identity()});
}

void Classifier::check_compatible(const Dataset& data) const {
  std::visit(overloaded{
                 [&](const ThresholdRule& r) {
                   if (r.feature >= data.dim()) {
                     throw std::invalid_argument("threshold feature " + std::to_string(r.feature) +
                                                 " out of range for dimension " + std::to_string(data.dim()));
                   }
                 },
                 [&](const LinearRule& r) {
                   if (r.weights.size() != data.dim()) {
                     throw std::invalid_argument("linear classifier has " + std::to_string(r.weights.size()) +
                                                 " weights but data has dimension " + std::to_string(data.dim()));
                   }
                 },
                 [&](const StumpRule& r) {
                   if (r.feature >= data.dim()) {
                     throw std::invalid_argument("stump feature " + std::to_string(r.feature) +
                                                 " out of range for dimension " + std::to_string(data.dim()));
                   }
                 },
                 [&](const EnumeratedRule& r) {
                   if (r.dataset_identity != data.identity() || r.predictions.size() != data.size()) {
                     throw std::invalid_argument("enumerated classifier is bound to a different dataset");
                   }
                 },
             },
             rule_);
}

Label Classifier::predict(const Dataset& data, std::size_t j) const {
  return std::visit(overloaded{
                        [&](const ThresholdRule& r) -> Label {
                          return data.at(j, r.feature) > r.tau ? kPositive : kNegative;
                        },
                        [&](const LinearRule& r) -> Label {
                          auto x = data.row(j);
                          double s = r.bias;
                          for (std::size_t f = 0; f < x.size(); ++f) s += r.weights[f] * x[f];
                          return s > 0.0 ? kPositive : kNegative;
                        },
                        [&](const StumpRule& r) -> Label {
                          const bool above = data.at(j, r.feature) > r.tau;
                          return static_cast<Label>(above ? r.polarity : -r.polarity);
                        },
                        [&](const EnumeratedRule& r) -> Label { return r.predictions[j]; },
                    },
                    rule_);
}

std::vector<Label> Classifier::predict_all(const Dataset& data) const {
  check_compatible(data);
  std::vector<Label> out(data.size());
  for (std::size_t j = 0; j < data.size(); ++j) out[j] = predict(data, j);
  return out;
}

Classifier Classifier::lifted_to(std::size_t dim) const {
  if (const auto* lin = std::get_if<LinearRule>(&rule_)) {
    if (lin->weights.size() > dim) throw std::invalid_argument("cannot lift linear classifier to a smaller dimension");
    LinearRule wide = *lin;
    wide.weights.resize(dim, 0.0);
    return Classifier(std::move(wide));
  }
  if (std::holds_alternative<EnumeratedRule>(rule_)) {
    throw std::invalid_argument("enumerated classifiers cannot be lifted to another feature space");
  }
  return *this;
}

std::string Classifier::describe() const {
  return std::visit(overloaded{
                        [](const ThresholdRule& r) {
                          return "threshold(x" + std::to_string(r.feature) + " > " + format_real(r.tau) + ")";
                        },
                        [](const LinearRule& r) {
                          std::string s = "linear(w=[";
                          for (std::size_t f = 0; f < r.weights.size(); ++f) {
                            if (f) s += ",";
                            s += format_real(r.weights[f]);
                          }
                          return s + "], b=" + format_real(r.bias) + ")";
                        },
                        [](const StumpRule& r) {
                          return "stump(x" + std::to_string(r.feature) + " > " + format_real(r.tau) +
                                 " -> " + (r.polarity > 0 ? "+1" : "-1") + ")";
                        },
                        [](const EnumeratedRule& r) {
                          return "enumerated(" + std::to_string(r.predictions.size()) + " predictions, fp=" +
                                 std::to_string(prediction_fingerprint(r.predictions)) + ")";
                        },
                    },
                    rule_);
}

std::uint64_t prediction_fingerprint(const std::vector<Label>& predictions) {
  std::uint64_t h = 1469598103934665603ULL;
  for (Label y : predictions) {
    h ^= static_cast<std::uint8_t>(y);
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace accmarket
