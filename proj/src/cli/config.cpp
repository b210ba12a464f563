#include <cmath>
#include <fstream>
#include <set>

#include "accmarket/cli.hpp"
#include "accmarket/data_io.hpp"

namespace accmarket::cli {
namespace {

using nlohmann::json;

// Object reader that records which keys were consumed.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + " must be an object");
  }

  void allow(std::initializer_list<const char*> keys) {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : j_.items()) {
      (void)v;
      if (!ok.count(k)) throw ConfigError("unknown key '" + where(k) + "'");
    }
  }

  bool has(const std::string& k) const { return j_.contains(k) && !j_.at(k).is_null(); }
  const json& raw(const std::string& k) const { return j_.at(k); }
  std::string where(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  double real(const std::string& k, double def) const { return has(k) ? as_real(j_.at(k), where(k)) : def; }

  std::uint64_t u64(const std::string& k, std::uint64_t def) const {
    if (!has(k)) return def;
    const auto& v = j_.at(k);
    if (!v.is_number_unsigned()) throw ConfigError(where(k) + " must be a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  std::size_t count(const std::string& k, std::size_t def) const {
    return static_cast<std::size_t>(u64(k, def));
  }

  bool flag(const std::string& k, bool def) const {
    if (!has(k)) return def;
    if (!j_.at(k).is_boolean()) throw ConfigError(where(k) + " must be true or false");
    return j_.at(k).get<bool>();
  }

  std::string text(const std::string& k, const std::string& def) const {
    if (!has(k)) return def;
    if (!j_.at(k).is_string()) throw ConfigError(where(k) + " must be a string");
    return j_.at(k).get<std::string>();
  }

  std::vector<std::size_t> counts(const std::string& k) const {
    std::vector<std::size_t> out;
    if (!has(k)) return out;
    const auto& v = j_.at(k);
    if (!v.is_array()) throw ConfigError(where(k) + " must be an array of nonnegative integers");
    for (const auto& e : v) {
      if (!e.is_number_unsigned()) throw ConfigError(where(k) + " must be an array of nonnegative integers");
      out.push_back(e.get<std::size_t>());
    }
    return out;
  }

  static double as_real(const json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      if (s == "inf" || s == "+inf") return kPosInf;
      if (s == "-inf") return kNegInf;
    }
    throw ConfigError(where + " must be a number (or \"inf\" / \"-inf\")");
  }

 private:
  const json& j_;
  std::string path_;
};

template <class Fn>
auto wrap(const std::string& where, Fn fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

LearnerConfig parse_learner(const json& j, const std::string& path) {
  Section s(j, path);
  s.allow({"kind", "loss", "lambda", "learning_rate", "max_iters", "tol", "seed", "random_init", "feature", "menu"});
  LearnerConfig l;
  wrap(s.where("kind"), [&] { l.kind = parse_learner_kind(s.text("kind", "stump")); });
  wrap(s.where("loss"), [&] { l.loss = parse_loss(s.text("loss", "logistic")); });
  l.lambda = s.real("lambda", l.lambda);
  l.learning_rate = s.real("learning_rate", l.learning_rate);
  l.max_iters = s.count("max_iters", l.max_iters);
  l.tol = s.real("tol", l.tol);
  l.seed = s.u64("seed", l.seed);
  l.random_init = s.flag("random_init", l.random_init);
  l.feature = s.count("feature", l.feature);
  if (s.has("menu")) {
    const auto& menu = s.raw("menu");
    if (!menu.is_array()) throw ConfigError(s.where("menu") + " must be an array of classifiers");
    for (std::size_t k = 0; k < menu.size(); ++k) {
      l.menu.push_back(wrap(s.where("menu") + "[" + std::to_string(k) + "]", [&] { return parse_classifier(menu[k]); }));
    }
  }
  wrap(path, [&] { l.validate(); });
  return l;
}

DataSource parse_data(const json& j, const std::filesystem::path& base_dir, std::uint64_t seed) {
  Section s(j, "data");
  const std::string kind = s.text("source", "gaussian");
  DataSource src;
  if (kind == "gaussian") {
    s.allow({"source", "a", "sigma_neg", "sigma_pos", "prior", "samples"});
    src.kind = DataSource::Kind::Gaussian;
    src.spec.a = s.real("a", 1.0);
    src.spec.sigma_neg = s.real("sigma_neg", 1.0);
    src.spec.sigma_pos = s.real("sigma_pos", 1.0);
    src.spec.prior = s.real("prior", 0.5);
    src.samples = s.count("samples", 1000);
    if (src.samples < 2) throw ConfigError("data.samples must be at least 2");
    wrap("data", [&] { src.spec.validate(); });
  } else if (kind == "csv") {
    s.allow({"source", "path", "label_column", "positive_label", "features", "rebalance", "subsample"});
    if (!s.has("path")) throw ConfigError("data.path is required for csv data");
    std::filesystem::path p = s.text("path", "");
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    const std::string label = s.text("label_column", "label");
    const std::string positive = s.text("positive_label", "1");
    Dataset data = wrap("data", [&] { return load_csv(p, label, positive); });
    if (s.has("features")) {
      const std::size_t k = s.count("features", 0);
      data = wrap("data.features", [&] { return restrict_features(data, k); });
    }
    if (s.has("rebalance")) {
      const double target = s.real("rebalance", 0.5);
      data = wrap("data.rebalance", [&] { return rebalance(data, target, derive_seed(seed, 0xba1)); });
    }
    if (s.has("subsample")) {
      const std::size_t k = s.count("subsample", 0);
      data = wrap("data.subsample", [&] { return subsample(data, k, derive_seed(seed, 0x5ab)); });
    }
    src.kind = DataSource::Kind::Fixed;
    src.data = std::move(data);
  } else {
    throw ConfigError("data.source must be \"gaussian\" or \"csv\", got \"" + kind + "\"");
  }
  return src;
}

}  // namespace

Classifier parse_classifier(const json& j) {
  Section s(j, "classifier");
  const std::string type = s.text("type", "");
  if (type == "threshold") {
    s.allow({"type", "tau", "feature"});
    return Classifier::threshold(s.real("tau", 0.0), s.count("feature", 0));
  }
  if (type == "stump") {
    s.allow({"type", "tau", "feature", "polarity"});
    const double pol = s.real("polarity", 1.0);
    if (pol != 1.0 && pol != -1.0) throw ConfigError("stump polarity must be 1 or -1");
    return Classifier::stump(s.count("feature", 0), s.real("tau", 0.0), pol > 0 ? 1 : -1);
  }
  if (type == "linear") {
    s.allow({"type", "weights", "bias"});
    std::vector<double> w;
    if (!s.has("weights") || !s.raw("weights").is_array()) throw ConfigError("linear classifier needs a weights array");
    for (const auto& v : s.raw("weights")) w.push_back(Section::as_real(v, "weights"));
    return Classifier::linear(std::move(w), s.real("bias", 0.0));
  }
  if (type == "constant") {
    s.allow({"type", "label"});
    const double y = s.real("label", 1.0);
    if (y != 1.0 && y != -1.0) throw ConfigError("constant label must be 1 or -1");
    return Classifier::constant(y > 0 ? kPositive : kNegative);
  }
  throw ConfigError("classifier type must be threshold, stump, linear or constant, got \"" + type + "\"");
}

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  Section top(doc, "");
  top.allow({"seed", "output", "data", "split", "providers", "dynamics", "sweep", "order_study", "capacity", "asym"});
  RunConfig cfg;
  cfg.echo = doc;
  cfg.seed = top.u64("seed", 0);

  if (top.has("output")) {
    Section o(top.raw("output"), "output");
    o.allow({"dir"});
    if (o.has("dir")) cfg.out_dir = o.text("dir", "");
  }

  cfg.source = top.has("data") ? parse_data(top.raw("data"), base_dir, cfg.seed) : DataSource{};
  if (top.has("split")) {
    Section sp(top.raw("split"), "split");
    sp.allow({"test_fraction"});
    const double f = sp.real("test_fraction", 0.2);
    wrap("split", [&] { SplitSpec{f, 0}.validate(); });
    cfg.source.test_fraction = f;
  }

  DynamicsConfig& dc = cfg.dynamics;
  if (top.has("providers")) {
    Section p(top.raw("providers"), "providers");
    p.allow({"count", "learner", "learners", "feature_counts"});
    dc.providers = p.count("count", 2);
    if (p.has("learner") && p.has("learners")) throw ConfigError("give providers.learner or providers.learners, not both");
    if (p.has("learner")) dc.learners = {parse_learner(p.raw("learner"), "providers.learner")};
    if (p.has("learners")) {
      const auto& arr = p.raw("learners");
      if (!arr.is_array()) throw ConfigError("providers.learners must be an array");
      dc.learners.clear();
      for (std::size_t k = 0; k < arr.size(); ++k) {
        dc.learners.push_back(parse_learner(arr[k], "providers.learners[" + std::to_string(k) + "]"));
      }
    }
    dc.feature_counts = p.counts("feature_counts");
  }
  if (top.has("dynamics")) {
    Section d(top.raw("dynamics"), "dynamics");
    d.allow({"rounds", "epsilon", "order", "init", "initial"});
    dc.rounds = d.count("rounds", dc.rounds);
    if (d.has("epsilon")) dc.epsilon = d.real("epsilon", 0.0);
    dc.order = d.counts("order");
    wrap("dynamics.init", [&] { dc.init = parse_init_mode(d.text("init", "shared")); });
    if (d.has("initial")) {
      const auto& arr = d.raw("initial");
      if (!arr.is_array()) throw ConfigError("dynamics.initial must be an array of classifiers");
      for (std::size_t k = 0; k < arr.size(); ++k) {
        dc.initial.push_back(wrap("dynamics.initial[" + std::to_string(k) + "]", [&] { return parse_classifier(arr[k]); }));
      }
    }
  }
  dc.seed = cfg.seed;

  if (top.has("sweep")) {
    Section s(top.raw("sweep"), "sweep");
    s.allow({"mode", "a_from", "a_to", "points", "sigma_neg", "sigma_pos", "prior", "samples", "lo", "hi", "rounds"});
    auto& w = cfg.sweep;
    const std::string mode = s.text("mode", "analytic");
    if (mode == "analytic") {
      w.mode = SweepMode::Analytic;
    } else if (mode == "sampled") {
      w.mode = SweepMode::Sampled;
    } else {
      throw ConfigError("sweep.mode must be \"analytic\" or \"sampled\"");
    }
    w.a_from = s.real("a_from", w.a_from);
    w.a_to = s.real("a_to", w.a_to);
    w.points = s.count("points", w.points);
    w.sigma_neg = s.real("sigma_neg", w.sigma_neg);
    w.sigma_pos = s.real("sigma_pos", w.sigma_pos);
    w.prior = s.real("prior", w.prior);
    w.samples = s.count("samples", w.samples);
    w.lo = s.real("lo", w.lo);
    w.hi = s.real("hi", w.hi);
    w.rounds = s.count("rounds", w.rounds);
    if (w.points < 1) throw ConfigError("sweep.points must be at least 1");
    if (!(w.lo < w.hi)) throw ConfigError("sweep.lo must be below sweep.hi");
    wrap("sweep", [&] { GaussianMarketSpec{w.a_from, w.sigma_neg, w.sigma_pos, w.prior}.validate(); });
  }
  if (top.has("order_study")) {
    Section s(top.raw("order_study"), "order_study");
    s.allow({"repetitions", "positions"});
    cfg.order.repetitions = s.count("repetitions", cfg.order.repetitions);
    if (s.has("positions")) {
      const auto& arr = s.raw("positions");
      if (!arr.is_array()) throw ConfigError("order_study.positions must be an array of [earlier, later] pairs");
      for (const auto& e : arr) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() || !e[1].is_number_unsigned()) {
          throw ConfigError("order_study.positions must be an array of [earlier, later] pairs");
        }
        cfg.order.positions.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
      }
    }
  }
  if (top.has("capacity")) {
    Section s(top.raw("capacity"), "capacity");
    s.allow({"feature_counts", "repetitions"});
    cfg.capacity.feature_counts = s.counts("feature_counts");
    cfg.capacity.repetitions = s.count("repetitions", cfg.capacity.repetitions);
  }
  if (top.has("asym")) {
    Section s(top.raw("asym"), "asym");
    s.allow({"better_features", "worse_features", "position", "repetitions"});
    cfg.asym.better_features = s.count("better_features", 1);
    cfg.asym.worse_features = s.count("worse_features", 1);
    cfg.asym.position = s.count("position", 0);
    cfg.asym.repetitions = s.count("repetitions", cfg.asym.repetitions);
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

std::uint64_t run_seed(const RunConfig& cfg) { return derive_seed(cfg.seed, 0); }

}  // namespace accmarket::cli
