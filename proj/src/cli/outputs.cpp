#include <cmath>
#include <sstream>

#include "accmarket/cli.hpp"
#include "accmarket/data_io.hpp"

namespace accmarket::cli {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Finite reals as numbers; infinities as "inf" / "-inf" so configs can read them back.
ordered_json real(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

ordered_json reals(const std::vector<double>& vs) {
  auto a = ordered_json::array();
  for (double v : vs) a.push_back(real(v));
  return a;
}

ordered_json classifier_json(const Classifier& h) {
  ordered_json j;
  std::visit(
      [&](const auto& r) {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, ThresholdRule>) {
          j["type"] = "threshold";
          j["tau"] = real(r.tau);
          j["feature"] = r.feature;
        } else if constexpr (std::is_same_v<R, StumpRule>) {
          j["type"] = "stump";
          j["feature"] = r.feature;
          j["tau"] = real(r.tau);
          j["polarity"] = r.polarity;
        } else if constexpr (std::is_same_v<R, LinearRule>) {
          j["type"] = "linear";
          j["weights"] = reals(r.weights);
          j["bias"] = real(r.bias);
        } else {
          j["type"] = "enumerated";
          j["fingerprint"] = prediction_fingerprint(r.predictions);
        }
      },
      h.rule());
  j["describe"] = h.describe();
  return j;
}

ordered_json outcome_json(const MarketOutcome& o) {
  ordered_json j;
  j["shares"] = reals(o.shares);
  j["accuracies"] = reals(o.accuracies);
  j["welfare"] = o.welfare;
  j["hhi"] = o.hhi ? ordered_json(*o.hhi) : ordered_json(nullptr);
  ordered_json masses = ordered_json::object();
  for (const auto& [mask, mass] : o.decomposition) masses[std::to_string(mask)] = mass;
  j["decomposition"] = {
      {"legend", "key is a provider bitmask: bit i set means provider i is correct; value is the mass of such users"},
      {"masses", masses}};
  j["exact"] = {{"scale", o.exact.scale},
                {"examples", o.exact.examples},
                {"served", o.exact.served},
                {"numerators", o.exact.numerators}};
  return j;
}

std::string config_line(const RunConfig& cfg) { return cfg.echo.dump(); }

std::vector<std::string> header_comments(const RunConfig& cfg) {
  return {"accmarket " + version(), "seed " + std::to_string(cfg.seed), "config " + config_line(cfg)};
}

ordered_json provenance(const RunConfig& cfg) {
  ordered_json j;
  j["version"] = version();
  j["seed"] = cfg.seed;
  j["config"] = cfg.echo;
  return j;
}

// Numeric CSV with '#' comment lines in front, readable by load_csv.
class CsvBuilder {
 public:
  CsvBuilder(const RunConfig& cfg, const std::vector<ColumnDoc>& columns) : width_(columns.size()) {
    for (const auto& c : header_comments(cfg)) os_ << "# " << c << "\n";
    for (std::size_t k = 0; k < columns.size(); ++k) os_ << (k ? "," : "") << columns[k].name;
    os_ << "\n";
  }

  void row(const std::vector<double>& values) {
    if (values.size() != width_) throw std::logic_error("csv row width does not match the schema");
    for (std::size_t k = 0; k < values.size(); ++k) os_ << (k ? "," : "") << format_double(values[k]);
    os_ << "\n";
  }

  std::string str() const { return os_.str(); }

 private:
  std::size_t width_;
  std::ostringstream os_;
};

const FileDoc& doc_of(const std::vector<FileDoc>& docs, const std::string& file) {
  for (const auto& d : docs) {
    if (d.file == file) return d;
  }
  throw std::logic_error("no schema for " + file);
}

void write_schema(const std::filesystem::path& dir, const RunConfig& cfg, const std::vector<FileDoc>& docs) {
  ordered_json j = provenance(cfg);
  auto files = ordered_json::array();
  for (const auto& d : docs) {
    ordered_json cols = ordered_json::array();
    for (const auto& c : d.columns) cols.push_back({{"name", c.name}, {"meaning", c.meaning}});
    files.push_back({{"file", d.file}, {"columns", cols}});
  }
  j["files"] = files;
  write_file_atomic(dir / "schema.json", j.dump(2) + "\n");
}

double flag(bool b) { return b ? 1.0 : 0.0; }
double num(std::size_t v) { return static_cast<double>(v); }
double num(std::uint64_t v, int) { return static_cast<double>(v); }

void summary_values(std::vector<double>& row, const Summary& s) {
  row.insert(row.end(), {num(s.count), s.mean, s.std_error, s.median, s.q25, s.q75, s.min, s.max});
}

void summary_columns(std::vector<ColumnDoc>& cols, const std::string& prefix, const std::string& what) {
  cols.push_back({prefix + "count", "number of repetitions"});
  cols.push_back({prefix + "mean", "mean of " + what});
  cols.push_back({prefix + "std_error", "standard error of the mean of " + what});
  cols.push_back({prefix + "median", "median of " + what});
  cols.push_back({prefix + "q25", "first quartile of " + what});
  cols.push_back({prefix + "q75", "third quartile of " + what});
  cols.push_back({prefix + "min", "minimum of " + what});
  cols.push_back({prefix + "max", "maximum of " + what});
}

}  // namespace

std::string version() { return ACCMARKET_VERSION; }

std::vector<FileDoc> schema_for(const std::string& command, std::size_t providers) {
  auto per_provider = [&](std::vector<ColumnDoc>& cols, const std::string& prefix, const std::string& meaning) {
    if (providers == 0) {
      cols.push_back({prefix + "<i>", meaning + ", one column per provider i"});
      return;
    }
    for (std::size_t i = 0; i < providers; ++i) cols.push_back({prefix + std::to_string(i), meaning + " of provider " + std::to_string(i)});
  };

  std::vector<FileDoc> docs;
  if (command == "simulate") {
    std::vector<ColumnDoc> cols{{"step", "0 for the initial state, then one row per adopted move"},
                                {"round", "round of the move (0 for the initial state)"},
                                {"mover", "provider that moved (-1 for the initial state)"}};
    per_provider(cols, "mu_", "train market share");
    cols.push_back({"welfare", "fraction of train users served by at least one provider"});
    cols.push_back({"hhi", "Herfindahl index of shares of the served market (nan when nobody is served)"});
    cols.push_back({"potential", "potential -sum_j H(kappa_j); each adopted move lowers it by m times the mover share gain"});
    docs.push_back({"trajectory.csv", cols});
    docs.push_back({"outcome.json",
                    {{"initial/final", "train MarketOutcome with subset decomposition keyed by provider bitmask"},
                     {"test_initial/test_final", "test MarketOutcome when a split is configured"},
                     {"classifiers", "initial and final classifiers per provider"},
                     {"moves", "adopted classifier per trajectory step"}}});
  } else if (command == "sweep") {
    docs.push_back({"sweep.csv",
                    {{"a", "class mean separation (means at -a and +a)"},
                     {"sigma_neg", "standard deviation of the negative class"},
                     {"sigma_pos", "standard deviation of the positive class"},
                     {"prior", "probability of the positive class"},
                     {"h_opt", "accuracy-optimal threshold"},
                     {"tau_0", "final threshold of the first mover"},
                     {"tau_1", "final threshold of the second mover"},
                     {"acc_0", "accuracy of provider 0"},
                     {"acc_1", "accuracy of provider 1"},
                     {"mu_0", "market share of provider 0"},
                     {"mu_1", "market share of provider 1"},
                     {"welfare", "fraction of users served"},
                     {"converged", "1 when a round passed without adopted moves"},
                     {"rounds", "rounds run"},
                     {"left_root", "1 when the lower ratio target is attained inside [lo, hi]"},
                     {"right_root", "1 when the upper ratio target is attained inside [lo, hi]"},
                     {"left_boundary", "1 when the lower threshold sits at the interval end"},
                     {"right_boundary", "1 when the upper threshold sits at the interval end"},
                     {"jump", "1 when a boundary flag switched on relative to the previous row"}}});
  } else if (command == "order-study") {
    std::vector<ColumnDoc> runs{{"repetition", "repetition index"}, {"seed", "repetition seed"}};
    if (providers == 0) {
      runs.push_back({"mu_pos_<p>", "final share of the provider moving at position p"});
    } else {
      for (std::size_t p = 0; p < providers; ++p) {
        runs.push_back({"mu_pos_" + std::to_string(p), "final share of the provider moving at position " + std::to_string(p)});
      }
    }
    runs.push_back({"welfare", "final welfare"});
    runs.push_back({"converged", "1 when the dynamics converged"});
    runs.push_back({"rounds", "rounds run"});
    docs.push_back({"order_runs.csv", runs});
    std::vector<ColumnDoc> sum{{"earlier", "earlier move position"}, {"later", "later move position"}};
    summary_columns(sum, "", "share(later) - share(earlier)");
    docs.push_back({"order_summary.csv", sum});
  } else if (command == "capacity") {
    docs.push_back({"capacity_runs.csv",
                    {{"features", "number of leading features every provider sees"},
                     {"repetition", "repetition index"},
                     {"seed", "repetition seed"},
                     {"welfare_initial", "train welfare at the shared start"},
                     {"welfare_final", "train welfare at the end of the dynamics"},
                     {"test_welfare_initial", "test welfare at the start (nan without a split)"},
                     {"test_welfare_final", "test welfare at the end (nan without a split)"},
                     {"converged", "1 when the dynamics converged"},
                     {"rounds", "rounds run"}}});
    std::vector<ColumnDoc> sum{{"features", "number of leading features"}};
    summary_columns(sum, "initial_", "initial welfare");
    summary_columns(sum, "final_", "final welfare");
    docs.push_back({"capacity_summary.csv", sum});
  } else if (command == "asym") {
    docs.push_back({"asym_runs.csv",
                    {{"repetition", "repetition index"},
                     {"seed", "repetition seed"},
                     {"share_advantaged", "final share of the advantaged provider"},
                     {"share_symmetric", "final share of the same provider when everyone has the worse features"},
                     {"lead_advantaged", "its share minus the best rival share, advantaged run"},
                     {"lead_symmetric", "its share minus the best rival share, symmetric run"},
                     {"delta_self", "share_advantaged - share_symmetric"},
                     {"delta_next", "lead_advantaged - lead_symmetric"}}});
    std::vector<ColumnDoc> sum;
    summary_columns(sum, "delta_self_", "delta_self");
    summary_columns(sum, "delta_next_", "delta_next");
    docs.push_back({"asym_summary.csv", sum});
  }
  return docs;
}

std::string schema_help(const std::string& command) {
  std::ostringstream os;
  for (const auto& d : schema_for(command, 0)) {
    os << d.file << ":\n";
    for (const auto& c : d.columns) os << "  " << c.name << "  " << c.meaning << "\n";
  }
  return os.str();
}

void write_simulation(const std::filesystem::path& dir, const RunConfig& cfg, const Trajectory& traj,
                      std::size_t providers) {
  const auto docs = schema_for("simulate", providers);
  CsvBuilder csv(cfg, doc_of(docs, "trajectory.csv").columns);
  auto moves = ordered_json::array();
  for (std::size_t s = 0; s < traj.steps.size(); ++s) {
    const auto& st = traj.steps[s];
    std::vector<double> row{num(s), num(st.round), st.mover ? num(*st.mover) : -1.0};
    row.insert(row.end(), st.shares.begin(), st.shares.end());
    row.push_back(st.welfare);
    row.push_back(st.hhi ? *st.hhi : std::nan(""));
    row.push_back(st.potential);
    csv.row(row);
    if (st.mover) {
      moves.push_back({{"step", s}, {"round", st.round}, {"mover", *st.mover}, {"classifier", st.classifier},
                       {"fingerprint", st.fingerprint}, {"numerators", st.numerators},
                       {"scaled_potential", st.scaled_potential}});
    }
  }
  write_file_atomic(dir / "trajectory.csv", csv.str());

  ordered_json j = provenance(cfg);
  j["run_seed"] = run_seed(cfg);
  j["providers"] = providers;
  j["examples"] = traj.examples;
  j["epsilon"] = traj.epsilon;
  j["converged"] = traj.converged;
  j["rounds_run"] = traj.rounds_run;
  j["initial"] = outcome_json(traj.initial_train());
  j["final"] = outcome_json(traj.final_train());
  if (traj.final_test()) {
    j["test_initial"] = outcome_json(*traj.rounds.front().test);
    j["test_final"] = outcome_json(*traj.final_test());
  }
  auto init = ordered_json::array();
  auto fin = ordered_json::array();
  for (const auto& h : traj.initial_classifiers) init.push_back(classifier_json(h));
  for (const auto& h : traj.final_classifiers) fin.push_back(classifier_json(h));
  j["classifiers"] = {{"initial", init}, {"final", fin}};
  j["moves"] = moves;
  write_file_atomic(dir / "outcome.json", j.dump(2) + "\n");
  write_schema(dir, cfg, docs);
}

void write_sweep(const std::filesystem::path& dir, const RunConfig& cfg, const std::vector<OverlapRow>& rows) {
  const auto docs = schema_for("sweep", 2);
  CsvBuilder csv(cfg, doc_of(docs, "sweep.csv").columns);
  for (const auto& r : rows) {
    csv.row({r.spec.a, r.spec.sigma_neg, r.spec.sigma_pos, r.spec.prior, r.h_opt, r.taus[0], r.taus[1],
             r.accuracies[0], r.accuracies[1], r.shares[0], r.shares[1], r.welfare, flag(r.converged), num(r.rounds),
             flag(r.left_root_exists), flag(r.right_root_exists), flag(r.left_at_boundary), flag(r.right_at_boundary),
             flag(r.jump)});
  }
  write_file_atomic(dir / "sweep.csv", csv.str());
  write_schema(dir, cfg, docs);
}

void write_order_study(const std::filesystem::path& dir, const RunConfig& cfg, const OrderStudyResult& result) {
  const std::size_t n = result.runs.empty() ? 0 : result.runs.front().share_by_position.size();
  const auto docs = schema_for("order-study", n);
  CsvBuilder runs(cfg, doc_of(docs, "order_runs.csv").columns);
  for (const auto& r : result.runs) {
    std::vector<double> row{num(r.repetition), num(r.seed, 0)};
    row.insert(row.end(), r.share_by_position.begin(), r.share_by_position.end());
    row.insert(row.end(), {r.welfare, flag(r.converged), num(r.rounds)});
    runs.row(row);
  }
  CsvBuilder sum(cfg, doc_of(docs, "order_summary.csv").columns);
  for (const auto& p : result.pairs) {
    std::vector<double> row{num(p.earlier), num(p.later)};
    summary_values(row, p.difference);
    sum.row(row);
  }
  write_file_atomic(dir / "order_runs.csv", runs.str());
  write_file_atomic(dir / "order_summary.csv", sum.str());
  write_schema(dir, cfg, docs);
}

void write_capacity(const std::filesystem::path& dir, const RunConfig& cfg, const CapacityResult& result) {
  const auto docs = schema_for("capacity", 0);
  CsvBuilder runs(cfg, doc_of(docs, "capacity_runs.csv").columns);
  const double nan = std::nan("");
  for (const auto& r : result.rows) {
    runs.row({num(r.features), num(r.repetition), num(r.seed, 0), r.welfare_initial, r.welfare_final,
              r.test_welfare_initial.value_or(nan), r.test_welfare_final.value_or(nan), flag(r.converged),
              num(r.rounds)});
  }
  CsvBuilder sum(cfg, doc_of(docs, "capacity_summary.csv").columns);
  for (const auto& s : result.summaries) {
    std::vector<double> row{num(s.features)};
    summary_values(row, s.welfare_initial);
    summary_values(row, s.welfare_final);
    sum.row(row);
  }
  write_file_atomic(dir / "capacity_runs.csv", runs.str());
  write_file_atomic(dir / "capacity_summary.csv", sum.str());
  write_schema(dir, cfg, docs);
}

void write_asym(const std::filesystem::path& dir, const RunConfig& cfg, const AsymResult& result) {
  const auto docs = schema_for("asym", 0);
  CsvBuilder runs(cfg, doc_of(docs, "asym_runs.csv").columns);
  for (const auto& r : result.runs) {
    runs.row({num(r.repetition), num(r.seed, 0), r.share_advantaged, r.share_symmetric, r.lead_advantaged,
              r.lead_symmetric, r.delta_self, r.delta_next});
  }
  CsvBuilder sum(cfg, doc_of(docs, "asym_summary.csv").columns);
  std::vector<double> row;
  summary_values(row, result.delta_self);
  summary_values(row, result.delta_next);
  sum.row(row);
  write_file_atomic(dir / "asym_runs.csv", runs.str());
  write_file_atomic(dir / "asym_summary.csv", sum.str());
  write_schema(dir, cfg, docs);
}

}  // namespace accmarket::cli
