#include <doctest.h>

#include <sstream>

#include "accmarket/cli.hpp"
#include "accmarket/data_io.hpp"
#include "test_util.hpp"

using namespace accmarket;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "accmarket");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// Numeric table from one of the tool's csv files: comment lines skipped, values parsed with strtod
// so nan and inf come through.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  double get(std::size_t r, const std::string& column) const {
    const auto it = std::find(header.begin(), header.end(), column);
    REQUIRE(it != header.end());
    return rows.at(r).at(static_cast<std::size_t>(it - header.begin()));
  }
};

Table read_table(const fs::path& p) {
  std::istringstream in(testutil::slurp(p));
  Table t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (t.header.empty()) {
      t.header = cells;
      continue;
    }
    REQUIRE(cells.size() == t.header.size());
    std::vector<double> row;
    for (const auto& c : cells) {
      char* end = nullptr;
      row.push_back(std::strtod(c.c_str(), &end));
      REQUIRE(*end == '\0');
    }
    t.rows.push_back(row);
  }
  return t;
}

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& text) {
  const auto p = dir / name;
  write_file_atomic(p, text);
  return p;
}

const char* kWideNeg = R"({
  "seed": 42,
  "data": {"source": "gaussian", "a": 1, "sigma_neg": 2, "sigma_pos": 1, "samples": 200000},
  "providers": {"count": 2, "learner": {"kind": "threshold"}},
  "dynamics": {"rounds": 5, "init": "shared"}
})";

}  // namespace

TEST_CASE("simulate writes trajectory, outcome and schema") {
  const auto dir = testutil::temp_dir("cli_sim");
  const auto cfg = write_config(dir, "duopoly.json", kWideNeg);
  const auto r = invoke({"simulate", "--config", cfg.string(), "--out", (dir / "a").string(), "--quiet"});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  for (const char* f : {"trajectory.csv", "outcome.json", "schema.json"}) CHECK(fs::exists(dir / "a" / f));

  const auto outcome = nlohmann::json::parse(testutil::slurp(dir / "a" / "outcome.json"));
  CHECK(outcome["version"] == cli::version());
  CHECK(outcome["seed"] == 42);
  CHECK(outcome["config"]["data"]["sigma_neg"] == 2);
  std::vector<double> taus;
  for (const auto& h : outcome["classifiers"]["final"]) taus.push_back(h["tau"].get<double>());
  std::sort(taus.begin(), taus.end());
  const GaussianMarketSpec spec{1.0, 2.0, 1.0, 0.5};
  CHECK(std::abs(taus[0] - testutil::ratio_root(spec, 0.5)) <= 0.05);
  CHECK(std::abs(taus[1] - testutil::ratio_root(spec, 2.0)) <= 0.05);
  CHECK(outcome["final"]["decomposition"]["masses"].is_object());

  // plot-ready csv parses with the library's own reader
  const auto traj = load_csv(dir / "a" / "trajectory.csv", "mover", "-1");
  CHECK(traj.label(0) == kPositive);
  CHECK(traj.feature_names().front() == "step");
  CHECK(testutil::slurp(dir / "a" / "trajectory.csv").find("# seed 42\n") != std::string::npos);

  // same config into a second directory: byte-identical files
  REQUIRE(invoke({"simulate", "--config", cfg.string(), "--out", (dir / "b").string(), "--quiet"}).code == 0);
  for (const char* f : {"trajectory.csv", "outcome.json", "schema.json"}) {
    CHECK(testutil::slurp(dir / "a" / f) == testutil::slurp(dir / "b" / f));
  }
}

TEST_CASE("simulate: a monopolist has one row and welfare equals accuracy") {
  const auto dir = testutil::temp_dir("cli_mono");
  const auto cfg = write_config(dir, "mono.json", R"({
    "data": {"source": "gaussian", "samples": 500},
    "providers": {"count": 1, "learner": {"kind": "stump"}}
  })");
  REQUIRE(invoke({"simulate", "--config", cfg.string(), "--out", dir.string(), "--quiet"}).code == 0);
  const auto traj = load_csv(dir / "trajectory.csv", "step", "0");
  CHECK(traj.size() == 1);
  const auto outcome = nlohmann::json::parse(testutil::slurp(dir / "outcome.json"));
  CHECK(outcome["final"]["welfare"] == outcome["final"]["accuracies"][0]);
}

TEST_CASE("config errors exit with 1") {
  const auto dir = testutil::temp_dir("cli_bad");
  const auto unknown = write_config(dir, "unknown.json", R"({"seed": 1, "provders": {"count": 2}})");
  auto r = invoke({"simulate", "--config", unknown.string(), "--out", dir.string()});
  CHECK(r.code == cli::kExitConfig);
  CHECK(r.err.find("provders") != std::string::npos);

  const auto nested = write_config(dir, "nested.json", R"({"providers": {"learner": {"kind": "stump", "depth": 2}}})");
  r = invoke({"simulate", "--config", nested.string(), "--out", dir.string()});
  CHECK(r.code == cli::kExitConfig);
  CHECK(r.err.find("providers.learner.depth") != std::string::npos);

  const auto kind = write_config(dir, "kind.json", R"({"providers": {"learner": {"kind": "forest"}}})");
  CHECK(invoke({"simulate", "--config", kind.string(), "--out", dir.string()}).code == cli::kExitConfig);

  const auto syntax = write_config(dir, "syntax.json", "{\"seed\": ");
  CHECK(invoke({"simulate", "--config", syntax.string(), "--out", dir.string()}).code == cli::kExitConfig);

  const auto noout = write_config(dir, "noout.json", "{}");
  CHECK(invoke({"simulate", "--config", noout.string()}).code == cli::kExitConfig);

  const auto order = write_config(dir, "order.json", R"({"dynamics": {"order": [0, 0]}})");
  CHECK(invoke({"simulate", "--config", order.string(), "--out", dir.string()}).code == cli::kExitConfig);

  CHECK(invoke({"simulate"}).code == cli::kExitConfig);
  CHECK(invoke({"verify", "--scale", "huge"}).code == cli::kExitConfig);
}

TEST_CASE("runtime failures exit with 2") {
  const auto dir = testutil::temp_dir("cli_runtime");
  const auto cfg = write_config(dir, "diverge.json", R"({
    "data": {"source": "gaussian", "a": 50, "samples": 100},
    "providers": {"count": 2, "learner": {"kind": "linear", "learning_rate": 1e8, "lambda": 1}}
  })");
  const auto r = invoke({"simulate", "--config", cfg.string(), "--out", dir.string()});
  CHECK(r.code == cli::kExitRuntime);
  CHECK(r.err.find("diverged") != std::string::npos);
}

TEST_CASE("csv data source with split and feature restriction") {
  const auto dir = testutil::temp_dir("cli_csv");
  std::string text = "f0,f1,f2,outcome\n";
  for (int j = 0; j < 60; ++j) {
    const double x = (j % 13) - 6.0;
    const double y = (j % 7) - 3.0;
    text += format_double(x) + "," + format_double(y) + "," + format_double(j * 0.1) + "," + (x + y > 0 ? "yes" : "no") + "\n";
  }
  write_file_atomic(dir / "table.csv", text);
  const auto cfg = write_config(dir, "csv.json", R"({
    "data": {"source": "csv", "path": "table.csv", "label_column": "outcome", "positive_label": "yes", "features": 2},
    "split": {"test_fraction": 0.25},
    "providers": {"count": 3, "learner": {"kind": "stump"}}
  })");
  REQUIRE(invoke({"simulate", "--config", cfg.string(), "--out", (dir / "o").string(), "--quiet"}).code == 0);
  const auto outcome = nlohmann::json::parse(testutil::slurp(dir / "o" / "outcome.json"));
  CHECK(outcome["examples"] == 45);
  CHECK(outcome.contains("test_final"));
}

TEST_CASE("study commands") {
  const auto dir = testutil::temp_dir("cli_studies");

  const auto order = write_config(dir, "order.json", R"({
    "seed": 3,
    "data": {"source": "gaussian", "a": 1, "sigma_neg": 2, "sigma_pos": 1, "samples": 20000},
    "providers": {"count": 2, "learner": {"kind": "threshold"}},
    "order_study": {"repetitions": 10}
  })");
  REQUIRE(invoke({"order-study", "--config", order.string(), "--out", (dir / "order").string(), "--quiet"}).code == 0);
  const auto summary = read_table(dir / "order" / "order_summary.csv");
  REQUIRE(summary.rows.size() == 1);
  CHECK(summary.get(0, "earlier") == 0.0);
  CHECK(summary.get(0, "later") == 1.0);
  CHECK(summary.get(0, "mean") > 0.0);
  CHECK(read_table(dir / "order" / "order_runs.csv").rows.size() == 10);
  CHECK(fs::exists(dir / "order" / "schema.json"));

  const auto sweep = write_config(dir, "sweep.json", R"({"sweep": {"a_from": 2.0, "a_to": 0.1, "points": 20}})");
  REQUIRE(invoke({"sweep", "--config", sweep.string(), "--out", (dir / "sweep").string(), "--quiet"}).code == 0);
  const auto rows = read_table(dir / "sweep" / "sweep.csv");
  CHECK(rows.header.size() == 19);
  REQUIRE(rows.rows.size() == 20);
  double jumps = 0.0;
  for (std::size_t r = 0; r < rows.rows.size(); ++r) jumps += rows.get(r, "jump");
  CHECK(jumps == 1.0);

  // capacity with every feature reproduces simulate
  const auto cap = write_config(dir, "cap.json", R"({
    "seed": 8,
    "data": {"source": "gaussian", "a": 0.7, "samples": 400},
    "providers": {"count": 2, "learner": {"kind": "stump"}},
    "capacity": {"feature_counts": [1]}
  })");
  REQUIRE(invoke({"capacity", "--config", cap.string(), "--out", (dir / "cap").string(), "--quiet"}).code == 0);
  REQUIRE(invoke({"simulate", "--config", cap.string(), "--out", (dir / "sim").string(), "--quiet"}).code == 0);
  const auto cap_rows = read_table(dir / "cap" / "capacity_runs.csv");
  const auto sim = nlohmann::json::parse(testutil::slurp(dir / "sim" / "outcome.json"));
  CHECK(cap_rows.get(0, "welfare_final") == sim["final"]["welfare"].get<double>());
  CHECK(cap_rows.get(0, "welfare_initial") == sim["initial"]["welfare"].get<double>());
  CHECK(std::isnan(cap_rows.get(0, "test_welfare_final")));

  const auto asym = write_config(dir, "asym.json", R"({
    "data": {"source": "gaussian", "samples": 300},
    "providers": {"count": 2, "learner": {"kind": "stump"}},
    "asym": {"better_features": 1, "worse_features": 1, "repetitions": 3}
  })");
  REQUIRE(invoke({"asym", "--config", asym.string(), "--out", (dir / "asym").string(), "--quiet"}).code == 0);
  const auto asym_sum = read_table(dir / "asym" / "asym_summary.csv");
  REQUIRE(asym_sum.rows.size() == 1);
  for (std::size_t c = 0; c < asym_sum.header.size(); ++c) {
    INFO(asym_sum.header[c]);
    CHECK(asym_sum.rows[0][c] == (asym_sum.header[c].ends_with("count") ? 3.0 : 0.0));
  }
}

TEST_CASE("help documents the csv columns") {
  const auto r = invoke({"sweep", "--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("right_boundary") != std::string::npos);
  CHECK(r.out.find("--config") != std::string::npos);
}
