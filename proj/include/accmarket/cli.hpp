#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "accmarket/dynamics.hpp"
#include "accmarket/studies.hpp"

namespace accmarket::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitProperty = 3;

/// Bad or inconsistent configuration. Maps to exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SweepSection {
  SweepMode mode = SweepMode::Analytic;
  double a_from = 2.0;
  double a_to = 0.1;
  std::size_t points = 20;
  double sigma_neg = 2.0;
  double sigma_pos = 1.0;
  double prior = 0.5;
  std::size_t samples = 200000;
  double lo = kNegInf;
  double hi = kPosInf;
  std::size_t rounds = 10;
};

struct OrderSection {
  std::size_t repetitions = 100;
  std::vector<std::pair<std::size_t, std::size_t>> positions;
};

struct CapacitySection {
  std::vector<std::size_t> feature_counts;
  std::size_t repetitions = 1;
};

struct AsymSection {
  std::size_t better_features = 1;
  std::size_t worse_features = 1;
  std::size_t position = 0;
  std::size_t repetitions = 10;
};

struct RunConfig {
  /// Normalized document, including command-line overrides. Echoed into every output.
  nlohmann::json echo;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> out_dir;
  DataSource source;
  DynamicsConfig dynamics;
  SweepSection sweep;
  OrderSection order;
  CapacitySection capacity;
  AsymSection asym;
};

/// Validates the document against the schema (unknown keys are rejected) and builds every section.
/// Relative csv paths resolve against base_dir. Throws ConfigError.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Parses a classifier object such as {"type": "threshold", "tau": 0.5, "feature": 0}.
Classifier parse_classifier(const nlohmann::json& j);

/// Seed of the single run made by simulate; equals repetition 0 of the studies.
std::uint64_t run_seed(const RunConfig& cfg);

/// Column name and meaning, per output file.
struct ColumnDoc {
  std::string name;
  std::string meaning;
};
struct FileDoc {
  std::string file;
  std::vector<ColumnDoc> columns;
};

std::vector<FileDoc> schema_for(const std::string& command, std::size_t providers);
std::string schema_help(const std::string& command);

/// Output writers. Every file carries the version, the seed and the config echo.
void write_simulation(const std::filesystem::path& dir, const RunConfig& cfg, const Trajectory& traj,
                      std::size_t providers);
void write_sweep(const std::filesystem::path& dir, const RunConfig& cfg, const std::vector<OverlapRow>& rows);
void write_order_study(const std::filesystem::path& dir, const RunConfig& cfg, const OrderStudyResult& result);
void write_capacity(const std::filesystem::path& dir, const RunConfig& cfg, const CapacityResult& result);
void write_asym(const std::filesystem::path& dir, const RunConfig& cfg, const AsymResult& result);

std::string version();

/// Entry point of the accmarket tool. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace accmarket::cli
