#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "accmarket/cli.hpp"
#include "accmarket/data_io.hpp"
#include "accmarket/verify.hpp"

namespace accmarket::cli {
namespace {

using nlohmann::json;

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string scale = "quick";
  bool quiet = false;
};

RunConfig prepare(const Options& opt) {
  std::ifstream in(opt.config);
  if (!in) throw ConfigError("cannot open config " + opt.config);
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + opt.config + " is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  if (opt.seed) doc["seed"] = *opt.seed;
  RunConfig cfg = parse_config(doc, std::filesystem::path(opt.config).parent_path());
  if (!opt.out.empty()) cfg.out_dir = opt.out;
  if (!cfg.out_dir) throw ConfigError("no output directory: pass --out or set output.dir");
  // The output location does not change results, so it stays out of the echo.
  cfg.echo.erase("output");
  return cfg;
}

std::filesystem::path make_out_dir(const RunConfig& cfg) {
  std::filesystem::create_directories(*cfg.out_dir);
  return *cfg.out_dir;
}

void check_dynamics(const RunConfig& cfg) {
  const auto data = repetition_data(cfg.source, run_seed(cfg));
  cfg.dynamics.validate(data.train);
}

int cmd_simulate(const Options& opt, std::ostream& out) {
  const RunConfig cfg = prepare(opt);
  const std::uint64_t seed = run_seed(cfg);
  const auto data = repetition_data(cfg.source, seed);
  DynamicsConfig dc = cfg.dynamics;
  dc.seed = seed;
  dc.validate(data.train);
  const auto dir = make_out_dir(cfg);
  const auto traj = run_dynamics(dc, data.train, data.test ? &*data.test : nullptr);
  write_simulation(dir, cfg, traj, dc.providers);
  if (!opt.quiet) {
    const auto& fin = traj.final_train();
    out << "simulate: " << dc.providers << " providers, " << traj.rounds_run << " rounds, "
        << (traj.converged ? "converged" : "not converged") << ", welfare " << format_double(fin.welfare) << "\n";
    for (std::size_t i = 0; i < dc.providers; ++i) {
      out << "  provider " << i << ": share " << format_double(fin.shares[i]) << ", "
          << traj.final_classifiers[i].describe() << "\n";
    }
    out << "wrote " << (dir / "trajectory.csv").string() << " and " << (dir / "outcome.json").string() << "\n";
  }
  return kExitOk;
}

int cmd_sweep(const Options& opt, std::ostream& out) {
  const RunConfig cfg = prepare(opt);
  const auto& s = cfg.sweep;
  OverlapSweepConfig sc;
  sc.specs = overlap_grid(s.a_from, s.a_to, s.points, s.sigma_neg, s.sigma_pos, s.prior);
  sc.mode = s.mode;
  sc.samples = s.samples;
  sc.seed = cfg.seed;
  sc.lo = s.lo;
  sc.hi = s.hi;
  sc.rounds = s.rounds;
  const auto dir = make_out_dir(cfg);
  const auto rows = run_overlap_sweep(sc);
  write_sweep(dir, cfg, rows);
  if (!opt.quiet) {
    std::size_t jumps = 0;
    for (const auto& r : rows) jumps += r.jump;
    out << "sweep: " << rows.size() << " points, " << jumps << " boundary jumps; wrote "
        << (dir / "sweep.csv").string() << "\n";
  }
  return kExitOk;
}

int cmd_order_study(const Options& opt, std::ostream& out) {
  const RunConfig cfg = prepare(opt);
  check_dynamics(cfg);
  OrderStudyConfig oc;
  oc.dynamics = cfg.dynamics;
  oc.source = cfg.source;
  oc.repetitions = cfg.order.repetitions;
  oc.seed = cfg.seed;
  oc.positions = cfg.order.positions;
  const auto dir = make_out_dir(cfg);
  const auto result = run_order_of_play_study(oc);
  write_order_study(dir, cfg, result);
  if (!opt.quiet) {
    for (const auto& p : result.pairs) {
      out << "order-study: position " << p.later << " minus position " << p.earlier << ": mean "
          << format_double(p.difference.mean) << " (se " << format_double(p.difference.std_error) << ", "
          << p.difference.count << " runs)\n";
    }
  }
  return kExitOk;
}

int cmd_capacity(const Options& opt, std::ostream& out) {
  const RunConfig cfg = prepare(opt);
  if (cfg.capacity.feature_counts.empty()) throw ConfigError("capacity.feature_counts is required");
  check_dynamics(cfg);
  CapacityConfig cc;
  cc.dynamics = cfg.dynamics;
  cc.source = cfg.source;
  cc.feature_counts = cfg.capacity.feature_counts;
  cc.repetitions = cfg.capacity.repetitions;
  cc.seed = cfg.seed;
  const auto dir = make_out_dir(cfg);
  const auto result = run_capacity_study(cc);
  write_capacity(dir, cfg, result);
  if (!opt.quiet) {
    for (const auto& s : result.summaries) {
      out << "capacity: " << s.features << " features, welfare " << format_double(s.welfare_initial.mean) << " -> "
          << format_double(s.welfare_final.mean) << "\n";
    }
  }
  return kExitOk;
}

int cmd_asym(const Options& opt, std::ostream& out) {
  const RunConfig cfg = prepare(opt);
  AsymConfig ac;
  ac.dynamics = cfg.dynamics;
  ac.source = cfg.source;
  ac.better_features = cfg.asym.better_features;
  ac.worse_features = cfg.asym.worse_features;
  ac.position = cfg.asym.position;
  ac.repetitions = cfg.asym.repetitions;
  ac.seed = cfg.seed;
  const auto dir = make_out_dir(cfg);
  const auto result = run_asymmetric_power_study(ac);
  write_asym(dir, cfg, result);
  if (!opt.quiet) {
    out << "asym: delta_self " << format_double(result.delta_self.mean) << " (se "
        << format_double(result.delta_self.std_error) << "), delta_next " << format_double(result.delta_next.mean)
        << " (se " << format_double(result.delta_next.std_error) << ")\n";
  }
  return kExitOk;
}

int cmd_verify(const Options& opt, std::ostream& out) {
  VerifyOptions vo;
  try {
    vo.scale = parse_scale(opt.scale);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (opt.seed) vo.seed = *opt.seed;
  const auto results = verify_all(vo);
  std::size_t failed = 0;
  double seconds = 0.0;
  for (const auto& r : results) {
    failed += !r.passed;
    seconds += r.seconds;
  }
  if (opt.quiet) {
    std::vector<PropertyResult> bad;
    for (const auto& r : results) {
      if (!r.passed) bad.push_back(r);
    }
    print_results(out, bad);
  } else {
    print_results(out, results);
  }
  out << (failed ? "FAILED " : "OK ") << results.size() - failed << "/" << results.size() << " properties, scale "
      << to_string(vo.scale) << ", seed " << vo.seed << ", " << format_double(std::round(seconds * 100) / 100)
      << "s\n";
  return failed ? kExitProperty : kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"accmarket: simulate competing classification providers in an accuracy market"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  Options opt;
  std::uint64_t seed_value = 0;
  auto add_run_options = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory (overrides output.dir)");
    sub->add_option("--seed", seed_value, "base seed (overrides the config seed)");
    sub->add_flag("--quiet", opt.quiet, "print nothing on success");
  };

  struct Command {
    const char* name;
    const char* about;
    int (*fn)(const Options&, std::ostream&);
  };
  const Command commands[] = {
      {"simulate", "run best-response dynamics once; writes trajectory.csv, outcome.json, schema.json", cmd_simulate},
      {"sweep", "Gaussian overlap sweep of two threshold providers; writes sweep.csv, schema.json", cmd_sweep},
      {"order-study", "share by move position over seeded repetitions; writes order_runs.csv, order_summary.csv",
       cmd_order_study},
      {"capacity", "welfare against the number of visible features; writes capacity_runs.csv, capacity_summary.csv",
       cmd_capacity},
      {"asym", "one provider sees more features than the rest; writes asym_runs.csv, asym_summary.csv", cmd_asym},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.about);
    add_run_options(sub);
    sub->footer("Output columns:\n" + schema_help(c.name) +
                "\nExit codes: 0 success, 1 configuration error, 2 runtime failure.");
    subs.emplace_back(sub, &c);
  }
  auto* verify = app.add_subcommand("verify", "run the property suites");
  verify->add_option("--scale", opt.scale, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  verify->add_option("--seed", seed_value, "base seed of the random corpora");
  verify->add_flag("--quiet", opt.quiet, "print only failing properties and the summary line");
  verify->footer("Exit codes: 0 all properties pass, 1 bad arguments, 3 a property failed.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    for (auto* sub : app.get_subcommands()) {
      if (sub->count("--seed")) opt.seed = seed_value;
      if (sub == verify) return cmd_verify(opt, out);
      for (const auto& [s, c] : subs) {
        if (s == sub) return c->fn(opt, out);
      }
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace accmarket::cli
