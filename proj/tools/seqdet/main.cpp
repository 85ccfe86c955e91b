#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "config_io.hpp"
#include "json.hpp"
#include "seqdet/simlab.hpp"
#include "tables.hpp"

namespace {

using namespace seqdet;
using namespace seqdet::cli;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitParse = 2;
constexpr int kExitNoAlarm = 3;

std::string resolve_config_text(const std::string& config_path, const std::string& preset) {
  if (!config_path.empty() && !preset.empty())
    throw ConfigError("give either --config or --preset, not both");
  if (!config_path.empty()) {
    std::string text;
    load_config(config_path, &text);  // parse now for early errors
    return text;
  }
  if (!preset.empty()) {
    const auto text = preset_text(preset);
    if (!text) throw ConfigError("unknown preset '" + preset + "' (see `seqdet preset --list`)");
    return *text;
  }
  throw ConfigError("a detector configuration is required (--config FILE or --preset NAME)");
}

CalibMode mode_from_string(const std::string& s) {
  if (s == "long_arl") return CalibMode::long_arl;
  if (s == "delay") return CalibMode::delay;
  throw ConfigError("mode must be long_arl or delay");
}

// ---------------------------------------------------------------------------
// detect

struct DetectArgs {
  std::string config_path;
  std::string preset;
  std::string input;  // empty or "-": stdin
  std::int64_t max_steps = 0;
};

int do_detect(const DetectArgs& args) {
  const DetectorConfig cfg = parse_config_text(resolve_config_text(args.config_path, args.preset));
  const auto det = make_detector(cfg);

  std::ifstream file;
  std::istream* in = &std::cin;
  if (!args.input.empty() && args.input != "-") {
    file.open(args.input);
    if (!file) throw IoError("cannot read input file '" + args.input + "'");
    in = &file;
  }

  double x = 0.0;
  std::int64_t line_no = 0;
  std::int64_t fed = 0;
  while (next_observation(*in, x, line_no)) {
    ++fed;
    const StepOutcome out = det->step(x);
    if (out.alarm) {
      std::printf("alarm procedure=%s n_stop=%lld branch=%s statistic=%s\n",
                  to_string(cfg.procedure).c_str(), static_cast<long long>(det->steps()),
                  out.branch, fmt(out.statistic).c_str());
      return kExitOk;
    }
    if (args.max_steps > 0 && fed >= args.max_steps) break;
  }
  std::printf("no-alarm procedure=%s steps=%lld\n", to_string(cfg.procedure).c_str(),
              static_cast<long long>(fed));
  return kExitNoAlarm;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string config_text;
  std::string mode = "long_arl";
  double param = 0.0;
  std::int64_t reps = 1000;
  std::int64_t horizon = 1'000'000;
  std::uint64_t seed = 1;
  std::string out;
  int threads = 0;
};

void to_json(json& j, const SimulateArgs& a) {
  j = json{{"config_text", a.config_text}, {"mode", a.mode},       {"param", a.param},
           {"reps", a.reps},               {"horizon", a.horizon}, {"seed", a.seed},
           {"out", a.out},                 {"threads", a.threads}};
}

void from_json(const json& j, SimulateArgs& a) {
  j.at("config_text").get_to(a.config_text);
  j.at("mode").get_to(a.mode);
  j.at("param").get_to(a.param);
  j.at("reps").get_to(a.reps);
  j.at("horizon").get_to(a.horizon);
  j.at("seed").get_to(a.seed);
  j.at("out").get_to(a.out);
  j.at("threads").get_to(a.threads);
}

int do_simulate(const SimulateArgs& args) {
  const DetectorConfig cfg = parse_config_text(args.config_text);
  const SeedScheme seeds{args.seed};
  const CalibMode mode = mode_from_string(args.mode);
  const ArlEstimate est =
      mode == CalibMode::long_arl
          ? estimate_long_arl(cfg, args.param, args.reps, args.horizon, seeds, args.threads)
          : estimate_delay(cfg, args.param, args.reps, seeds, args.horizon, args.threads);

  std::printf("procedure=%s a=%s mode=%s param=%s mean=%s stderr=%s reps=%lld censored=%lld "
              "seed=%llu\n",
              to_string(cfg.procedure).c_str(), fmt(cfg.a).c_str(), args.mode.c_str(),
              fmt(args.param).c_str(), fmt(est.mean).c_str(), fmt(est.se).c_str(),
              static_cast<long long>(est.reps), static_cast<long long>(est.censored),
              static_cast<unsigned long long>(args.seed));
  if (est.censored > 0)
    std::fprintf(stderr, "note: %lld censored run(s) at horizon %lld; the mean is biased low\n",
                 static_cast<long long>(est.censored), static_cast<long long>(args.horizon));

  if (!args.out.empty()) {
    std::ostringstream row;
    row << to_string(cfg.procedure) << ',' << fmt(cfg.a) << ',' << args.mode << ','
        << fmt(args.param) << ',' << fmt(est.mean) << ',' << fmt(est.se) << ',' << est.reps
        << ',' << est.censored << ',' << args.seed;
    append_csv_row(args.out, "procedure,a,mode,param,mean,stderr,reps,censored,seed",
                   row.str());
    write_manifest(args.out, "simulate", json(args).dump(), {args.out});
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// calibrate

struct CalibrateArgs {
  std::string config_text;
  std::string mode = "delay";
  double target = 20.0;
  double at = 0.0;
  std::int64_t reps = 1000;
  double rel_tol = 0.02;
  double a_lo = 0.05;
  double a_hi = 500.0;
  std::uint64_t seed = 1;
  std::string out;
  int threads = 0;
};

void to_json(json& j, const CalibrateArgs& a) {
  j = json{{"config_text", a.config_text},
           {"mode", a.mode},
           {"target", a.target},
           {"at", a.at},
           {"reps", a.reps},
           {"rel_tol", a.rel_tol},
           {"a_lo", a.a_lo},
           {"a_hi", a.a_hi},
           {"seed", a.seed},
           {"out", a.out},
           {"threads", a.threads}};
}

void from_json(const json& j, CalibrateArgs& a) {
  j.at("config_text").get_to(a.config_text);
  j.at("mode").get_to(a.mode);
  j.at("target").get_to(a.target);
  j.at("at").get_to(a.at);
  j.at("reps").get_to(a.reps);
  j.at("rel_tol").get_to(a.rel_tol);
  j.at("a_lo").get_to(a.a_lo);
  j.at("a_hi").get_to(a.a_hi);
  j.at("seed").get_to(a.seed);
  j.at("out").get_to(a.out);
  j.at("threads").get_to(a.threads);
}

int do_calibrate(const CalibrateArgs& args) {
  const DetectorConfig cfg = parse_config_text(args.config_text);
  const SeedScheme seeds{args.seed};
  const CalibrationResult r =
      calibrate_threshold(cfg, mode_from_string(args.mode), args.target, args.at, args.reps,
                          seeds, args.rel_tol, args.a_lo, args.a_hi, args.threads);

  std::printf("a=%s achieved_mean=%s stderr=%s target=%s mode=%s reps=%lld censored=%lld\n",
              fmt(r.a).c_str(), fmt(r.achieved.mean).c_str(), fmt(r.achieved.se).c_str(),
              fmt(r.target).c_str(), args.mode.c_str(), static_cast<long long>(r.achieved.reps),
              static_cast<long long>(r.achieved.censored));

  if (!args.out.empty()) {
    std::ostringstream row;
    row << to_string(cfg.procedure) << ',' << args.mode << ',' << fmt(args.target) << ','
        << fmt(args.at) << ',' << fmt(r.a) << ',' << fmt(r.achieved.mean) << ','
        << fmt(r.achieved.se) << ',' << r.achieved.reps << ',' << r.achieved.censored << ','
        << args.seed;
    append_csv_row(args.out, "procedure,mode,target,at,a,mean,stderr,reps,censored,seed",
                   row.str());
    write_manifest(args.out, "calibrate", json(args).dump(), {args.out});
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// pair

struct PairArgs {
  std::string family = "normal";
  std::string theta;
  std::string lambda;
  std::string q0 = "const:1";
  bool has_beta = false;
  double beta = 1.0;
  int grid = 512;
  double tol = 1e-3;
  std::string out;
};

void to_json(json& j, const PairArgs& a) {
  j = json{{"family", a.family}, {"theta", a.theta},       {"lambda", a.lambda},
           {"q0", a.q0},         {"has_beta", a.has_beta}, {"beta", a.beta},
           {"grid", a.grid},     {"tol", a.tol},           {"out", a.out}};
}

void from_json(const json& j, PairArgs& a) {
  j.at("family").get_to(a.family);
  j.at("theta").get_to(a.theta);
  j.at("lambda").get_to(a.lambda);
  j.at("q0").get_to(a.q0);
  j.at("has_beta").get_to(a.has_beta);
  j.at("beta").get_to(a.beta);
  j.at("grid").get_to(a.grid);
  j.at("tol").get_to(a.tol);
  j.at("out").get_to(a.out);
}

int do_pair(const PairArgs& args) {
  if (args.theta.empty() || args.lambda.empty())
    throw ConfigError("--theta and --lambda windows are required");
  // Reuse the config grammar for windows and family.
  std::ostringstream cfg_text;
  cfg_text << "family = " << args.family << "\ngrid_n = " << args.grid
           << "\ntheta = " << args.theta << "\nlambda = " << args.lambda << "\n";
  const DetectorConfig cfg = parse_config_text(cfg_text.str());
  cfg.theta.validate(cfg.family);
  cfg.lambda.validate(cfg.family);
  if (std::max(cfg.theta.lo, cfg.lambda.lo) <= std::min(cfg.theta.hi, cfg.lambda.hi) ||
      !(min_kl_on_grid(cfg.family, cfg.theta, cfg.lambda) > 0.0))
    throw ConfigError("pre- and post-change windows overlap (minimum information is 0)");

  OptimizerPair pair = [&] {
    if (args.has_beta) {
      if (cfg.family.kind() != Family::Kind::normal_mean)
        throw ConfigError("--beta closed forms exist for the normal family only");
      return normal_beta_pair(args.beta, cfg.theta, cfg.lambda);
    }
    if (args.q0.rfind("const:", 0) == 0) {
      const double v = std::stod(args.q0.substr(6));
      if (!(v > 0.0)) throw ConfigError("--q0 const value must be positive");
      return pair_close(optimizer_from(TabulatedFn::constant(cfg.lambda, v), cfg.family,
                                       cfg.theta),
                        cfg.family, cfg.lambda, args.tol);
    }
    if (args.q0.rfind("csv:", 0) == 0) {
      const OptimizerPair seed_pair = load_pair_csv(args.q0.substr(4));
      return pair_close(optimizer_from(seed_pair.q, cfg.family, cfg.theta), cfg.family,
                        cfg.lambda, args.tol);
    }
    throw ConfigError("--q0 must be const:V or csv:PATH");
  }();

  const PairVerification rep = verify_pair(pair, cfg.family, cfg.theta, cfg.lambda, args.tol);
  std::printf("pair family=%s theta=[%s] lambda=[%s] residual=%s tol=%s status=%s\n",
              args.family.c_str(), args.theta.c_str(), args.lambda.c_str(),
              fmt(rep.residual).c_str(), fmt(args.tol).c_str(),
              rep.pass ? "verified" : "FAILED");

  if (!args.out.empty()) {
    write_pair_csv(args.out, pair);
    write_manifest(args.out, "pair", json(args).dump(), {args.out});
  }
  return rep.pass ? kExitOk : kExitConfig;
}

// ---------------------------------------------------------------------------
// reproduce

struct ReproduceArgs {
  std::string table = "table1";
  std::int64_t reps = 1000;
  std::int64_t delay_reps = 0;  // 0: 10 * reps
  std::int64_t deep_reps = 0;   // 0: max(200, reps / 4)
  std::int64_t calib_reps = 4000;
  bool use_reference_thresholds = false;
  bool best_possible = false;
  std::uint64_t seed = 1;
  std::string out;  // directory; empty: stdout only
  int threads = 0;
};

void to_json(json& j, const ReproduceArgs& a) {
  j = json{{"table", a.table},
           {"reps", a.reps},
           {"delay_reps", a.delay_reps},
           {"deep_reps", a.deep_reps},
           {"calib_reps", a.calib_reps},
           {"use_reference_thresholds", a.use_reference_thresholds},
           {"best_possible", a.best_possible},
           {"seed", a.seed},
           {"out", a.out},
           {"threads", a.threads}};
}

void from_json(const json& j, ReproduceArgs& a) {
  j.at("table").get_to(a.table);
  j.at("reps").get_to(a.reps);
  j.at("delay_reps").get_to(a.delay_reps);
  j.at("deep_reps").get_to(a.deep_reps);
  j.at("calib_reps").get_to(a.calib_reps);
  j.at("use_reference_thresholds").get_to(a.use_reference_thresholds);
  j.at("best_possible").get_to(a.best_possible);
  j.at("seed").get_to(a.seed);
  j.at("out").get_to(a.out);
  j.at("threads").get_to(a.threads);
}

// Rows this far from the boundary are much slower; they run at deep_reps.
bool is_deep_table1_row(const ReferenceCell& cell) {
  return cell.mode == CalibMode::long_arl && cell.param <= -0.85;
}

int do_reproduce(const ReproduceArgs& args) {
  if (args.table != "table1" && args.table != "table2")
    throw ConfigError("reproduce takes table1 or table2");
  const std::int64_t delay_reps = args.delay_reps > 0 ? args.delay_reps : 10 * args.reps;
  const std::int64_t deep_reps =
      args.deep_reps > 0 ? args.deep_reps : std::max<std::int64_t>(200, args.reps / 4);
  if (args.reps < 100)
    std::fprintf(stderr,
                 "warning: reps=%lld gives standard errors too large for a meaningful "
                 "comparison\n",
                 static_cast<long long>(args.reps));

  std::vector<TableColumn> cols =
      args.table == "table1" ? table1_columns() : table2_columns();
  const std::size_t core_columns = cols.size();
  if (args.table == "table1" && args.best_possible)
    cols.push_back(table1_best_possible_column());

  const SeedScheme master{args.seed};
  std::vector<std::string> rows;
  std::size_t ordinal = 0;
  std::int64_t core_total = 0, core_within = 0, total = 0, within = 0;

  for (std::size_t ci = 0; ci < cols.size(); ++ci) {
    TableColumn& col = cols[ci];
    const bool recalibrated_column = ci >= core_columns;
    DetectorConfig cfg = col.config;

    if (!args.use_reference_thresholds && !recalibrated_column) {
      const CalibrationResult cal = calibrate_threshold(
          cfg, col.calib_mode, col.calib_target, col.calib_at, args.calib_reps,
          SeedScheme{master.substream(700'000 + ci)}, 0.02, 0.05, 500.0, args.threads);
      cfg.a = cal.a;
      std::printf("%s: calibrated a=%s (achieved %s +- %s)\n", col.label.c_str(),
                  fmt(cal.a).c_str(), fmt(cal.achieved.mean).c_str(),
                  fmt(cal.achieved.se).c_str());
    }

    for (const ReferenceCell& cell : col.cells) {
      DetectorConfig cell_cfg = cfg;
      if (recalibrated_column) {
        cell_cfg.theta = ParamSet::singleton(cell.param);
        const CalibrationResult cal = calibrate_threshold(
            cell_cfg, col.calib_mode, col.calib_target, col.calib_at, args.calib_reps,
            SeedScheme{master.substream(800'000 + ordinal)}, 0.02, 0.05, 500.0, args.threads);
        cell_cfg.a = cal.a;
      }
      const std::int64_t cell_reps =
          cell.mode == CalibMode::delay
              ? delay_reps
              : (args.table == "table1" && is_deep_table1_row(cell) ? deep_reps : args.reps);
      const CellResult r = run_cell(cell_cfg, cell, cell_reps,
                                    SeedScheme{master.substream(1'000 + ordinal)},
                                    args.threads);
      ++ordinal;

      const char* mode_name = cell.mode == CalibMode::delay ? "delay" : "long_arl";
      std::printf("%s %s param=%s a=%s ref=%s+-%s est=%s+-%s reps=%lld censored=%lld z=%s\n",
                  col.label.c_str(), mode_name, fmt(cell.param).c_str(), fmt(r.a).c_str(),
                  fmt(cell.reference_mean).c_str(), fmt(cell.reference_se).c_str(),
                  fmt(r.est.mean).c_str(), fmt(r.est.se).c_str(),
                  static_cast<long long>(r.est.reps), static_cast<long long>(r.est.censored),
                  fmt(r.z).c_str());

      std::ostringstream row;
      row << args.table << ',' << col.label << ',' << mode_name << ',' << fmt(cell.param)
          << ',' << fmt(r.a) << ',' << fmt(cell.reference_mean) << ','
          << fmt(cell.reference_se) << ',' << fmt(r.est.mean) << ',' << fmt(r.est.se) << ','
          << r.est.reps << ',' << r.est.censored << ',' << fmt(r.z);
      rows.push_back(row.str());

      const bool ok = r.comparable && std::abs(r.z) <= 3.0;
      ++total;
      within += ok ? 1 : 0;
      if (!recalibrated_column) {
        ++core_total;
        core_within += ok ? 1 : 0;
      }
    }
  }

  std::printf("summary table=%s cells=%lld within3=%lld core_cells=%lld core_within3=%lld\n",
              args.table.c_str(), static_cast<long long>(total),
              static_cast<long long>(within), static_cast<long long>(core_total),
              static_cast<long long>(core_within));

  if (!args.out.empty()) {
    std::filesystem::create_directories(args.out);
    const std::string path = args.out + "/" + args.table + ".csv";
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << kCsvMagic << "\n"
        << "table,procedure,mode,param,a,reference_mean,reference_se,estimated_mean,"
           "estimated_se,reps,censored,z\n";
    for (const auto& row : rows) out << row << "\n";
    if (!out) throw IoError("write to '" + path + "' failed");
    write_manifest(path, "reproduce", json(args).dump(), {path});
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// rerun

int do_rerun(const std::string& manifest_path, const std::string& out_override) {
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot read manifest '" + manifest_path + "'");
  json m;
  try {
    in >> m;
  } catch (const json::parse_error& e) {
    throw ParseError("manifest '" + manifest_path + "': " + e.what());
  }
  const std::string command = m.at("command").get<std::string>();
  json replay = m.at("replay");
  if (!out_override.empty()) replay["out"] = out_override;

  if (command == "simulate") return do_simulate(replay.get<SimulateArgs>());
  if (command == "calibrate") return do_calibrate(replay.get<CalibrateArgs>());
  if (command == "pair") return do_pair(replay.get<PairArgs>());
  if (command == "reproduce") return do_reproduce(replay.get<ReproduceArgs>());
  throw ConfigError("manifest command '" + command + "' is not replayable");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"seqdet: sequential change-point detection with composite pre-change windows"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  int exit_code = kExitOk;

  // detect ------------------------------------------------------------------
  DetectArgs detect_args;
  auto* detect = app.add_subcommand("detect", "Stream observations through a detector");
  detect->add_option("--config", detect_args.config_path, "detector config file (key = value)");
  detect->add_option("--preset", detect_args.preset, "built-in config preset");
  detect->add_option("--input", detect_args.input,
                     "observation file, one number per line ('-' or omitted: stdin)");
  detect->add_option("--max-steps", detect_args.max_steps, "stop reading after this many");
  detect->callback([&] { exit_code = do_detect(detect_args); });

  // simulate ----------------------------------------------------------------
  SimulateArgs sim_args;
  std::string sim_config, sim_preset;
  std::optional<std::uint64_t> sim_seed;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo long-ARL / delay estimation");
  sim->add_option("--config", sim_config, "detector config file");
  sim->add_option("--preset", sim_preset, "built-in config preset");
  sim->add_option("--mode", sim_args.mode, "long_arl or delay")
      ->check(CLI::IsMember({"long_arl", "delay"}));
  sim->add_option("--param", sim_args.param, "sampling parameter (theta or lambda)")
      ->required();
  sim->add_option("--reps", sim_args.reps, "replications")->required();
  sim->add_option("--horizon", sim_args.horizon, "censoring horizon (default 1e6)");
  sim->add_option("--seed", sim_seed, "master seed (default: SEQDET_SEED or 1)");
  sim->add_option("--out", sim_args.out, "CSV to append the estimate row to");
  sim->add_option("--threads", sim_args.threads, "worker threads (0: hardware)");
  sim->callback([&] {
    sim_args.config_text = resolve_config_text(sim_config, sim_preset);
    sim_args.seed = resolve_seed(sim_seed);
    exit_code = do_simulate(sim_args);
  });

  // calibrate ---------------------------------------------------------------
  CalibrateArgs cal_args;
  std::string cal_config, cal_preset;
  std::optional<std::uint64_t> cal_seed;
  auto* cal = app.add_subcommand("calibrate", "Tune the threshold a to a target mean");
  cal->add_option("--config", cal_config, "detector config file");
  cal->add_option("--preset", cal_preset, "built-in config preset");
  cal->add_option("--mode", cal_args.mode, "long_arl or delay")
      ->check(CLI::IsMember({"long_arl", "delay"}));
  cal->add_option("--target", cal_args.target, "target mean stop time")->required();
  cal->add_option("--at", cal_args.at, "parameter the target applies to")->required();
  cal->add_option("--reps", cal_args.reps, "replications per probe");
  cal->add_option("--rel-tol", cal_args.rel_tol, "relative tolerance (default 0.02)");
  cal->add_option("--a-lo", cal_args.a_lo, "bracket lower edge");
  cal->add_option("--a-hi", cal_args.a_hi, "bracket upper edge");
  cal->add_option("--seed", cal_seed, "master seed (default: SEQDET_SEED or 1)");
  cal->add_option("--out", cal_args.out, "CSV to append the calibration row to");
  cal->add_option("--threads", cal_args.threads, "worker threads (0: hardware)");
  cal->callback([&] {
    cal_args.config_text = resolve_config_text(cal_config, cal_preset);
    cal_args.seed = resolve_seed(cal_seed);
    exit_code = do_calibrate(cal_args);
  });

  // pair --------------------------------------------------------------------
  PairArgs pair_args;
  auto* pair = app.add_subcommand("pair", "Construct and verify a boundary-scaling pair");
  pair->add_option("--family", pair_args.family, "normal or exponential")
      ->check(CLI::IsMember({"normal", "exponential"}));
  pair->add_option("--theta", pair_args.theta, "pre-change window lo:hi")->required();
  pair->add_option("--lambda", pair_args.lambda, "post-change window lo:hi")->required();
  pair->add_option("--q0", pair_args.q0, "seed scaling: const:V or csv:PATH (default const:1)");
  auto* beta_opt =
      pair->add_option("--beta", pair_args.beta, "normal closed-form exponent (beta >= 1/2)");
  pair->add_option("--grid", pair_args.grid, "tabulation nodes per window (default 512)");
  pair->add_option("--tol", pair_args.tol, "fixed-point residual tolerance (default 1e-3)");
  pair->add_option("--out", pair_args.out, "pair CSV path (set,parameter,value)");
  pair->callback([&] {
    pair_args.has_beta = beta_opt->count() > 0;
    exit_code = do_pair(pair_args);
  });

  // reproduce ---------------------------------------------------------------
  ReproduceArgs rep_args;
  std::optional<std::uint64_t> rep_seed;
  auto* rep = app.add_subcommand("reproduce", "Re-estimate a bundled reference table");
  rep->add_option("table", rep_args.table, "table1 (normal) or table2 (exponential)")
      ->required()
      ->check(CLI::IsMember({"table1", "table2"}));
  rep->add_option("--reps", rep_args.reps, "replications for long-ARL cells (default 1000)");
  rep->add_option("--delay-reps", rep_args.delay_reps,
                  "replications for delay cells (default 10x reps)");
  rep->add_option("--deep-reps", rep_args.deep_reps,
                  "replications for the two slowest table1 rows (default max(200, reps/4))");
  rep->add_option("--calib-reps", rep_args.calib_reps,
                  "replications per calibration probe (default 4000)");
  rep->add_flag("--use-reference-thresholds", rep_args.use_reference_thresholds,
                "use the bundled thresholds instead of recalibrating");
  rep->add_flag("--best-possible", rep_args.best_possible,
                "add the per-row recalibrated envelope column (table1, slow)");
  rep->add_option("--seed", rep_seed, "master seed (default: SEQDET_SEED or 1)");
  rep->add_option("--out", rep_args.out, "output directory for the table CSV");
  rep->add_option("--threads", rep_args.threads, "worker threads (0: hardware)");
  rep->callback([&] {
    rep_args.seed = resolve_seed(rep_seed);
    exit_code = do_reproduce(rep_args);
  });

  // preset ------------------------------------------------------------------
  std::string preset_name;
  bool preset_list = false;
  auto* pre = app.add_subcommand("preset", "Show built-in configuration presets");
  pre->add_option("name", preset_name, "preset to print");
  pre->add_flag("--list", preset_list, "list preset names");
  pre->callback([&] {
    if (preset_list || preset_name.empty()) {
      for (const auto& n : preset_names()) std::printf("%s\n", n.c_str());
      return;
    }
    const auto text = preset_text(preset_name);
    if (!text) throw ConfigError("unknown preset '" + preset_name + "'");
    std::fputs(text->c_str(), stdout);
  });

  // rerun -------------------------------------------------------------------
  std::string rerun_manifest, rerun_out;
  auto* rer = app.add_subcommand("rerun", "Replay a result from its manifest");
  rer->add_option("--manifest", rerun_manifest, "manifest JSON path")->required();
  rer->add_option("--out", rerun_out, "override the output path");
  rer->callback([&] { exit_code = do_rerun(rerun_manifest, rerun_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const seqdet::cli::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitParse;
  } catch (const CalibrationRangeError& e) {
    std::fprintf(stderr, "calibration error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return exit_code;
}
