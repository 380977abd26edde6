#include "cfcal/cli.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "cfcal/error.hpp"
#include "cfcal/io.hpp"
#include "cfcal/report.hpp"

#ifndef CFCAL_VERSION
#define CFCAL_VERSION "0.0.0"
#endif

namespace cfcal::cli {

using io::Json;

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorKind::Io, "sha-256 digest failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Collects everything a manifest needs while a subcommand runs.
class Run {
 public:
  Run(std::string command, std::vector<std::string> argv) : command_(std::move(command)), argv_(std::move(argv)) {}

  std::string read(const std::string& path) {
    auto text = io::read_file(path);
    inputs_.push_back({{"path", path}, {"sha256", sha256_hex(text)}});
    return text;
  }

  Json read_json(const std::string& path) {
    const auto text = read(path);
    try {
      return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorKind::Config, "'" + path + "' is not valid JSON: " + e.what());
    }
  }

  void write(const std::string& path, const std::string& content) {
    io::write_file_atomic(path, content);
    outputs_.push_back({{"path", path}, {"sha256", sha256_hex(content)}});
  }

  void note_written(const std::vector<std::string>& paths) {
    for (const auto& p : paths) outputs_.push_back({{"path", p}, {"sha256", sha256_hex(io::read_file(p))}});
  }

  void set_config(Json c) { config_ = std::move(c); }
  void add_seed(std::uint64_t s) { seeds_.push_back(s); }

  void write_manifest(const std::string& path) {
    Json m{{"command", command_},
           {"argv", argv_},
           {"tool_version", CFCAL_VERSION},
           {"wall_clock", utc_now()},
           {"seeds", seeds_},
           {"config", config_},
           {"inputs", inputs_},
           {"outputs", outputs_}};
    io::write_file_atomic(path, io::dump(m));
  }

 private:
  std::string command_;
  std::vector<std::string> argv_;
  Json inputs_ = Json::array();
  Json outputs_ = Json::array();
  Json config_ = Json::object();
  std::vector<std::uint64_t> seeds_;
};

std::string manifest_path(const std::string& out) { return out + ".manifest.json"; }

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create directory '" + dir + "': " + ec.message());
}

sim::SimLimits load_limits(Run& run, const std::string& path) {
  return path.empty() ? sim::SimLimits{} : io::limits_from_json(run.read_json(path));
}

struct Options {
  // ingest
  std::string leader, follower, out;
  double dt = 1.0;
  // clean
  std::string pair, rules;
  // shared
  std::string segments, limits, model, config, svg_dir, base;
  unsigned threads = 1;
  // calibrate
  double split = 0.8;
  std::uint64_t split_seed = 0;
  std::vector<std::uint64_t> seeds;
  // report
  std::vector<std::string> inputs;
  std::string format = "text";
  std::string out_dir;
};

int run_ingest(const Options& o, Run& run) {
  const auto leader = ingest::parse_gps_csv(run.read(o.leader), o.leader);
  const auto follower = ingest::parse_gps_csv(run.read(o.follower), o.follower);
  const auto pair = ingest::reference_pair(leader, follower, o.dt);
  run.set_config({{"dt", o.dt}});
  run.write(o.out, io::dump(io::to_json(pair)));
  run.write_manifest(manifest_path(o.out));
  return 0;
}

int run_clean(const Options& o, Run& run) {
  ingest::TrajectoryPair pair;
  if (!o.pair.empty()) {
    pair = io::pair_from_json(run.read_json(o.pair));
  } else if (!o.leader.empty() && !o.follower.empty()) {
    pair.leader = io::trajectory_from_json(run.read_json(o.leader));
    pair.follower = io::trajectory_from_json(run.read_json(o.follower));
  } else {
    fail(ErrorKind::Config, "clean needs --pair or both --leader and --follower");
  }
  const auto rules = o.rules.empty() ? cleaning::CleaningRules{} : io::rules_from_json(run.read_json(o.rules));
  rules.validate();
  const auto paired = cleaning::pair_trajectories(pair.leader, pair.follower);
  const auto segs = cleaning::clean_segments(paired, rules);
  std::size_t kept = 0;
  for (const auto& s : segs) kept += s.t.size();
  run.set_config({{"rules", io::to_json(rules)}});
  run.write(o.out, io::dump(io::to_json(segs)));
  run.write_manifest(manifest_path(o.out));
  std::cout << "kept " << kept << " of " << paired.t.size() << " paired samples in " << segs.size() << " segments\n";
  return 0;
}

int run_stats(const Options& o, Run& run) {
  const auto segs = io::segments_from_json(run.read_json(o.segments));
  const auto rep = io::to_json(stats::analyze_segments(segs));
  run.write(o.out, io::dump(rep));
  if (!o.svg_dir.empty()) {
    ensure_dir(o.svg_dir);
    const Json inputs[] = {rep};
    run.note_written(report::emit_report(inputs, report::Format::Svg, o.svg_dir));
  }
  run.write_manifest(manifest_path(o.out));
  return 0;
}

int run_simulate(const Options& o, Run& run) {
  const auto params = io::params_from_json(run.read_json(o.model));
  const auto segs = io::segments_from_json(run.read_json(o.segments));
  const auto limits = load_limits(run, o.limits);
  limits.validate();
  const auto results = sim::simulate_all(params, segs, limits, o.dt, o.threads);
  Json j = io::to_json(results);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    j["results"][i]["observed_spacing"] = segs[i].spacing;
    j["results"][i]["observed_speed"] = segs[i].follower.speed;
  }
  run.set_config({{"model", io::to_json(params)}, {"dt", o.dt}, {"limits", io::to_json(limits)}});
  run.write(o.out, io::dump(j));
  if (!o.svg_dir.empty()) {
    ensure_dir(o.svg_dir);
    const Json inputs[] = {j};
    run.note_written(report::emit_report(inputs, report::Format::Svg, o.svg_dir));
  }
  run.write_manifest(manifest_path(o.out));
  return 0;
}

int run_calibrate(const Options& o, Run& run) {
  const auto kind = models::parse_kind(o.model);
  const auto segs = io::segments_from_json(run.read_json(o.segments));
  auto config = o.config.empty() ? calib::GaConfig{} : io::ga_config_from_json(run.read_json(o.config), kind);
  if (!o.seeds.empty()) config.seeds = o.seeds;
  config.validate(kind);
  calib::FitnessContext ctx;
  ctx.limits = load_limits(run, o.limits);
  ctx.limits.validate();
  ctx.dt = o.dt;
  ctx.threads = o.threads;
  if (!o.base.empty()) {
    ctx.base = io::params_from_json(run.read_json(o.base));
    if (models::kind_of(*ctx.base) != kind) fail(ErrorKind::Config, "--base parameters are not for model " + o.model);
  }

  const auto rep = calib::calibrate_and_validate(kind, segs, config, o.split, o.split_seed, ctx);
  Json echo{{"ga", io::to_json(config, kind)},
            {"split", o.split},
            {"split_seed", o.split_seed},
            {"dt", o.dt},
            {"limits", io::to_json(ctx.limits)}};
  if (ctx.base) echo["base"] = io::to_json(*ctx.base);
  Json j = io::to_json(rep);
  j["config"] = echo;

  run.set_config(echo);
  for (auto s : config.seeds) run.add_seed(s);
  run.add_seed(o.split_seed);
  run.write(o.out, io::dump(j));
  run.write_manifest(manifest_path(o.out));
  return 0;
}

int run_validate(const Options& o, Run& run) {
  const auto params = io::params_from_json(run.read_json(o.model));
  const auto segs = io::segments_from_json(run.read_json(o.segments));
  calib::FitnessContext ctx;
  ctx.limits = load_limits(run, o.limits);
  ctx.limits.validate();
  ctx.dt = o.dt;
  ctx.threads = o.threads;
  const auto g = calib::evaluate(params, segs, ctx);
  Json j{{"model", io::to_json(params)}, {"segments", segs.size()}, {"gof", io::to_json(g)}};
  run.set_config({{"dt", o.dt}, {"limits", io::to_json(ctx.limits)}});
  run.write(o.out, io::dump(j));
  run.write_manifest(manifest_path(o.out));
  return 0;
}

int run_report(const Options& o, Run& run) {
  std::vector<Json> inputs;
  for (const auto& path : o.inputs) inputs.push_back(run.read_json(path));
  ensure_dir(o.out_dir);
  run.set_config({{"format", o.format}});
  run.note_written(report::emit_report(inputs, report::parse_format(o.format), o.out_dir));
  run.write_manifest((std::filesystem::path(o.out_dir) / "report.manifest.json").string());
  return 0;
}

}  // namespace

int cli_dispatch(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return cli_dispatch(args);
}

int cli_dispatch(const std::vector<std::string>& args) {
  CLI::App app{"Car-following trajectory analysis, simulation and calibration", "cfcal"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(CFCAL_VERSION));
  Options o;

  auto threads_opt = [&](CLI::App* sub) {
    sub->add_option("--threads", o.threads, "Worker threads (1 is the reference schedule)")
        ->envname("CF_CALIB_THREADS")
        ->check(CLI::PositiveNumber);
  };

  auto* ingest = app.add_subcommand("ingest", "Derive paired kinematics from two GPS CSV logs");
  ingest->add_option("--leader", o.leader, "Leader CSV (t,lat,lon)")->required();
  ingest->add_option("--follower", o.follower, "Follower CSV (t,lat,lon)")->required();
  ingest->add_option("--dt", o.dt, "Nominal sampling interval, s");
  ingest->add_option("--out", o.out, "Output pair JSON")->required();

  auto* clean = app.add_subcommand("clean", "Pair trajectories and extract car-following segments");
  clean->add_option("--pair", o.pair, "Pair JSON from ingest");
  clean->add_option("--leader", o.leader, "Leader trajectory JSON");
  clean->add_option("--follower", o.follower, "Follower trajectory JSON");
  clean->add_option("--rules", o.rules, "Cleaning rules JSON");
  clean->add_option("--out", o.out, "Output segments JSON")->required();

  auto* stats = app.add_subcommand("stats", "Descriptive statistics, correlations and comfort shares");
  stats->add_option("--segments", o.segments, "Segments JSON")->required();
  stats->add_option("--out", o.out, "Output stats report JSON")->required();
  stats->add_option("--svg-dir", o.svg_dir, "Directory for histogram SVGs");

  auto* simulate = app.add_subcommand("simulate", "Simulate the follower behind the recorded leader");
  simulate->add_option("--model", o.model, "Model parameter JSON")->required();
  simulate->add_option("--segments", o.segments, "Segments JSON")->required();
  simulate->add_option("--dt", o.dt, "Integration step, s");
  simulate->add_option("--limits", o.limits, "Simulation limits JSON");
  simulate->add_option("--out", o.out, "Output simulation JSON")->required();
  simulate->add_option("--svg-dir", o.svg_dir, "Directory for observed vs simulated SVGs");
  threads_opt(simulate);

  auto* calibrate = app.add_subcommand("calibrate", "Calibrate a model with the genetic algorithm");
  calibrate->add_option("--model", o.model, "Model kind")->required()->check(CLI::IsMember({"idm", "blend", "linear_acc"}));
  calibrate->add_option("--segments", o.segments, "Segments JSON")->required();
  calibrate->add_option("--config", o.config, "GA configuration JSON");
  calibrate->add_option("--split", o.split, "Calibration fraction");
  calibrate->add_option("--split-seed", o.split_seed, "Seed for the calibration/validation split");
  calibrate->add_option("--seed", o.seeds, "GA seed (repeatable; overrides the config's seeds)");
  calibrate->add_option("--dt", o.dt, "Integration step, s");
  calibrate->add_option("--limits", o.limits, "Simulation limits JSON");
  calibrate->add_option("--base", o.base, "Parameter JSON supplying non-calibrated constants");
  calibrate->add_option("--out", o.out, "Output result JSON")->required();
  threads_opt(calibrate);

  auto* validate = app.add_subcommand("validate", "Score fixed parameters against segments");
  validate->add_option("--model", o.model, "Model parameter JSON")->required();
  validate->add_option("--segments", o.segments, "Segments JSON")->required();
  validate->add_option("--dt", o.dt, "Integration step, s");
  validate->add_option("--limits", o.limits, "Simulation limits JSON");
  validate->add_option("--out", o.out, "Output goodness-of-fit JSON")->required();
  threads_opt(validate);

  auto* report = app.add_subcommand("report", "Render result JSON files as text tables and SVG");
  report->add_option("--input", o.inputs, "Result JSON (repeatable)");
  report->add_option("--format", o.format, "text, svg or all")->check(CLI::IsMember({"text", "svg", "all"}));
  report->add_option("--out-dir", o.out_dir, "Output directory")->required();

  std::vector<char*> argv;
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    std::cout << CFCAL_VERSION << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << '\n';
    const auto subs = app.get_subcommands();
    std::cerr << (subs.empty() ? app.help() : subs.front()->help());
    return 2;
  }

  auto* sub = app.get_subcommands().front();
  Run run(sub->get_name(), std::vector<std::string>(args.begin() + (args.empty() ? 0 : 1), args.end()));
  try {
    if (sub == ingest) return run_ingest(o, run);
    if (sub == clean) return run_clean(o, run);
    if (sub == stats) return run_stats(o, run);
    if (sub == simulate) return run_simulate(o, run);
    if (sub == calibrate) return run_calibrate(o, run);
    if (sub == validate) return run_validate(o, run);
    return run_report(o, run);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << to_string(ErrorKind::Config) << ": malformed input JSON: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
  }
  return 1;
}

}  // namespace cfcal::cli
