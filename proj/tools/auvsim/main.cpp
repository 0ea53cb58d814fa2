#include "summary.hpp"

#include <auvsim/bathymetry.hpp>
#include <auvsim/config.hpp>
#include <auvsim/engine.hpp>
#include <auvsim/envgrid.hpp>
#include <auvsim/error.hpp>
#include <auvsim/scenario.hpp>
#include <auvsim/validation.hpp>
#include <auvsim/vehicle_params.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

namespace {

using namespace auvsim;

// Stable exit codes.
constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitAborted = 2;
constexpr int kExitPhysics = 3;
constexpr int kExitUsage = 64;

struct RunOptions {
  std::string config;
  std::optional<long long> seed;
  std::optional<double> dt;
  std::optional<double> duration;
  std::string trace_out;
  std::string summary_out;
  std::vector<std::string> sets;
  bool realtime = false;
};

std::vector<std::string> overrides_for(const RunOptions& o) {
  std::vector<std::string> out = o.sets;
  if (o.seed) out.push_back(fmt::format("world.seed={}", *o.seed));
  if (o.dt) out.push_back(fmt::format("run.dt={}", *o.dt));
  if (o.duration) out.push_back(fmt::format("run.duration={}", *o.duration));
  if (!o.trace_out.empty()) {
    const bool binary = o.trace_out.size() > 4 && o.trace_out.ends_with(".bin");
    out.push_back(fmt::format("run.{}={}", binary ? "trace_bin" : "trace_csv",
                              std::filesystem::absolute(o.trace_out).string()));
  }
  if (o.realtime) out.push_back("run.realtime=true");
  return out;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  return out;
}

int cmd_run(const RunOptions& opts) {
  const auto cfg = scenario::load_scenario(opts.config, overrides_for(opts));
  auto world = scenario::build_world(cfg);

  std::ofstream csv_file, bin_file;
  std::unique_ptr<trace::CsvTraceWriter> csv;
  std::unique_ptr<trace::BinaryTraceWriter> bin;
  if (!cfg.trace_csv.empty()) {
    csv_file = open_out(cfg.trace_csv);
    csv = std::make_unique<trace::CsvTraceWriter>(csv_file);
    world.sinks.push_back(csv.get());
  }
  if (!cfg.trace_bin.empty()) {
    bin_file = open_out(cfg.trace_bin, true);
    bin = std::make_unique<trace::BinaryTraceWriter>(bin_file);
    world.sinks.push_back(bin.get());
  }
  cli::RangeTracker ranges(cli::relief_pairs(cfg));
  world.sinks.push_back(&ranges);

  const auto result = engine::run(world, cfg.duration);

  if (!cfg.event_log.empty()) {
    auto out = open_out(cfg.event_log);
    world.channel.write_event_csv(out);
  }
  if (!cfg.phase_log.empty()) {
    auto out = open_out(cfg.phase_log);
    engine::write_phase_log(world, out);
  }
  if (!cfg.homing_log.empty()) {
    auto out = open_out(cfg.homing_log);
    engine::write_homing_log(world, out);
  }

  int code = kExitOk;
  if (result.status == engine::RunStatus::Grounded || result.status == engine::RunStatus::NumericFailure) {
    code = kExitPhysics;
    std::cerr << "auvsim: " << result.diagnostic << "\n";
  } else if (world.any_aborted()) {
    code = kExitAborted;
  }

  std::ostringstream summary;
  cli::write_summary(summary, cfg, world, result, ranges, code);
  if (opts.summary_out.empty() || opts.summary_out == "-") {
    std::cout << summary.str();
  } else {
    auto out = open_out(opts.summary_out);
    out << summary.str();
  }
  return code;
}

int cmd_validate(const std::string& params_path) {
  const auto params = params_path.empty() ? dynamics::reference_vehicle()
                                          : dynamics::load_vehicle_params(params_path, false);
  const auto results = validation::run_suite(params);
  validation::print_table(results, std::cout);
  const bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
  return ok ? kExitOk : kExitFailed;
}

struct BenchOptions {
  std::string config;
  std::vector<std::size_t> counts{1, 2, 4, 8};
  std::vector<double> dts{0.01, 0.02, 0.03};
  double duration = 600.0;
  int repeats = 3;
  std::string csv_out;
};

int cmd_bench(const BenchOptions& opts) {
  const auto base = scenario::load_scenario(opts.config);
  auto make = [&](std::size_t n, double dt) {
    auto cfg = scenario::replicate(base, n);
    cfg.physics_dt = dt;
    cfg.control_period = dt * std::max(1.0, std::round(base.control_period / dt));
    cfg.stop_when_complete = false;
    cfg.realtime = false;
    return scenario::build_world(cfg);
  };
  const auto reports = engine::rtf_sweep(make, opts.counts, opts.dts, opts.duration, opts.repeats);
  engine::write_rtf_csv(reports, std::cout);
  if (!opts.csv_out.empty()) {
    auto out = open_out(opts.csv_out);
    engine::write_rtf_csv(reports, out);
  }
  return kExitOk;
}

struct ConvertOptions {
  std::string input;
  std::string output;
  std::string kind = "auto";
  long long tile_cells = 256;
  bool positive_depth = false;
  std::string projection = "none";
  double lat0 = 0.0;
  double lon0 = 0.0;
};

int cmd_convert(const ConvertOptions& opts) {
  std::string kind = opts.kind;
  if (kind == "auto") kind = opts.input.ends_with(".csv") ? "env-csv" : "ascii-grid";
  if (kind == "ascii-grid") {
    bathy::AsciiGridOptions o;
    o.tile_cells = opts.tile_cells;
    o.positive_depth = opts.positive_depth;
    const auto manifest = bathy::convert_ascii_grid(opts.input, opts.output, o);
    std::cout << manifest.string() << "\n";
    return kExitOk;
  }
  if (kind == "env-csv") {
    env::Projection proj;
    if (opts.projection == "equirectangular") {
      proj = env::Projection::equirectangular(opts.lat0, opts.lon0);
    } else if (opts.projection != "none") {
      throw ConfigError("unknown projection '" + opts.projection + "'");
    }
    const auto grid = env::load_env(opts.input, proj);
    env::export_env(grid, opts.output);
    return kExitOk;
  }
  throw ConfigError("unknown input kind '" + kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("auvsim");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);

  CLI::App app{"Faster-than-real-time multi-vehicle underwater simulator"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log progress to stderr");

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "Run a scenario");
  run->add_option("config", run_opts.config, "Scenario file")->required();
  run->add_option("--seed", run_opts.seed, "World seed");
  run->add_option("--dt", run_opts.dt, "Physics step, s");
  run->add_option("--duration", run_opts.duration, "Simulated duration, s");
  run->add_option("--trace-out", run_opts.trace_out, "Trace file (.bin for the binary format)");
  run->add_option("--summary-out", run_opts.summary_out, "Summary file (default stdout)");
  run->add_option("--set", run_opts.sets, "Config override section.key=value")->take_all();
  run->add_flag("--realtime", run_opts.realtime, "Pace the run to wall-clock time");

  std::string params_path;
  auto* validate = app.add_subcommand("validate", "Run the physics and mission invariant suite");
  validate->add_option("--params", params_path, "Vehicle parameter file (default: reference vehicle)");

  BenchOptions bench_opts;
  auto* bench = app.add_subcommand("bench", "Real-time factor sweep over vehicle counts and step sizes");
  bench->add_option("config", bench_opts.config, "Scenario whose first vehicle is replicated")->required();
  bench->add_option("--counts", bench_opts.counts, "Vehicle counts")->delimiter(',');
  bench->add_option("--dts", bench_opts.dts, "Physics steps, s")->delimiter(',');
  bench->add_option("--duration", bench_opts.duration, "Simulated seconds per run");
  bench->add_option("--repeats", bench_opts.repeats, "Runs per cell; the fastest is kept");
  bench->add_option("--csv", bench_opts.csv_out, "Also write the table here");

  ConvertOptions conv;
  auto* convert = app.add_subcommand("convert", "Convert an ASCII grid to tiles or normalize an env CSV");
  convert->add_option("input", conv.input, "Input file")->required();
  convert->add_option("output", conv.output, "Output directory (tiles) or file (env CSV)")->required();
  convert->add_option("--kind", conv.kind, "ascii-grid | env-csv | auto");
  convert->add_option("--tile-cells", conv.tile_cells, "Cells per tile side");
  convert->add_flag("--positive-depth", conv.positive_depth, "Grid values are positive-down depths");
  convert->add_option("--projection", conv.projection, "none | equirectangular");
  convert->add_option("--lat0", conv.lat0, "Projection origin latitude, deg");
  convert->add_option("--lon0", conv.lon0, "Projection origin longitude, deg");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (verbose) spdlog::set_level(spdlog::level::info);

  try {
    if (*run) return cmd_run(run_opts);
    if (*validate) return cmd_validate(params_path);
    if (*bench) return cmd_bench(bench_opts);
    if (*convert) return cmd_convert(conv);
  } catch (const ConfigError& e) {
    std::cerr << "auvsim: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "auvsim: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "auvsim: " << e.what() << "\n";
    return kExitFailed;
  }
  return kExitUsage;
}
