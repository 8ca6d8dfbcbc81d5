#include "cli/commands.hpp"

#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cstdio>
#include <memory>
#include <sstream>

#include "kdetrack/errors.hpp"
#include "kdetrack/hdr.hpp"
#include "kdetrack/io.hpp"
#include "kdetrack/metrics.hpp"
#include "kdetrack/random.hpp"

namespace kdetrack::cli {

namespace fs = std::filesystem;

namespace {

std::string step_tag(std::size_t step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%03zu", step);
  return buf;
}

std::string alpha_tag(double alpha) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", alpha);
  return buf;
}

void write_meta(const RunConfig& cfg, const std::string& command, const fs::path& path,
                std::map<std::string, std::string> extra = {}) {
  auto params = cfg.resolved();
  params["command"] = command;
  for (auto& [k, v] : extra) params["result." + k] = v;
  io::write_file_atomic(path, io::format_metadata(params, cfg.seed));
}

Grid box_grid(const Point& lo, const Point& hi, std::size_t per_axis) {
  return Grid(lo, hi, std::vector<std::size_t>(lo.dim(), per_axis));
}

fs::path support_path(const RunConfig& cfg) {
  if (!cfg.support.empty()) return cfg.support;
  return cfg.forecast.parent_path() / "support.txt";
}

std::string optional_text(const std::optional<double>& v) { return v ? io::format_double(*v) : "NA"; }

}  // namespace

void cmd_synth(const RunConfig& cfg) {
  Rng rng = make_rng(cfg.seed);
  SyntheticRun run;
  if (cfg.generator == "lorenz") {
    run = generate_lorenz(cfg.lorenz_spec(), rng);
  } else {
    run = generate_loiter(cfg.loiter_spec(), rng);
  }
  const Metric metric = Metric::euclidean();
  io::write_trajectory(cfg.output_dir / "clean.csv", run.clean, metric);
  io::write_trajectory(cfg.output_dir / "noisy.csv", run.noisy, metric);
  write_meta(cfg, "synth", cfg.output_dir / "synth.meta", {{"rows", std::to_string(run.noisy.size())}});
  spdlog::info("synth: wrote {} rows (d = {}) to {}", run.noisy.size(), run.noisy.dim(), cfg.output_dir.string());
}

void cmd_forecast(const RunConfig& cfg) {
  if (cfg.input.empty()) throw ConfigError("forecast: 'input' is required");
  const auto file = io::read_trajectory(cfg.input);
  Trajectory P = file.trajectory;
  if (cfg.history_length > 0 && cfg.history_length < P.size()) {
    P = P.slice(P.size() - cfg.history_length, P.size());
  }
  if (P.empty()) throw DataError("forecast: input has no rows");
  ForecastConfig fc = cfg.forecast_config(P.dim());
  if (!cfg.mask.empty()) fc.mask = std::make_shared<const FeasibilityMask>(io::read_mask(cfg.mask));

  const Forecast result = run_forecast(P, fc);
  const double t0 = P.back().t;
  io::write_file_atomic(cfg.output_dir / "forecast.txt", io::format_forecast(result.steps, P.dim(), fc, t0));
  io::write_file_atomic(cfg.output_dir / "support.txt",
                        io::format_support(result.steps, P.dim(), fc.kernel.family()));

  std::string matches = "# ordinal p_index t used\n";
  for (std::size_t k = 0; k < result.matches.size(); ++k) {
    const std::size_t i = result.matches.indices[k];
    const bool used =
        std::find(result.used_matches.begin(), result.used_matches.end(), i) != result.used_matches.end();
    matches += std::to_string(k) + " " + std::to_string(i) + " " + io::format_double(P[i].t) + " " +
               (used ? "1" : "0") + "\n";
  }
  io::write_file_atomic(cfg.output_dir / "matches.txt", matches);

  if (cfg.export_grids) {
    if (cfg.grid_resolution < 2) throw ConfigError("grid_resolution must be >= 2");
    for (const auto& s : result.steps) {
      if (!s.present()) continue;
      const auto [lo, hi] = s.estimate->density->support_box();
      const Grid grid = box_grid(lo, hi, cfg.grid_resolution);
      const auto tag = step_tag(s.step);
      io::write_file_atomic(cfg.output_dir / "grids" / ("density_step_" + tag + ".txt"),
                            io::format_density_grid(*s.estimate->density, grid));
      io::write_file_atomic(cfg.output_dir / "grids" / ("hdr_step_" + tag + ".txt"),
                            io::format_hdr_grid(s.estimate->region, grid));
    }
  }

  std::size_t present = 0;
  for (const auto& s : result.steps) present += s.present() ? 1 : 0;
  write_meta(cfg, "forecast", cfg.output_dir / "forecast.meta",
             {{"matches", std::to_string(result.matches.size())},
              {"used_matches", std::to_string(result.used_matches.size())},
              {"steps", std::to_string(result.steps.size())},
              {"present_steps", std::to_string(present)},
              {"history_rows", std::to_string(P.size())}});
  spdlog::info("forecast: {} analogues, {} of {} steps estimated", result.matches.size(), present,
               result.steps.size());
}

void cmd_eval(const RunConfig& cfg) {
  if (cfg.truth.empty()) throw ConfigError("eval: 'truth' is required");
  if (cfg.forecast.empty()) throw ConfigError("eval: 'forecast' is required");
  const auto truth = io::read_trajectory(cfg.truth);
  const auto forecast = io::read_forecast(cfg.forecast);
  const auto support = io::read_support(support_path(cfg));
  require_dimension(truth.trajectory.dim(), forecast.dim, "eval truth vs forecast");
  const auto steps = io::rebuild_steps(forecast, support);
  const auto report = evaluate_forecast(truth.trajectory, steps, truth.metric, cfg.max_lag);

  std::string text = "# kdetrack eval report\n";
  text += "steps = " + std::to_string(report.steps.size()) + "\n";
  text += "evaluated_steps = " + std::to_string(report.evaluated_steps) + "\n";
  text += "mean_ape = " + io::format_double(report.mean_ape) + "\n";
  text += "std_ape = " + io::format_double(report.std_ape) + "\n";
  text += "pct_hdr = " + optional_text(report.pct_hdr) + "\n";
  text += "mean_nearest_dist = " + optional_text(report.mean_nearest_distance) + "\n";
  if (report.fit) {
    text += "integrated_error_slope = " + io::format_double(report.fit->slope) + "\n";
    text += "integrated_error_r2 = " + io::format_double(report.fit->r2) + "\n";
  } else {
    text += "integrated_error_slope = NA\nintegrated_error_r2 = NA\n";
  }
  if (!report.acf.empty()) {
    text += "acf_critical = " +
            io::format_double(acf_critical_value(report.evaluated_steps)) + "\n";
  }
  for (const auto& lag : report.acf) {
    text += "acf_lag_" + std::to_string(lag.lag) + " = " + io::format_double(lag.value) +
            (lag.significant ? " significant" : "") + "\n";
  }
  io::write_file_atomic(cfg.output_dir / "eval_report.txt", text);

  std::string csv = "i,t,ape,in_hdr,nearest_dist\n";
  for (const auto& s : report.steps) {
    csv += std::to_string(s.step) + "," + io::format_double(s.time) + "," + optional_text(s.ape) + "," +
           (s.in_hdr ? (*s.in_hdr ? "1" : "0") : "NA") + "," + optional_text(s.nearest_distance) + "\n";
  }
  io::write_file_atomic(cfg.output_dir / "eval_steps.csv", csv);
  write_meta(cfg, "eval", cfg.output_dir / "eval.meta");
  spdlog::info("eval: mean APE {:.4g} over {} steps", report.mean_ape, report.evaluated_steps);
}

void cmd_density(const RunConfig& cfg) {
  if (cfg.forecast.empty()) throw ConfigError("density: 'forecast' is required");
  if (cfg.resolution < 2) throw ConfigError("resolution must be >= 2 per axis");
  const auto forecast = io::read_forecast(cfg.forecast);
  const auto support = io::read_support(support_path(cfg));
  const auto row = std::find_if(forecast.rows.begin(), forecast.rows.end(),
                                [&](const io::ForecastRow& r) { return r.step == cfg.step; });
  if (row == forecast.rows.end()) throw DataError("density: step " + std::to_string(cfg.step) + " not in forecast");
  if (!row->prediction) throw DataError("density: step " + std::to_string(cfg.step) + " is absent");
  auto f = std::make_shared<const DensityEstimate>(support.density(cfg.step));

  Point lo;
  Point hi;
  if (cfg.box_lo.empty() && cfg.box_hi.empty()) {
    std::tie(lo, hi) = f->support_box();
  } else {
    if (cfg.box_lo.size() != f->dim() || cfg.box_hi.size() != f->dim()) {
      throw ConfigError("box_lo and box_hi need " + std::to_string(f->dim()) + " values each");
    }
    lo = Point(cfg.box_lo);
    hi = Point(cfg.box_hi);
  }
  const Grid grid = box_grid(lo, hi, cfg.resolution);
  const auto tag = step_tag(cfg.step);
  io::write_file_atomic(cfg.output_dir / ("density_step_" + tag + ".txt"), io::format_density_grid(*f, grid));

  if (cfg.alphas.empty()) {
    const HdrRegion region(f, forecast.alpha, row->threshold, forecast.hdr_samples);
    io::write_file_atomic(cfg.output_dir / ("hdr_step_" + tag + ".txt"), io::format_hdr_grid(region, grid));
  } else {
    Rng rng = make_rng(derive_seed(cfg.seed, cfg.step));
    const auto regions = estimate_hdr_levels(f, cfg.alphas, cfg.hdr_samples, rng);
    for (const auto& region : regions) {
      io::write_file_atomic(cfg.output_dir / ("hdr_step_" + tag + "_alpha_" + alpha_tag(region.alpha()) + ".txt"),
                            io::format_hdr_grid(region, grid));
    }
  }
  write_meta(cfg, "density", cfg.output_dir / ("density_step_" + tag + ".meta"));
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"kdetrack: analogue-based trajectory forecasting with KDE and highest-density regions"};
  app.set_version_flag("--version", std::string(KDETRACK_VERSION));
  app.require_subcommand(1);
  app.fallthrough();
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off");

  struct Sub {
    CLI::App* app;
    void (*fn)(const RunConfig&);
  };
  std::vector<Sub> subs{
      {app.add_subcommand("synth", "generate a synthetic history (clean + noisy)"), &cmd_synth},
      {app.add_subcommand("forecast", "forecast from a trajectory file"), &cmd_forecast},
      {app.add_subcommand("eval", "score a forecast against ground truth"), &cmd_eval},
      {app.add_subcommand("density", "export a step's density and HDR on a grid"), &cmd_density},
  };
  std::string config_path;
  std::map<std::string, std::string> flags;
  for (auto& s : subs) {
    s.app->add_option("-c,--config", config_path, "flat key = value config file");
    for (const auto& key : known_keys()) {
      s.app->add_option_function<std::string>("--" + key, [&flags, key](const std::string& v) { flags[key] = v; });
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  spdlog::set_level(spdlog::level::from_str(log_level));
  try {
    RunConfig cfg;
    if (!config_path.empty()) {
      for (const auto& [k, v] : read_config_file(config_path)) cfg.set(k, v);
    }
    for (const auto& [k, v] : flags) cfg.set(k, v);
    for (auto& s : subs) {
      if (s.app->parsed()) s.fn(cfg);
    }
    return kExitOk;
  } catch (const NoAnaloguesError& e) {
    spdlog::error("{}", e.what());
    return kExitNoAnalogues;
  } catch (const ConfigError& e) {
    spdlog::error("config: {}", e.what());
    return kExitConfig;
  } catch (const DataError& e) {
    spdlog::error("data: {}", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitFailure;
  }
}

}  // namespace kdetrack::cli
