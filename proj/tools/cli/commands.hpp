#pragma once

#include <string>
#include <vector>

#include "cli/config.hpp"

namespace kdetrack::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNoAnalogues = 4;

// Writes <output_dir>/clean.csv, noisy.csv and synth.meta.
void cmd_synth(const RunConfig& cfg);

// Writes <output_dir>/forecast.txt, support.txt, matches.txt and forecast.meta;
// with export_grids, also grids/density_step_NNN.txt and grids/hdr_step_NNN.txt.
void cmd_forecast(const RunConfig& cfg);

// Writes <output_dir>/eval_report.txt, eval_steps.csv and eval.meta.
void cmd_eval(const RunConfig& cfg);

// Writes <output_dir>/density_step_NNN.txt plus hdr_step_NNN.txt, or one
// hdr_step_NNN_alpha_A.txt per entry of `alphas`.
void cmd_density(const RunConfig& cfg);

// Full command line (args[0] is the program name). Returns the exit code.
int run(const std::vector<std::string>& args);

}  // namespace kdetrack::cli
