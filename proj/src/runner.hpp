#pragma once

// Executes a RunConfig end to end and emits the output tree:
// fields/*.csv, trajectory.csv, energy.csv, action_field.csv,
// ensemble_positions.csv, identity_check.json, ensemble_report.json,
// summary.json and manifest.json (every file checksummed).

#include "config.hpp"
#include "io.hpp"

namespace pilot {

void run_scenario(const RunConfig& cfg, io::OutputSet& out);

} // namespace pilot
