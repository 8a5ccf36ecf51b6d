#pragma once

// Flat `key = value` run configuration with dotted sections
// (e.g. solver.dt = 0.01). Unknown keys are rejected with a line/key
// diagnostic; value errors carry the offending key.

#include "pilot_dirac/solver.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pilot {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class RunMode { Free, PhaseSourced, Coupled };

struct RunConfig {
  Scenario scenario;
  int nx = 256;
  double dx = 0.1;
  RunMode mode = RunMode::Free;
  SolverConfig solver;
  // constant lowered-index-free gradient (d_t S, d_x S) for phase_sourced
  double source_dst = 0.0;
  double source_dsx = 0.0;
  // coupled-mode particle initial data (u0 follows from the mass shell);
  // in free/phase_sourced modes a particle.x key requests one guidance
  // trajectory starting there
  bool particle_given = false;
  double particle_x = 0.0;
  double particle_u1 = 0.0;
  // statistical ensemble (free / phase_sourced modes); n = 0 disables
  int ensemble_n = 0;
  std::uint64_t ensemble_seed = 1;
  std::string output_dir = "out";
  int fields_every = 0; // snapshot cadence in steps; 0 = initial/final only
  bool emit_fields = true;
  bool emit_trajectory = true;
  bool emit_energy = true;
  bool emit_action = false;
  bool emit_plots = false;
};

// Parses and validates; throws ConfigError with a line/key diagnostic.
RunConfig parse_run_config(const std::string& path);
RunConfig parse_run_config_text(const std::string& text,
                                const std::string& origin = "<config>");

} // namespace pilot
