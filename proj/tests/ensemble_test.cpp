#include "doctest.h"

#include "pilot_dirac/ensemble.hpp"
#include "pilot_dirac/solver.hpp"

#include <algorithm>

using namespace pilot;

namespace {
const GammaSet g2 = make_gamma_set(2);

std::vector<CurrentSnapshot> free_run(const SpinorField& psi0, const Grid& grid,
                                      const SolverConfig& cfg, int steps) {
  std::vector<CurrentSnapshot> snaps;
  SpinorField psi = psi0;
  snaps.push_back(current_field(psi, g2, grid, 0.0));
  const FreeStepper stepper(grid, cfg.dt, cfg.m);
  for (int n = 1; n <= steps; ++n) {
    stepper.step(psi);
    snaps.push_back(current_field(psi, g2, grid, n * cfg.dt));
  }
  return snaps;
}
} // namespace

TEST_CASE("uniform P sampling passes a KS test at 1%") {
  const Grid grid(256, 0.1);
  const ScalarField P = ScalarField::Constant(grid.nx, 1.0 / grid.length());
  const Ensemble ens = sample_positions(P, grid, 4000, 42);
  const KsResult ks = ks_test(ens.positions, P, grid);
  CHECK(ks.pass);
  CHECK(ks.statistic < 1.63 / std::sqrt(4000.0));
}

TEST_CASE("concentrated P puts every sample in one cell") {
  const Grid grid(256, 0.1);
  ScalarField P = ScalarField::Zero(grid.nx);
  P[100] = 1.0 / grid.dx;
  const Ensemble ens = sample_positions(P, grid, 500, 7);
  for (double x : ens.positions) {
    CHECK(x >= 100 * grid.dx);
    CHECK(x <= 101 * grid.dx);
  }
}

TEST_CASE("sampling is deterministic under the seed") {
  const Grid grid(128, 0.1);
  const ScalarField P = ScalarField::Constant(grid.nx, 1.0 / grid.length());
  const Ensemble a = sample_positions(P, grid, 100, 99);
  const Ensemble b = sample_positions(P, grid, 100, 99);
  CHECK(a.positions == b.positions);
}

TEST_CASE("unnormalized P rejected") {
  const Grid grid(128, 0.1);
  const ScalarField P = ScalarField::Constant(grid.nx, 1.0);
  CHECK_THROWS_AS(sample_positions(P, grid, 10, 1), std::invalid_argument);
}

TEST_CASE("plane-wave ensemble: straight parallel trajectories, order preserved") {
  const Grid grid(256, 0.1);
  SolverConfig cfg;
  cfg.dt = 0.02;
  cfg.m = 1.0;
  const double p = lattice_momentum(0.8, grid);
  const SpinorField psi =
      init_scenario({.kind = Scenario::PlaneWave, .p = p}, grid, cfg.m);
  const auto snaps = free_run(psi, grid, cfg, 50);

  Ensemble ens = sample_positions(snaps[0].P, grid, 200, 5);
  const std::vector<double> start = ens.positions;
  evolve_ensemble(ens, snaps, grid, 1.0);
  CHECK(ens.excluded_count == 0);

  const double E = std::sqrt(p * p + cfg.m * cfg.m);
  const double shift = (p / E) * 50 * cfg.dt;
  auto periodic_dist = [&](double a, double b) {
    const double d = grid.wrap(a - b);
    return std::min(d, grid.length() - d);
  };
  // every trajectory advances by the same uniform displacement, so the
  // initial spatial ordering is preserved (single-valued guidance flow)
  for (int s = 0; s < 200; ++s)
    CHECK(periodic_dist(ens.states[s].x, start[s] + shift) < 1e-8);
}

TEST_CASE("n = 1 ensemble equals a single trajectory") {
  const Grid grid(256, 0.1);
  SolverConfig cfg;
  cfg.dt = 0.02;
  cfg.m = 1.0;
  const SpinorField psi = init_scenario(
      {.kind = Scenario::GaussianPacket, .p = 0.5, .x0 = 12.0, .width = 2.5},
      grid, cfg.m);
  const auto snaps = free_run(psi, grid, cfg, 30);
  Ensemble ens = sample_positions(snaps[0].P, grid, 1, 3);
  evolve_ensemble(ens, snaps, grid, 1.0);

  ParticleState st;
  st.x = ens.positions[0];
  for (std::size_t i = 0; i + 1 < snaps.size(); ++i)
    st = advance_trajectory(st, snaps[i], snaps[i + 1], grid, 1.0);
  CHECK(ens.states[0].x == doctest::Approx(st.x).epsilon(1e-14));
  CHECK(ens.states[0].S == doctest::Approx(st.S).epsilon(1e-14));
}

TEST_CASE("equivariance of a spreading packet; wrong-field control fails") {
  const Grid grid(512, 0.1);
  SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.m = 1.0;
  const SpinorField psi = init_scenario(
      {.kind = Scenario::GaussianPacket, .p = 0.0, .x0 = 25.6, .width = 1.5},
      grid, cfg.m);
  const int steps = 300;
  const auto snaps = free_run(psi, grid, cfg, steps);

  Ensemble ens = sample_positions(snaps[0].P, grid, 4000, 1234);
  evolve_ensemble(ens, snaps, grid, 1.0);
  const KsResult ks = equivariance_test(ens, snaps.back().P, grid);
  CHECK(ks.pass);

  // negative control: samples evolved under a different (boosted) field
  const SpinorField wrong = init_scenario(
      {.kind = Scenario::GaussianPacket, .p = 1.2, .x0 = 25.6, .width = 1.5},
      grid, cfg.m);
  const auto wrong_snaps = free_run(wrong, grid, cfg, steps);
  Ensemble bad = sample_positions(snaps[0].P, grid, 4000, 1234);
  evolve_ensemble(bad, wrong_snaps, grid, 1.0);
  const KsResult bad_ks = equivariance_test(bad, snaps.back().P, grid);
  CHECK(!bad_ks.pass);
}

TEST_CASE("ensemble evolution is independent of the thread partition") {
  const Grid grid(256, 0.1);
  SolverConfig cfg;
  cfg.dt = 0.02;
  cfg.m = 1.0;
  const SpinorField psi = init_scenario(
      {.kind = Scenario::GaussianPacket, .p = 0.3, .x0 = 12.0, .width = 2.0},
      grid, cfg.m);
  const auto snaps = free_run(psi, grid, cfg, 20);

  setenv("PILOT_DIRAC_THREADS", "1", 1);
  Ensemble serial = sample_positions(snaps[0].P, grid, 300, 77);
  evolve_ensemble(serial, snaps, grid, 1.0);
  setenv("PILOT_DIRAC_THREADS", "4", 1);
  Ensemble parallel = sample_positions(snaps[0].P, grid, 300, 77);
  evolve_ensemble(parallel, snaps, grid, 1.0);
  unsetenv("PILOT_DIRAC_THREADS");

  for (int s = 0; s < 300; ++s)
    CHECK(serial.states[s].x == parallel.states[s].x);
}
