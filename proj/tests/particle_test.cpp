#include "doctest.h"

#include "pilot_dirac/particle.hpp"
#include "pilot_dirac/solver.hpp"

#include <random>

using namespace pilot;

namespace {
const GammaSet g2 = make_gamma_set(2);

// L as a free function of the *lowered* velocity components, with the
// (u.u)^{1/2} factor treated as a variable (the constraint is released
// during differentiation).
double L_of_lowered_u(double u_lo0, double u_lo1, const Vector2d& j,
                      double rho0, double k) {
  const double uu = u_lo0 * u_lo0 - u_lo1 * u_lo1;
  const double uj = u_lo0 * j[0] + u_lo1 * j[1]; // u_a j^a
  return -k * (rho0 * std::sqrt(uu) + uj);
}

// L as a free function of the raised current components at fixed u.
double L_of_raised_j(const Vector2d& u, double j0, double j1, double k) {
  const double jj = j0 * j0 - j1 * j1;
  const double uj = u[0] * j0 - (-u[1]) * (-j1); // u_a j^a = u^0 j^0 - u^1 j^1
  return -k * (std::sqrt(jj) + uj);
}

Vector2d random_unit_velocity(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> rap(-1.5, 1.5);
  const double eta = rap(rng);
  return Vector2d(std::cosh(eta), std::sinh(eta));
}

Vector2d random_timelike_current(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> rap(-1.5, 1.5);
  std::uniform_real_distribution<double> mag(0.3, 2.0);
  const double eta = rap(rng);
  const double r = mag(rng);
  return Vector2d(r * std::cosh(eta), r * std::sinh(eta));
}
} // namespace

TEST_CASE("lagrangian hand values") {
  const Vector2d u(1.0, 0.0), j(1.0, 0.0);
  CHECK(lagrangian_L(u, j, 1.0, 1.0) == doctest::Approx(-2.0));
  CHECK(lagrangian_L(u, j, 1.0, 0.0) == doctest::Approx(0.0));
  CHECK(lagrangian_L(u, j, 1.0, 2.0) == doctest::Approx(-4.0));
  CHECK_THROWS_AS(lagrangian_L(u, j, 0.0, 1.0), ModelError);
}

TEST_CASE("generalized momentum hand values") {
  const Vector2d u(1.0, 0.0), j(1.0, 0.0);
  const Vector2d p = generalized_momentum(u, j, 1.0, 1.0);
  CHECK(p[0] == doctest::Approx(2.0));
  CHECK(p[1] == doctest::Approx(0.0));
  // guidance-aligned j = rho0 u gives p = 2k j
  const Vector2d u2(std::cosh(0.7), std::sinh(0.7));
  const double rho0 = 1.3, k = 0.8;
  const Vector2d j2 = rho0 * u2;
  const Vector2d p2 = generalized_momentum(u2, j2, rho0, k);
  CHECK((p2 - 2.0 * k * j2).norm() < 1e-12);
}

TEST_CASE("momentum matches the finite-difference gradient of L") {
  std::mt19937_64 rng(17);
  const double h = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    const Vector2d u = random_unit_velocity(rng);
    const Vector2d j = random_timelike_current(rng);
    const double rho0 = std::sqrt(mdot(j, j));
    const double k = 1.0;
    const Vector2d p = generalized_momentum(u, j, rho0, k);
    const Vector2d ul = lower(u);
    // p^a = -dL/du_a by central differences
    const double p0 = -(L_of_lowered_u(ul[0] + h, ul[1], j, rho0, k) -
                        L_of_lowered_u(ul[0] - h, ul[1], j, rho0, k)) /
                      (2 * h);
    const double p1 = -(L_of_lowered_u(ul[0], ul[1] + h, j, rho0, k) -
                        L_of_lowered_u(ul[0], ul[1] - h, j, rho0, k)) /
                      (2 * h);
    CHECK(std::abs(p0 - p[0]) < 1e-6 * std::max(1.0, std::abs(p[0])));
    CHECK(std::abs(p1 - p[1]) < 1e-6 * std::max(1.0, std::abs(p[1])));
  }
}

TEST_CASE("dL/dj hand value and finite-difference oracle") {
  const Vector2d u(1.0, 0.0), j(1.0, 0.0);
  const Vector2d d = dL_dj(u, j, 1.0, 1.0);
  CHECK(d[0] == doctest::Approx(-2.0));
  CHECK(d[1] == doctest::Approx(0.0));

  std::mt19937_64 rng(23);
  const double h = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    const Vector2d uu = random_unit_velocity(rng);
    const Vector2d jj = random_timelike_current(rng);
    const double rho0 = std::sqrt(mdot(jj, jj));
    const double k = 1.0;
    const Vector2d grad = dL_dj(uu, jj, rho0, k);
    const double d0 = (L_of_raised_j(uu, jj[0] + h, jj[1], k) -
                       L_of_raised_j(uu, jj[0] - h, jj[1], k)) /
                      (2 * h);
    const double d1 = (L_of_raised_j(uu, jj[0], jj[1] + h, k) -
                       L_of_raised_j(uu, jj[0], jj[1] - h, k)) /
                      (2 * h);
    CHECK(std::abs(d0 - grad[0]) < 1e-6 * std::max(1.0, std::abs(grad[0])));
    CHECK(std::abs(d1 - grad[1]) < 1e-6 * std::max(1.0, std::abs(grad[1])));
  }

  // guidance-aligned j = rho0 u: dL/dj = -2k j_a / rho0
  const Vector2d u3(std::cosh(0.4), std::sinh(0.4));
  const double rho3 = 0.9, k3 = 1.2;
  const Vector2d j3 = rho3 * u3;
  const Vector2d g3 = dL_dj(u3, j3, rho3, k3);
  CHECK((g3 - Vector2d(-2.0 * k3 * j3[0] / rho3, 2.0 * k3 * j3[1] / rho3)).norm() <
        1e-12);
}

TEST_CASE("guidance velocity from plane waves") {
  const Grid grid(512, 0.1);
  const double m = 1.0;

  SUBCASE("rest wave: u = (1, 0) everywhere") {
    const SpinorField psi =
        init_scenario({.kind = Scenario::PlaneWave, .p = 0.0}, grid, m);
    const CurrentSnapshot snap = current_field(psi, g2, grid);
    const Vector2d u = guidance_velocity(snap, 17.3, grid);
    CHECK(std::abs(u[0] - 1.0) < 1e-10);
    CHECK(std::abs(u[1]) < 1e-10);
  }

  SUBCASE("boosted wave: u = (E/m, p/m)") {
    const double p = lattice_momentum(0.8, grid);
    const double E = std::sqrt(p * p + m * m);
    const SpinorField psi =
        init_scenario({.kind = Scenario::PlaneWave, .p = p}, grid, m);
    const CurrentSnapshot snap = current_field(psi, g2, grid);
    const Vector2d u = guidance_velocity(snap, 5.05, grid);
    CHECK(std::abs(u[0] - E / m) < 1e-8);
    CHECK(std::abs(u[1] - p / m) < 1e-8);
    CHECK(std::abs(mdot(u, u) - 1.0) < 1e-12);
  }

  SUBCASE("node raises an error") {
    const double p = 2.0 * M_PI / grid.length() * 8;
    const double E = std::sqrt(p * p + m * m);
    const double ratio = (E + m + p) / (E + m - p);
    const SpinorField psi = init_scenario(
        {.kind = Scenario::Superposition, .p = p, .p2 = -p, .w1 = ratio, .w2 = 1.0},
        grid, m);
    const CurrentSnapshot snap = current_field(psi, g2, grid);
    // the engineered zero sits at p x = pi/2
    const double x_node = 0.5 * M_PI / p;
    CHECK_THROWS_AS(guidance_velocity(snap, x_node, grid), NodeError);
  }
}

namespace {
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

TEST_CASE("guidance trajectory on the rest plane wave: static with S = -2k t/L") {
  const Grid grid(256, 0.1);
  SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.m = 1.0;
  const double k = 1.0;
  const SpinorField psi =
      init_scenario({.kind = Scenario::PlaneWave, .p = 0.0}, grid, cfg.m);
  const auto snaps = free_run(psi, grid, cfg, 100);

  ParticleState st;
  st.x = 10.0;
  for (std::size_t i = 0; i + 1 < snaps.size(); ++i)
    st = advance_trajectory(st, snaps[i], snaps[i + 1], grid, k);

  const double t = 100 * cfg.dt;
  CHECK(std::abs(st.x - 10.0) < 1e-12);
  CHECK(st.tau == doctest::Approx(t).epsilon(1e-12));
  CHECK(st.S == doctest::Approx(-2.0 * k * t / grid.length()).epsilon(1e-10));
  // p = 2k j along guidance trajectories
  CHECK(std::abs(st.p[0] - 2.0 * k / grid.length()) < 1e-10);
  CHECK(std::abs(st.p[1]) < 1e-12);
}

TEST_CASE("constant guidance velocity gives an exactly linear trajectory") {
  const Grid grid(256, 0.1);
  SolverConfig cfg;
  cfg.dt = 0.02;
  cfg.m = 1.0;
  const double p = lattice_momentum(0.6, grid);
  const double E = std::sqrt(p * p + cfg.m * cfg.m);
  const SpinorField psi =
      init_scenario({.kind = Scenario::PlaneWave, .p = p}, grid, cfg.m);
  const auto snaps = free_run(psi, grid, cfg, 50);
  ParticleState st;
  st.x = 3.0;
  for (std::size_t i = 0; i + 1 < snaps.size(); ++i)
    st = advance_trajectory(st, snaps[i], snaps[i + 1], grid, 1.0);
  const double t = 50 * cfg.dt;
  CHECK(st.x == doctest::Approx(3.0 + (p / E) * t).epsilon(1e-10));
  CHECK(std::abs(mdot(st.u, st.u) - 1.0) < 1e-8);
  CHECK(st.u[0] >= 1.0);
}

TEST_CASE("guidance trajectory is time-reversible on a smooth packet") {
  const Grid grid(512, 0.1);
  SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.m = 1.0;
  const SpinorField psi = init_scenario(
      {.kind = Scenario::GaussianPacket, .p = 0.5, .x0 = 25.0, .width = 3.0},
      grid, cfg.m);
  const auto snaps = free_run(psi, grid, cfg, 40);

  ParticleState st;
  st.x = 24.0;
  for (std::size_t i = 0; i + 1 < snaps.size(); ++i)
    st = advance_trajectory(st, snaps[i], snaps[i + 1], grid, 1.0);
  ParticleState back = st;
  for (std::size_t i = snaps.size() - 1; i > 0; --i)
    back = advance_trajectory(back, snaps[i], snaps[i - 1], grid, 1.0);
  CHECK(std::abs(back.x - 24.0) < 1e-9);
}

TEST_CASE("eom with uniform current: straight worldline, constant momentum") {
  const Grid grid(256, 0.1);
  SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.m = 1.0;
  const double k = 1.0;
  const SpinorField psi =
      init_scenario({.kind = Scenario::PlaneWave, .p = 0.0}, grid, cfg.m);
  const auto snaps = free_run(psi, grid, cfg, 50);
  const double rho0 = 1.0 / grid.length();

  ParticleState st;
  st.x = 8.0;
  st.u = Vector2d(std::cosh(0.3), std::sinh(0.3));
  st.p = generalized_momentum(st.u, Vector2d(rho0, 0.0), rho0, k);
  const Vector2d p0 = st.p;
  for (std::size_t i = 0; i + 1 < snaps.size(); ++i)
    st = eom_step(st, snaps[i], snaps[i + 1], grid, k);

  CHECK((st.p - p0).norm() < 1e-12);
  const double t = 50 * cfg.dt;
  const double v = st.u[1] / st.u[0];
  CHECK(st.x == doctest::Approx(8.0 + v * t).epsilon(1e-10));
  CHECK(std::abs(mdot(st.u, st.u) - 1.0) < 1e-8);
}
