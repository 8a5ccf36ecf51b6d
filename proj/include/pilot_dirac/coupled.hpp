#pragma once

// Nonlinear particle-sourced field evolution and the conservation checks
// that go with it.
//
// Field equation: i g^a d_a phi - m phi = sigma0 k (u_a + j_a/rho0) g^a phi,
// which is the phase-sourced form with the effective lowered gradient
//   dS_eff,a(x) = -k sigma0(x) (u_a + j_a(x)/rho0(x)).
// One step is a Strang composition: half local kick built from the step's
// initial state, full free step, particle step over the bracket, half kick
// built from the final state. The local kick commutes with the current
// bilinears, so the currents of the pre-kick field already equal those of
// the final field.

#include "pilot_dirac/emtensor.hpp"
#include "pilot_dirac/gamma.hpp"
#include "pilot_dirac/observables.hpp"
#include "pilot_dirac/particle.hpp"
#include "pilot_dirac/solver.hpp"

#include <vector>

namespace pilot {

// Lowered action gradient dS_a = -k (rho0 u_a + j_a) of Eq.-of-motion form,
// evaluated with the particle's u across the whole lattice.
inline VectorField action_gradient_field(const CurrentSnapshot& snap,
                                         const Vector2d& u, double k) {
  VectorField dS(snap.j.rows(), 2);
  dS.col(0) = -k * (snap.rho0 * u[0] + snap.j.col(0));
  dS.col(1) = -k * (snap.rho0 * (-u[1]) + (-snap.j.col(1)));
  return dS;
}

// dS_eff,a = (sigma0/rho0) dS_a = -k sigma0 (u_a + j_a/rho0)
inline VectorField coupled_source(const CurrentSnapshot& snap,
                                  const ParticleState& particle,
                                  const Grid& grid, double k, double eps) {
  const ScalarField sigma0 =
      regularized_sigma0(particle.x, particle.u[0], eps, grid);
  const double pmax = std::max(snap.P.maxCoeff(), 1e-300);
  const double sig_floor = 1e-14 * sigma0.maxCoeff();
  VectorField dS = VectorField::Zero(grid.nx, 2);
  const Vector2d ul = lower(particle.u);
  for (int i = 0; i < grid.nx; ++i) {
    if (sigma0[i] <= sig_floor) continue;
    if (snap.rho0[i] < kNodeRelTol * pmax)
      throw NodeError("coupled_source: particle tube over a current node");
    dS(i, 0) = -k * sigma0[i] * (ul[0] + snap.j(i, 0) / snap.rho0[i]);
    dS(i, 1) = -k * sigma0[i] * (ul[1] - snap.j(i, 1) / snap.rho0[i]);
  }
  return dS;
}

struct CoupledStepResult {
  SpinorField phi;
  ParticleState particle;
  CurrentSnapshot snap_end; // currents of the final field
};

inline CoupledStepResult step_coupled(const SpinorField& phi,
                                      const ParticleState& particle,
                                      const Grid& grid, const GammaSet& g,
                                      const SolverConfig& cfg) {
  const CurrentSnapshot snapA = current_field(phi, g, grid, particle.t);

  SpinorField work = phi;
  phase_kick(work, coupled_source(snapA, particle, grid, cfg.k, cfg.eps),
             0.5 * cfg.dt);
  FreeStepper(grid, cfg.dt, cfg.m).step(work);

  // kick leaves j invariant: currents of `work` are the end-of-step currents
  CurrentSnapshot snapB = current_field(work, g, grid, particle.t + cfg.dt);

  const ParticleState next = eom_step(particle, snapA, snapB, grid, cfg.k);
  phase_kick(work, coupled_source(snapB, next, grid, cfg.k, cfg.eps),
             0.5 * cfg.dt);

  return {std::move(work), next, std::move(snapB)};
}

// Everything a conservation audit needs, recorded at every step.
struct CoupledRun {
  Grid grid;
  SolverConfig cfg;
  std::vector<FieldSnapshot> fields;
  std::vector<CurrentSnapshot> currents;
  Trajectory particle;
  std::vector<ScalarField> sigma0; // regularized tube per snapshot
  std::vector<VectorField> dS;     // action_gradient_field per snapshot
};

inline CoupledRun run_coupled(const SpinorField& phi0,
                              const ParticleState& particle0, const Grid& grid,
                              const GammaSet& g, const SolverConfig& cfg) {
  cfg.validate();
  if (cfg.k == 0)
    throw std::invalid_argument("run_coupled: k must be nonzero in coupled mode");
  CoupledRun run;
  run.grid = grid;
  run.cfg = cfg;
  auto record = [&](const SpinorField& phi, const CurrentSnapshot& snap,
                    const ParticleState& st) {
    run.fields.push_back({st.t, phi});
    run.currents.push_back(snap);
    run.particle.push_back(st);
    run.sigma0.push_back(regularized_sigma0(st.x, st.u[0], cfg.eps, grid));
    run.dS.push_back(action_gradient_field(snap, st.u, cfg.k));
  };
  SpinorField phi = phi0;
  ParticleState st = particle0;
  record(phi, current_field(phi, g, grid, st.t), st);
  for (int n = 0; n < cfg.steps; ++n) {
    CoupledStepResult r = step_coupled(phi, st, grid, g, cfg);
    phi = std::move(r.phi);
    st = r.particle;
    record(phi, r.snap_end, st);
  }
  return run;
}

// Field-side tensor series for the run (interior snapshots only).
inline std::vector<EMTensorField> field_tensor_series(const CoupledRun& run,
                                                      const GammaSet& g) {
  std::vector<EMTensorField> out;
  const double dt = run.cfg.dt;
  for (std::size_t i = 1; i + 1 < run.fields.size(); ++i)
    out.push_back(t_field(run.fields[i - 1].psi, run.fields[i].psi,
                          run.fields[i + 1].psi, dt, run.fields[i].t,
                          run.dS[i], run.sigma0[i], run.currents[i].rho0, g,
                          run.grid));
  return out;
}

inline std::vector<EMTensorField> particle_tensor_series(const CoupledRun& run) {
  std::vector<EMTensorField> out;
  for (std::size_t i = 1; i + 1 < run.particle.size(); ++i)
    out.push_back(t_particle(run.sigma0[i], run.particle[i].p,
                             run.particle[i].u, run.particle[i].t));
  return out;
}

// RHS of the field divergence identity, (sigma0/rho0)(dS_l) d^a j^l,
// at snapshot index i (interior).
inline VectorField exchange_density(const CoupledRun& run, std::size_t i) {
  const Grid& grid = run.grid;
  const double dt = run.cfg.dt;
  VectorField dj_dt(grid.nx, 2), dj_dx(grid.nx, 2);
  for (int c = 0; c < 2; ++c) {
    dj_dt.col(c) = (run.currents[i + 1].j.col(c) - run.currents[i - 1].j.col(c)) /
                   (2.0 * dt);
    dj_dx.col(c) = spectral_derivative(ScalarField(run.currents[i].j.col(c)), grid);
  }
  // contraction over l with lowered dS: (dS_l) d^a j^l
  ArrayXd c_t = run.dS[i].col(0) * dj_dt.col(0) + run.dS[i].col(1) * dj_dt.col(1);
  ArrayXd c_x = run.dS[i].col(0) * dj_dx.col(0) + run.dS[i].col(1) * dj_dx.col(1);
  ArrayXd ratio = ArrayXd::Zero(grid.nx);
  const double sig_floor = 1e-14 * std::max(run.sigma0[i].maxCoeff(), 1e-300);
  for (int s = 0; s < grid.nx; ++s)
    if (run.sigma0[i][s] > sig_floor)
      ratio[s] = run.sigma0[i][s] / run.currents[i].rho0[s];
  VectorField rhs(grid.nx, 2);
  rhs.col(0) = ratio * c_t;        // d^0 = d_t
  rhs.col(1) = -(ratio * c_x);     // d^1 = -d_x
  return rhs;
}

// RHS of the particle divergence identity, sigma0 dp^a/dtau, with the rate
// sampled at the particle point (the delta-function limit the particle
// equations live in). The field-side rhs differs from this by O(eps): the
// local current data varies across the finite tube width.
inline VectorField particle_exchange_density(const CoupledRun& run,
                                             std::size_t i) {
  const Grid& grid = run.grid;
  const GuidanceField bracket(run.currents[i - 1], run.currents[i + 1], grid,
                              0.5);
  const ParticleState& st = run.particle[i];
  const FieldSample s = bracket.sample(st.x);
  const Vector2d rate = detail::momentum_rate(st.u, s, run.cfg.k); // dp^a/dt
  VectorField rhs(grid.nx, 2);
  rhs.col(0) = run.sigma0[i] * (rate[0] * st.u[0]); // sigma0 dp^a/dtau
  rhs.col(1) = run.sigma0[i] * (rate[1] * st.u[0]);
  return rhs;
}

struct DivergenceIdentityReport {
  double field_residual = 0.0;    // |div T_field - rhs| / |rhs|
  double particle_residual = 0.0; // |div T_particle + rhs| / |rhs|
  double rhs_norm = 0.0;
};

// Checks div T_field = +(sigma0/rho0)(dS_l)d^a j^l on the field side and
// div T_particle = sigma0 dp^a/dtau on the particle side (equal and opposite
// to the field rhs in the delta-function limit), both relative to the field
// rhs norm.
inline DivergenceIdentityReport divergence_identity_check(const CoupledRun& run,
                                                          const GammaSet& g) {
  const auto Tf = field_tensor_series(run, g);
  const auto Tp = particle_tensor_series(run);
  const auto div_f = divergence(Tf, run.grid);
  const auto div_p = divergence(Tp, run.grid);
  DivergenceIdentityReport rep;
  double worst_f = 0.0, worst_p = 0.0, scale = 0.0;
  // div_f[i] sits at tensor index i+1 = run snapshot index i+2
  for (std::size_t i = 0; i < div_f.size(); ++i) {
    const std::size_t run_idx = i + 2;
    const VectorField rhs = exchange_density(run, run_idx);
    const VectorField rhs_p = particle_exchange_density(run, run_idx);
    const double rn = l2_norm(rhs, run.grid);
    scale = std::max(scale, rn);
    worst_f = std::max(worst_f, l2_norm(VectorField(div_f[i] - rhs), run.grid));
    worst_p = std::max(worst_p, l2_norm(VectorField(div_p[i] - rhs_p), run.grid));
  }
  rep.rhs_norm = scale;
  rep.field_residual = worst_f / std::max(scale, 1e-300);
  rep.particle_residual = worst_p / std::max(scale, 1e-300);
  return rep;
}

struct EnergyReport {
  std::vector<double> t;
  std::vector<double> e_field, e_particle, e_total;
  double exchange = 0.0;    // max |E_field(t) - E_field(0)|
  double total_drift = 0.0; // max |E_total(t) - E_total(0)|
};

inline EnergyReport total_conservation_check(const CoupledRun& run,
                                             const GammaSet& g) {
  const auto Tf = field_tensor_series(run, g);
  const auto Tp = particle_tensor_series(run);
  EnergyReport rep;
  for (std::size_t i = 0; i < Tf.size(); ++i) {
    const double ef = integrate(Tf[i].component(0, 0), run.grid);
    const double ep = integrate(Tp[i].component(0, 0), run.grid);
    rep.t.push_back(Tf[i].t);
    rep.e_field.push_back(ef);
    rep.e_particle.push_back(ep);
    rep.e_total.push_back(ef + ep);
  }
  for (std::size_t i = 0; i < rep.t.size(); ++i) {
    rep.exchange = std::max(rep.exchange, std::abs(rep.e_field[i] - rep.e_field[0]));
    rep.total_drift =
        std::max(rep.total_drift, std::abs(rep.e_total[i] - rep.e_total[0]));
  }
  return rep;
}

} // namespace pilot
