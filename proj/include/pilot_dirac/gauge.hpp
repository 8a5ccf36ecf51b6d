#pragma once

// Action field construction, the gauge transform Psi = psi e^{-iS}, the
// equivalence check between the phase-sourced and free equations, and the
// potential-absorption alternative.

#include "pilot_dirac/errors.hpp"
#include "pilot_dirac/observables.hpp"
#include "pilot_dirac/solver.hpp"

#include <functional>
#include <vector>

namespace pilot {

struct ActionField {
  std::vector<double> times;
  std::vector<ScalarField> S; // one field per time, S(basepoint) = 0 at t0
  double curl_norm = 0.0;     // L2 norm of d_0 j_1 - d_1 j_0 (integrability)
  bool path_dependent = false;
};

constexpr double kCurlRelThreshold = 1e-8;

// Line integration of d_a S = -2k j_a: spectral spatial antiderivative at
// the first time, then per-site trapezoidal time integration. The spatial
// mean of d_1 S is carried as an explicit linear term, so S need not be
// periodic. curl_norm measures the integrability defect.
inline ActionField build_action_field(const std::vector<CurrentSnapshot>& snaps,
                                      const Grid& grid, double k) {
  if (snaps.empty())
    throw std::invalid_argument("build_action_field: empty snapshot series");
  for (const auto& s : snaps)
    if (s.node_mask.any())
      throw NodeError("build_action_field: node on the integration path");
  ActionField out;
  out.times.reserve(snaps.size());
  out.S.reserve(snaps.size());

  // lowered gradients: dS_0 = -2k j^0, dS_1 = +2k j^1
  auto dS0 = [&](std::size_t i) { return ScalarField(-2.0 * k * snaps[i].j.col(0)); };
  auto dS1 = [&](std::size_t i) { return ScalarField(2.0 * k * snaps[i].j.col(1)); };

  ScalarField S = spectral_antiderivative(dS1(0), grid);
  out.times.push_back(snaps[0].t);
  out.S.push_back(S);
  for (std::size_t i = 1; i < snaps.size(); ++i) {
    const double dt = snaps[i].t - snaps[i - 1].t;
    S += 0.5 * dt * (dS0(i - 1) + dS0(i));
    out.times.push_back(snaps[i].t);
    out.S.push_back(S);
  }

  if (snaps.size() >= 3) {
    const double dt = snaps[1].t - snaps[0].t;
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 1; i + 1 < snaps.size(); ++i) {
      const ArrayXd dj1_dt =
          (-snaps[i + 1].j.col(1) + snaps[i - 1].j.col(1)) / (2.0 * dt);
      const ArrayXd dj0_dx = spectral_derivative(ScalarField(snaps[i].j.col(0)), grid);
      worst = std::max(worst, std::sqrt(((dj1_dt - dj0_dx).square() * grid.dx).sum()));
      scale = std::max(scale,
                       std::sqrt((dj1_dt.square() + dj0_dx.square()).sum() * grid.dx));
    }
    out.curl_norm = worst;
    out.path_dependent = worst > kCurlRelThreshold * std::max(scale, 1e-300);
  }
  return out;
}

enum class GaugeDirection { Forward, Backward }; // forward: Psi = psi e^{-iS}

inline SpinorField gauge_transform(const SpinorField& psi, const ScalarField& S,
                                   GaugeDirection dir) {
  const Complex I(0.0, 1.0);
  const double sign = dir == GaugeDirection::Forward ? -1.0 : 1.0;
  const ArrayXcd phase = (sign * I * S).exp();
  SpinorField out(psi.rows(), psi.cols());
  for (int c = 0; c < psi.cols(); ++c) out.col(c) = phase * psi.col(c);
  return out;
}

// Pure gauge algebra: for any smooth real S, evolving psi0 = Psi0 e^{iS(t0)}
// under the phase-sourced equation and Psi0 under the free equation must
// keep psi(t) = Psi(t) e^{iS(t)}. Returns the max pointwise deviation.
struct GaugeEquivalenceResult {
  double max_error = 0.0;
};

inline GaugeEquivalenceResult equivalence_check(
    const SpinorField& Psi0, const Grid& grid, const SolverConfig& cfg,
    const std::function<ScalarField(double)>& S_of_t,
    const std::function<VectorField(double)>& dS_of_t) {
  const FreeStepper free_stepper(grid, cfg.dt, cfg.m);
  SpinorField Psi = Psi0;
  SpinorField psi = gauge_transform(Psi0, S_of_t(0.0), GaugeDirection::Backward);
  GaugeEquivalenceResult result;
  double t = 0.0;
  for (int n = 0; n < cfg.steps; ++n) {
    psi = step_phase_sourced(psi, dS_of_t(t), dS_of_t(t + cfg.dt), grid, cfg);
    free_stepper.step(Psi);
    t += cfg.dt;
    const SpinorField ref = gauge_transform(Psi, S_of_t(t), GaugeDirection::Backward);
    result.max_error = std::max(result.max_error, (psi - ref).abs().maxCoeff());
  }
  return result;
}

// A_a = -d_a S; step_external_potential(A) is then term-for-term the same
// local matrix as step_phase_sourced(dS).
inline VectorField absorb_into_potential(const VectorField& dS) {
  return -dS;
}

} // namespace pilot
