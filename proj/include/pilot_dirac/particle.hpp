#pragma once

// Particle-side mechanics: Lagrangian, generalized momentum, guidance
// velocity, trajectory integration with action accumulation, and the
// coupled equation of motion dp^a/dtau = k (u_l + j_l/rho0) d^a j^l.

#include "pilot_dirac/errors.hpp"
#include "pilot_dirac/grid.hpp"
#include "pilot_dirac/observables.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace pilot {

using Vector2d = Eigen::Vector2d;
using Matrix2d = Eigen::Matrix2d;

// index lowering with signature (+,-)
inline Vector2d lower(const Vector2d& v) { return Vector2d(v[0], -v[1]); }
inline double mdot(const Vector2d& a, const Vector2d& b) {
  return a[0] * b[0] - a[1] * b[1];
}

struct ParticleState {
  double t = 0.0;
  double x = 0.0;
  Vector2d u{1.0, 0.0}; // 4-velocity, u.u = 1, u^0 >= 1
  double tau = 0.0;
  double S = 0.0;       // accumulated action, integral of L dtau
  Vector2d p{0.0, 0.0}; // generalized momentum k(rho0 u + j)
  double mass_shell_residual = 0.0; // |u.u - 1| before renormalization
};

using Trajectory = std::vector<ParticleState>;

// L = -k [rho0 (u.u)^{1/2} + u.j]
inline double lagrangian_L(const Vector2d& u, const Vector2d& j, double rho0,
                           double k) {
  if (rho0 <= 0) throw ModelError("lagrangian_L: rho0 must be positive");
  return -k * (rho0 * std::sqrt(mdot(u, u)) + mdot(u, j));
}

// p^a = k (rho0 u^a + j^a)
inline Vector2d generalized_momentum(const Vector2d& u, const Vector2d& j,
                                     double rho0, double k) {
  if (rho0 <= 0) throw ModelError("generalized_momentum: rho0 must be positive");
  return k * (rho0 * u + j);
}

// dL/dj^a = -k (u_a + j_a/rho0), index-lowered
inline Vector2d dL_dj(const Vector2d& u, const Vector2d& j, double rho0,
                      double k) {
  if (rho0 <= 0) throw ModelError("dL_dj: rho0 must be positive");
  return -k * (lower(u) + lower(j) / rho0);
}

// Interpolated current and its lab-frame gradients at one position.
struct FieldSample {
  Vector2d j;
  double rho0;
  Vector2d dj_dt; // d_t j^l
  Vector2d dj_dx; // d_x j^l
};

// Current field frozen at one time together with the derivative data the
// equation of motion needs. Built from a bracketing snapshot pair; `weight`
// places the evaluation time within the bracket (0 = start, 1/2 = midpoint,
// 1 = end). Momentum inversions must use the field at the same time level
// as p, or the mass-shell residual picks up a spurious O(dt) term.
class GuidanceField {
public:
  GuidanceField(const CurrentSnapshot& a, const CurrentSnapshot& b,
                const Grid& grid, double weight = 0.5)
      : grid_(grid) {
    const double dt = b.t - a.t;
    j_ = (1.0 - weight) * a.j + weight * b.j;
    dj_dt_ = (b.j - a.j) / dt;
    dj_dx_.resize(grid.nx, 2);
    for (int c = 0; c < 2; ++c)
      dj_dx_.col(c) = spectral_derivative(ArrayXd(j_.col(c)), grid);
    pmax_ = std::max(j_.col(0).maxCoeff(), 1e-300);
  }

  // Frozen single snapshot (no time derivative information).
  GuidanceField(const CurrentSnapshot& a, const Grid& grid) : grid_(grid) {
    j_ = a.j;
    dj_dt_ = VectorField::Zero(grid.nx, 2);
    dj_dx_.resize(grid.nx, 2);
    for (int c = 0; c < 2; ++c)
      dj_dx_.col(c) = spectral_derivative(ArrayXd(j_.col(c)), grid);
    pmax_ = std::max(j_.col(0).maxCoeff(), 1e-300);
  }

  FieldSample sample(double x) const {
    FieldSample s;
    s.j = interpolate(j_, x, grid_);
    s.dj_dt = interpolate(dj_dt_, x, grid_);
    s.dj_dx = interpolate(dj_dx_, x, grid_);
    const double jj = mdot(s.j, s.j);
    if (jj < kNodeRelTol * kNodeRelTol * pmax_ * pmax_)
      throw NodeError("GuidanceField: current node at particle position");
    s.rho0 = std::sqrt(jj);
    return s;
  }

  double node_floor() const { return kNodeRelTol * pmax_; }

private:
  Grid grid_;
  VectorField j_, dj_dt_, dj_dx_;
  double pmax_;
};

// u^a = j^a / rho0, renormalized to u.u = 1 after interpolation.
inline Vector2d guidance_velocity(const FieldSample& s) {
  Vector2d u = s.j / s.rho0;
  return u / std::sqrt(mdot(u, u));
}

inline Vector2d guidance_velocity(const CurrentSnapshot& snap, double x,
                                  const Grid& grid) {
  return guidance_velocity(GuidanceField(snap, grid).sample(x));
}

// One guidance step (statistical picture): midpoint integration of
// dx/dt = u^1/u^0 with dtau = dt/u^0 and dS = L dtau. The three guidance
// fields are taken by reference so ensembles can share them across samples.
inline ParticleState advance_trajectory(const ParticleState& state,
                                        const GuidanceField& begin,
                                        const GuidanceField& mid,
                                        const GuidanceField& end, double dt,
                                        const Grid& grid, double k) {
  const Vector2d u0 = guidance_velocity(begin.sample(state.x));
  const double x_mid = state.x + 0.5 * dt * u0[1] / u0[0];
  const FieldSample sm = mid.sample(x_mid);
  const Vector2d um = guidance_velocity(sm);

  ParticleState next = state;
  next.t = state.t + dt;
  next.x = grid.wrap(state.x + dt * um[1] / um[0]);
  const double dtau = dt / um[0];
  next.tau = state.tau + dtau;
  next.S = state.S + lagrangian_L(um, sm.j, sm.rho0, k) * dtau;
  const FieldSample se = end.sample(next.x);
  next.u = guidance_velocity(se);
  next.p = generalized_momentum(next.u, se.j, se.rho0, k);
  next.mass_shell_residual = 0.0;
  return next;
}

inline ParticleState advance_trajectory(const ParticleState& state,
                                        const CurrentSnapshot& snapA,
                                        const CurrentSnapshot& snapB,
                                        const Grid& grid, double k) {
  const GuidanceField begin(snapA, grid);
  const GuidanceField mid(snapA, snapB, grid);
  const GuidanceField end(snapB, grid);
  return advance_trajectory(state, begin, mid, end, snapB.t - snapA.t, grid, k);
}

namespace detail {
// u from p by inverting p = k(rho0 u + j); renormalized to the mass shell.
inline Vector2d velocity_from_momentum(const Vector2d& p, const FieldSample& s,
                                       double k, double* residual) {
  Vector2d u = (p / k - s.j) / s.rho0;
  const double uu = mdot(u, u);
  if (uu <= 0 || u[0] <= 0)
    throw ModelError("eom_step: momentum inversion left the mass shell");
  if (residual) *residual = std::abs(uu - 1.0);
  if (std::abs(uu - 1.0) > 1e-4)
    throw ModelError("eom_step: mass-shell drift above 1e-4, integration blow-up");
  return u / std::sqrt(uu);
}

// dp^a/dt = (k/u^0) (u_l + j_l/rho0) d^a j^l  with d^0 = d_t, d^1 = -d_x
inline Vector2d momentum_rate(const Vector2d& u, const FieldSample& s,
                              double k) {
  // w holds lowered components, so w_l V^l is a plain sum over entries
  const Vector2d w = lower(u) + lower(s.j) / s.rho0; // w_l
  const double f0 = w[0] * s.dj_dt[0] + w[1] * s.dj_dt[1];
  const double f1 = -(w[0] * s.dj_dx[0] + w[1] * s.dj_dx[1]);
  return Vector2d(k * f0 / u[0], k * f1 / u[0]);
}
} // namespace detail

// One step of the coupled (Lagrange) equation of motion, RK2 midpoint in
// lab time over the bracketing snapshot pair.
inline ParticleState eom_step(const ParticleState& state,
                              const CurrentSnapshot& snapA,
                              const CurrentSnapshot& snapB, const Grid& grid,
                              double k) {
  const double dt = snapB.t - snapA.t;
  const GuidanceField begin(snapA, snapB, grid, 0.0);
  const GuidanceField mid(snapA, snapB, grid, 0.5);

  const FieldSample s0 = begin.sample(state.x);
  double res0 = 0.0;
  const Vector2d u_begin = detail::velocity_from_momentum(state.p, s0, k, &res0);
  const double x_half = state.x + 0.5 * dt * u_begin[1] / u_begin[0];
  const Vector2d p_half = state.p + 0.5 * dt * detail::momentum_rate(u_begin, s0, k);

  const FieldSample sm = mid.sample(x_half);
  double resm = 0.0;
  const Vector2d u_half = detail::velocity_from_momentum(p_half, sm, k, &resm);

  ParticleState next = state;
  next.t = state.t + dt;
  next.x = grid.wrap(state.x + dt * u_half[1] / u_half[0]);
  next.p = state.p + dt * detail::momentum_rate(u_half, sm, k);
  const double dtau = dt / u_half[0];
  next.tau = state.tau + dtau;
  next.S = state.S + lagrangian_L(u_half, sm.j, sm.rho0, k) * dtau;
  const FieldSample se = GuidanceField(snapB, grid).sample(next.x);
  next.u = detail::velocity_from_momentum(next.p, se, k, &next.mass_shell_residual);
  // project p back onto the constraint manifold p = k(rho0 u + j); without
  // this the off-shell component of the RK2 truncation error compounds
  next.p = generalized_momentum(next.u, se.j, se.rho0, k);
  return next;
}

} // namespace pilot
