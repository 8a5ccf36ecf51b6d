#pragma once

// Currents, densities and continuity diagnostics on the lattice.

#include "pilot_dirac/gamma.hpp"
#include "pilot_dirac/grid.hpp"

#include <stdexcept>
#include <vector>

namespace pilot {

struct CurrentSnapshot {
  double t = 0.0;
  VectorField j;     // j^alpha = psibar gamma^alpha psi, per site
  ScalarField rho0;  // sqrt(j.j)
  ScalarField P;     // j^0 = psi^dagger psi
  Eigen::Array<bool, Eigen::Dynamic, 1> node_mask;
};

constexpr double kNodeRelTol = 1e-10;

// Per-site bilinear current; vectorized over sites for each nonzero entry
// of gamma^0 gamma^a.
inline CurrentSnapshot current_field(const SpinorField& psi, const GammaSet& g,
                                     const Grid& grid, double t = 0.0) {
  const int nc = g.spinor_size();
  if (psi.cols() != nc || psi.rows() != grid.nx)
    throw std::invalid_argument("current_field: field/gamma shape mismatch");
  CurrentSnapshot snap;
  snap.t = t;
  snap.j.resize(grid.nx, g.dim);
  for (int a = 0; a < g.dim; ++a) {
    const MatrixXcd M = g.gammas[0] * g.gammas[a]; // psibar gamma^a = psi^dag M
    ArrayXcd acc = ArrayXcd::Zero(grid.nx);
    for (int r = 0; r < nc; ++r)
      for (int s = 0; s < nc; ++s)
        if (M(r, s) != Complex(0, 0))
          acc += M(r, s) * psi.col(r).conjugate() * psi.col(s);
    const double scale = std::max(psi.abs2().rowwise().sum().maxCoeff(), 1e-300);
    if ((acc.imag().abs() > 1e-12 * scale).any())
      throw std::runtime_error("current_field: non-real current component");
    snap.j.col(a) = acc.real();
  }
  snap.P = snap.j.col(0);
  ArrayXd jj = snap.j.col(0).square();
  for (int a = 1; a < g.dim; ++a) jj -= snap.j.col(a).square();
  const double pmax = std::max(snap.P.maxCoeff(), 1e-300);
  if ((jj < -1e-12 * pmax * pmax).any())
    throw std::runtime_error("current_field: spacelike current on the lattice");
  snap.rho0 = jj.max(0.0).sqrt();
  snap.node_mask = snap.rho0 < kNodeRelTol * pmax;
  return snap;
}

// Max over interior times of the L2 norm of d_t j^0 + d_x j^1;
// central time differences, spectral space derivative.
inline double continuity_residual(const std::vector<CurrentSnapshot>& snaps,
                                  const Grid& grid) {
  if (snaps.size() < 3)
    throw std::invalid_argument("continuity_residual: need >= 3 snapshots");
  const double dt = snaps[1].t - snaps[0].t;
  for (std::size_t i = 1; i < snaps.size(); ++i)
    if (std::abs(snaps[i].t - snaps[i - 1].t - dt) > 1e-9 * std::abs(dt))
      throw std::invalid_argument("continuity_residual: non-uniform snapshot spacing");
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < snaps.size(); ++i) {
    const ArrayXd dj0 =
        (snaps[i + 1].j.col(0) - snaps[i - 1].j.col(0)) / (2.0 * dt);
    const ArrayXd dj1 = spectral_derivative(ArrayXd(snaps[i].j.col(1)), grid);
    const double norm = std::sqrt(((dj0 + dj1).square() * grid.dx).sum());
    worst = std::max(worst, norm);
  }
  return worst;
}

// Normalization and positivity witnesses for the Born weight P.
inline std::pair<double, double> born_weight_check(const CurrentSnapshot& snap,
                                                   const Grid& grid) {
  return {integrate(snap.P, grid), snap.P.minCoeff()};
}

} // namespace pilot
