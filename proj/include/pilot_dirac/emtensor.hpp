#pragma once

// Canonical energy-momentum tensor of the coupled field/particle system
// and the divergence identities it satisfies. The interaction part is
// identically zero and is not represented.

#include "pilot_dirac/gamma.hpp"
#include "pilot_dirac/grid.hpp"
#include "pilot_dirac/particle.hpp"

#include <vector>

namespace pilot {

enum class TensorPart { Field, Particle, Total };

struct EMTensorField {
  double t = 0.0;
  TensorPart part = TensorPart::Field;
  // columns T00, T01, T10, T11; first index alpha, second beta
  Eigen::ArrayXXd T;

  ScalarField component(int alpha, int beta) const {
    return T.col(2 * alpha + beta);
  }
};

namespace detail {
// psibar gamma^b chi per site (complex before the reality projection)
inline ArrayXcd site_bilinear(const SpinorField& phi, const SpinorField& chi,
                              const GammaSet& g, int b) {
  const MatrixXcd M = g.gammas[0] * g.gammas[b];
  ArrayXcd acc = ArrayXcd::Zero(phi.rows());
  for (int r = 0; r < phi.cols(); ++r)
    for (int s = 0; s < phi.cols(); ++s)
      if (M(r, s) != Complex(0, 0))
        acc += M(r, s) * phi.col(r).conjugate() * chi.col(s);
  return acc;
}
} // namespace detail

// T_field^{ab} = (i/2)[phibar g^b (d^a phi) - (d^a phibar) g^b phi]
//              + g^{ab} (sigma0/rho0) (dS_l) j^l
// The derivative d^0 phi comes from central differences of the snapshot
// triple; d^1 = -d_x is spectral. dS is the lowered gradient of the action
// taken from the local combination -k(rho0 u_l + j_l).
inline EMTensorField t_field(const SpinorField& phi_prev,
                             const SpinorField& phi,
                             const SpinorField& phi_next, double dt, double t,
                             const VectorField& dS, const ScalarField& sigma0,
                             const ScalarField& rho0, const GammaSet& g,
                             const Grid& grid) {
  EMTensorField out;
  out.t = t;
  out.part = TensorPart::Field;
  out.T.resize(grid.nx, 4);

  SpinorField dphi_up[2]; // d^a phi
  dphi_up[0] = (phi_next - phi_prev) / (2.0 * dt);
  dphi_up[1] = -spectral_derivative(phi, grid);

  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      // (i/2)[z - z*] = -Im z with z = phibar g^b d^a phi (g^0 g^b hermitian)
      out.T.col(2 * a + b) = -detail::site_bilinear(phi, dphi_up[a], g, b).imag();
    }
  }

  // trace term, diagonal in (a, b)
  const ArrayXcd j0c = detail::site_bilinear(phi, phi, g, 0);
  const ArrayXcd j1c = detail::site_bilinear(phi, phi, g, 1);
  const ArrayXd dSj = dS.col(0) * j0c.real() + dS.col(1) * j1c.real();
  ArrayXd ratio = ArrayXd::Zero(grid.nx);
  const double sig_floor = 1e-14 * std::max(sigma0.maxCoeff(), 1e-300);
  for (int i = 0; i < grid.nx; ++i) {
    if (sigma0[i] <= sig_floor) continue;
    if (rho0[i] <= 0)
      throw NodeError("t_field: node under nonzero sigma0");
    ratio[i] = sigma0[i] / rho0[i];
  }
  out.T.col(0) += ratio * dSj;  // g^{00} = +1
  out.T.col(3) -= ratio * dSj;  // g^{11} = -1
  return out;
}

// Free-field tensor (sigma0 = 0)
inline EMTensorField t_field_free(const SpinorField& phi_prev,
                                  const SpinorField& phi,
                                  const SpinorField& phi_next, double dt,
                                  double t, const GammaSet& g,
                                  const Grid& grid) {
  const ScalarField zero = ScalarField::Zero(grid.nx);
  const ScalarField one = ScalarField::Ones(grid.nx);
  const VectorField dS0 = VectorField::Zero(grid.nx, 2);
  return t_field(phi_prev, phi, phi_next, dt, t, dS0, zero, one, g, grid);
}

// T_particle^{ab} = sigma0(x) p^a u^b
inline EMTensorField t_particle(const ScalarField& sigma0, const Vector2d& p,
                                const Vector2d& u, double t) {
  EMTensorField out;
  out.t = t;
  out.part = TensorPart::Particle;
  out.T.resize(sigma0.size(), 4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      out.T.col(2 * a + b) = sigma0 * (p[a] * u[b]);
  return out;
}

inline EMTensorField tensor_sum(const EMTensorField& a, const EMTensorField& b) {
  EMTensorField out = a;
  out.part = TensorPart::Total;
  out.T += b.T;
  return out;
}

// d_b T^{ab} per site for the middle entries of a uniformly spaced series;
// returns one nx-by-2 array (columns alpha = 0, 1) per interior time.
inline std::vector<VectorField> divergence(const std::vector<EMTensorField>& series,
                                           const Grid& grid) {
  if (series.size() < 3)
    throw std::invalid_argument("divergence: need >= 3 tensor snapshots");
  const double dt = series[1].t - series[0].t;
  for (std::size_t i = 1; i < series.size(); ++i)
    if (std::abs(series[i].t - series[i - 1].t - dt) > 1e-9 * std::abs(dt))
      throw std::invalid_argument("divergence: non-uniform snapshot spacing");
  std::vector<VectorField> out;
  out.reserve(series.size() - 2);
  for (std::size_t i = 1; i + 1 < series.size(); ++i) {
    VectorField d(grid.nx, 2);
    for (int a = 0; a < 2; ++a) {
      const ArrayXd dT0 =
          (series[i + 1].component(a, 0) - series[i - 1].component(a, 0)) /
          (2.0 * dt);
      const ArrayXd dT1 = spectral_derivative(series[i].component(a, 1), grid);
      d.col(a) = dT0 + dT1;
    }
    out.push_back(d);
  }
  return out;
}

inline double l2_norm(const VectorField& f, const Grid& grid) {
  return std::sqrt((f.square() * grid.dx).sum());
}

// symmetry defect ||T^{01} - T^{10}||, diagnostic only
inline double symmetry_defect(const EMTensorField& T, const Grid& grid) {
  const ArrayXd d = T.component(0, 1) - T.component(1, 0);
  return std::sqrt((d.square() * grid.dx).sum());
}

} // namespace pilot
