#pragma once

// Spinor field evolution on the periodic grid (1+1D, two components).
//
// Modes:
//   FREE            i g^a d_a psi - m psi = 0
//   PHASE_SOURCED   i g^a d_a psi - m psi = -(d_a S) g^a psi
//   EXTERNAL_POT    i g^a d_a psi - m psi = A_a g^a psi   (A = -dS matches
//                                                          the phase-sourced run)
//   COUPLED         see coupled.hpp
//
// In Hamiltonian form i d_t psi = (H + V) psi with
//   H(k) = [[m, ik], [-ik, -m]]          (free part, exact per mode)
//   V    = -(d_0 S) I + (d_1 S) sigma_2  (local part, exact per site)
// Both factors are unitary; Strang composition is 2nd order in dt.

#include "pilot_dirac/gamma.hpp"
#include "pilot_dirac/grid.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace pilot {

struct SolverConfig {
  double dt = 0.01;
  double m = 1.0;
  double k = 1.0;   // particle-field coupling, dimension M L^3
  double eps = 0.4; // sigma0 regularization width
  int steps = 100;

  void validate() const {
    if (dt <= 0) throw std::invalid_argument("SolverConfig: dt must be positive");
    if (m < 0) throw std::invalid_argument("SolverConfig: m must be >= 0");
  }
};

struct FieldSnapshot {
  double t = 0.0;
  SpinorField psi;
};

// Exact mode-wise propagator for the free Dirac Hamiltonian,
// exp(-i H(k) dt) = cos(E dt) I - i sin(E dt) H(k)/E, E = sqrt(k^2 + m^2).
class FreeStepper {
public:
  FreeStepper(const Grid& grid, double dt, double m) : grid_(grid) {
    const ArrayXd k = grid.wavenumbers();
    const ArrayXd E = (k.square() + m * m).sqrt();
    const ArrayXd c = (E * dt).cos();
    // sinc form keeps m = k = 0 finite
    ArrayXd s(grid.nx);
    for (int i = 0; i < grid.nx; ++i)
      s[i] = E[i] > 0 ? std::sin(E[i] * dt) / E[i] : dt;
    const Complex I(0.0, 1.0);
    u11_ = c.cast<Complex>() - I * (s * m).cast<Complex>();
    u12_ = (s * k).cast<Complex>();
    u21_ = -u12_;
    u22_ = c.cast<Complex>() + I * (s * m).cast<Complex>();
  }

  void step(SpinorField& psi) const {
    Eigen::VectorXcd a = detail::fft(ArrayXcd(psi.col(0)));
    Eigen::VectorXcd b = detail::fft(ArrayXcd(psi.col(1)));
    const ArrayXcd a2 = u11_ * a.array() + u12_ * b.array();
    const ArrayXcd b2 = u21_ * a.array() + u22_ * b.array();
    psi.col(0) = detail::ifft(a2.matrix());
    psi.col(1) = detail::ifft(b2.matrix());
  }

private:
  Grid grid_;
  ArrayXcd u11_, u12_, u21_, u22_;
};

inline SpinorField step_free(const SpinorField& psi, const Grid& grid,
                             const SolverConfig& cfg) {
  SpinorField out = psi;
  FreeStepper(grid, cfg.dt, cfg.m).step(out);
  return out;
}

// exp(-i V tau) with V = a I + b sigma_2, a = -dS_0, b = dS_1 per site.
inline void phase_kick(SpinorField& psi, const VectorField& dS, double tau) {
  if (dS.rows() != psi.rows() || dS.cols() != 2)
    throw std::invalid_argument("phase_kick: dS shape mismatch");
  const Complex I(0.0, 1.0);
  const ArrayXcd phase = (I * tau * dS.col(0)).exp(); // e^{+i dS_0 tau}
  const ArrayXd bt = dS.col(1) * tau;
  const ArrayXd cb = bt.cos(), sb = bt.sin();
  const ArrayXcd p1 = psi.col(0), p2 = psi.col(1);
  psi.col(0) = phase * (cb.cast<Complex>() * p1 - sb.cast<Complex>() * p2);
  psi.col(1) = phase * (sb.cast<Complex>() * p1 + cb.cast<Complex>() * p2);
}

// Strang step for the phase-sourced equation; dS sampled at the beginning
// and end of the step keeps 2nd order for time-dependent S.
inline SpinorField step_phase_sourced(const SpinorField& psi,
                                      const VectorField& dS_begin,
                                      const VectorField& dS_end,
                                      const Grid& grid,
                                      const SolverConfig& cfg) {
  SpinorField out = psi;
  phase_kick(out, dS_begin, 0.5 * cfg.dt);
  FreeStepper(grid, cfg.dt, cfg.m).step(out);
  phase_kick(out, dS_end, 0.5 * cfg.dt);
  return out;
}

inline SpinorField step_phase_sourced(const SpinorField& psi,
                                      const VectorField& dS, const Grid& grid,
                                      const SolverConfig& cfg) {
  return step_phase_sourced(psi, dS, dS, grid, cfg);
}

// External 4-potential mode (A_a j^a coupling): same local matrix as the
// phase-sourced source with dS = -A.
inline SpinorField step_external_potential(const SpinorField& psi,
                                           const VectorField& A,
                                           const Grid& grid,
                                           const SolverConfig& cfg) {
  return step_phase_sourced(psi, VectorField(-A), grid, cfg);
}

// Positive-energy eigenspinor of H(p), normalized to u^dag u = 1.
inline Eigen::Vector2cd positive_energy_spinor(double p, double m) {
  const double E = std::sqrt(p * p + m * m);
  if (E == 0.0) return Eigen::Vector2cd(1.0, 0.0);
  const Complex I(0.0, 1.0);
  Eigen::Vector2cd u(E + m, -I * p);
  return u / std::sqrt(2.0 * E * (E + m));
}

// Snap a requested momentum to the nearest lattice mode 2*pi*n/L.
inline double lattice_momentum(double p, const Grid& grid) {
  const double dk = 2.0 * M_PI / grid.length();
  return dk * std::round(p / dk);
}

struct Scenario {
  enum Kind { PlaneWave, GaussianPacket, Superposition };
  Kind kind = PlaneWave;
  double p = 0.0;
  double p2 = 0.0;   // second momentum (Superposition)
  double x0 = 0.0;   // packet center
  double width = 1.0;
  double w1 = 1.0, w2 = 1.0; // superposition weights
};

// Initial data, normalized so that the P integral is one; plane waves use
// positive-energy spinors; packets are projected mode-wise onto the
// positive-energy subspace.
inline SpinorField init_scenario(const Scenario& sc, const Grid& grid,
                                 double m) {
  const ArrayXd xs = grid.sites();
  const Complex I(0.0, 1.0);
  SpinorField psi(grid.nx, 2);
  switch (sc.kind) {
    case Scenario::PlaneWave: {
      const double p = lattice_momentum(sc.p, grid);
      const Eigen::Vector2cd u = positive_energy_spinor(p, m);
      const ArrayXcd ph = (I * p * xs).exp();
      psi.col(0) = u[0] * ph;
      psi.col(1) = u[1] * ph;
      break;
    }
    case Scenario::Superposition: {
      const double pa = lattice_momentum(sc.p, grid);
      const double pb = lattice_momentum(sc.p2, grid);
      const Eigen::Vector2cd ua = positive_energy_spinor(pa, m);
      const Eigen::Vector2cd ub = positive_energy_spinor(pb, m);
      const ArrayXcd pha = (I * pa * xs).exp(), phb = (I * pb * xs).exp();
      psi.col(0) = sc.w1 * ua[0] * pha + sc.w2 * ub[0] * phb;
      psi.col(1) = sc.w1 * ua[1] * pha + sc.w2 * ub[1] * phb;
      break;
    }
    case Scenario::GaussianPacket: {
      if (sc.width < 2.0 * grid.dx)
        throw std::invalid_argument("init_scenario: packet width unresolvable");
      const ArrayXd d = xs - sc.x0;
      // periodic images of the envelope
      ArrayXd env = ArrayXd::Zero(grid.nx);
      for (int im = -2; im <= 2; ++im)
        env += (-((d - im * grid.length()) / (2.0 * sc.width)).square()).exp();
      // the carrier must be lattice-commensurate: a non-periodic phase has a
      // seam jump under the envelope tail that pollutes the whole spectrum
      const double p = lattice_momentum(sc.p, grid);
      const ArrayXcd base = env.cast<Complex>() * (I * p * xs).exp();
      // project each Fourier mode onto the positive-energy eigenspinor
      Eigen::VectorXcd ah = detail::fft(ArrayXcd(base));
      const ArrayXd ks = grid.wavenumbers();
      Eigen::VectorXcd bh = Eigen::VectorXcd::Zero(grid.nx);
      for (int i = 0; i < grid.nx; ++i) {
        const Eigen::Vector2cd u = positive_energy_spinor(ks[i], m);
        const Complex amp = std::conj(u[0]) * ah[i];
        ah[i] = amp * u[0];
        bh[i] = amp * u[1];
      }
      psi.col(0) = detail::ifft(ah);
      psi.col(1) = detail::ifft(bh);
      break;
    }
  }
  const double norm = std::sqrt(psi.abs2().sum() * grid.dx);
  if (norm <= 0) throw std::runtime_error("init_scenario: empty field");
  psi /= norm;
  return psi;
}

// L2 residual of the active field equation over a snapshot series,
// central time differences + spectral space derivative; max over interior
// times. `source` returns the dS_a lattice field at snapshot index i
// (empty optional = free equation). For EXTERNAL_POTENTIAL pass dS = -A.
inline double dirac_residual(
    const std::vector<FieldSnapshot>& snaps, const Grid& grid,
    const GammaSet& g, double m,
    const std::function<std::optional<VectorField>(std::size_t)>& source = {}) {
  if (snaps.size() < 3)
    throw std::invalid_argument("dirac_residual: need >= 3 snapshots");
  const double dt = snaps[1].t - snaps[0].t;
  const int nc = g.spinor_size();
  const Complex I(0.0, 1.0);
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < snaps.size(); ++i) {
    const SpinorField& psi = snaps[i].psi;
    const SpinorField dpsi_t = (snaps[i + 1].psi - snaps[i - 1].psi) / (2.0 * dt);
    const SpinorField dpsi_x = spectral_derivative(psi, grid);
    SpinorField R = SpinorField::Zero(grid.nx, nc);
    for (int r = 0; r < nc; ++r) {
      for (int s = 0; s < nc; ++s) {
        if (g.gammas[0](r, s) != Complex(0, 0))
          R.col(r) += I * g.gammas[0](r, s) * dpsi_t.col(s);
        if (g.gammas[1](r, s) != Complex(0, 0))
          R.col(r) += I * g.gammas[1](r, s) * dpsi_x.col(s);
      }
      R.col(r) -= m * psi.col(r);
    }
    if (source) {
      if (auto dS = source(i)) {
        for (int a = 0; a < 2; ++a)
          for (int r = 0; r < nc; ++r)
            for (int s = 0; s < nc; ++s)
              if (g.gammas[a](r, s) != Complex(0, 0))
                R.col(r) += g.gammas[a](r, s) *
                            ArrayXcd(dS->col(a).cast<Complex>() * psi.col(s));
      }
    }
    worst = std::max(worst, std::sqrt(R.abs2().sum() * grid.dx));
  }
  return worst;
}

} // namespace pilot
