#pragma once

// Periodic 1D grid, spectral derivatives and cubic interpolation.
// Natural units throughout (hbar = c = 1).

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <stdexcept>

namespace pilot {

using ArrayXd = Eigen::ArrayXd;
using ArrayXcd = Eigen::ArrayXcd;
// nx rows, one column per spinor component
using SpinorField = Eigen::ArrayXXcd;
// nx rows, one column per spacetime index
using VectorField = Eigen::ArrayXXd;
using ScalarField = ArrayXd;

struct Grid {
  int nx = 1024;
  double dx = 0.1;

  Grid() = default;
  Grid(int nx_, double dx_) : nx(nx_), dx(dx_) {
    if (nx < 8 || (nx & (nx - 1)) != 0)
      throw std::invalid_argument("Grid: nx must be a power of two >= 8");
    if (dx <= 0) throw std::invalid_argument("Grid: dx must be positive");
  }

  double length() const { return nx * dx; }

  ArrayXd sites() const {
    return ArrayXd::LinSpaced(nx, 0.0, (nx - 1) * dx);
  }

  // FFT-ordered angular wavenumbers 2*pi*n/L, n = 0..nx/2-1, -nx/2..-1
  ArrayXd wavenumbers() const {
    ArrayXd k(nx);
    const double dk = 2.0 * M_PI / length();
    for (int i = 0; i < nx; ++i)
      k[i] = dk * (i < nx / 2 ? i : i - nx);
    return k;
  }

  double wrap(double x) const {
    const double L = length();
    x = std::fmod(x, L);
    return x < 0 ? x + L : x;
  }
};

namespace detail {
inline Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> engine; // caches plans per length
  return engine;
}
inline Eigen::VectorXcd fft(const ArrayXcd& f) {
  Eigen::VectorXcd in = f.matrix(), out;
  fft_engine().fwd(out, in);
  return out;
}
inline ArrayXcd ifft(const Eigen::VectorXcd& fh) {
  Eigen::VectorXcd out;
  fft_engine().inv(out, fh);
  return out.array();
}
} // namespace detail

// d/dx via Fourier multiplier ik; Nyquist mode zeroed.
inline ArrayXcd spectral_derivative(const ArrayXcd& f, const Grid& grid) {
  Eigen::VectorXcd fh = detail::fft(f);
  const ArrayXd k = grid.wavenumbers();
  const std::complex<double> I(0.0, 1.0);
  for (int i = 0; i < grid.nx; ++i) fh[i] *= I * k[i];
  fh[grid.nx / 2] = 0.0;
  return detail::ifft(fh);
}

inline ArrayXd spectral_derivative(const ArrayXd& f, const Grid& grid) {
  return spectral_derivative(ArrayXcd(f.cast<std::complex<double>>()), grid)
      .real();
}

inline SpinorField spectral_derivative(const SpinorField& f, const Grid& grid) {
  SpinorField out(f.rows(), f.cols());
  for (int c = 0; c < f.cols(); ++c)
    out.col(c) = spectral_derivative(ArrayXcd(f.col(c)), grid);
  return out;
}

// Periodic antiderivative of the zero-mean part plus an explicit linear
// term mean*x for the mean part; F(0) = 0.
inline ArrayXd spectral_antiderivative(const ArrayXd& f, const Grid& grid) {
  Eigen::VectorXcd fh = detail::fft(ArrayXcd(f.cast<std::complex<double>>()));
  const double mean = fh[0].real() / grid.nx;
  fh[0] = 0.0;
  const ArrayXd k = grid.wavenumbers();
  const std::complex<double> I(0.0, 1.0);
  for (int i = 1; i < grid.nx; ++i) fh[i] /= I * k[i];
  fh[grid.nx / 2] = 0.0;
  ArrayXd F = detail::ifft(fh).real();
  F += mean * grid.sites();
  F -= F[0];
  return F;
}

// Periodic cubic (Catmull-Rom) interpolation at an off-grid position.
inline double interpolate(const ArrayXd& f, double x, const Grid& grid) {
  const double s = grid.wrap(x) / grid.dx;
  const int i1 = static_cast<int>(std::floor(s));
  const double t = s - i1;
  const int n = grid.nx;
  const int i0 = (i1 + n - 1) % n, i2 = (i1 + 1) % n, i3 = (i1 + 2) % n;
  const double f0 = f[i0], f1 = f[i1 % n], f2 = f[i2], f3 = f[i3];
  const double a0 = -0.5 * f0 + 1.5 * f1 - 1.5 * f2 + 0.5 * f3;
  const double a1 = f0 - 2.5 * f1 + 2.0 * f2 - 0.5 * f3;
  const double a2 = -0.5 * f0 + 0.5 * f2;
  return ((a0 * t + a1) * t + a2) * t + f1;
}

inline Eigen::VectorXd interpolate(const VectorField& f, double x,
                                   const Grid& grid) {
  Eigen::VectorXd v(f.cols());
  for (int c = 0; c < f.cols(); ++c) v[c] = interpolate(ArrayXd(f.col(c)), x, grid);
  return v;
}

// Regularized particle rest density: sigma0(x) = N_eps(x - x_p) / u0 with
// N_eps a periodically wrapped unit-mass Gaussian of width eps.
inline ScalarField regularized_sigma0(double x_p, double u0, double eps,
                                      const Grid& grid) {
  if (eps < 2.0 * grid.dx)
    throw std::invalid_argument("regularized_sigma0: eps unresolvable, need eps >= 2*dx");
  if (u0 < 1.0)
    throw std::invalid_argument("regularized_sigma0: u0 must be >= 1");
  const double L = grid.length();
  const ArrayXd xs = grid.sites();
  ScalarField out = ScalarField::Zero(grid.nx);
  const double norm = 1.0 / (u0 * eps * std::sqrt(2.0 * M_PI));
  // wrap enough images for double-precision tails
  const int images = static_cast<int>(std::ceil(10.0 * eps / L)) + 1;
  for (int m = -images; m <= images; ++m) {
    const ArrayXd d = xs - (grid.wrap(x_p) + m * L);
    out += norm * (-0.5 * (d / eps).square()).exp();
  }
  return out;
}

inline double integrate(const ScalarField& f, const Grid& grid) {
  return f.sum() * grid.dx;
}

} // namespace pilot
