#pragma once

// Dirac gamma matrices, Minkowski metric helpers and spinor bilinears.
//
// Representation (dim = 2):
//   gamma^0 = sigma_3 = [1  0; 0 -1]
//   gamma^1 = i sigma_1 = [0  i; i  0]
// Metric signature (+,-) resp. (+,-,-,-).

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <vector>

namespace pilot {

using Complex = std::complex<double>;
using MatrixXcd = Eigen::MatrixXcd;
using VectorXcd = Eigen::VectorXcd;
using VectorXd = Eigen::VectorXd;
using RowVectorXcd = Eigen::RowVectorXcd;

struct GammaSet {
  int dim;                       // spacetime dimension, 2 or 4
  std::vector<MatrixXcd> gammas; // gamma^0 .. gamma^{dim-1}
  VectorXd metric;               // diagonal of g^{alpha beta}: (+1,-1,...)

  int spinor_size() const { return dim == 2 ? 2 : 4; }
};

inline GammaSet make_gamma_set(int dim) {
  if (dim != 2 && dim != 4)
    throw std::invalid_argument("make_gamma_set: dim must be 2 or 4");
  GammaSet g;
  g.dim = dim;
  g.metric = VectorXd::Ones(dim);
  g.metric.tail(dim - 1).setConstant(-1.0);
  const Complex I(0.0, 1.0);
  if (dim == 2) {
    MatrixXcd g0(2, 2), g1(2, 2);
    g0 << 1, 0, 0, -1;       // sigma_3
    g1 << 0, I, I, 0;        // i sigma_1
    g.gammas = {g0, g1};
  } else {
    // standard Dirac representation
    MatrixXcd s1(2, 2), s2(2, 2), s3(2, 2), id2(2, 2), zero(2, 2);
    s1 << 0, 1, 1, 0;
    s2 << 0, -I, I, 0;
    s3 << 1, 0, 0, -1;
    id2.setIdentity();
    zero.setZero();
    MatrixXcd g0(4, 4);
    g0 << id2, zero, zero, -id2;
    g.gammas = {g0};
    const MatrixXcd sigmas[3] = {s1, s2, s3};
    for (int i = 0; i < 3; ++i) {
      MatrixXcd gi(4, 4);
      gi << zero, sigmas[i], -sigmas[i], zero;
      g.gammas.push_back(gi);
    }
  }
  return g;
}

// psi-bar = psi^dagger gamma^0
inline RowVectorXcd adjoint(const VectorXcd& psi, const GammaSet& g) {
  return psi.adjoint() * g.gammas[0];
}

// j^alpha = psi-bar gamma^alpha psi. Components are real up to round-off;
// a relative imaginary residue above `imag_tol` signals a broken gamma set.
inline VectorXd bilinear_current(const VectorXcd& psi, const GammaSet& g,
                                 double imag_tol = 1e-12) {
  const RowVectorXcd bar = adjoint(psi, g);
  VectorXd j(g.dim);
  const double scale = std::max(psi.squaredNorm(), 1e-300);
  for (int a = 0; a < g.dim; ++a) {
    const Complex val = bar * g.gammas[a] * psi;
    if (std::abs(val.imag()) > imag_tol * scale)
      throw std::runtime_error("bilinear_current: non-real bilinear");
    j[a] = val.real();
  }
  return j;
}

// a_alpha b^alpha with signature (+,-,...)
inline double minkowski_dot(const VectorXd& a, const VectorXd& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("minkowski_dot: size mismatch");
  return 2.0 * a[0] * b[0] - a.dot(b);
}

// rho_0 = sqrt(j.j); spacelike j beyond tolerance is a model violation.
// |j.j| below tolerance counts as a node and returns 0.
inline double current_magnitude(const VectorXd& j, double tol = 1e-12,
                                bool* node = nullptr) {
  const double jj = minkowski_dot(j, j);
  if (node) *node = false;
  if (jj < -tol)
    throw std::runtime_error("current_magnitude: spacelike current");
  if (std::abs(jj) < tol) {
    if (node) *node = true;
    return 0.0;
  }
  return std::sqrt(jj);
}

} // namespace pilot
