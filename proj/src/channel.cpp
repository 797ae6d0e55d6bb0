// SPDX-License-Identifier: Apache-2.0
#include "qdephase/channel.hpp"

#include <cmath>

namespace qdephase {

FieldOrientation FieldOrientation::normalized(double x, double y, double z) {
  const double n = std::sqrt(x * x + y * y + z * z);
  if (n < 1e-12)
    throw InvalidStateError("field orientation must be a nonzero vector");
  return {x / n, y / n, z / n};
}

SpectralModel SpectralModel::shifted_lorentzian(double x0, double gamma) {
  if (!(gamma > 0.0)) throw InvalidStateError("spectral width must be positive");
  return {Kind::ShiftedLorentzian, x0, gamma};
}

cxd SpectralModel::phi(double s) const {
  const double x0_ = kind == Kind::StandardCauchy ? 0.0 : x0;
  const double g = kind == Kind::StandardCauchy ? 1.0 : gamma;
  return std::exp(cxd{-g * std::abs(s), x0_ * s});
}

std::pair<Matrix, Matrix> projectors(const FieldOrientation& n) {
  Matrix ns = bloch_observable(n.nx, n.ny, n.nz);
  Matrix id = identity2();
  return {0.5 * (id + ns), 0.5 * (id - ns)};
}

std::vector<Matrix> theta_operators(const FieldOrientation& n, int num_qubits) {
  if (num_qubits < 2 || num_qubits > 4)
    throw UnsupportedQubitCountError("qubit count must be 2, 3 or 4");
  auto [lp, lm] = projectors(n);
  const int d = 1 << num_qubits;
  std::vector<Matrix> thetas(num_qubits + 1, Matrix::Zero(d, d));
  // subsets of tensor slots holding Lambda_-; slot 0 is the leftmost factor
  for (int subset = 0; subset < (1 << num_qubits); ++subset) {
    Matrix term = Matrix::Identity(1, 1);
    for (int slot = 0; slot < num_qubits; ++slot) {
      const bool minus = subset & (1 << (num_qubits - 1 - slot));
      term = kron(term, minus ? lm : lp);
    }
    thetas[__builtin_popcount(static_cast<unsigned>(subset))] += term;
  }
  return thetas;
}

Matrix toeplitz_matrix(const SpectralModel& spectral, int num_qubits, double t) {
  if (t < 0.0) throw InvalidStateError("time must be nonnegative");
  const int n = num_qubits + 1;
  Matrix m(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) m(j, k) = spectral.phi((j - k) * t);
  return m;
}

DephasingChannel::DephasingChannel(int num_qubits,
                                   const FieldOrientation& orientation,
                                   const SpectralModel& spectral)
    : num_qubits_(num_qubits),
      orientation_(orientation),
      spectral_(spectral),
      thetas_(theta_operators(orientation, num_qubits)) {}

Matrix DephasingChannel::toeplitz(double t) const {
  return toeplitz_matrix(spectral_, num_qubits_, t);
}

namespace {

void check_input(const DephasingChannel& ch, const DensityMatrix& rho) {
  if (rho.num_qubits != ch.num_qubits())
    throw DimensionMismatchError("state qubit count does not match channel");
  validate_density_matrix(rho);
}

}  // namespace

DensityMatrix DephasingChannel::evolve(const DensityMatrix& rho0,
                                       double t) const {
  check_input(*this, rho0);
  const Matrix m = toeplitz(t);
  const int d = rho0.dim();
  // Theta_j rho precomputed once per j.
  std::vector<Matrix> left(thetas_.size());
  for (std::size_t j = 0; j < thetas_.size(); ++j)
    left[j] = thetas_[j] * rho0.matrix;
  Matrix out = Matrix::Zero(d, d);
  for (std::size_t j = 0; j < thetas_.size(); ++j)
    for (std::size_t k = 0; k < thetas_.size(); ++k)
      out += m(j, k) * (left[j] * thetas_[k]);
  return {num_qubits_, hermitize(out)};
}

DensityMatrix DephasingChannel::asymptotic(const DensityMatrix& rho0) const {
  check_input(*this, rho0);
  const int d = rho0.dim();
  Matrix out = Matrix::Zero(d, d);
  for (const Matrix& th : thetas_) out += th * rho0.matrix * th;
  return {num_qubits_, hermitize(out)};
}

}  // namespace qdephase
