// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "qdephase/states.hpp"

// Generalized collective dephasing for an arbitrary field orientation n:
// every qubit couples to the same fluctuating field along n. The channel is
//   rho(t) = sum_{j,k} M_jk(t) Theta_j rho Theta_k,
// where Theta_j projects onto the subspace with j factors of the lower field
// eigenprojector and M_jk(t) = phi((j-k) t) is a Hermitian Toeplitz matrix
// built from the characteristic function phi of the frequency distribution.

namespace qdephase {

struct FieldOrientation {
  double nx = 0, ny = 0, nz = 1;

  // Normalizes on construction; a (near-)zero vector is rejected.
  static FieldOrientation normalized(double x, double y, double z);
};

struct SpectralModel {
  enum class Kind { StandardCauchy, ShiftedLorentzian };
  Kind kind = Kind::StandardCauchy;
  double x0 = 0.0;     // center (units of Gamma)
  double gamma = 1.0;  // width, > 0

  static SpectralModel standard_cauchy() { return {}; }
  static SpectralModel shifted_lorentzian(double x0, double gamma);

  // phi(s) = exp(i x0 s - gamma |s|); phi(0)=1, |phi|<=1, phi(-s)=conj phi(s).
  cxd phi(double s) const;
};

// Field eigenprojectors Lambda_pm = (I +- n.sigma)/2.
std::pair<Matrix, Matrix> projectors(const FieldOrientation& n);

// Theta_j = sum over the binom(N,j) distinct placements of j Lambda_- factors
// among N tensor slots (j = 0..N).
std::vector<Matrix> theta_operators(const FieldOrientation& n, int num_qubits);

// (N+1) x (N+1) matrix M_jk = phi((j-k) t).
Matrix toeplitz_matrix(const SpectralModel& spectral, int num_qubits, double t);

class DephasingChannel {
 public:
  DephasingChannel(int num_qubits, const FieldOrientation& orientation,
                   const SpectralModel& spectral = SpectralModel::standard_cauchy());

  int num_qubits() const { return num_qubits_; }
  const FieldOrientation& orientation() const { return orientation_; }
  const SpectralModel& spectral() const { return spectral_; }
  const std::vector<Matrix>& thetas() const { return thetas_; }

  Matrix toeplitz(double t) const;

  DensityMatrix evolve(const DensityMatrix& rho0, double t) const;

  // t -> infinity limit: sum_j Theta_j rho Theta_j (a fixed point of evolve).
  DensityMatrix asymptotic(const DensityMatrix& rho0) const;

 private:
  int num_qubits_;
  FieldOrientation orientation_;
  SpectralModel spectral_;
  std::vector<Matrix> thetas_;  // cached; depend only on the orientation
};

}  // namespace qdephase
