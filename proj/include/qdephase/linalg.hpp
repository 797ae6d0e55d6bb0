// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "qdephase/errors.hpp"

// Dense complex matrix kernels shared by all modules: Kronecker products,
// Hermitian eigendecomposition, and qubit-register partial transpose.
//
// Convention used everywhere: qubit 0 is the leftmost tensor factor and the
// most significant bit of a computational-basis index.

namespace qdephase {

using cxd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kHermTol = 1e-10;

Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();
Matrix identity2();

// Bloch-vector observable b.sigma (b need not be normalized here).
Matrix bloch_observable(double bx, double by, double bz);

struct QubitRegisterShape {
  int num_qubits = 0;
  int dim() const { return 1 << num_qubits; }
};

Matrix kron(const Matrix& a, const Matrix& b);

bool is_hermitian(const Matrix& m, double tol = kHermTol);
Matrix hermitize(const Matrix& m);

// Ascending eigenvalues of a Hermitian matrix. Throws NotHermitianError when
// max |m - m^dag| exceeds tol; the input is symmetrized before solving.
Eigen::VectorXd hermitian_eigenvalues(const Matrix& m, double tol = kHermTol);

struct Eigensystem {
  Eigen::VectorXd values;  // ascending
  Matrix vectors;          // columns
};
Eigensystem hermitian_eigensystem(const Matrix& m, double tol = kHermTol);

double min_eigenvalue(const Matrix& m, double tol = kHermTol);

// Partial transpose over the qubits in `subset_mask` (bit q set = qubit q,
// qubit 0 = MSB of the basis index).
Matrix partial_transpose(const Matrix& m, const QubitRegisterShape& shape,
                         std::uint32_t subset_mask);

std::uint32_t qubit_subset_mask(int num_qubits, const std::vector<int>& qubits);

double frobenius_norm(const Matrix& m);

// ---------------------------------------------------------------------------
// Orthonormal Hermitian basis of the d x d Hermitian matrices under the real
// inner product Re Tr(A B). Ordering: E_00..E_(d-1)(d-1), then for each pair
// i<j (row-major) the symmetric element (E_ij+E_ji)/sqrt2 followed by the
// antisymmetric element i(E_ij-E_ji)/sqrt2. Used by the SDP solver and the
// witness assembly.

int herm_basis_size(int dim);

// Adds coef * e_beta to m.
void herm_basis_add(Matrix& m, int beta, double coef);

// <e_beta, m> for Hermitian m.
double herm_basis_coeff(const Matrix& m, int beta);

std::vector<std::pair<int, double>> herm_basis_expand(const Matrix& m,
                                                      double prune = 1e-14);

Eigen::VectorXd herm_vech(const Matrix& m);
Matrix herm_unvech(int dim, const Eigen::VectorXd& v);

// Partial transpose acts on the Hermitian basis as a signed permutation:
// e_beta^{T_S} = sign * e_beta'. Returns (beta', sign).
std::pair<int, double> herm_basis_pt(int num_qubits, std::uint32_t subset_mask,
                                     int beta);

}  // namespace qdephase
