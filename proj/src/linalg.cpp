// SPDX-License-Identifier: Apache-2.0
#include "qdephase/linalg.hpp"

#include <cmath>

namespace qdephase {

namespace {
constexpr cxd kI{0.0, 1.0};
const double kSqrt2Inv = 1.0 / std::sqrt(2.0);
}  // namespace

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Matrix identity2() { return Matrix::Identity(2, 2); }

Matrix bloch_observable(double bx, double by, double bz) {
  return bx * pauli_x() + by * pauli_y() + bz * pauli_z();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  const Eigen::Index ar = a.rows(), ac = a.cols();
  const Eigen::Index br = b.rows(), bc = b.cols();
  Matrix out(ar * br, ac * bc);
  for (Eigen::Index i = 0; i < ar; ++i)
    for (Eigen::Index j = 0; j < ac; ++j)
      out.block(i * br, j * bc, br, bc) = a(i, j) * b;
  return out;
}

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

Eigen::VectorXd hermitian_eigenvalues(const Matrix& m, double tol) {
  if (!is_hermitian(m, tol))
    throw NotHermitianError("hermitian_eigenvalues: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(m),
                                           Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalFailureError("hermitian_eigenvalues: solver failed");
  return es.eigenvalues();
}

Eigensystem hermitian_eigensystem(const Matrix& m, double tol) {
  if (!is_hermitian(m, tol))
    throw NotHermitianError("hermitian_eigensystem: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(m));
  if (es.info() != Eigen::Success)
    throw NumericalFailureError("hermitian_eigensystem: solver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

double min_eigenvalue(const Matrix& m, double tol) {
  return hermitian_eigenvalues(m, tol)(0);
}

namespace {

// Moves the subset bits of `from` into `base`, leaving the rest of `base`.
inline int swap_bits(int base, int from, int bits) {
  return (base & ~bits) | (from & bits);
}

}  // namespace

Matrix partial_transpose(const Matrix& m, const QubitRegisterShape& shape,
                         std::uint32_t subset_mask) {
  const int d = shape.dim();
  if (m.rows() != d || m.cols() != d)
    throw ShapeMismatchError("partial_transpose: matrix dim does not match 2^N");
  if (subset_mask >= (1u << shape.num_qubits))
    throw ShapeMismatchError("partial_transpose: subset outside register");
  // Qubit q occupies bit (N-1-q); a subset mask over qubits maps to a bit
  // mask over indices by the same reversal.
  int bits = 0;
  for (int q = 0; q < shape.num_qubits; ++q)
    if (subset_mask & (1u << q)) bits |= 1 << (shape.num_qubits - 1 - q);
  Matrix out(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      out(swap_bits(i, j, bits), swap_bits(j, i, bits)) = m(i, j);
  return out;
}

std::uint32_t qubit_subset_mask(int num_qubits, const std::vector<int>& qubits) {
  std::uint32_t mask = 0;
  for (int q : qubits) {
    if (q < 0 || q >= num_qubits)
      throw ShapeMismatchError("qubit index outside register");
    mask |= 1u << q;
  }
  return mask;
}

double frobenius_norm(const Matrix& m) { return m.norm(); }

int herm_basis_size(int dim) { return dim * dim; }

namespace {

// beta -> (i, j, antisym) with i<=j.
inline void basis_decode(int dim, int beta, int& i, int& j, bool& anti) {
  if (beta < dim) {
    i = j = beta;
    anti = false;
    return;
  }
  int rest = beta - dim;
  int pair = rest / 2;
  anti = rest % 2 == 1;
  // pair index in row-major i<j order
  i = 0;
  int count = dim - 1;
  while (pair >= count) {
    pair -= count;
    ++i;
    --count;
  }
  j = i + 1 + pair;
}

inline int basis_encode(int dim, int i, int j, bool anti) {
  if (i == j) return i;
  // offset of pair (i,j), i<j
  int pair = i * dim - i * (i + 1) / 2 + (j - i - 1);
  return dim + 2 * pair + (anti ? 1 : 0);
}

}  // namespace

void herm_basis_add(Matrix& m, int beta, double coef) {
  const int dim = static_cast<int>(m.rows());
  int i, j;
  bool anti;
  basis_decode(dim, beta, i, j, anti);
  if (i == j) {
    m(i, i) += coef;
  } else if (!anti) {
    m(i, j) += coef * kSqrt2Inv;
    m(j, i) += coef * kSqrt2Inv;
  } else {
    m(i, j) += coef * kSqrt2Inv * kI;
    m(j, i) -= coef * kSqrt2Inv * kI;
  }
}

double herm_basis_coeff(const Matrix& m, int beta) {
  const int dim = static_cast<int>(m.rows());
  int i, j;
  bool anti;
  basis_decode(dim, beta, i, j, anti);
  if (i == j) return m(i, i).real();
  if (!anti) return std::sqrt(2.0) * m(i, j).real();
  return std::sqrt(2.0) * m(i, j).imag();
}

std::vector<std::pair<int, double>> herm_basis_expand(const Matrix& m,
                                                      double prune) {
  const int n = herm_basis_size(static_cast<int>(m.rows()));
  std::vector<std::pair<int, double>> out;
  for (int beta = 0; beta < n; ++beta) {
    double c = herm_basis_coeff(m, beta);
    if (std::abs(c) > prune) out.emplace_back(beta, c);
  }
  return out;
}

Eigen::VectorXd herm_vech(const Matrix& m) {
  const int d = static_cast<int>(m.rows());
  const double s = std::sqrt(2.0);
  Eigen::VectorXd v(d * d);
  for (int i = 0; i < d; ++i) v(i) = m(i, i).real();
  int idx = d;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      v(idx++) = s * m(i, j).real();
      v(idx++) = s * m(i, j).imag();
    }
  return v;
}

Matrix herm_unvech(int dim, const Eigen::VectorXd& v) {
  const double s = kSqrt2Inv;
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i) m(i, i) = v(i);
  int idx = dim;
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      const double re = v(idx++) * s;
      const double im = v(idx++) * s;
      m(i, j) = cxd{re, im};
      m(j, i) = cxd{re, -im};
    }
  return m;
}

std::pair<int, double> herm_basis_pt(int num_qubits, std::uint32_t subset_mask,
                                     int beta) {
  const int dim = 1 << num_qubits;
  int bits = 0;
  for (int q = 0; q < num_qubits; ++q)
    if (subset_mask & (1u << q)) bits |= 1 << (num_qubits - 1 - q);
  int i, j;
  bool anti;
  basis_decode(dim, beta, i, j, anti);
  if (i == j) return {beta, 1.0};
  int ip = swap_bits(i, j, bits);
  int jp = swap_bits(j, i, bits);
  double sign = 1.0;
  if (ip > jp) {
    std::swap(ip, jp);
    if (anti) sign = -1.0;  // orientation of the antisymmetric element flips
  }
  return {basis_encode(dim, ip, jp, anti), sign};
}

}  // namespace qdephase
