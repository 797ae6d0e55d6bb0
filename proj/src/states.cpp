// SPDX-License-Identifier: Apache-2.0
#include "qdephase/states.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace qdephase {

namespace {

void require_qubits(int n) {
  if (n < 2 || n > 4)
    throw UnsupportedQubitCountError("qubit count must be 2, 3 or 4");
}

int log2_dim(Eigen::Index d) {
  int n = 0;
  while ((Eigen::Index{1} << n) < d) ++n;
  return n;
}

}  // namespace

void validate_density_matrix(const DensityMatrix& rho) {
  const int d = rho.dim();
  if (rho.matrix.rows() != d || rho.matrix.cols() != d)
    throw InvalidStateError("density matrix dim does not match 2^N");
  if (!is_hermitian(rho.matrix, 1e-10))
    throw InvalidStateError("density matrix is not Hermitian");
  if (std::abs(rho.matrix.trace().real() - 1.0) > 1e-12 ||
      std::abs(rho.matrix.trace().imag()) > 1e-12)
    throw InvalidStateError("density matrix trace differs from 1");
  if (min_eigenvalue(rho.matrix) < -1e-9)
    throw InvalidStateError("density matrix has a negative eigenvalue");
}

DensityMatrix density_from_pure(const PureState& psi) {
  return {psi.num_qubits, psi.projector()};
}

PureState ghz(int num_qubits) {
  require_qubits(num_qubits);
  PureState s{num_qubits, Vector::Zero(1 << num_qubits)};
  const double a = 1.0 / std::sqrt(2.0);
  s.amplitudes(0) = a;
  s.amplitudes(s.dim() - 1) = a;
  return s;
}

PureState w_state(int num_qubits) {
  require_qubits(num_qubits);
  PureState s{num_qubits, Vector::Zero(1 << num_qubits)};
  const double a = 1.0 / std::sqrt(static_cast<double>(num_qubits));
  // |0..01>, |0..10>, ..., |10..0>
  for (int k = 0; k < num_qubits; ++k) s.amplitudes(1 << k) = a;
  return s;
}

namespace {

PureState four_qubit_state(std::initializer_list<std::pair<int, double>> amps) {
  PureState s{4, Vector::Zero(16)};
  for (auto [idx, a] : amps) s.amplitudes(idx) = a;
  s.amplitudes.normalize();
  return s;
}

}  // namespace

PureState dicke24() {
  const double a = 1.0 / std::sqrt(6.0);
  // all Hamming-weight-2 basis states
  return four_qubit_state({{0b0011, a},
                           {0b1100, a},
                           {0b0101, a},
                           {0b0110, a},
                           {0b1001, a},
                           {0b1010, a}});
}

PureState singlet4() {
  const double a = 1.0 / std::sqrt(3.0);
  return four_qubit_state({{0b0011, a},
                           {0b1100, a},
                           {0b0101, -0.5 * a},
                           {0b0110, -0.5 * a},
                           {0b1001, -0.5 * a},
                           {0b1010, -0.5 * a}});
}

PureState cluster4() {
  return four_qubit_state(
      {{0b0000, 0.5}, {0b0011, 0.5}, {0b1100, 0.5}, {0b1111, -0.5}});
}

PureState chi4() {
  const double a = 1.0 / std::sqrt(6.0);
  return four_qubit_state({{0b1111, std::sqrt(2.0) * a},
                           {0b0001, a},
                           {0b0010, a},
                           {0b0100, a},
                           {0b1000, a}});
}

DensityMatrix white_noise_mix(const PureState& psi, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw AlphaOutOfRangeError("alpha must lie in [0, 1]");
  const int d = psi.dim();
  DensityMatrix rho{psi.num_qubits, Matrix::Zero(d, d)};
  rho.matrix = alpha * psi.projector() +
               ((1.0 - alpha) / d) * Matrix::Identity(d, d);
  return rho;
}

namespace {

inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace

PureState random_pure(int num_qubits, const RandomStateSeed& seed) {
  require_qubits(num_qubits);
  if (seed.algorithm != kRandomStateAlgorithm)
    throw InvalidStateError("unknown random-state algorithm tag: " +
                            seed.algorithm);
  std::mt19937_64 gen(seed.seed);
  PureState s{num_qubits, Vector(1 << num_qubits)};
  for (int k = 0; k < s.dim(); ++k) {
    const double u1 = 1.0 - uniform01(gen);  // (0, 1]
    const double u2 = uniform01(gen);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * M_PI * u2;
    s.amplitudes(k) = cxd{r * std::cos(phi), r * std::sin(phi)};
  }
  s.amplitudes.normalize();
  return s;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + (index + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

void write_matrix_text(std::ostream& os, const Matrix& m) {
  const auto d = m.rows();
  os << "dim " << d << "\n";
  char buf[128];
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof buf, "%ld %ld %.17g %.17g\n",
                    static_cast<long>(i), static_cast<long>(j),
                    m(i, j).real(), m(i, j).imag());
      os << buf;
    }
}

Matrix read_matrix_text(std::istream& is) {
  std::string tag;
  Eigen::Index d = 0;
  if (!(is >> tag >> d) || tag != "dim" || d < 1)
    throw IoError("matrix text: expected 'dim N' header");
  Matrix m = Matrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d * d; ++k) {
    long i, j;
    double re, im;
    if (!(is >> i >> j >> re >> im))
      throw IoError("matrix text: truncated entry list");
    if (i < 0 || i >= d || j < 0 || j >= d)
      throw IoError("matrix text: entry index out of range");
    m(i, j) = cxd{re, im};
  }
  return m;
}

void save_state(const std::string& path, const DensityMatrix& rho) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  write_matrix_text(os, rho.matrix);
}

DensityMatrix load_state(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open: " + path);
  Matrix m = read_matrix_text(is);
  DensityMatrix rho{log2_dim(m.rows()), m};
  if (rho.dim() != m.rows())
    throw IoError("state file dimension is not a power of two: " + path);
  validate_density_matrix(rho);
  return rho;
}

}  // namespace qdephase
