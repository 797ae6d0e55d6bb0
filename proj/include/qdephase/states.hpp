// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "qdephase/linalg.hpp"

// Initial-state factories: GHZ/W families, the four-qubit zoo, white-noise
// mixing and seeded random pure states drawn uniformly from the global
// Hilbert sphere.

namespace qdephase {

struct PureState {
  int num_qubits = 0;
  Vector amplitudes;  // dim 2^N, unit norm

  int dim() const { return 1 << num_qubits; }
  Matrix projector() const { return amplitudes * amplitudes.adjoint(); }
};

struct DensityMatrix {
  int num_qubits = 0;
  Matrix matrix;  // Hermitian, trace 1, PSD

  int dim() const { return 1 << num_qubits; }
};

// Throws InvalidStateError when the matrix is not Hermitian (1e-10), not
// unit trace (1e-12) or has an eigenvalue below -1e-9.
void validate_density_matrix(const DensityMatrix& rho);

DensityMatrix density_from_pure(const PureState& psi);

PureState ghz(int num_qubits);
PureState w_state(int num_qubits);
PureState dicke24();
PureState singlet4();
PureState cluster4();
PureState chi4();

// rho = alpha |psi><psi| + (1-alpha)/2^N I
DensityMatrix white_noise_mix(const PureState& psi, double alpha);

// Seed for the portable random-state sampler. The only supported algorithm
// tag is kRandomStateAlgorithm: mt19937_64 + Box-Muller, uniforms u=(x>>11)
// *2^-53, u1=1-u, z1=sqrt(-2 ln u1) cos(2 pi u2), z2=...sin(...); amplitude k
// gets re=z1, im=z2, filled in index order, then the vector is normalized.
inline constexpr const char* kRandomStateAlgorithm = "mt19937_64-boxmuller-v1";

struct RandomStateSeed {
  std::uint64_t seed = 0;
  std::string algorithm = kRandomStateAlgorithm;
};

PureState random_pure(int num_qubits, const RandomStateSeed& seed);

// Per-sample seed derivation for ensembles: the (index+1)-th output of the
// splitmix64 stream started at `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// Plain-text matrix format: first line "dim N", then dim^2 lines
// "row col re im" at 17 significant digits (round-trip exact).
void write_matrix_text(std::ostream& os, const Matrix& m);
Matrix read_matrix_text(std::istream& is);

void save_state(const std::string& path, const DensityMatrix& rho);
DensityMatrix load_state(const std::string& path);

}  // namespace qdephase
