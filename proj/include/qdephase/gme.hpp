// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qdephase/sdp.hpp"
#include "qdephase/states.hpp"

// Genuine-multipartite-negativity monotone E(rho): the most negative
// expectation Tr(W rho) over witnesses that are decomposable for every
// bipartition, W = P_M + Q_M^{T_M} with 0 <= P_M, Q_M <= 1. A negative
// optimum certifies genuine multipartite entanglement; E is bounded by 1/2
// for qubits and reduces to the bipartite negativity for N = 2.

namespace qdephase {

struct Bipartition {
  std::vector<int> subset;  // sorted qubit indices, canonical side
  std::uint32_t mask = 0;

  std::string label() const;
};

// Canonical bipartitions M | complement: the smaller side, ties broken by the
// lexicographically smaller index list. 2^{N-1} - 1 entries.
std::vector<Bipartition> bipartitions(int num_qubits);

struct WitnessCertificate {
  int num_qubits = 0;
  Matrix witness;  // W
  struct Decomposition {
    Bipartition bipartition;
    Matrix p;  // 0 <= P <= 1
    Matrix q;  // 0 <= Q <= 1, W = P + Q^{T_M}
  };
  std::vector<Decomposition> decompositions;
};

struct GmeResult {
  double value = 0.0;        // E = max(0, -optimum)
  double raw_optimum = 0.0;  // min Tr(W rho)
  WitnessCertificate certificate;
  int iterations = 0;
  double gap = 0.0;
  std::vector<sdp::IterationStat> solver_trace;
};

// The default gap keeps the witness value certified to 1e-6, comfortably
// inside every quoted tolerance; the interior-point floor for the 4-qubit
// problems sits near 3e-7 in double precision.
struct GmeOptions {
  double gap_tolerance = 1e-6;
  double feas_tolerance = 1e-8;
  int max_iterations = 200;
};

GmeResult genuine_negativity(const DensityMatrix& rho,
                             const GmeOptions& options = {});

// Re-checks every certificate invariant from scratch (partial transposes and
// eigenvalue bounds, no solver state) and returns Tr(W rho). Throws
// CertificateInvalidError naming the violated invariant.
double verify_certificate(const DensityMatrix& rho,
                          const WitnessCertificate& cert);

void write_certificate(std::ostream& os, const WitnessCertificate& cert);
WitnessCertificate read_certificate(std::istream& is);
void save_certificate(const std::string& path, const WitnessCertificate& cert);
WitnessCertificate load_certificate(const std::string& path);

// Independent oracle for N = 2: |sum of negative eigenvalues of rho^{T_A}|.
double bipartite_negativity(const DensityMatrix& rho);

}  // namespace qdephase
