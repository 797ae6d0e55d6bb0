// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qdephase/linalg.hpp"

// Self-contained dense semidefinite-program solver for desk-scale problems:
//
//   minimize    sum_b <C_b, X_b>          (<A,B> = Re Tr(A B), A,B Hermitian)
//   subject to  sum_b <A_{c,b}, X_b> = r_c   for c = 0..m-1
//               X_b >= 0                  for every block
//               X_b <= u_b I              for blocks with an upper bound
//
// Primal-dual path following with Nesterov-Todd scaling and a Mehrotra-style
// adaptive centering parameter; fraction-to-boundary 0.98. Upper-bounded
// blocks carry a second complementarity pair (u I - X, Y), which keeps the
// Schur system at m rows instead of adding slack-block equalities.
//
// Constraint coefficients are stored sparsely in the orthonormal Hermitian
// basis of linalg.hpp. When `schur_groups` partitions the constraints into
// groups that only couple through blocks touched identically by every group
// (the witness-SDP topology), the Schur complement is solved by block
// elimination; otherwise a dense Cholesky is used.

namespace qdephase::sdp {

struct BlockSpec {
  std::string label;
  int dim = 1;
  double upper_bound = 0.0;  // <= 0: no upper bound
};

struct ConstraintTerm {
  int block = -1;
  std::vector<std::pair<int, double>> coeffs;  // (basis index, coefficient)
};

struct Constraint {
  std::vector<ConstraintTerm> terms;
  double rhs = 0.0;
};

struct SdpProblem {
  std::vector<BlockSpec> blocks;
  std::vector<Matrix> objective;  // per block; empty entries mean zero
  std::vector<Constraint> constraints;
  // Optional partition of [0, m) into consecutive groups for the structured
  // Schur paths; validated by the solver, ignored when the topology does not
  // match. Two patterns are recognized: groups coupled only through blocks
  // touched identically by every group (block-diagonal + rank-coupling), and
  // an arrow pattern where every block links at most one group to the
  // designated hub group.
  std::vector<std::pair<int, int>> schur_groups;  // (start, count)
  int schur_hub = -1;                             // arrow hub group index

  int add_block(const std::string& label, int dim, double upper_bound = 0.0);
  void set_objective(int block, const Matrix& c);

  // Densified convenience form; coefficients must be Hermitian.
  void add_constraint(const std::vector<std::pair<int, Matrix>>& terms,
                      double rhs);
  void add_constraint_sparse(Constraint c);

  void dump(std::ostream& os) const;
};

enum class SolveStatus { Optimal, Infeasible, MaxIterations, NumericalFailure };

const char* to_string(SolveStatus s);

struct IterationStat {
  double primal = 0, dual = 0, primal_resid = 0, dual_resid = 0, mu = 0;
};

struct SolveOptions {
  double gap_tolerance = 1e-7;
  double feas_tolerance = 1e-8;
  int max_iterations = 200;
};

struct SdpSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
  int iterations = 0;
  std::vector<Matrix> block_values;       // X_b
  std::vector<Matrix> dual_block_values;  // Z_b
  std::vector<double> y;
  std::vector<IterationStat> trace;
};

// Throws RankDeficientConstraintsError when the constraint rows are linearly
// dependent (detected through a singular Schur system on the first iterate).
SdpSolution solve(const SdpProblem& p, const SolveOptions& options = {});

}  // namespace qdephase::sdp
