// SPDX-License-Identifier: Apache-2.0
#include "qdephase/sdp.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "test_helpers.hpp"

using namespace qdephase;
using namespace qdephase::sdp;

TEST_SUITE_BEGIN("sdp");

namespace {

Matrix scalar(double v) {
  Matrix m(1, 1);
  m << v;
  return m;
}

// Brute-force oracle for LPs with 1x1 blocks: minimize c.x subject to
// A x = b, 0 <= x_i (<= u_i). Enumerates vertices: every subset of
// variables pinned to a bound, the rest solved through the equalities.
double lp_vertex_minimum(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                         const Eigen::VectorXd& b, const Eigen::VectorXd& u) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(A.rows());
  double best = std::numeric_limits<double>::infinity();
  for (int freemask = 0; freemask < (1 << n); ++freemask) {
    if (__builtin_popcount(static_cast<unsigned>(freemask)) != m) continue;
    std::vector<int> free_idx, fixed_idx;
    for (int i = 0; i < n; ++i)
      (freemask & (1 << i) ? free_idx : fixed_idx).push_back(i);
    const int nfix = static_cast<int>(fixed_idx.size());
    const int ncomb = 1 << nfix;
    for (int comb = 0; comb < ncomb; ++comb) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
      bool ok = true;
      for (int k = 0; k < nfix; ++k) {
        const double hi = u(fixed_idx[k]);
        if (comb & (1 << k)) {
          if (!std::isfinite(hi)) {
            ok = false;
            break;
          }
          x(fixed_idx[k]) = hi;
        }
      }
      if (!ok) continue;
      if (m > 0) {
        Eigen::MatrixXd Af(m, m);
        for (int k = 0; k < m; ++k) Af.col(k) = A.col(free_idx[k]);
        Eigen::VectorXd rhs = b;
        for (int i : fixed_idx) rhs -= A.col(i) * x(i);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(Af);
        if (!lu.isInvertible()) continue;
        const Eigen::VectorXd xf = lu.solve(rhs);
        for (int k = 0; k < m; ++k) x(free_idx[k]) = xf(k);
      }
      for (int i = 0; i < n && ok; ++i)
        ok = x(i) >= -1e-9 && x(i) <= u(i) + 1e-9;
      if (ok) best = std::min(best, c.dot(x));
    }
  }
  return best;
}

SdpProblem lp_problem(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                      const Eigen::VectorXd& b, const Eigen::VectorXd& u) {
  SdpProblem p;
  for (int i = 0; i < c.size(); ++i) {
    const double hi = std::isfinite(u(i)) ? u(i) : 0.0;
    p.add_block("x" + std::to_string(i), 1, hi);
    p.set_objective(i, scalar(c(i)));
  }
  for (int r = 0; r < A.rows(); ++r) {
    std::vector<std::pair<int, Matrix>> terms;
    for (int i = 0; i < c.size(); ++i)
      if (A(r, i) != 0.0) terms.push_back({i, scalar(A(r, i))});
    p.add_constraint(terms, b(r));
  }
  return p;
}

}  // namespace

TEST_CASE("scalar equality: min x with x = 3") {
  SdpProblem p;
  p.add_block("x", 1);
  p.set_objective(0, scalar(1.0));
  p.add_constraint({{0, scalar(1.0)}}, 3.0);
  const SdpSolution s = solve(p);
  CHECK(s.status == SolveStatus::Optimal);
  CHECK(s.primal_value == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(std::abs(s.primal_value - s.dual_value) <= 1e-7);
  CHECK(s.block_values[0](0, 0).real() == doctest::Approx(3.0));
}

TEST_CASE("eigenvalue extremum: min <diag(1,-1), X> with Tr X = 1") {
  SdpProblem p;
  p.add_block("X", 2);
  Matrix c(2, 2);
  c << 1, 0, 0, -1;
  p.set_objective(0, c);
  p.add_constraint({{0, Matrix::Identity(2, 2)}}, 1.0);
  const SdpSolution s = solve(p);
  CHECK(s.status == SolveStatus::Optimal);
  CHECK(s.primal_value == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(s.block_values[0](1, 1).real() == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("complex Hermitian objective reaches the smallest eigenvalue") {
  std::mt19937_64 gen(61);
  const Matrix c = testing::random_hermitian(4, gen);
  SdpProblem p;
  p.add_block("X", 4);
  p.set_objective(0, c);
  p.add_constraint({{0, Matrix::Identity(4, 4)}}, 1.0);
  const SdpSolution s = solve(p);
  CHECK(s.status == SolveStatus::Optimal);
  CHECK(s.primal_value ==
        doctest::Approx(hermitian_eigenvalues(c)(0)).epsilon(1e-6));
}

TEST_CASE("box without equalities: min -x over 0 <= x <= 1") {
  SdpProblem p;
  p.add_block("x", 1, 1.0);
  p.set_objective(0, scalar(-1.0));
  const SdpSolution s = solve(p);
  CHECK(s.status == SolveStatus::Optimal);
  CHECK(s.primal_value == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(s.block_values[0](0, 0).real() == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("LP problems agree with vertex enumeration") {
  const double inf = std::numeric_limits<double>::infinity();
  struct Case {
    Eigen::VectorXd c, b, u;
    Eigen::MatrixXd A;
  };
  std::vector<Case> cases;
  {
    Case k;
    k.c = Eigen::Vector3d(1.0, 2.0, -1.5);
    k.A = Eigen::MatrixXd(1, 3);
    k.A << 1, 1, 1;
    k.b = Eigen::VectorXd::Constant(1, 2.0);
    k.u = Eigen::Vector3d(inf, inf, 1.0);
    cases.push_back(k);
  }
  {
    Case k;
    k.c = Eigen::Vector3d(-1.0, 0.5, 0.25);
    k.A = Eigen::MatrixXd(2, 3);
    k.A << 1, 2, 0, 0, 1, 1;
    k.b = Eigen::Vector2d(1.5, 1.0);
    k.u = Eigen::Vector3d(1.0, 1.0, 1.0);
    cases.push_back(k);
  }
  {
    Case k;
    k.c = Eigen::Vector2d(3.0, 1.0);
    k.A = Eigen::MatrixXd(1, 2);
    k.A << 2, 1;
    k.b = Eigen::VectorXd::Constant(1, 1.0);
    k.u = Eigen::Vector2d(inf, inf);
    cases.push_back(k);
  }
  for (const auto& k : cases) {
    const double oracle = lp_vertex_minimum(k.c, k.A, k.b, k.u);
    const SdpSolution s = solve(lp_problem(k.c, k.A, k.b, k.u));
    CHECK(s.status == SolveStatus::Optimal);
    CHECK(s.primal_value == doctest::Approx(oracle).epsilon(1e-6));
  }
}

TEST_CASE("objective scaling scales the optimum") {
  SdpProblem p;
  p.add_block("X", 2);
  Matrix c(2, 2);
  c << 1, 0, 0, -1;
  p.set_objective(0, c);
  p.add_constraint({{0, Matrix::Identity(2, 2)}}, 1.0);
  const double base = solve(p).primal_value;
  p.set_objective(0, 7.3 * c);
  const double scaled = solve(p).primal_value;
  CHECK(scaled == doctest::Approx(7.3 * base).epsilon(1e-6));
}

TEST_CASE("weak duality at every iterate of a boxed feasible problem") {
  // witness-style topology: all blocks boxed, dual-feasible start
  std::mt19937_64 gen(67);
  const Matrix c1 = testing::random_hermitian(4, gen);
  const Matrix c2 = testing::random_hermitian(4, gen);
  SdpProblem p;
  p.add_block("A", 4, 1.0);
  p.add_block("B", 4, 1.0);
  p.set_objective(0, c1);
  p.set_objective(1, c2);
  for (int beta = 0; beta < 16; ++beta) {
    Constraint cn;
    cn.rhs = 0.0;
    cn.terms.push_back({0, {{beta, 1.0}}});
    cn.terms.push_back({1, {{beta, -1.0}}});
    p.add_constraint_sparse(std::move(cn));
  }
  const SdpSolution s = solve(p);
  CHECK(s.status == SolveStatus::Optimal);
  for (const auto& it : s.trace) CHECK(it.dual <= it.primal + 1e-9);
}

TEST_CASE("rank-deficient constraints are rejected") {
  SdpProblem p;
  p.add_block("X", 2);
  p.set_objective(0, Matrix::Identity(2, 2));
  p.add_constraint({{0, Matrix::Identity(2, 2)}}, 1.0);
  p.add_constraint({{0, Matrix::Identity(2, 2)}}, 1.0);  // duplicate row
  CHECK_THROWS_AS(solve(p), RankDeficientConstraintsError);
}

TEST_CASE("infeasible equalities are flagged") {
  SdpProblem p;
  p.add_block("x", 1);
  p.add_block("y", 1);
  p.set_objective(0, scalar(1.0));
  p.add_constraint({{0, scalar(1.0)}, {1, scalar(1.0)}}, -1.0);
  const SdpSolution s = solve(p);
  CHECK(s.status == SolveStatus::Infeasible);
}

TEST_CASE("grouped Schur path matches the dense path") {
  // two constraint groups coupled through a pair of shared blocks
  auto build = [&](bool grouped) {
    std::mt19937_64 g2(71);
    SdpProblem p;
    p.add_block("S0", 2, 1.0);
    p.add_block("S1", 2, 1.0);
    p.add_block("E1", 2, 1.0);
    p.add_block("E2", 2, 1.0);
    p.set_objective(0, testing::random_hermitian(2, g2));
    p.set_objective(2, testing::random_hermitian(2, g2));
    for (int grp = 0; grp < 2; ++grp) {
      for (int beta = 0; beta < 4; ++beta) {
        Constraint cn;
        cn.rhs = grp == 0 ? 0.1 : -0.05;
        cn.terms.push_back({2 + grp, {{beta, 1.0}}});
        cn.terms.push_back({0, {{beta, -1.0}}});
        cn.terms.push_back({1, {{(beta + 1) % 4, 0.5}}});
        p.add_constraint_sparse(std::move(cn));
      }
      if (grouped) p.schur_groups.push_back({grp * 4, 4});
    }
    return p;
  };
  const SdpSolution a = solve(build(true));
  const SdpSolution b = solve(build(false));
  CHECK(a.status == SolveStatus::Optimal);
  CHECK(b.status == SolveStatus::Optimal);
  CHECK(a.primal_value == doctest::Approx(b.primal_value).epsilon(1e-7));
  for (int blk = 0; blk < 4; ++blk)
    CHECK((a.block_values[blk] - b.block_values[blk]).cwiseAbs().maxCoeff() <
          1e-5);
}

TEST_CASE("problem dump is well-formed") {
  SdpProblem p;
  p.add_block("X", 2, 1.0);
  p.set_objective(0, Matrix::Identity(2, 2));
  p.add_constraint({{0, Matrix::Identity(2, 2)}}, 1.0);
  std::ostringstream os;
  p.dump(os);
  const std::string text = os.str();
  CHECK(text.find("sdp-problem blocks 1 constraints 1") != std::string::npos);
  CHECK(text.find("block 0 label X dim 2 upper 1") != std::string::npos);
  CHECK(text.find("constraint 0 rhs 1") != std::string::npos);
}

TEST_SUITE_END();
