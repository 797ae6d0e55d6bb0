// SPDX-License-Identifier: Apache-2.0
#include "qdephase/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <tuple>

namespace qdephase::sdp {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::MaxIterations: return "max-iterations";
    case SolveStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

int SdpProblem::add_block(const std::string& label, int dim,
                          double upper_bound) {
  if (dim < 1) throw ShapeMismatchError("block dim must be >= 1");
  blocks.push_back({label, dim, upper_bound});
  objective.emplace_back(Matrix::Zero(dim, dim));
  return static_cast<int>(blocks.size()) - 1;
}

void SdpProblem::set_objective(int block, const Matrix& c) {
  if (!is_hermitian(c))
    throw NotHermitianError("objective coefficient is not Hermitian");
  objective.at(block) = hermitize(c);
}

void SdpProblem::add_constraint(
    const std::vector<std::pair<int, Matrix>>& terms, double rhs) {
  Constraint c;
  c.rhs = rhs;
  for (const auto& [b, mat] : terms) {
    if (!is_hermitian(mat))
      throw NotHermitianError("constraint coefficient is not Hermitian");
    ConstraintTerm t;
    t.block = b;
    t.coeffs = herm_basis_expand(hermitize(mat));
    if (!t.coeffs.empty()) c.terms.push_back(std::move(t));
  }
  constraints.push_back(std::move(c));
}

void SdpProblem::add_constraint_sparse(Constraint c) {
  constraints.push_back(std::move(c));
}

void SdpProblem::dump(std::ostream& os) const {
  os << "sdp-problem blocks " << blocks.size() << " constraints "
     << constraints.size() << "\n";
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    os << "block " << b << " label " << blocks[b].label << " dim "
       << blocks[b].dim << " upper " << blocks[b].upper_bound << "\n";
  }
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (objective[b].size() == 0 || objective[b].isZero(0.0)) continue;
    os << "objective block " << b << "\n";
    for (const auto& [beta, a] : herm_basis_expand(objective[b]))
      os << "  " << beta << " " << a << "\n";
  }
  for (std::size_t c = 0; c < constraints.size(); ++c) {
    os << "constraint " << c << " rhs " << constraints[c].rhs << "\n";
    for (const auto& t : constraints[c].terms) {
      os << "  block " << t.block << ":";
      for (const auto& [beta, a] : t.coeffs) os << " " << beta << ":" << a;
      os << "\n";
    }
  }
}

namespace {

// Real matrix of the conjugation map T -> W T W on the orthonormal Hermitian
// basis (W Hermitian). Column beta' is vech(W e_beta' W), assembled from
// outer products of columns of W.
Eigen::MatrixXd conjugation_matrix(const Matrix& w) {
  const int d = static_cast<int>(w.rows());
  const int n = d * d;
  const double s2 = std::sqrt(2.0);
  Eigen::MatrixXd g(n, n);
  Matrix m(d, d);
  auto fill_column = [&](int col, const Matrix& mat) {
    for (int i = 0; i < d; ++i) g(i, col) = mat(i, i).real();
    int idx = d;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        g(idx++, col) = s2 * mat(i, j).real();
        g(idx++, col) = s2 * mat(i, j).imag();
      }
  };
  for (int k = 0; k < d; ++k) {
    m.noalias() = w.col(k) * w.col(k).adjoint();
    fill_column(k, m);
  }
  int col = d;
  const cxd iu{0.0, 1.0};
  for (int k = 0; k < d; ++k)
    for (int l = k + 1; l < d; ++l) {
      Matrix outer = w.col(k) * w.col(l).adjoint();
      m = (outer + outer.adjoint()) / s2;
      fill_column(col++, m);
      m = iu * (outer - outer.adjoint()) / s2;
      fill_column(col++, m);
    }
  return g;
}

struct BlockWork {
  int dim = 0;
  double upper = 0.0;
  bool boxed = false;
  Matrix C;
  Matrix X, Z, Y, S;
  Matrix W1, W1inv, W2, W2inv;
  Eigen::MatrixXd Kinv;
  // constraint touches: (constraint, basis index, coefficient)
  std::vector<std::tuple<int, int, double>> entries;
};

struct NtPair {
  Matrix W, Winv;
};

// Clamps the spectrum to a strictly positive floor; the scaling point is a
// free algorithmic choice, so a safeguarded factorization near the boundary
// is legitimate (residual accounting always uses the true X, Z).
Matrix safeguarded_cholesky(const Matrix& X) {
  Eigen::LLT<Matrix> llt(X);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(X));
  if (es.info() != Eigen::Success || es.eigenvalues().maxCoeff() <= 0.0)
    throw NumericalFailureError("scaling block lost definiteness");
  const double floor = es.eigenvalues().maxCoeff() * 1e-14;
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(floor);
  Eigen::LLT<Matrix> llt2(
      Matrix(es.eigenvectors() * lam.asDiagonal() *
             es.eigenvectors().adjoint()));
  if (llt2.info() != Eigen::Success)
    throw NumericalFailureError("scaling block lost definiteness");
  return llt2.matrixL();
}

NtPair nt_scaling(const Matrix& X, const Matrix& Z) {
  const int d = static_cast<int>(X.rows());
  Matrix L = safeguarded_cholesky(X);
  Matrix A = L.adjoint() * Z * L;
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(A));
  if (es.info() != Eigen::Success || es.eigenvalues().maxCoeff() <= 0.0)
    throw NumericalFailureError("NT scaling: dual block lost definiteness");
  Eigen::VectorXd lam =
      es.eigenvalues().cwiseMax(es.eigenvalues().maxCoeff() * 1e-14);
  const Matrix& V = es.eigenvectors();
  Matrix B = V * lam.cwiseSqrt().cwiseInverse().asDiagonal() * V.adjoint();
  Matrix Bi = V * lam.cwiseSqrt().asDiagonal() * V.adjoint();
  Matrix Li = L.triangularView<Eigen::Lower>().solve(
      Matrix::Identity(d, d));
  NtPair p;
  p.W = L * B * L.adjoint();
  p.Winv = Li.adjoint() * Bi * Li;
  return p;
}

// Largest step alpha with X + alpha*D >= 0 (X > 0).
double max_step(const Matrix& X, const Matrix& D) {
  Eigen::LLT<Matrix> llt(X);
  if (llt.info() != Eigen::Success) return 0.0;
  Matrix L = llt.matrixL();
  const int d = static_cast<int>(X.rows());
  Matrix Li = L.triangularView<Eigen::Lower>().solve(Matrix::Identity(d, d));
  Matrix R = Li * D * Li.adjoint();
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(R),
                                           Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

Matrix inverse_psd(const Matrix& X) {
  const int d = static_cast<int>(X.rows());
  Matrix L = safeguarded_cholesky(X);
  Matrix Li = L.triangularView<Eigen::Lower>().solve(Matrix::Identity(d, d));
  return Li.adjoint() * Li;
}

// Structured Schur solver for group-decoupled constraints with a uniform
// shared coupling: H = blockdiag(D_g) + ones (x) S_shared.
struct GroupedSchur {
  int groups = 0;
  int size = 0;  // constraints per group (uniform)
  std::vector<Eigen::LLT<Eigen::MatrixXd>> dg_llt;
  std::vector<Eigen::MatrixXd> dg_inv;
  Eigen::MatrixXd shared;
  Eigen::PartialPivLU<Eigen::MatrixXd> coupling;

  bool factor(const std::vector<Eigen::MatrixXd>& dg,
              const Eigen::MatrixXd& s) {
    groups = static_cast<int>(dg.size());
    size = static_cast<int>(s.rows());
    shared = s;
    dg_llt.clear();
    dg_inv.clear();
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(size, size);
    for (const auto& d : dg) {
      dg_llt.emplace_back(d);
      if (dg_llt.back().info() != Eigen::Success) return false;
      dg_inv.push_back(
          dg_llt.back().solve(Eigen::MatrixXd::Identity(size, size)));
      t += dg_inv.back();
    }
    // I + T*S with T > 0 and S >= 0 has spectrum >= 1: always invertible.
    coupling.compute(Eigen::MatrixXd::Identity(size, size) + t * shared);
    return true;
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd usum = Eigen::VectorXd::Zero(size);
    std::vector<Eigen::VectorXd> u(groups);
    for (int g = 0; g < groups; ++g) {
      u[g] = dg_inv[g] * rhs.segment(g * size, size);
      usum += u[g];
    }
    Eigen::VectorXd s = coupling.solve(usum);
    Eigen::VectorXd x(rhs.size());
    Eigen::VectorXd ss = shared * s;
    for (int g = 0; g < groups; ++g)
      x.segment(g * size, size) = u[g] - dg_inv[g] * ss;
    return x;
  }
};

// Arrow solver: H = [diag(D_g), C_g; C_g^T, T] with the hub rows last in
// logical order. Block elimination of the non-hub groups is a stable pivot
// order for an SPD matrix.
struct ArrowSchur {
  int hub = 0, ngroups = 0, size = 0;
  std::vector<int> starts;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> dg_llt;
  std::vector<Eigen::MatrixXd> mg;  // D_g^{-1} C_g
  Eigen::LLT<Eigen::MatrixXd> hub_llt;

  bool factor(std::vector<Eigen::MatrixXd>& dg,
              std::vector<Eigen::MatrixXd>& cg, Eigen::MatrixXd& t) {
    Eigen::MatrixXd s = t;
    dg_llt.clear();
    mg.clear();
    for (int g = 0; g < ngroups; ++g) {
      if (g == hub) {
        dg_llt.emplace_back();
        mg.emplace_back();
        continue;
      }
      dg_llt.emplace_back(dg[g]);
      if (dg_llt.back().info() != Eigen::Success) return false;
      mg.push_back(dg_llt.back().solve(cg[g]));
      s.noalias() -= cg[g].transpose() * mg.back();
    }
    hub_llt.compute(s);
    return hub_llt.info() == Eigen::Success;
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd bh = rhs.segment(starts[hub], size);
    std::vector<Eigen::VectorXd> u(ngroups);
    for (int g = 0; g < ngroups; ++g) {
      if (g == hub) continue;
      u[g] = dg_llt[g].solve(rhs.segment(starts[g], size));
      bh.noalias() -= mg[g].transpose() *
                      Eigen::VectorXd(rhs.segment(starts[g], size));
    }
    Eigen::VectorXd xh = hub_llt.solve(bh);
    Eigen::VectorXd x(rhs.size());
    x.segment(starts[hub], size) = xh;
    for (int g = 0; g < ngroups; ++g) {
      if (g == hub) continue;
      x.segment(starts[g], size) = u[g] - mg[g] * xh;
    }
    return x;
  }
};

}  // namespace

SdpSolution solve(const SdpProblem& p, const SolveOptions& options) {
  const int nblocks = static_cast<int>(p.blocks.size());
  const int m = static_cast<int>(p.constraints.size());
  if (nblocks == 0) throw ShapeMismatchError("problem has no blocks");

  std::vector<BlockWork> blk(nblocks);
  double total_dim = 0.0;
  for (int b = 0; b < nblocks; ++b) {
    auto& w = blk[b];
    w.dim = p.blocks[b].dim;
    w.upper = p.blocks[b].upper_bound;
    w.boxed = w.upper > 0.0;
    w.C = p.objective[b].size() ? hermitize(p.objective[b])
                                : Matrix::Zero(w.dim, w.dim);
    total_dim += w.dim * (w.boxed ? 2.0 : 1.0);
  }
  for (int c = 0; c < m; ++c) {
    for (const auto& t : p.constraints[c].terms) {
      if (t.block < 0 || t.block >= nblocks)
        throw ShapeMismatchError("constraint references unknown block");
      for (const auto& [beta, a] : t.coeffs) {
        if (beta < 0 || beta >= herm_basis_size(blk[t.block].dim))
          throw ShapeMismatchError("constraint basis index out of range");
        blk[t.block].entries.emplace_back(c, beta, a);
      }
    }
  }

  // --- structured-Schur preparation -------------------------------------
  // With a valid uniform partition, blocks classify as exclusive to a group,
  // shared identically by every group (Woodbury pattern), or bridging one
  // group and the hub (arrow pattern). Anything else falls back to the dense
  // Cholesky.
  bool grouped = false;  // Woodbury pattern valid
  bool arrow = false;    // arrow pattern valid
  std::vector<int> group_of(m, -1);
  int group_size = 0, ngroups = 0;
  const int hub = p.schur_hub;
  std::vector<int> block_class(nblocks, -1);  // -1 unused, -2 shared, g
  bool partition_ok = false;
  if (!p.schur_groups.empty() && m > 0) {
    ngroups = static_cast<int>(p.schur_groups.size());
    partition_ok = true;
    int covered = 0;
    group_size = p.schur_groups[0].second;
    for (int g = 0; g < ngroups && partition_ok; ++g) {
      auto [start, count] = p.schur_groups[g];
      if (count != group_size || start != covered) partition_ok = false;
      covered += count;
      for (int c = start; c < start + count && c < m; ++c) group_of[c] = g;
    }
    if (covered != m) partition_ok = false;
  }
  if (partition_ok) {
    const bool arrow_wanted = hub >= 0 && hub < ngroups && ngroups >= 2;
    grouped = !arrow_wanted;
    arrow = arrow_wanted;
    for (int b = 0; b < nblocks && (grouped || arrow); ++b) {
      if (blk[b].entries.empty()) continue;
      std::vector<std::vector<std::tuple<int, int, double>>> per_group(ngroups);
      for (const auto& [c, beta, a] : blk[b].entries)
        per_group[group_of[c]].emplace_back(
            c - p.schur_groups[group_of[c]].first, beta, a);
      int touched = 0;
      for (const auto& v : per_group) touched += v.empty() ? 0 : 1;
      if (arrow) {
        // allowed: one group only, hub only, or one group + hub
        int nonhub = -1;
        bool ok = true;
        for (int g = 0; g < ngroups; ++g) {
          if (per_group[g].empty() || g == hub) continue;
          if (nonhub >= 0) ok = false;
          nonhub = g;
        }
        if (!ok) {
          arrow = false;
        } else {
          block_class[b] = nonhub >= 0 ? nonhub : hub;
        }
        continue;
      }
      if (touched == 1) {
        for (int g = 0; g < ngroups; ++g)
          if (!per_group[g].empty()) block_class[b] = g;
      } else if (touched == ngroups) {
        auto norm = per_group[0];
        std::sort(norm.begin(), norm.end());
        for (int g = 1; g < ngroups && grouped; ++g) {
          auto v = per_group[g];
          std::sort(v.begin(), v.end());
          if (v != norm) grouped = false;
        }
        block_class[b] = -2;
      } else {
        grouped = false;
      }
    }
  }

  // --- initial point ------------------------------------------------------
  for (auto& w : blk) {
    const Matrix id = Matrix::Identity(w.dim, w.dim);
    if (w.boxed) {
      const double s = 1.0 + w.C.norm();
      w.X = 0.5 * w.upper * id;
      w.Z = w.C + s * id;
      w.Y = s * id;
      w.S = w.upper * id - w.X;
    } else {
      const double tau = 1.0 + (w.C.size() ? w.C.cwiseAbs().maxCoeff() : 0.0);
      w.X = tau * id;
      w.Z = tau * id;
      w.Y = Matrix::Zero(w.dim, w.dim);
      w.S = Matrix::Zero(w.dim, w.dim);
    }
  }
  std::vector<double> y(m, 0.0);

  SdpSolution sol;
  sol.y.resize(m);

  auto primal_value = [&] {
    double v = 0.0;
    for (const auto& w : blk) v += (w.C * w.X).trace().real();
    return v;
  };
  // Certified lower bound: the exact dual slack Z' = C - A*(y) + Y may dip
  // slightly indefinite through roundoff; for boxed blocks the shift
  // Z' + delta*I, Y + delta*I restores exact dual feasibility at a cost of
  // u*dim*delta in the objective. Falls back to the plain Lagrangian value
  // when an unbounded block cannot absorb the shift.
  auto dual_value = [&](const std::vector<Matrix>* rd) {
    double v = 0.0;
    for (int c = 0; c < m; ++c) v += p.constraints[c].rhs * y[c];
    for (const auto& w : blk)
      if (w.boxed) v -= w.upper * w.Y.trace().real();
    if (!rd) return v;
    double shift = 0.0;
    for (int b = 0; b < nblocks; ++b) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(blk[b].Z + (*rd)[b]),
                                               Eigen::EigenvaluesOnly);
      const double delta = std::max(0.0, -es.eigenvalues()(0));
      if (delta == 0.0) continue;
      if (!blk[b].boxed) return v;  // cannot certify; report plain value
      shift += blk[b].upper * blk[b].dim * delta;
    }
    return v - shift;
  };

  std::vector<Matrix> Rd(nblocks);
  auto compute_rd = [&] {
    double rd_norm = 0.0;
    for (int b = 0; b < nblocks; ++b) {
      Eigen::VectorXd ay = Eigen::VectorXd::Zero(herm_basis_size(blk[b].dim));
      for (const auto& [c, beta, a] : blk[b].entries) ay(beta) += a * y[c];
      Rd[b] = blk[b].C - herm_unvech(blk[b].dim, ay) - blk[b].Z +
              (blk[b].boxed ? blk[b].Y : Matrix::Zero(blk[b].dim, blk[b].dim));
      rd_norm = std::max(rd_norm, Rd[b].cwiseAbs().maxCoeff());
    }
    return rd_norm;
  };

  auto finish = [&](SolveStatus st, int iters) {
    sol.status = st;
    sol.iterations = iters;
    sol.primal_value = primal_value();
    compute_rd();
    sol.dual_value = dual_value(&Rd);
    sol.gap = std::abs(sol.primal_value - sol.dual_value);
    sol.block_values.clear();
    sol.dual_block_values.clear();
    for (const auto& w : blk) {
      sol.block_values.push_back(w.X);
      sol.dual_block_values.push_back(w.Z);
    }
    sol.y.assign(y.begin(), y.end());
    return sol;
  };

  // best feasible iterate, restored when the endgame hits the numerical floor
  struct Snapshot {
    double gap = std::numeric_limits<double>::infinity();
    std::vector<Matrix> X, Z, Y;
    std::vector<double> y;
    int iter = 0;
  } best;
  auto snapshot = [&](double gap, int iter) {
    if (gap >= best.gap) return;
    best.gap = gap;
    best.iter = iter;
    best.X.clear();
    best.Z.clear();
    best.Y.clear();
    for (const auto& w : blk) {
      best.X.push_back(w.X);
      best.Z.push_back(w.Z);
      best.Y.push_back(w.Y);
    }
    best.y = y;
  };
  auto restore_best = [&] {
    for (int b = 0; b < nblocks; ++b) {
      blk[b].X = best.X[b];
      blk[b].Z = best.Z[b];
      blk[b].Y = best.Y[b];
      if (blk[b].boxed)
        blk[b].S = blk[b].upper * Matrix::Identity(blk[b].dim, blk[b].dim) -
                   blk[b].X;
    }
    y = best.y;
  };

  std::vector<Eigen::VectorXd> xv(nblocks);
  std::vector<Matrix> Zi(nblocks), Yi(nblocks);
  Eigen::MatrixXd Hdense;
  Eigen::LLT<Eigen::MatrixXd> Hllt;
  GroupedSchur gs;
  ArrowSchur as;

  double best_rp = std::numeric_limits<double>::infinity();
  int stagnant = 0;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    // residuals
    Eigen::VectorXd rp(m);
    for (int b = 0; b < nblocks; ++b) xv[b] = herm_vech(blk[b].X);
    for (int c = 0; c < m; ++c) rp(c) = p.constraints[c].rhs;
    for (int b = 0; b < nblocks; ++b)
      for (const auto& [c, beta, a] : blk[b].entries) rp(c) -= a * xv[b](beta);

    compute_rd();
    // absorb the exact dual residual into Z whenever that keeps it positive
    // definite; prevents roundoff drift of the dual constraint
    double rd_norm = 0.0;
    for (int b = 0; b < nblocks; ++b) {
      if (Rd[b].cwiseAbs().maxCoeff() > 0.0) {
        const Matrix cand = hermitize(blk[b].Z + Rd[b]);
        Eigen::SelfAdjointEigenSolver<Matrix> es(cand, Eigen::EigenvaluesOnly);
        if (es.eigenvalues()(0) > 0.0) {
          blk[b].Z = cand;
          Rd[b].setZero();
        }
      }
      rd_norm = std::max(rd_norm, Rd[b].cwiseAbs().maxCoeff());
    }
    const double rp_norm = m ? rp.cwiseAbs().maxCoeff() : 0.0;

    double compl_sum = 0.0;
    for (const auto& w : blk) {
      compl_sum += (w.X * w.Z).trace().real();
      if (w.boxed) compl_sum += (w.S * w.Y).trace().real();
    }
    const double mu = compl_sum / total_dim;

    const double pv = primal_value();
    const double dv = dual_value(&Rd);
    sol.trace.push_back({pv, dv, rp_norm, rd_norm, mu});

    // divergence guards: an unbounded dual with a stuck primal residual is
    // the usual infeasibility signature
    if (!std::isfinite(mu) || !std::isfinite(pv) || !std::isfinite(rp_norm))
      return finish(std::isfinite(best_rp) && best_rp > 1e-4
                        ? SolveStatus::Infeasible
                        : SolveStatus::NumericalFailure,
                    iter);
    if (std::abs(dv) > 1e50 && rp_norm > 1e-4)
      return finish(SolveStatus::Infeasible, iter);

    if (rp_norm <= options.feas_tolerance && rd_norm <= options.feas_tolerance)
      snapshot(std::abs(pv - dv), iter);
    if (rp_norm <= options.feas_tolerance && rd_norm <= options.feas_tolerance &&
        std::abs(pv - dv) <= options.gap_tolerance)
      return finish(SolveStatus::Optimal, iter);

    // defensive infeasibility heuristic: residual stuck above 1e-4
    if (rp_norm <= 1e-4 || rp_norm < best_rp * 0.9) {
      best_rp = std::min(best_rp, rp_norm);
      stagnant = 0;
    } else if (++stagnant >= 30) {
      return finish(SolveStatus::Infeasible, iter);
    }

    // NT scalings + per-block K^{-1}
    try {
      for (auto& w : blk) {
        NtPair nt = nt_scaling(w.X, w.Z);
        w.W1 = nt.W;
        w.W1inv = nt.Winv;
        if (w.boxed) {
          NtPair nt2 = nt_scaling(w.S, w.Y);
          w.W2 = nt2.W;
          w.W2inv = nt2.Winv;
          Eigen::MatrixXd k =
              conjugation_matrix(w.W1inv) + conjugation_matrix(w.W2inv);
          Eigen::LLT<Eigen::MatrixXd> llt(k);
          if (llt.info() != Eigen::Success)
            throw NumericalFailureError("K operator not positive definite");
          w.Kinv = llt.solve(
              Eigen::MatrixXd::Identity(k.rows(), k.cols()));
        } else {
          w.Kinv = conjugation_matrix(w.W1);
        }
      }
    } catch (const NumericalFailureError&) {
      if (best.gap <= options.gap_tolerance) {
        restore_best();
        return finish(SolveStatus::Optimal, best.iter);
      }
      return finish(SolveStatus::NumericalFailure, iter);
    }

    // Schur complement factorization
    bool factored = false;
    if (grouped) {
      std::vector<Eigen::MatrixXd> dg(
          ngroups, Eigen::MatrixXd::Zero(group_size, group_size));
      Eigen::MatrixXd shared = Eigen::MatrixXd::Zero(group_size, group_size);
      for (int b = 0; b < nblocks; ++b) {
        if (blk[b].entries.empty()) continue;
        if (block_class[b] >= 0) {
          const int g = block_class[b];
          const int start = p.schur_groups[g].first;
          auto& d = dg[g];
          for (const auto& [c1, b1, a1] : blk[b].entries)
            for (const auto& [c2, b2, a2] : blk[b].entries)
              d(c1 - start, c2 - start) += a1 * a2 * blk[b].Kinv(b1, b2);
        } else if (block_class[b] == -2) {
          // identical selector in every group; use group 0's copy
          const int start0 = p.schur_groups[0].first;
          std::vector<std::tuple<int, int, double>> sel;
          for (const auto& [c, beta, a] : blk[b].entries)
            if (group_of[c] == 0) sel.emplace_back(c - start0, beta, a);
          for (const auto& [l1, b1, a1] : sel)
            for (const auto& [l2, b2, a2] : sel)
              shared(l1, l2) += a1 * a2 * blk[b].Kinv(b1, b2);
        }
      }
      factored = gs.factor(dg, shared);
    } else if (arrow) {
      std::vector<Eigen::MatrixXd> dg(
          ngroups, Eigen::MatrixXd::Zero(group_size, group_size));
      std::vector<Eigen::MatrixXd> cg(
          ngroups, Eigen::MatrixXd::Zero(group_size, group_size));
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(group_size, group_size);
      for (int b = 0; b < nblocks; ++b) {
        if (blk[b].entries.empty()) continue;
        for (const auto& [c1, b1, a1] : blk[b].entries) {
          const int g1 = group_of[c1];
          const int l1 = c1 - p.schur_groups[g1].first;
          for (const auto& [c2, b2, a2] : blk[b].entries) {
            const int g2 = group_of[c2];
            const int l2 = c2 - p.schur_groups[g2].first;
            const double v = a1 * a2 * blk[b].Kinv(b1, b2);
            if (g1 == hub && g2 == hub)
              t(l1, l2) += v;
            else if (g1 == g2)
              dg[g1](l1, l2) += v;
            else if (g2 == hub)
              cg[g1](l1, l2) += v;
            // the (hub, g) mirror entry is covered by symmetry
          }
        }
      }
      as.hub = hub;
      as.ngroups = ngroups;
      as.size = group_size;
      as.starts.resize(ngroups);
      for (int g = 0; g < ngroups; ++g) as.starts[g] = p.schur_groups[g].first;
      factored = as.factor(dg, cg, t);
    }
    if (!factored && m > 0) {
      grouped = false;
      arrow = false;
      Hdense = Eigen::MatrixXd::Zero(m, m);
      for (int b = 0; b < nblocks; ++b) {
        const auto& e = blk[b].entries;
        for (std::size_t i = 0; i < e.size(); ++i) {
          const auto& [c1, b1, a1] = e[i];
          for (std::size_t j = 0; j < e.size(); ++j) {
            const auto& [c2, b2, a2] = e[j];
            Hdense(c1, c2) += a1 * a2 * blk[b].Kinv(b1, b2);
          }
        }
      }
      Hllt.compute(Hdense);
      if (Hllt.info() != Eigen::Success) {
        if (iter == 0)
          throw RankDeficientConstraintsError(
              "constraint rows are linearly dependent (singular Schur system)");
        return finish(SolveStatus::NumericalFailure, iter);
      }
      factored = true;
    }

    auto schur_solve = [&](const Eigen::VectorXd& rhs) {
      if (grouped) return gs.solve(rhs);
      if (arrow) return as.solve(rhs);
      return Eigen::VectorXd(Hllt.solve(rhs));
    };

    // Direction solve for the complementarity targets X Z -> smu I (+ the
    // optional second-order correction). The scaled form uses the identity
    // Winv (smu Z^{-1} - X) Winv = smu X^{-1} - Z, which avoids the huge
    // cancelling intermediates of conjugating V directly.
    std::vector<Matrix> corr1(nblocks), corr2(nblocks), dX(nblocks),
        dZ(nblocks), dY(nblocks);
    std::vector<Matrix> Xi(nblocks), Si(nblocks);
    double smu = 0.0;
    for (int b = 0; b < nblocks; ++b) {
      Xi[b] = inverse_psd(blk[b].X);
      if (blk[b].boxed) Si[b] = inverse_psd(blk[b].S);
      corr1[b] = Matrix::Zero(blk[b].dim, blk[b].dim);
      corr2[b] = Matrix::Zero(blk[b].dim, blk[b].dim);
    }
    std::vector<Eigen::VectorXd> gv(nblocks);
    Eigen::VectorXd dy;
    auto solve_direction = [&] {
      for (int b = 0; b < nblocks; ++b) {
        auto& w = blk[b];
        Matrix g = -Rd[b] + smu * Xi[b] - w.Z -
                   w.W1inv * corr1[b] * w.W1inv;
        if (w.boxed)
          g -= smu * Si[b] - w.Y - w.W2inv * corr2[b] * w.W2inv;
        gv[b] = w.Kinv * herm_vech(g);
      }
      std::vector<Eigen::VectorXd> xq(nblocks);
      if (m > 0) {
        Eigen::VectorXd rhs = rp;
        for (int b = 0; b < nblocks; ++b)
          for (const auto& [c, beta, a] : blk[b].entries)
            rhs(c) -= a * gv[b](beta);
        dy = schur_solve(rhs);
        // Iterative refinement of the primal equation A(dX) = rp; the Schur
        // system turns ill-conditioned near the central-path boundary and a
        // raw solve can leave the constraint manifold.
        for (int pass = 0; pass < 3; ++pass) {
          for (int b = 0; b < nblocks; ++b) {
            Eigen::VectorXd ay =
                Eigen::VectorXd::Zero(herm_basis_size(blk[b].dim));
            for (const auto& [c, beta, a] : blk[b].entries)
              ay(beta) += a * dy(c);
            xq[b] = gv[b] + blk[b].Kinv * ay;
          }
          Eigen::VectorXd perr = rp;
          for (int b = 0; b < nblocks; ++b)
            for (const auto& [c, beta, a] : blk[b].entries)
              perr(c) -= a * xq[b](beta);
          if (perr.cwiseAbs().maxCoeff() <=
              1e-12 * (1.0 + rp.cwiseAbs().maxCoeff()))
            break;
          dy += schur_solve(perr);
        }
      } else {
        dy.resize(0);
        for (int b = 0; b < nblocks; ++b) xq[b] = gv[b];
      }
      for (int b = 0; b < nblocks; ++b) {
        auto& w = blk[b];
        Eigen::VectorXd ay = Eigen::VectorXd::Zero(herm_basis_size(w.dim));
        for (const auto& [c, beta, a] : w.entries) ay(beta) += a * dy(c);
        if (m > 0) xq[b] = gv[b] + w.Kinv * ay;
        dX[b] = herm_unvech(w.dim, xq[b]);
        // The dual equation -A*(dy) - dZ + dY = -Rd is enforced exactly so
        // dual feasibility is immune to the conditioning of K; the rounding
        // error lands in the complementarity target instead.
        const Matrix resid = herm_unvech(w.dim, ay) - Rd[b];
        if (w.boxed) {
          dZ[b] = hermitize(smu * Xi[b] - w.Z -
                            w.W1inv * (corr1[b] + dX[b]) * w.W1inv);
          dY[b] = dZ[b] + resid;
        } else {
          dZ[b] = -resid;
          dY[b] = Matrix::Zero(w.dim, w.dim);
        }
      }
    };

    auto step_lengths = [&](double ftb, double& ap, double& ad) {
      ap = ad = 1.0;
#ifdef QDEPHASE_SDP_DEBUG
      int limp = -1, limd = -1;
      char kindp = '-', kindd = '-';
#endif
      for (int b = 0; b < nblocks; ++b) {
        double c;
        c = ftb * max_step(blk[b].X, dX[b]);
#ifdef QDEPHASE_SDP_DEBUG
        if (c < ap) { limp = b; kindp = 'X'; }
#endif
        ap = std::min(ap, c);
        c = ftb * max_step(blk[b].Z, dZ[b]);
#ifdef QDEPHASE_SDP_DEBUG
        if (c < ad) { limd = b; kindd = 'Z'; }
#endif
        ad = std::min(ad, c);
        if (blk[b].boxed) {
          c = ftb * max_step(blk[b].S, -dX[b]);
#ifdef QDEPHASE_SDP_DEBUG
          if (c < ap) { limp = b; kindp = 'S'; }
#endif
          ap = std::min(ap, c);
          c = ftb * max_step(blk[b].Y, dY[b]);
#ifdef QDEPHASE_SDP_DEBUG
          if (c < ad) { limd = b; kindd = 'Y'; }
#endif
          ad = std::min(ad, c);
        }
      }
#ifdef QDEPHASE_SDP_DEBUG
      std::fprintf(stderr, "  steps: ap=%.3g (%c%d) ad=%.3g (%c%d)\n", ap,
                   kindp, limp, kindd, limd);
#endif
    };

    // Predictor step fixes the centering parameter; the Mehrotra
    // second-order term multiplies by Z^{-1} and turns numerically explosive
    // for tiny mu, so it is dropped in the endgame.
    for (int b = 0; b < nblocks; ++b) {
      Zi[b] = inverse_psd(blk[b].Z);
      if (blk[b].boxed) Yi[b] = inverse_psd(blk[b].Y);
    }
    smu = 0.0;
    solve_direction();
    double ap_aff, ad_aff;
    step_lengths(1.0, ap_aff, ad_aff);
    ap_aff = std::min(ap_aff, 1.0);
    ad_aff = std::min(ad_aff, 1.0);
    double compl_aff = 0.0;
    for (int b = 0; b < nblocks; ++b) {
      const auto& w = blk[b];
      compl_aff += ((w.X + ap_aff * dX[b]) * (w.Z + ad_aff * dZ[b]))
                       .trace()
                       .real();
      if (w.boxed)
        compl_aff += ((w.S - ap_aff * dX[b]) * (w.Y + ad_aff * dY[b]))
                         .trace()
                         .real();
    }
    const double mu_aff = std::max(compl_aff / total_dim, 0.0);
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 1e-4, 0.9);
    smu = sigma * mu;
    if (mu > 1e-5) {
      for (int b = 0; b < nblocks; ++b) {
        Matrix c1 = dX[b] * dZ[b] * Zi[b];
        corr1[b] = 0.5 * (c1 + c1.adjoint());
        if (blk[b].boxed) {
          Matrix c2 = -dX[b] * dY[b] * Yi[b];
          corr2[b] = 0.5 * (c2 + c2.adjoint());
        }
      }
    } else {
      for (int b = 0; b < nblocks; ++b) {
        corr1[b].setZero();
        corr2[b].setZero();
      }
    }
    solve_direction();
    double ap, ad;
    step_lengths(0.98, ap, ad);
    ap = std::min(ap, 1.0);
    ad = std::min(ad, 1.0);
#ifdef QDEPHASE_SDP_DEBUG
    std::fprintf(stderr, "iter %d mu=%.3g ap=%.3g ad=%.3g\n", iter, mu, ap, ad);
#endif
    if (ap < 1e-10 && ad < 1e-10) {
      if (best.gap <= options.gap_tolerance) {
        restore_best();
        return finish(SolveStatus::Optimal, best.iter);
      }
      return finish(SolveStatus::NumericalFailure, iter);
    }

    for (int b = 0; b < nblocks; ++b) {
      auto& w = blk[b];
      w.X = hermitize(w.X + ap * dX[b]);
      w.Z = hermitize(w.Z + ad * dZ[b]);
      if (w.boxed) {
        w.Y = hermitize(w.Y + ad * dY[b]);
        w.S = w.upper * Matrix::Identity(w.dim, w.dim) - w.X;
      }
    }
    for (int c = 0; c < m; ++c) y[c] += ad * dy(c);
  }

  if (best.gap <= options.gap_tolerance) {
    restore_best();
    return finish(SolveStatus::Optimal, best.iter);
  }
  return finish(SolveStatus::MaxIterations, options.max_iterations);
}

}  // namespace qdephase::sdp
