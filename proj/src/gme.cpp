// SPDX-License-Identifier: Apache-2.0
#include "qdephase/gme.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qdephase {

std::string Bipartition::label() const {
  std::string s = "{";
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(subset[i]);
  }
  return s + "}";
}

std::vector<Bipartition> bipartitions(int num_qubits) {
  if (num_qubits < 2 || num_qubits > 4)
    throw UnsupportedQubitCountError("qubit count must be 2, 3 or 4");
  std::vector<Bipartition> out;
  for (std::uint32_t mask = 1; mask + 1 < (1u << num_qubits); ++mask) {
    const std::uint32_t comp = ((1u << num_qubits) - 1) & ~mask;
    const int sz = __builtin_popcount(mask);
    const int csz = num_qubits - sz;
    // canonical: smaller side; equal sizes take the list containing the
    // lexicographically smaller index, i.e. the side containing qubit 0
    if (sz > csz) continue;
    if (sz == csz && !(mask & 1u)) continue;
    Bipartition b;
    b.mask = mask;
    for (int q = 0; q < num_qubits; ++q)
      if (mask & (1u << q)) b.subset.push_back(q);
    out.push_back(std::move(b));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.subset.size() != b.subset.size())
      return a.subset.size() < b.subset.size();
    return a.subset < b.subset;
  });
  return out;
}

namespace {

Matrix pt(const Matrix& m, int num_qubits, std::uint32_t mask) {
  return partial_transpose(m, QubitRegisterShape{num_qubits}, mask);
}

}  // namespace

GmeResult genuine_negativity(const DensityMatrix& rho,
                             const GmeOptions& options) {
  validate_density_matrix(rho);
  const int n = rho.num_qubits;
  const int d = rho.dim();
  const auto parts = bipartitions(n);
  const int k = static_cast<int>(parts.size());
  const int nb = herm_basis_size(d);

  // The witness program min Tr(W rho) over W = P_M + Q_M^{T_M},
  // 0 <= P_M, Q_M <= 1 is solved through its conic dual
  //
  //   min sum_M Tr(B_M + D_M)   s.t.  sum_M (A_M - B_M) = rho,
  //       C_M = A_M^{T_M} - B_M^{T_M} + D_M,   A,B,C,D >= 0,
  //
  // which has plain PSD cones only (no upper bounds; those produce doubly
  // degenerate complementarity pairs that stall the interior point method).
  // The witness and its decompositions come back out of the equality
  // multipliers: W = -Y_rho, Q_M = -Y_M, P_M = W - Q_M^{T_M}.
  sdp::SdpProblem prob;
  std::vector<int> ab(k), bb(k), cb(k), db(k);
  for (int i = 0; i < k; ++i) {
    ab[i] = prob.add_block("A" + parts[i].label(), d);
    bb[i] = prob.add_block("B" + parts[i].label(), d);
    cb[i] = prob.add_block("C" + parts[i].label(), d);
    db[i] = prob.add_block("D" + parts[i].label(), d);
    prob.set_objective(bb[i], Matrix::Identity(d, d));
    prob.set_objective(db[i], Matrix::Identity(d, d));
  }
  // decomposition rows per bipartition, then the rho rows as the arrow hub
  for (int i = 0; i < k; ++i) {
    for (int beta = 0; beta < nb; ++beta) {
      auto [bi, si] = herm_basis_pt(n, parts[i].mask, beta);
      sdp::Constraint c;
      c.rhs = 0.0;
      c.terms.push_back({cb[i], {{beta, 1.0}}});
      c.terms.push_back({ab[i], {{bi, -si}}});
      c.terms.push_back({bb[i], {{bi, si}}});
      c.terms.push_back({db[i], {{beta, -1.0}}});
      prob.add_constraint_sparse(std::move(c));
    }
    prob.schur_groups.emplace_back(i * nb, nb);
  }
  const Eigen::VectorXd rho_vec = herm_vech(hermitize(rho.matrix));
  for (int beta = 0; beta < nb; ++beta) {
    sdp::Constraint c;
    c.rhs = rho_vec(beta);
    for (int i = 0; i < k; ++i) {
      c.terms.push_back({ab[i], {{beta, 1.0}}});
      c.terms.push_back({bb[i], {{beta, -1.0}}});
    }
    prob.add_constraint_sparse(std::move(c));
  }
  prob.schur_groups.emplace_back(k * nb, nb);
  prob.schur_hub = k;

  sdp::SolveOptions sopt;
  sopt.gap_tolerance = options.gap_tolerance;
  sopt.feas_tolerance = options.feas_tolerance;
  sopt.max_iterations = options.max_iterations;
  sdp::SdpSolution sol = sdp::solve(prob, sopt);
  if (sol.status != sdp::SolveStatus::Optimal)
    throw NumericalFailureError(std::string("witness SDP did not converge: ") +
                                sdp::to_string(sol.status));

  GmeResult res;
  // the optimum is bracketed by [dual, primal]; report the midpoint
  const double estimate = 0.5 * (sol.primal_value + sol.dual_value);
  if (estimate - sol.gap > 0.5 + 1e-7)
    throw NumericalFailureError("monotone exceeded the qubit bound 1/2");
  res.raw_optimum = -estimate;
  res.value = std::clamp(estimate, 0.0, 0.5);
  res.iterations = sol.iterations;
  res.gap = sol.gap;
  res.solver_trace = sol.trace;
  res.certificate.num_qubits = n;
  Eigen::VectorXd wv(nb);
  for (int beta = 0; beta < nb; ++beta) wv(beta) = -sol.y[k * nb + beta];
  res.certificate.witness = herm_unvech(d, wv);
  for (int i = 0; i < k; ++i) {
    Eigen::VectorXd qv(nb);
    for (int beta = 0; beta < nb; ++beta) qv(beta) = -sol.y[i * nb + beta];
    Matrix q = herm_unvech(d, qv);
    Matrix pm = hermitize(res.certificate.witness - pt(q, n, parts[i].mask));
    res.certificate.decompositions.push_back({parts[i], pm, q});
  }
  return res;
}

double verify_certificate(const DensityMatrix& rho,
                          const WitnessCertificate& cert) {
  validate_density_matrix(rho);
  const int n = rho.num_qubits;
  if (cert.num_qubits != n)
    throw CertificateInvalidError("certificate qubit count differs from state");
  const auto parts = bipartitions(n);
  if (cert.decompositions.size() != parts.size())
    throw CertificateInvalidError("certificate does not cover all bipartitions");
  if (!is_hermitian(cert.witness, 1e-8))
    throw CertificateInvalidError("witness is not Hermitian");
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& dec = cert.decompositions[i];
    if (dec.bipartition.mask != parts[i].mask)
      throw CertificateInvalidError("bipartition list is not canonical");
    const Matrix recon = dec.p + pt(dec.q, n, parts[i].mask);
    if (frobenius_norm(cert.witness - recon) > 1e-6)
      throw CertificateInvalidError("W != P + Q^{T_M} for bipartition " +
                                    parts[i].label());
    for (const Matrix* m : {&dec.p, &dec.q}) {
      const Eigen::VectorXd ev = hermitian_eigenvalues(*m, 1e-8);
      if (ev(0) < -1e-7 || ev(ev.size() - 1) > 1.0 + 1e-7)
        throw CertificateInvalidError(
            "decomposition block violates 0 <= X <= 1 for bipartition " +
            parts[i].label());
    }
  }
  const cxd tr = (cert.witness * rho.matrix).trace();
  if (std::abs(tr.imag()) > 1e-10)
    throw CertificateInvalidError("Tr(W rho) has an imaginary residue");
  return tr.real();
}

namespace {

void write_section(std::ostream& os, const std::string& name, const Matrix& m) {
  os << "section " << name << "\n";
  write_matrix_text(os, m);
}

}  // namespace

void write_certificate(std::ostream& os, const WitnessCertificate& cert) {
  os << "qdephase-witness v1\n";
  os << "qubits " << cert.num_qubits << "\n";
  write_section(os, "W", cert.witness);
  for (const auto& dec : cert.decompositions) {
    std::string tag;
    for (std::size_t i = 0; i < dec.bipartition.subset.size(); ++i)
      tag += (i ? "," : "") + std::to_string(dec.bipartition.subset[i]);
    write_section(os, "P " + tag, dec.p);
    write_section(os, "Q " + tag, dec.q);
  }
}

WitnessCertificate read_certificate(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "qdephase-witness v1")
    throw IoError("certificate: bad header");
  WitnessCertificate cert;
  std::string tag;
  if (!(is >> tag >> cert.num_qubits) || tag != "qubits")
    throw IoError("certificate: expected qubit count");
  auto parts = bipartitions(cert.num_qubits);
  auto read_one = [&](const std::string& want) {
    std::string sec, name;
    if (!(is >> sec >> name) || sec != "section")
      throw IoError("certificate: expected section " + want);
    std::string rest;
    if (name == "P" || name == "Q") {
      is >> rest;
      name += " " + rest;
    }
    if (name != want) throw IoError("certificate: expected section " + want);
    return read_matrix_text(is);
  };
  cert.witness = read_one("W");
  for (const auto& part : parts) {
    std::string tagq;
    for (std::size_t i = 0; i < part.subset.size(); ++i)
      tagq += (i ? "," : "") + std::to_string(part.subset[i]);
    WitnessCertificate::Decomposition dec;
    dec.bipartition = part;
    dec.p = read_one("P " + tagq);
    dec.q = read_one("Q " + tagq);
    cert.decompositions.push_back(std::move(dec));
  }
  return cert;
}

void save_certificate(const std::string& path, const WitnessCertificate& cert) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  write_certificate(os, cert);
}

WitnessCertificate load_certificate(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open: " + path);
  return read_certificate(is);
}

double bipartite_negativity(const DensityMatrix& rho) {
  if (rho.num_qubits != 2)
    throw UnsupportedQubitCountError("bipartite negativity needs N = 2");
  const Matrix ptm = pt(rho.matrix, 2, 0b01u);
  const Eigen::VectorXd ev = hermitian_eigenvalues(ptm);
  double neg = 0.0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) < 0.0) neg -= ev(i);
  return neg;
}

}  // namespace qdephase
