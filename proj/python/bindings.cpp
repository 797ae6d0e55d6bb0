// SPDX-License-Identifier: Apache-2.0
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qdephase/bell.hpp"
#include "qdephase/gme.hpp"
#include "qdephase/scenario.hpp"

namespace py = pybind11;
using namespace qdephase;

namespace {

int infer_qubits(Eigen::Index dim) {
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  if ((Eigen::Index{1} << n) != dim || n < 2 || n > 4)
    throw UnsupportedQubitCountError(
        "matrix dimension must be 2^N with N in 2..4");
  return n;
}

DensityMatrix as_density(const Matrix& m) {
  DensityMatrix rho{infer_qubits(m.rows()), m};
  validate_density_matrix(rho);
  return rho;
}

PureState as_pure(const Vector& v) {
  PureState psi{infer_qubits(v.size()), v};
  if (std::abs(psi.amplitudes.norm() - 1.0) > 1e-12)
    throw InvalidStateError("state vector must be normalized");
  return psi;
}

SpectralModel parse_spectral(const py::object& spec) {
  if (spec.is_none()) return SpectralModel::standard_cauchy();
  if (py::isinstance<py::str>(spec)) {
    const auto s = spec.cast<std::string>();
    if (s == "cauchy") return SpectralModel::standard_cauchy();
    throw UnknownFamilyError("spectral must be 'cauchy' or (x0, gamma)");
  }
  const auto pair = spec.cast<std::pair<double, double>>();
  return SpectralModel::shifted_lorentzian(pair.first, pair.second);
}

SettingFamily parse_family(const std::string& f) {
  if (f == "ghz") return SettingFamily::Ghz;
  if (f == "w") return SettingFamily::W;
  throw UnknownFamilyError("family must be 'ghz' or 'w'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Collective dephasing of 2-4 qubit states, genuine multipartite "
      "negativity via the witness SDP, and Svetlichny nonlocality.";

  py::register_exception<Error>(m, "QdephaseError");

  // --- states ------------------------------------------------------------
  m.def("ghz", [](int n) { return Vector(ghz(n).amplitudes); }, py::arg("n"));
  m.def("w", [](int n) { return Vector(w_state(n).amplitudes); }, py::arg("n"));
  m.def("dicke24", [] { return Vector(dicke24().amplitudes); });
  m.def("singlet4", [] { return Vector(singlet4().amplitudes); });
  m.def("cluster4", [] { return Vector(cluster4().amplitudes); });
  m.def("chi4", [] { return Vector(chi4().amplitudes); });
  m.def(
      "random_pure",
      [](int n, std::uint64_t seed) {
        return Vector(random_pure(n, RandomStateSeed{seed}).amplitudes);
      },
      py::arg("n"), py::arg("seed"),
      "Haar-uniform pure state, deterministic per seed");
  m.def(
      "white_noise_mix",
      [](const Vector& psi, double alpha) {
        return Matrix(white_noise_mix(as_pure(psi), alpha).matrix);
      },
      py::arg("psi"), py::arg("alpha"));
  m.def("derive_seed", &derive_seed, py::arg("base"), py::arg("index"));
  m.def("save_state",
        [](const std::string& path, const Matrix& rho) {
          save_state(path, as_density(rho));
        });
  m.def("load_state",
        [](const std::string& path) { return Matrix(load_state(path).matrix); });

  // --- channel -----------------------------------------------------------
  py::class_<DephasingChannel>(m, "DephasingChannel")
      .def(py::init([](int qubits, std::tuple<double, double, double> n,
                       const py::object& spectral) {
             auto [x, y, z] = n;
             return DephasingChannel(qubits,
                                     FieldOrientation::normalized(x, y, z),
                                     parse_spectral(spectral));
           }),
           py::arg("qubits"), py::arg("orientation"),
           py::arg("spectral") = py::none())
      .def_property_readonly("num_qubits", &DephasingChannel::num_qubits)
      .def_property_readonly("orientation",
                             [](const DephasingChannel& ch) {
                               const auto& o = ch.orientation();
                               return std::make_tuple(o.nx, o.ny, o.nz);
                             })
      .def("thetas",
           [](const DephasingChannel& ch) {
             return std::vector<Matrix>(ch.thetas().begin(),
                                        ch.thetas().end());
           })
      .def("toeplitz",
           [](const DephasingChannel& ch, double t) {
             return Matrix(ch.toeplitz(t));
           },
           py::arg("t"))
      .def(
          "evolve",
          [](const DephasingChannel& ch, const Matrix& rho, double t) {
            return Matrix(ch.evolve(as_density(rho), t).matrix);
          },
          py::arg("rho"), py::arg("t"))
      .def("asymptotic", [](const DephasingChannel& ch, const Matrix& rho) {
        return Matrix(ch.asymptotic(as_density(rho)).matrix);
      });

  // --- gme -----------------------------------------------------------------
  py::class_<WitnessCertificate>(m, "WitnessCertificate")
      .def_property_readonly(
          "witness", [](const WitnessCertificate& c) { return c.witness; })
      .def_property_readonly("decompositions",
                             [](const WitnessCertificate& c) {
                               std::vector<std::tuple<std::vector<int>, Matrix,
                                                      Matrix>>
                                   out;
                               for (const auto& d : c.decompositions)
                                 out.emplace_back(d.bipartition.subset, d.p,
                                                  d.q);
                               return out;
                             });

  py::class_<GmeResult>(m, "GmeResult")
      .def_readonly("value", &GmeResult::value)
      .def_readonly("raw_optimum", &GmeResult::raw_optimum)
      .def_readonly("gap", &GmeResult::gap)
      .def_readonly("iterations", &GmeResult::iterations)
      .def_readonly("certificate", &GmeResult::certificate)
      .def("__repr__", [](const GmeResult& r) {
        return "<GmeResult value=" + std::to_string(r.value) + ">";
      });

  m.def(
      "genuine_negativity",
      [](const Matrix& rho) { return genuine_negativity(as_density(rho)); },
      py::arg("rho"),
      "Genuine multipartite negativity with a witness certificate");
  m.def(
      "verify_certificate",
      [](const Matrix& rho, const WitnessCertificate& cert) {
        return verify_certificate(as_density(rho), cert);
      },
      py::arg("rho"), py::arg("certificate"),
      "Re-checks every invariant from scratch; returns Tr(W rho)");
  m.def("save_certificate", &save_certificate);
  m.def("load_certificate", &load_certificate);
  m.def("bipartite_negativity", [](const Matrix& rho) {
    return bipartite_negativity(as_density(rho));
  });
  m.def("bipartitions", [](int n) {
    std::vector<std::vector<int>> out;
    for (const auto& b : bipartitions(n)) out.push_back(b.subset);
    return out;
  });

  // --- bell ----------------------------------------------------------------
  py::class_<SvetlichnySetting>(m, "SvetlichnySetting")
      .def_readonly("parties", &SvetlichnySetting::parties)
      .def_readonly("angles", &SvetlichnySetting::angles)
      .def_readonly("tag", &SvetlichnySetting::tag);

  m.def("w_magic_angle", &w_magic_angle);
  m.def("ghz_family_setting", &ghz_family_setting, py::arg("parties"),
        py::arg("thetas"));
  m.def("w_family_setting", &w_family_setting, py::arg("parties"),
        py::arg("theta"));
  m.def(
      "svetlichny_operator",
      [](const SvetlichnySetting& s) {
        return Matrix(svetlichny_operator(s).matrix);
      },
      py::arg("setting"));
  m.def(
      "svetlichny_expectation",
      [](const SvetlichnySetting& s, const Matrix& rho) {
        return expectation(svetlichny_operator(s), as_density(rho));
      },
      py::arg("setting"), py::arg("rho"));
  m.def(
      "analytic_oracle",
      [](const std::string& family, double alpha, double t) {
        return analytic_oracle(oracle_family_from_name(family), alpha, t);
      },
      py::arg("family"), py::arg("alpha"), py::arg("t"),
      "Closed-form |<S>|(t); families ghz3-n100, ghz3-n211, w3-n100, "
      "w3-n211, ghz4-n100, ghz4-n211");
  m.def(
      "optimize_angles",
      [](const Matrix& rho, const std::string& family) {
        const AngleOptimum o =
            optimize_angles(as_density(rho), parse_family(family));
        return std::make_pair(o.angles, o.value);
      },
      py::arg("rho"), py::arg("family"));
  m.def(
      "death_time",
      [](const std::string& family, double alpha) -> py::object {
        const auto r = death_time(oracle_family_from_name(family), alpha);
        if (!r.time) return py::none();
        return py::float_(*r.time);
      },
      py::arg("family"), py::arg("alpha"),
      "Last crossing of the genuine-nonlocality threshold 2^{n-1}");
}
