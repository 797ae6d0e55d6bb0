// SPDX-License-Identifier: Apache-2.0
//
// qdephase: collective-dephasing dynamics, genuine multipartite
// entanglement, and Svetlichny nonlocality for 2-4 qubit states.

#include <cmath>
#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "qdephase/scenario.hpp"

namespace {

using namespace qdephase;

struct StateOptions {
  int qubits = 3;
  std::string state = "ghz";
  std::string state_file;
  double alpha = 1.0;
  std::vector<double> orientation = {0, 0, 1};
  std::string spectral = "cauchy";
  double x0 = 0.0;
  double gamma = 1.0;
};

void add_state_options(CLI::App* cmd, StateOptions& opt, bool with_channel) {
  cmd->add_option("--qubits", opt.qubits, "qubit count (2-4)");
  cmd->add_option("--state", opt.state,
                  "ghz | w | dicke24 | singlet4 | cluster4 | chi4 | "
                  "random:<seed>");
  cmd->add_option("--state-file", opt.state_file,
                  "density matrix in the plain-text format");
  cmd->add_option("--alpha", opt.alpha, "white-noise mixing weight");
  if (with_channel) {
    cmd->add_option("--orientation", opt.orientation, "field orientation")
        ->expected(3);
    cmd->add_option("--spectral", opt.spectral, "cauchy | lorentz");
    cmd->add_option("--x0", opt.x0, "lorentz center");
    cmd->add_option("--gamma", opt.gamma, "lorentz width");
  }
}

Scenario to_scenario(const StateOptions& opt) {
  Scenario sc;
  sc.qubits = opt.qubits;
  sc.state = opt.state_file.empty() ? opt.state : "file:" + opt.state_file;
  const double norm = std::sqrt(opt.orientation[0] * opt.orientation[0] +
                                opt.orientation[1] * opt.orientation[1] +
                                opt.orientation[2] * opt.orientation[2]);
  if (std::abs(norm - 1.0) > 1e-6)
    std::cerr << "warning: orientation normalized (|n| = " << norm << ")\n";
  sc.orientation = FieldOrientation::normalized(
      opt.orientation[0], opt.orientation[1], opt.orientation[2]);
  if (opt.spectral == "cauchy")
    sc.spectral = SpectralModel::standard_cauchy();
  else if (opt.spectral == "lorentz")
    sc.spectral = SpectralModel::shifted_lorentzian(opt.x0, opt.gamma);
  else
    throw ConfigParseError("spectral must be cauchy or lorentz");
  return sc;
}

void print_state(const DensityMatrix& rho, const std::string& output) {
  if (output.empty())
    write_matrix_text(std::cout, rho.matrix);
  else
    save_state(output, rho);
}

int run(int argc, char** argv) {
  CLI::App app{
      "collective dephasing, genuine entanglement and Svetlichny "
      "nonlocality for few-qubit states"};
  app.require_subcommand(1);

  // evolve
  StateOptions evolve_opt;
  double evolve_t = 0.0;
  std::string evolve_out;
  auto* cmd_evolve =
      app.add_subcommand("evolve", "apply the dephasing channel at time t");
  add_state_options(cmd_evolve, evolve_opt, true);
  cmd_evolve->add_option("--t", evolve_t, "dimensionless time")->required();
  cmd_evolve->add_option("--output", evolve_out, "state output path");

  // asymptotic
  StateOptions asym_opt;
  std::string asym_out;
  auto* cmd_asym =
      app.add_subcommand("asymptotic", "t -> infinity limit of the channel");
  add_state_options(cmd_asym, asym_opt, true);
  cmd_asym->add_option("--output", asym_out, "state output path");

  // negativity
  StateOptions neg_opt;
  double neg_t = -1.0;
  bool neg_asymptotic = false;
  std::string neg_cert;
  auto* cmd_neg = app.add_subcommand(
      "negativity", "genuine multipartite negativity via the witness SDP");
  add_state_options(cmd_neg, neg_opt, true);
  cmd_neg->add_option("--t", neg_t, "evolve before measuring");
  cmd_neg->add_flag("--asymptotic", neg_asymptotic,
                    "measure the asymptotic state");
  cmd_neg->add_option("--certificate", neg_cert, "witness certificate output");

  // svetlichny
  StateOptions svet_opt;
  double svet_t = -1.0;
  std::string svet_family = "ghz";
  bool svet_optimize = false;
  std::vector<double> svet_angles;
  auto* cmd_svet =
      app.add_subcommand("svetlichny", "Svetlichny operator expectation");
  add_state_options(cmd_svet, svet_opt, true);
  cmd_svet->add_option("--t", svet_t, "evolve before measuring");
  cmd_svet->add_option("--family", svet_family, "ghz | w");
  cmd_svet->add_flag("--optimize", svet_optimize,
                     "grid + golden-section angle search");
  cmd_svet->add_option("--angles", svet_angles,
                       "explicit family angles (radians)");

  // sweep
  std::string sweep_config;
  bool sweep_gnuplot = false;
  auto* cmd_sweep =
      app.add_subcommand("sweep", "run a scenario config and write CSV");
  cmd_sweep->add_option("config", sweep_config, "scenario config file")
      ->required();
  cmd_sweep->add_flag("--emit-gnuplot", sweep_gnuplot,
                      "write a gnuplot script next to the CSV");

  // ensemble
  EnsembleConfig ens;
  std::vector<double> ens_orientation = {1, 0, 0};
  auto* cmd_ens = app.add_subcommand(
      "ensemble", "seeded random-state ensemble with mean curve");
  cmd_ens->add_option("--qubits", ens.qubits, "qubit count");
  cmd_ens->add_option("--count", ens.count, "number of samples")->required();
  cmd_ens->add_option("--alpha", ens.alpha, "white-noise mixing weight");
  cmd_ens->add_option("--orientation", ens_orientation, "field orientation")
      ->expected(3);
  cmd_ens->add_option("--seed", ens.seed, "base seed")->required();
  cmd_ens->add_option("--t-start", ens.t_start, "grid start");
  cmd_ens->add_option("--t-stop", ens.t_stop, "grid stop");
  cmd_ens->add_option("--t-step", ens.t_step, "grid step");
  cmd_ens->add_option("--output", ens.output, "per-sample CSV path")
      ->required();

  // verify-witness
  StateOptions verify_opt;
  std::string verify_cert;
  auto* cmd_verify = app.add_subcommand(
      "verify-witness", "audit an exported witness certificate");
  add_state_options(cmd_verify, verify_opt, false);
  cmd_verify->add_option("--certificate", verify_cert, "certificate path")
      ->required();

  CLI11_PARSE(app, argc, argv);

  if (cmd_evolve->parsed()) {
    const Scenario sc = to_scenario(evolve_opt);
    const DephasingChannel ch(sc.qubits, sc.orientation, sc.spectral);
    print_state(ch.evolve(scenario_initial_state(sc, evolve_opt.alpha), evolve_t),
                evolve_out);
  } else if (cmd_asym->parsed()) {
    const Scenario sc = to_scenario(asym_opt);
    const DephasingChannel ch(sc.qubits, sc.orientation, sc.spectral);
    print_state(ch.asymptotic(scenario_initial_state(sc, asym_opt.alpha)),
                asym_out);
  } else if (cmd_neg->parsed()) {
    const Scenario sc = to_scenario(neg_opt);
    DensityMatrix rho = scenario_initial_state(sc, neg_opt.alpha);
    if (neg_asymptotic || neg_t >= 0.0) {
      const DephasingChannel ch(sc.qubits, sc.orientation, sc.spectral);
      rho = neg_asymptotic ? ch.asymptotic(rho) : ch.evolve(rho, neg_t);
    }
    const GmeResult g = genuine_negativity(rho);
    std::printf("%.6f\n", g.value);
    if (!neg_cert.empty()) save_certificate(neg_cert, g.certificate);
  } else if (cmd_svet->parsed()) {
    const Scenario sc = to_scenario(svet_opt);
    DensityMatrix rho = scenario_initial_state(sc, svet_opt.alpha);
    if (svet_t >= 0.0) {
      const DephasingChannel ch(sc.qubits, sc.orientation, sc.spectral);
      rho = ch.evolve(rho, svet_t);
    }
    const SettingFamily family =
        svet_family == "w" ? SettingFamily::W : SettingFamily::Ghz;
    SvetlichnySetting setting;
    if (svet_optimize) {
      const AngleOptimum opt = optimize_angles(rho, family);
      std::printf("%.6f\n", opt.value);
      std::fprintf(stderr, "setting: %s\n", opt.tag.c_str());
      return 0;
    }
    if (!svet_angles.empty()) {
      setting = family == SettingFamily::W
                    ? w_family_setting(sc.qubits, svet_angles.at(0))
                    : ghz_family_setting(sc.qubits, svet_angles);
    } else if (family == SettingFamily::W) {
      setting = w_family_setting(sc.qubits, w_magic_angle());
    } else {
      const int nang = sc.qubits - 1;
      setting = ghz_family_setting(
          sc.qubits, std::vector<double>(nang, -M_PI / 4 / nang));
    }
    std::printf("%.6f\n",
                std::abs(expectation(svetlichny_operator(setting), rho)));
    std::fprintf(stderr, "setting: %s\n", setting.tag.c_str());
  } else if (cmd_sweep->parsed()) {
    run_scenario_file(sweep_config, std::cout, sweep_gnuplot);
  } else if (cmd_ens->parsed()) {
    ens.orientation = FieldOrientation::normalized(
        ens_orientation[0], ens_orientation[1], ens_orientation[2]);
    run_ensemble(ens, std::cout);
  } else if (cmd_verify->parsed()) {
    Scenario sc;
    sc.qubits = verify_opt.qubits;
    sc.state = verify_opt.state_file.empty()
                   ? verify_opt.state
                   : "file:" + verify_opt.state_file;
    const DensityMatrix rho = scenario_initial_state(sc, verify_opt.alpha);
    const WitnessCertificate cert = load_certificate(verify_cert);
    const double tr = verify_certificate(rho, cert);
    std::printf("%.6f\n", tr);
    std::printf(tr < 0 ? "OK: genuine multipartite entanglement certified\n"
                       : "OK: certificate valid (no entanglement certified)\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const qdephase::ConfigParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const qdephase::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 1;
  } catch (const qdephase::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
