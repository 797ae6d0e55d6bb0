// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qdephase/bell.hpp"
#include "qdephase/channel.hpp"
#include "qdephase/gme.hpp"

// Sweep harness behind the CLI: INI-style scenario configs, deterministic
// CSV emission (schema scenario,t,alpha,nx,ny,nz,E,S,S_setting,status), and
// seeded random-state ensembles. Identical config + seed produce
// byte-identical output files.

namespace qdephase {

enum class SweepAxis { Time, Alpha };
enum class Quantity { Negativity, Svetlichny, AsymptoticNegativity };
enum class AngleMode { T0Optimal, OptimizePerT, Explicit };

struct Scenario {
  std::string id;
  int qubits = 3;
  std::string state = "ghz";  // named state, random:<seed>, or file:<path>
  double alpha = 1.0;
  FieldOrientation orientation = FieldOrientation::normalized(0, 0, 1);
  SpectralModel spectral;
  SweepAxis axis = SweepAxis::Time;
  double start = 0.0, stop = 0.0, step = 0.0;
  double fixed_t = 0.0;  // evolution time for alpha sweeps
  std::vector<Quantity> quantities;
  SettingFamily svet_family = SettingFamily::Ghz;
  AngleMode angle_mode = AngleMode::T0Optimal;
  std::vector<double> svet_angles;
};

struct RunConfig {
  std::string output;
  std::uint64_t seed = 0;
  std::vector<Scenario> scenarios;
};

RunConfig parse_config_text(const std::string& text, const std::string& origin);
RunConfig parse_config(const std::string& path);

struct SweepRecord {
  std::string scenario;
  double t = 0.0;
  bool t_infinite = false;
  double alpha = 1.0;
  double nx = 0, ny = 0, nz = 1;
  std::optional<double> e;
  std::optional<double> s;
  std::string s_setting;
  std::string status = "ok";
};

std::string format_csv(const std::vector<SweepRecord>& records);

// Temp-file + rename so readers never observe a partial file.
void write_csv_atomic(const std::string& path,
                      const std::vector<SweepRecord>& records);

DensityMatrix scenario_initial_state(const Scenario& sc, double alpha);

// Grid points dispatch to a worker pool; record order follows grid order.
std::vector<SweepRecord> run_scenarios(const RunConfig& cfg);

// Parses, runs, writes the CSV and prints a per-scenario summary (last E and
// the max |dE| over the final quarter of the grid as a freezing diagnostic).
void run_scenario_file(const std::string& path, std::ostream& summary,
                       bool emit_gnuplot = false);

void emit_gnuplot_script(const std::string& csv_path, const RunConfig& cfg);

struct EnsembleConfig {
  int qubits = 3;
  int count = 1;
  double alpha = 0.95;
  FieldOrientation orientation = FieldOrientation::normalized(1, 0, 0);
  SpectralModel spectral;
  std::uint64_t seed = 0;
  double t_start = 0.0, t_stop = 10.0, t_step = 0.5;
  std::string output;  // per-sample CSV; mean curve goes to *-mean.csv
};

std::string ensemble_mean_path(const std::string& output);
void run_ensemble(const EnsembleConfig& cfg, std::ostream& summary);

}  // namespace qdephase
