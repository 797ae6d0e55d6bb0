// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qdephase/channel.hpp"
#include "qdephase/states.hpp"

// Svetlichny operators for 3 and 4 parties, expectation values on states,
// angle optimization, nonlocality death times, and the closed-form decay
// oracles for GHZ/W mixtures under collective dephasing. Violation of
// |<S>| > 2^{n-1} certifies genuine n-partite nonlocality.

namespace qdephase {

struct DichotomicObservable {
  double bx = 0, by = 0, bz = 0;  // unit Bloch vector
  Matrix matrix() const { return bloch_observable(bx, by, bz); }
};

enum class SettingFamily { Ghz, W, Explicit };

struct SvetlichnySetting {
  int parties = 0;
  SettingFamily family = SettingFamily::Explicit;
  std::vector<double> angles;  // family parameters
  // per-party measurement pair (M, M')
  std::vector<std::pair<DichotomicObservable, DichotomicObservable>> observables;
  std::string tag;
};

// theta maximizing the W-state violation: acos(1/sqrt(3)) ~ 54.736 deg.
double w_magic_angle();

// Party A anchored at (M, M') = (sigma_y, sigma_x); each further party K uses
// the rotated pair M_K = cos(t) sigma_y - sin(t) sigma_x,
// M'_K = sin(t) sigma_y + cos(t) sigma_x. thetas has parties-1 entries.
SvetlichnySetting ghz_family_setting(int parties,
                                     const std::vector<double>& thetas);

// Every party measures cos(t) sigma_x +- sin(t) sigma_z.
SvetlichnySetting w_family_setting(int parties, double theta);

SvetlichnySetting explicit_setting(
    std::vector<std::pair<DichotomicObservable, DichotomicObservable>> obs);

struct SvetlichnyOperator {
  int parties = 0;
  Matrix matrix;
};

// n=3: the eight-term signed sum with signs +,+,-,- over the number of primed
// factors; n=4: the sixteen-term sum with signs +,-,-,+,+ (see bell.cpp).
SvetlichnyOperator svetlichny_operator(const SvetlichnySetting& setting);

// Re Tr(S rho); asserts the imaginary residue (<= 1e-10) and the quantum cap
// |<S>| <= 2^{n-1} sqrt(2).
double expectation(const SvetlichnyOperator& op, const DensityMatrix& rho);

// <S> for a Ghz-family setting without building the operator; exact, used by
// the angle grid search. Equals expectation(svetlichny_operator(...), rho).
double ghz_family_expectation(const DensityMatrix& rho,
                              const std::vector<double>& thetas);

struct AngleOptimum {
  std::vector<double> angles;
  double value = 0.0;  // max |<S>|
  std::string tag;
};

// Coarse 1-degree grid over each family parameter followed by per-coordinate
// golden-section refinement of |<S>|.
AngleOptimum optimize_angles(const DensityMatrix& rho, SettingFamily family);

// ---------------------------------------------------------------------------
// Closed-form |<S>|(t) for white-noise mixtures evolved under the standard
// Cauchy channel, by initial state and field orientation.

enum class OracleFamily {
  GHZ3_n100,
  GHZ3_n211,
  W3_n100,
  W3_n211,
  GHZ4_n100,
  GHZ4_n211,
};

OracleFamily oracle_family_from_name(const std::string& name);
const char* to_string(OracleFamily f);

double analytic_oracle(OracleFamily family, double alpha, double t);

struct OracleFamilyInfo {
  int qubits = 0;
  bool w_state = false;  // GHZ otherwise
  FieldOrientation orientation;
};
OracleFamilyInfo oracle_family_info(OracleFamily f);

// The measurement setting behind each closed form: Ghz family with the total
// angle -pi/4 split evenly, or the W family at the magic angle.
SvetlichnySetting oracle_setting(OracleFamily f);
DensityMatrix oracle_initial_state(OracleFamily f, double alpha);

// t=0 consistency identities of the six closed forms (asserted once on first
// oracle use; throws NumericalFailureError when violated).
void check_oracle_identities();

// ---------------------------------------------------------------------------
// Death time: last crossing of |<S>|(t) = threshold, bisected to 1e-6 after a
// grid scan (step 0.01 on [0, t_max]). `time` is empty when the trajectory
// never exceeds the threshold; multiple crossings are all reported and
// `monotone` is cleared.

struct DeathTimeResult {
  std::optional<double> time;
  std::vector<double> crossings;
  bool monotone = true;
};

DeathTimeResult death_time(const std::function<double(double)>& trajectory,
                           double threshold, double t_max = 20.0,
                           double grid_step = 0.01);

DeathTimeResult death_time(OracleFamily family, double alpha,
                           std::optional<double> threshold = std::nullopt);

DeathTimeResult death_time(const DephasingChannel& channel,
                           const DensityMatrix& rho0,
                           const SvetlichnySetting& setting,
                           std::optional<double> threshold = std::nullopt);

}  // namespace qdephase
