// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one pass/fail line per criterion, nonzero exit status on
// any failure. Every witness-SDP solve in this binary runs through
// audited_negativity, which checks weak duality along the solver trace and
// re-verifies the exported certificate from scratch.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qdephase/bell.hpp"
#include "qdephase/channel.hpp"
#include "qdephase/gme.hpp"
#include "qdephase/scenario.hpp"

using namespace qdephase;

namespace {

int g_failures = 0;
int g_audited_solves = 0;
std::vector<std::string> g_notes;

void report(int criterion, bool pass, const std::string& what) {
  std::printf("[%2d] %s  %s\n", criterion, pass ? "PASS" : "FAIL",
              what.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// weak-duality + certificate audit wrapper used for every solve here
double audited_negativity(const DensityMatrix& rho) {
  const GmeResult g = genuine_negativity(rho);
  for (const auto& it : g.solver_trace) {
    if (it.primal_resid <= 1e-10 && it.dual > it.primal + 1e-9)
      throw NumericalFailureError(
          fmt("weak duality violated on trace: %.12g > %.12g", it.dual,
              it.primal));
  }
  const double tr = verify_certificate(rho, g.certificate);
  if (g.value > 0.0 && std::abs(tr + g.value) > 1e-6)
    throw NumericalFailureError("certificate expectation mismatch");
  ++g_audited_solves;
  return g.value;
}

double bisect_death(const std::function<double(double)>& e_of_t, double lo,
                    double hi) {
  for (int i = 0; i < 24; ++i) {
    const double mid = 0.5 * (lo + hi);
    (e_of_t(mid) > 1e-6 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

FieldOrientation n100() { return FieldOrientation::normalized(1, 0, 0); }
FieldOrientation n211() { return FieldOrientation::normalized(2, 1, 1); }

const double kSqrt2 = std::sqrt(2.0);

// --------------------------------------------------------------------------

void criterion_1() {
  struct Case {
    const char* name;
    PureState state;
    double expect, tol;
  };
  const std::vector<Case> cases = {
      {"GHZ3", ghz(3), 0.5, 1e-4},      {"GHZ4", ghz(4), 0.5, 1e-4},
      {"W3", w_state(3), 0.443, 5e-3},  {"W4", w_state(4), 0.366, 5e-3},
      {"D24", dicke24(), 0.5, 1e-4},    {"S4", singlet4(), 0.5, 1e-4},
      {"CL", cluster4(), 0.5, 1e-4},    {"chi4", chi4(), 0.5, 1e-4},
  };
  bool pass = true;
  std::string detail;
  for (const auto& c : cases) {
    const double e = audited_negativity(density_from_pure(c.state));
    const bool ok = std::abs(e - c.expect) <= c.tol;
    pass = pass && ok;
    detail += fmt("%s=%.4f%s ", c.name, e, ok ? "" : "(!)");
  }
  report(1, pass, "pure-state monotone values: " + detail);
}

void criterion_2() {
  const DephasingChannel ch(3, n100());
  const DensityMatrix rho = white_noise_mix(ghz(3), 0.99);
  std::vector<double> es;
  for (double t : {0.0, 1.0, 2.0, 4.0, 8.0, 16.0})
    es.push_back(audited_negativity(ch.evolve(rho, t)));
  bool decreasing = true;
  for (std::size_t i = 1; i < es.size(); ++i)
    decreasing = decreasing && es[i] <= es[i - 1] + 1e-6;
  const bool plateau = std::abs(es[4] - 0.323) <= 0.005 &&
                       std::abs(es[4] - es[5]) <= 1e-3;

  const DensityMatrix rw = white_noise_mix(w_state(3), 0.99);
  bool w_dies = false;
  for (double t : {1.0, 1.5, 2.0, 3.0}) {
    if (audited_negativity(ch.evolve(rw, t)) <= 1e-6) {
      w_dies = true;
      break;
    }
  }
  report(2, decreasing && plateau && w_dies,
         fmt("GHZ3 freezing under n=(1,0,0): E(8)=%.4f E(16)=%.4f "
             "decreasing=%d; W3 reaches 0 in finite time=%d",
             es[4], es[5], int(decreasing), int(w_dies)));
}

void criterion_3() {
  const DephasingChannel ch(3, n211());
  const DensityMatrix rg = white_noise_mix(ghz(3), 0.99);
  auto e_of_t = [&](double t) { return audited_negativity(ch.evolve(rg, t)); };
  const double death = bisect_death(e_of_t, 0.0, 8.0);
  const bool death_ok = std::abs(death - 1.9) <= 0.1;

  const DensityMatrix rw = white_noise_mix(w_state(3), 0.99);
  const double ew = audited_negativity(ch.evolve(rw, 10.0));
  const bool plateau_ok = std::abs(ew - 0.082) <= 0.005;
  report(3, death_ok && plateau_ok,
         fmt("orientation (2,1,1)/sqrt6: GHZ3 death t=%.3f (1.9+-0.1), W3 "
             "plateau E=%.4f (0.082+-0.005)",
             death, ew));
}

void criterion_4() {
  auto threshold = [&](const std::function<double(double)>& e_of_alpha) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 24; ++i) {
      const double mid = 0.5 * (lo + hi);
      (e_of_alpha(mid) > 1e-6 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double ghz_t = threshold([&](double a) {
    return audited_negativity(white_noise_mix(ghz(3), a));
  });
  const double w_t = threshold([&](double a) {
    return audited_negativity(white_noise_mix(w_state(3), a));
  });
  const DephasingChannel ch100(3, n100());
  const double ghz_inf = threshold([&](double a) {
    return audited_negativity(ch100.asymptotic(white_noise_mix(ghz(3), a)));
  });
  const DephasingChannel ch211(3, n211());
  const double w_inf = threshold([&](double a) {
    return audited_negativity(ch211.asymptotic(white_noise_mix(w_state(3), a)));
  });
  const bool pass = std::abs(ghz_t - 0.429) <= 0.005 &&
                    std::abs(w_t - 0.479) <= 0.005 &&
                    std::abs(ghz_inf - 0.56) <= 0.01 &&
                    std::abs(w_inf - 0.86) <= 0.01;
  report(4, pass,
         fmt("thresholds: GHZ3 %.4f (0.429), W3 %.4f (0.479); asymptotic "
             "GHZ3 %.4f (0.56), W3 %.4f (0.86)",
             ghz_t, w_t, ghz_inf, w_inf));
}

void criterion_5() {
  struct Case {
    const char* name;
    PureState state;
  };
  const std::vector<Case> zoo = {{"GHZ4", ghz(4)},      {"W4", w_state(4)},
                                 {"D24", dicke24()},    {"S4", singlet4()},
                                 {"CL", cluster4()},    {"chi4", chi4()}};
  bool pass = true;
  std::string detail;
  {
    const DephasingChannel ch(4, n100());
    for (const auto& c : zoo) {
      const DensityMatrix rho = white_noise_mix(c.state, 0.99);
      const double e8 = audited_negativity(ch.evolve(rho, 8.0));
      const double e16 = audited_negativity(ch.evolve(rho, 16.0));
      const bool is_cluster = std::string(c.name) == "CL";
      if (is_cluster) {
        const bool died = e8 <= 1e-6;
        pass = pass && died;
        detail += fmt("CL(n100) dies=%d ", int(died));
      } else {
        const bool frozen = e8 > 1e-3 && std::abs(e8 - e16) <= 1e-3;
        pass = pass && frozen;
        if (!frozen) detail += fmt("%s(n100) not frozen! ", c.name);
      }
    }
  }
  {
    const DephasingChannel ch(4, n211());
    for (const auto& c : zoo) {
      const DensityMatrix rho = white_noise_mix(c.state, 0.99);
      const bool is_dicke = std::string(c.name) == "D24";
      if (is_dicke) {
        auto e_of_t = [&](double t) {
          return audited_negativity(ch.evolve(rho, t));
        };
        const double death = bisect_death(e_of_t, 0.0, 8.0);
        const bool ok = std::abs(death - 1.72) <= 0.1;
        pass = pass && ok;
        detail += fmt("D24(n211) death t=%.3f (1.72+-0.1) ", death);
      } else {
        const double e8 = audited_negativity(ch.evolve(rho, 8.0));
        const double e16 = audited_negativity(ch.evolve(rho, 16.0));
        const bool frozen = e8 > 1e-3 && std::abs(e8 - e16) <= 1e-3;
        pass = pass && frozen;
        if (!frozen) detail += fmt("%s(n211) not frozen! ", c.name);
      }
    }
  }
  report(5, pass, "four-qubit dynamics: " + detail);
}

void criterion_6() {
  bool pass = true;
  std::string detail;
  for (OracleFamily f :
       {OracleFamily::GHZ3_n100, OracleFamily::GHZ3_n211, OracleFamily::W3_n100,
        OracleFamily::W3_n211, OracleFamily::GHZ4_n100,
        OracleFamily::GHZ4_n211}) {
    const auto info = oracle_family_info(f);
    const auto op = svetlichny_operator(oracle_setting(f));
    const DephasingChannel ch(info.qubits, info.orientation);
    double worst = 0.0;
    for (double alpha : {0.5, 0.9, 0.99, 1.0}) {
      const DensityMatrix rho0 = oracle_initial_state(f, alpha);
      for (int i = 0; i <= 50; ++i) {
        const double t = i * 0.1;
        const double pipe = std::abs(expectation(op, ch.evolve(rho0, t)));
        const double oracle = analytic_oracle(f, alpha, t);
        const double err = f == OracleFamily::W3_n211
                               ? std::abs(pipe - oracle) / oracle / 2e-2
                               : std::abs(pipe - oracle) / 1e-7;
        worst = std::max(worst, err);
      }
    }
    pass = pass && worst <= 1.0;
    detail += fmt("%s=%.2g ", to_string(f), worst);
  }
  report(6, pass,
         "pipeline vs closed forms, worst error / tolerance: " + detail);
}

void criterion_7() {
  bool pass = true;
  std::string detail;

  const auto g3 = optimize_angles(density_from_pure(ghz(3)), SettingFamily::Ghz);
  const bool g3_ok = std::abs(g3.value - 4 * kSqrt2) <= 1e-4;
  const auto w3 = optimize_angles(density_from_pure(w_state(3)), SettingFamily::W);
  const bool w3_ok = std::abs(w3.value - 4.3546) <= 1e-3 &&
                     std::abs(w3.angles[0] * 180 / M_PI - 54.736) <= 0.1;
  const auto g4 = optimize_angles(density_from_pure(ghz(4)), SettingFamily::Ghz);
  const bool g4_ok = std::abs(g4.value - 8 * kSqrt2) <= 1e-4;
  pass = g3_ok && w3_ok && g4_ok;
  detail += fmt("optima GHZ3=%.5f W3=%.5f@%.3fdeg GHZ4=%.5f; ", g3.value,
                w3.value, w3.angles[0] * 180 / M_PI, g4.value);

  // asymptotic |<S>| on the t->infinity states, against the quoted limits
  struct Asym {
    OracleFamily family;
    double expect;  // per unit alpha
    const char* label;
  };
  const double alpha = 0.9;
  const std::vector<Asym> asyms = {
      {OracleFamily::GHZ3_n100, 5 / kSqrt2, "ghz3-n100"},
      {OracleFamily::GHZ3_n211, 5 / (54 * kSqrt2), "ghz3-n211"},
      {OracleFamily::GHZ4_n100, 19 / (2 * kSqrt2), "ghz4-n100"},
      {OracleFamily::W3_n100, 0.0, "w3-n100"},
      {OracleFamily::W3_n211, 0.0, "w3-n211"},
  };
  for (const auto& a : asyms) {
    const auto info = oracle_family_info(a.family);
    const DephasingChannel ch(info.qubits, info.orientation);
    const DensityMatrix inf =
        ch.asymptotic(oracle_initial_state(a.family, alpha));
    const double v =
        std::abs(expectation(svetlichny_operator(oracle_setting(a.family)), inf));
    const bool ok = std::abs(v - alpha * a.expect) <= 1e-3;
    pass = pass && ok;
    detail += fmt("%s=%.4f%s ", a.label, v, ok ? "" : "(!)");
    if (!ok && a.family == OracleFamily::W3_n211) {
      g_notes.push_back(fmt(
          "criterion 7: the asymptotic W3 value under n=(2,1,1)/sqrt(6) is "
          "%.4f = 1.3*alpha, not 0. The quoted closed form "
          "1.3 a e^{-3t}(0.444+e^t)(1.83+e^t(-0.5134+e^t)) tends to 1.3 a "
          "itself, and the exact pipeline tracks that formula to 0.2%% "
          "(criterion 6), so the stated zero limit contradicts both. The "
          "value stays below the violation bound 4, so the physical claim "
          "of finite-time nonlocality loss is unaffected.",
          v));
    }
  }
  report(7, pass, "nonlocality extremes: " + detail);
}

void criterion_8() {
  const double alpha = 0.99;
  const double t_star = 0.5 * std::log(3.0 / (4 * kSqrt2 / alpha - 5.0));
  const auto res = death_time(OracleFamily::GHZ3_n100, alpha);
  const bool time_ok = res.time && std::abs(*res.time - t_star) <= 1e-4;

  const DephasingChannel ch(3, n100());
  const DensityMatrix rho = white_noise_mix(ghz(3), alpha);
  const double e_at_death = audited_negativity(ch.evolve(rho, t_star));
  const bool surviving = e_at_death > 0.3;
  report(8, time_ok && surviving,
         fmt("nonlocality death t*=%.6f (formula %.6f) with E(t*)=%.4f > 0.3",
             res.time.value_or(-1.0), t_star, e_at_death));
}

void criterion_9() {
  bool pass = true;
  std::string detail;
  std::mt19937_64 gen(20260809);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uni_t(0.0, 8.0);

  // channel trace preservation / positivity on 500 random triples
  {
    double worst_tr = 0.0, worst_ev = 0.0;
    for (int rep = 0; rep < 500; ++rep) {
      const int n = 2 + rep % 3;
      const FieldOrientation orient = FieldOrientation::normalized(
          normal(gen), normal(gen), normal(gen));
      const DephasingChannel ch(n, orient);
      RandomStateSeed seed{derive_seed(1000, rep)};
      std::uniform_real_distribution<double> uni_a(0.0, 1.0);
      const DensityMatrix rho =
          white_noise_mix(random_pure(n, seed), uni_a(gen));
      const DensityMatrix out = ch.evolve(rho, uni_t(gen));
      worst_tr = std::max(worst_tr,
                          std::abs(out.matrix.trace().real() - 1.0) +
                              std::abs(out.matrix.trace().imag()));
      worst_ev = std::min(worst_ev, min_eigenvalue(out.matrix));
      worst_ev = std::min(worst_ev, 0.0);
    }
    const bool ok = worst_tr <= 1e-12 && worst_ev >= -1e-9;
    pass = pass && ok;
    detail += fmt("channel: |dTr|<=%.2g minEig>=%.2g; ", worst_tr, worst_ev);
  }

  // Theta completeness / orthogonality and Toeplitz PSD
  {
    bool ok = true;
    for (int rep = 0; rep < 20; ++rep) {
      const int n = 2 + rep % 3;
      const FieldOrientation orient = FieldOrientation::normalized(
          normal(gen), normal(gen), normal(gen));
      const auto thetas = theta_operators(orient, n);
      Matrix sum = Matrix::Zero(1 << n, 1 << n);
      for (const auto& th : thetas) sum += th;
      ok = ok && (sum - Matrix::Identity(1 << n, 1 << n))
                         .cwiseAbs()
                         .maxCoeff() <= 1e-10;
      for (std::size_t j = 0; j < thetas.size() && ok; ++j)
        for (std::size_t k = 0; k < thetas.size() && ok; ++k) {
          const Matrix prod = thetas[j] * thetas[k];
          const Matrix want =
              j == k ? thetas[j] : Matrix::Zero(1 << n, 1 << n);
          ok = (prod - want).cwiseAbs().maxCoeff() <= 1e-10;
        }
      const Matrix m =
          toeplitz_matrix(SpectralModel::standard_cauchy(), n, uni_t(gen));
      ok = ok && min_eigenvalue(m) >= -1e-12;
    }
    pass = pass && ok;
    detail += fmt("theta/toeplitz ok=%d; ", int(ok));
  }

  // N=2 monotone equals the partial-transpose negativity oracle
  {
    double worst = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
      RandomStateSeed seed{derive_seed(2000, rep)};
      std::uniform_real_distribution<double> uni_a(0.0, 1.0);
      const DensityMatrix rho =
          white_noise_mix(random_pure(2, seed), uni_a(gen));
      worst = std::max(worst, std::abs(audited_negativity(rho) -
                                       bipartite_negativity(rho)));
    }
    pass = pass && worst <= 1e-6;
    detail += fmt("N=2 vs negativity |d|<=%.2g; ", worst);
  }

  // Haar sampler: KS test of |amp_0|^2 against Beta(1, 3) at the 1% level
  {
    const int samples = 10000;
    std::vector<double> xs(samples);
    for (int k = 0; k < samples; ++k) {
      RandomStateSeed seed{derive_seed(3000, k)};
      xs[k] = std::norm(random_pure(2, seed).amplitudes(0));
    }
    std::sort(xs.begin(), xs.end());
    double ks = 0.0;
    for (int k = 0; k < samples; ++k) {
      const double cdf = 1.0 - std::pow(1.0 - xs[k], 3);
      ks = std::max(ks, std::abs(cdf - (k + 1.0) / samples));
      ks = std::max(ks, std::abs(cdf - double(k) / samples));
    }
    const bool ok = ks < 1.63 / std::sqrt(double(samples));
    pass = pass && ok;
    detail += fmt("KS=%.4f (<%.4f); ", ks, 1.63 / std::sqrt(double(samples)));
  }

  detail += fmt("audited SDP solves so far: %d", g_audited_solves);
  report(9, pass, "property suites: " + detail);
}

void criterion_10() {
  bool pass = true;
  std::string detail;
  for (const FieldOrientation& orient : {n100(), n211()}) {
    const DephasingChannel ch(3, orient);
    int retained = 0;
    for (int k = 0; k < 100; ++k) {
      RandomStateSeed seed{derive_seed(20260809, k)};
      const DensityMatrix rho =
          white_noise_mix(random_pure(3, seed), 0.95);
      if (audited_negativity(ch.evolve(rho, 10.0)) > 0.01) ++retained;
    }
    pass = pass && retained >= 70;
    detail += fmt("(%.2f,%.2f,%.2f): %d/100 ", orient.nx, orient.ny,
                  orient.nz, retained);
  }
  report(10, pass, "random ensembles retain E > 0.01 at t=10: " + detail);
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  check_oracle_identities();
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  const double secs =
      std::chrono::duration<double>(clock::now() - t0).count();
  std::printf("----\n%d of 10 criteria passed, %d audited witness solves, "
              "%.1f s\n",
              10 - g_failures, g_audited_solves, secs);
  for (const auto& note : g_notes) std::printf("note: %s\n", note.c_str());
  return g_failures;
}
