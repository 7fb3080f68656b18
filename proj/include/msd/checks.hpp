#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include "msd/codes.hpp"
#include "msd/injection.hpp"

// Pass/fail suites behind `verify` and `verify-circuits`.

namespace msd {

struct CheckResult {
  std::string group;
  std::string name;
  bool passed = false;
  std::string detail;
};

inline bool all_passed(const std::vector<CheckResult>& checks) {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

/// Diagonal of S on every logical qubit of k.
inline std::vector<std::complex<double>> s_on_all(std::size_t k) {
  std::vector<std::complex<double>> d(std::size_t{1} << k);
  for (std::size_t a = 0; a < d.size(); ++a) d[a] = std::pow(std::complex<double>(0, 1), std::popcount(a));
  return d;
}

inline std::vector<std::complex<double>> z_on_all(std::size_t k) {
  std::vector<std::complex<double>> d(std::size_t{1} << k);
  for (std::size_t a = 0; a < d.size(); ++a) d[a] = (std::popcount(a) & 1) ? -1.0 : 1.0;
  return d;
}

/// Structural checks of one code plus the transversal-gate property it is used for.
inline std::vector<CheckResult> code_checks(const CodeSpec& code) {
  std::vector<CheckResult> out;
  const std::string group = "code " + code.name;
  const auto report = verify_code(code);
  std::size_t failed = 0;
  std::string first_failure;
  for (const auto& c : report.checks)
    if (!c.passed && failed++ == 0) first_failure = c.description;
  out.push_back({group, "commutation and logical pairing (" + std::to_string(report.checks.size()) + " checks)",
                 report.passed(), failed ? std::to_string(failed) + " failed, first: " + first_failure : ""});
  if (!report.passed()) return out;

  std::string weights;
  for (auto w : report.logical_x_weights) weights += (weights.empty() ? "" : ",") + std::to_string(w);
  if (code.n == 6 && code.k == 2) {
    bool ok = true;
    for (auto w : report.logical_x_weights) ok = ok && w % 4 == 3;
    out.push_back({group, "logical X weights are -1 mod 4", ok, "weights " + weights});
    const auto act = induced_logical_action(DiagonalGatePattern::uniform(6, DiagonalGate::Sdg), code);
    out.push_back({group, "S-dagger on every qubit induces S on both logical qubits",
                   act.ok && equal_up_to_phase(act.diagonal, s_on_all(2)), act.failure});
  } else if (code.n == 7 && code.k == 1) {
    bool ok = true;
    for (auto w : report.logical_x_weights) ok = ok && w % 8 == 7;
    out.push_back({group, "logical X weight is -1 mod 8", ok, "weights " + weights});
    const auto act = induced_logical_action(DiagonalGatePattern::uniform(7, DiagonalGate::Z), code);
    out.push_back({group, "Z on every qubit induces logical Z", act.ok && equal_up_to_phase(act.diagonal, z_on_all(1)),
                   act.failure});
  } else if (code.n == 8 && code.k == 3) {
    const auto act = induced_logical_action(ccz_pattern_832(), code);
    out.push_back({group, "T/T-dagger pattern " + ccz_pattern_832().str() + " induces exactly CCZ",
                   act.ok && equal_up_to_phase(act.diagonal, ccz_diagonal()), act.failure});
    if (report.unnamed_logical_qubits > 0)
      out.push_back({group, "unnamed encoded qubits (informational)", true,
                     std::to_string(report.unnamed_logical_qubits) + " gauge qubit(s)"});
  }
  return out;
}

inline std::vector<CheckResult> all_code_checks(const std::vector<CodeSpec>& codes) {
  std::vector<CheckResult> out;
  for (const auto& c : codes) {
    auto part = code_checks(c);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

inline StateVector random_state(std::size_t qubits, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  StateVector v(std::size_t{1} << qubits);
  for (auto& a : v) a = {g(rng), g(rng)};
  return circuit::normalized(v);
}

inline constexpr double kCircuitTolerance = 1e-12;

/// Cat-mediated X^m against direct projective measurement on random states.
inline CheckResult cat_measurement_check(std::size_t m, std::mt19937_64& rng, int trials = 2) {
  double worst_td = 0, worst_prob = 0, worst_phase = 0, worst_total = 0;
  for (int t = 0; t < trials; ++t) {
    const auto psi = random_state(m, rng);
    const auto direct = projective_x_measurement(psi, m);
    double prob_plus = 0, prob_minus = 0, total = 0;
    for_each_cat_branch(psi, m, [&](const CatMeasurementRecord& r) {
      total += r.probability;
      (r.inferred_eigenvalue > 0 ? prob_plus : prob_minus) += r.probability;
      const ProjectiveBranch* match = nullptr;
      for (const auto& d : direct)
        if (d.eigenvalue == r.inferred_eigenvalue) match = &d;
      if (!match) {
        worst_td = 1;
        return;
      }
      worst_td = std::max(worst_td, circuit::pure_trace_distance(r.post_state, match->post_state));
      if (m <= 4) {
        int xz = 0;
        for (std::size_t i = 0; i < m; ++i) xz ^= r.x_outcomes[i] && r.z_outcomes[i];
        worst_phase = std::max(worst_phase, std::abs(r.phase_vs_projection - std::complex<double>(xz ? -1 : 1)));
      }
    });
    for (const auto& d : direct)
      worst_prob = std::max(worst_prob, std::abs((d.eigenvalue > 0 ? prob_plus : prob_minus) - d.probability));
    worst_total = std::max(worst_total, std::abs(total - 1));
  }
  const bool ok = worst_td <= kCircuitTolerance && worst_prob <= kCircuitTolerance &&
                  worst_total <= kCircuitTolerance && worst_phase <= kCircuitTolerance;
  std::string detail = "max trace distance " + format_number(worst_td) + ", outcome probability error " +
                       format_number(worst_prob);
  if (m <= 4) detail += ", phase error " + format_number(worst_phase);
  return {"circuits", "cat-mediated X^" + std::to_string(m) + " equals projective measurement", ok, detail};
}

template <typename Circuit, typename Expected>
CheckResult single_qubit_circuit_check(const std::string& name, Circuit&& circuit, Expected&& expected,
                                       std::mt19937_64& rng, int trials) {
  double worst = 0, worst_total = 0;
  auto run = [&](const StateVector& psi) {
    const auto branches = circuit(psi);
    const auto want = circuit::normalized(expected(psi));
    double total = 0;
    for (const auto& b : branches) {
      total += b.probability;
      worst = std::max(worst, 1 - circuit::fidelity(b.output, want));
    }
    worst_total = std::max(worst_total, std::abs(total - 1));
  };
  const double h = 1 / std::sqrt(2.0);
  run({1, 0});
  run({h, h});
  run(circuit::t_state());
  for (int t = 0; t < trials; ++t) run(random_state(1, rng));
  return {"circuits", name, worst <= kCircuitTolerance && worst_total <= kCircuitTolerance,
          "max infidelity " + format_number(worst) + ", branch probability error " + format_number(worst_total)};
}

inline std::vector<CheckResult> circuit_checks(std::uint64_t seed = 20240607, int trials = 20) {
  std::mt19937_64 rng(seed);
  std::vector<CheckResult> out;
  for (std::size_t m : {2, 3, 4, 6, 7, 8}) out.push_back(cat_measurement_check(m, rng, m <= 6 ? 3 : 1));
  auto identity = [](const StateVector& v) { return v; };
  out.push_back(single_qubit_circuit_check(
      "teleportation via XX measurement is the identity",
      [](const StateVector& v) { return teleport_by_measurement(v, TeleportFlavor::XX); }, identity, rng, trials));
  out.push_back(single_qubit_circuit_check(
      "teleportation via ZZ measurement is the identity",
      [](const StateVector& v) { return teleport_by_measurement(v, TeleportFlavor::ZZ); }, identity, rng, trials));
  out.push_back(single_qubit_circuit_check("measurement-based T injection applies T",
                                           [](const StateVector& v) { return t_injection(v); },
                                           [](const StateVector& v) { return apply_t(v); }, rng, trials));
  return out;
}

}  // namespace msd
