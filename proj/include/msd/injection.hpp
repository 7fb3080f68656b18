#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "msd/codes.hpp"
#include "msd/pauli.hpp"

// Pure-state models of the measurement-only primitives: cat-state mediated X^m
// measurement, teleportation by two-qubit measurements, and T injection.

namespace msd {

using StateVector = std::vector<std::complex<double>>;

namespace circuit {

/// One outcome branch: unnormalized state plus the recorded outcomes (true = -1).
struct Branch {
  StateVector psi;
  std::vector<bool> outcomes;
  double weight() const { return detail::norm2(psi); }
};

inline StateVector tensor(const StateVector& low, const StateVector& high) {
  StateVector out(low.size() * high.size());
  for (std::size_t h = 0; h < high.size(); ++h)
    for (std::size_t l = 0; l < low.size(); ++l) out[h * low.size() + l] = low[l] * high[h];
  return out;
}

/// Splits every branch on the outcome of `p`; zero-weight branches are dropped.
inline std::vector<Branch> measure(const std::vector<Branch>& in, const PauliString& p, double drop_below = 1e-28) {
  std::vector<Branch> out;
  for (const auto& b : in) {
    for (int minus = 0; minus < 2; ++minus) {
      Branch nb = b;
      detail::project(nb.psi, p, minus ? -1 : 1);
      if (nb.weight() <= drop_below) continue;
      nb.outcomes.push_back(minus);
      out.push_back(std::move(nb));
    }
  }
  return out;
}

inline void apply(Branch& b, const PauliString& p) { detail::apply_pauli(b.psi, p); }

/// Amplitudes of `v` restricted to basis states where `fixed_mask` bits equal `fixed_value`,
/// compacted onto the remaining qubits.
inline StateVector restrict_to(const StateVector& v, std::size_t n, std::uint64_t fixed_mask, std::uint64_t fixed_value) {
  std::vector<std::size_t> free;
  for (std::size_t q = 0; q < n; ++q)
    if (!((fixed_mask >> q) & 1)) free.push_back(q);
  StateVector out(std::size_t{1} << free.size());
  for (std::uint64_t c = 0; c < out.size(); ++c) {
    std::uint64_t full = fixed_value & fixed_mask;
    for (std::size_t k = 0; k < free.size(); ++k)
      if ((c >> k) & 1) full |= std::uint64_t{1} << free[k];
    out[c] = v[full];
  }
  return out;
}

inline StateVector normalized(StateVector v) {
  const double nn = std::sqrt(detail::norm2(v));
  if (nn == 0) throw std::domain_error("cannot normalize a zero state");
  for (auto& a : v) a /= nn;
  return v;
}

/// |<a|b>|^2 for normalized inputs.
inline double fidelity(const StateVector& a, const StateVector& b) { return std::norm(detail::inner(a, b)); }

/// Trace distance sqrt(1 - |<a|b>|^2) between pure states (normalized inside). Uses
/// 1 - |<a|b>|^2 = |a - c|^2 (1 + |<a|b>|) / 2 with c the phase-aligned b, which
/// avoids the cancellation in 1 - F.
inline double pure_trace_distance(const StateVector& a, const StateVector& b) {
  const auto na = normalized(a), nb = normalized(b);
  const auto overlap = detail::inner(na, nb);
  const double mag = std::abs(overlap);
  const std::complex<double> align = mag > 0 ? std::conj(overlap) / mag : 1.0;
  double diff2 = 0;
  for (std::size_t i = 0; i < na.size(); ++i) diff2 += std::norm(na[i] - align * nb[i]);
  return std::sqrt(std::max(0.0, diff2 * (1 + mag) / 2));
}

inline StateVector t_state() {
  const double h = 1 / std::sqrt(2.0);
  return {h, std::polar(h, std::acos(-1.0) / 4)};
}

inline StateVector s_state() {
  const double h = 1 / std::sqrt(2.0);
  return {h, std::complex<double>(0, h)};
}

}  // namespace circuit

/// One branch of the cat-mediated X^m measurement.
struct CatMeasurementRecord {
  std::vector<bool> x_outcomes;  ///< vertical XX outcomes, true = -1
  std::vector<bool> z_outcomes;  ///< cat-qubit Z outcomes, true = -1
  int inferred_eigenvalue = 1;   ///< (-1)^{|x|}
  double probability = 0;
  StateVector post_state;        ///< data qubits after the X_z correction, normalized
  /// post_state relative to the normalized projection (1 + eigenvalue X^m)/2 |psi>;
  /// unit modulus when the two agree up to a global phase.
  std::complex<double> phase_vs_projection;
};

/// Measures X^m on an m-qubit state through an ideal cat state: m vertical XX
/// measurements, m cat-qubit Z measurements, then X on the data where z = -1.
/// Data qubits occupy register bits 0..m-1, cat qubits bits m..2m-1. Branches with
/// zero probability are skipped; `visit` sees the others in (x, z) lexicographic order.
template <typename Visitor>
void for_each_cat_branch(const StateVector& state, std::size_t m, Visitor&& visit) {
  if (m < 2 || m > 8) throw std::invalid_argument("cat_mediated_x_measurement: m must lie in [2, 8]");
  if (state.size() != (std::size_t{1} << m)) throw std::invalid_argument("cat_mediated_x_measurement: state size is not 2^m");
  const std::size_t n = 2 * m;
  StateVector cat(std::size_t{1} << m, 0.0);
  cat.front() = cat.back() = 1 / std::sqrt(2.0);
  const std::uint64_t data_bits = (std::uint64_t{1} << m) - 1;
  const auto xm = PauliString::x_type(m, data_bits);
  StateVector projected[2] = {state, state};
  detail::project(projected[0], xm, +1);
  detail::project(projected[1], xm, -1);
  for (auto& v : projected)
    if (detail::norm2(v) > 1e-28) v = circuit::normalized(v);

  std::vector<bool> x(m);
  // depth-first over the XX outcomes keeps one state per level alive
  auto recurse = [&](auto&& self, std::size_t i, const StateVector& psi) -> void {
    if (i == m) {
      int parity = 0;
      for (bool b : x) parity ^= b;
      for (std::uint64_t zmask = 0; zmask <= data_bits; ++zmask) {
        StateVector data = circuit::restrict_to(psi, n, data_bits << m, zmask << m);
        const double prob = detail::norm2(data);
        if (prob <= 1e-28) continue;
        detail::apply_pauli(data, PauliString::x_type(m, zmask));
        CatMeasurementRecord r;
        r.x_outcomes = x;
        for (std::size_t q = 0; q < m; ++q) r.z_outcomes.push_back((zmask >> q) & 1);
        r.inferred_eigenvalue = parity ? -1 : 1;
        r.probability = prob;
        r.post_state = circuit::normalized(data);
        r.phase_vs_projection = detail::inner(projected[parity], r.post_state);
        visit(std::move(r));
      }
      return;
    }
    const auto xx = PauliString::x_type(n, (std::uint64_t{1} << i) | (std::uint64_t{1} << (m + i)));
    for (int minus = 0; minus < 2; ++minus) {
      StateVector next = psi;
      detail::project(next, xx, minus ? -1 : 1);
      if (detail::norm2(next) <= 1e-28) continue;
      x[i] = minus;
      self(self, i + 1, next);
    }
  };
  recurse(recurse, 0, circuit::tensor(state, cat));
}

/// All branches at once; for m up to 6 (4^m records).
inline std::vector<CatMeasurementRecord> cat_mediated_x_measurement(const StateVector& state, std::size_t m) {
  if (m > 6) throw std::invalid_argument("cat_mediated_x_measurement: use for_each_cat_branch for m > 6");
  std::vector<CatMeasurementRecord> records;
  for_each_cat_branch(state, m, [&](CatMeasurementRecord r) { records.push_back(std::move(r)); });
  return records;
}

/// Direct projective X^m measurement, the oracle for the cat-mediated version.
struct ProjectiveBranch {
  int eigenvalue = 1;
  double probability = 0;
  StateVector post_state;
};

inline std::vector<ProjectiveBranch> projective_x_measurement(const StateVector& state, std::size_t m) {
  std::vector<ProjectiveBranch> out;
  const auto xm = PauliString::x_type(m, (std::uint64_t{1} << m) - 1);
  for (int ev : {1, -1}) {
    StateVector v = state;
    detail::project(v, xm, ev);
    const double w = detail::norm2(v);
    if (w <= 1e-28) continue;
    out.push_back({ev, w, circuit::normalized(v)});
  }
  return out;
}

enum class TeleportFlavor { ZZ, XX };

/// Result of a measurement-only circuit, one entry per outcome branch.
struct CircuitBranch {
  std::vector<bool> outcomes;
  double probability = 0;
  StateVector output;  ///< normalized single-qubit state after Pauli-frame corrections
};

/// Teleports a single-qubit state from qubit 0 to a fresh qubit 1.
///   XX flavor: target |0>; measure X0 X1 (m), then Z0 (s); apply X1 if s = -1, then Z1 if m = -1.
///   ZZ flavor: target |+>; measure Z0 Z1 (m), then X0 (s); apply X1 if m = -1, then Z1 if s = -1.
inline std::vector<CircuitBranch> teleport_by_measurement(const StateVector& state, TeleportFlavor flavor) {
  if (state.size() != 2) throw std::invalid_argument("teleport_by_measurement: single-qubit state expected");
  const double h = 1 / std::sqrt(2.0);
  const StateVector target = flavor == TeleportFlavor::XX ? StateVector{1, 0} : StateVector{h, h};
  std::vector<circuit::Branch> br{{circuit::tensor(state, target), {}}};
  const char joint = flavor == TeleportFlavor::XX ? 'X' : 'Z';
  const char single = flavor == TeleportFlavor::XX ? 'Z' : 'X';
  br = circuit::measure(br, joint == 'X' ? PauliString::x_type(2, 3) : PauliString::z_type(2, 3));
  br = circuit::measure(br, PauliString::single(2, 0, single));
  std::vector<CircuitBranch> out;
  for (auto& b : br) {
    const bool m = b.outcomes[0], s = b.outcomes[1];
    const bool fix_x = flavor == TeleportFlavor::XX ? s : m;
    const bool fix_z = flavor == TeleportFlavor::XX ? m : s;
    if (fix_x) circuit::apply(b, PauliString::single(2, 1, 'X'));
    if (fix_z) circuit::apply(b, PauliString::single(2, 1, 'Z'));
    // qubit 0 is in a Z or X eigenstate; rotate it out by projecting onto its recorded value
    StateVector out_state;
    if (single == 'Z') {
      out_state = circuit::restrict_to(b.psi, 2, 1, s ? 1 : 0);
    } else {
      const double sign = s ? -1 : 1;
      out_state = {b.psi[0] + sign * b.psi[1], b.psi[2] + sign * b.psi[3]};
    }
    out.push_back({b.outcomes, b.weight(), circuit::normalized(out_state)});
  }
  return out;
}

namespace detail {

/// Gate injection on data qubit `d` using a magic-state ancilla on qubit `a`:
/// measure Z_a Z_d, then X_a, and apply Z_d if X_a = -1. Returns branches with
/// the two outcomes appended.
inline std::vector<circuit::Branch> inject(const std::vector<circuit::Branch>& in, std::size_t n, std::size_t a,
                                           std::size_t d) {
  auto br = circuit::measure(in, PauliString::z_type(n, (std::uint64_t{1} << a) | (std::uint64_t{1} << d)));
  br = circuit::measure(br, PauliString::single(n, a, 'X'));
  for (auto& b : br)
    if (b.outcomes.back()) circuit::apply(b, PauliString::single(n, d, 'Z'));
  return br;
}

}  // namespace detail

/// Applies T to a single-qubit state using only measurements, magic states and
/// Pauli frame updates, following the grid-constrained sequence:
///   ZZ(a, d), X(a), and when ZZ = -1 an S correction: Z(a) to reset the injection
///   site, XX(s, a) and Z(s) to teleport |S> onto it, then ZZ(a, d) and X(a).
/// Qubits: d = 0 (data), a = 1 (injection site, starts in |T>), s = 2 (|S>).
inline std::vector<CircuitBranch> t_injection(const StateVector& state) {
  if (state.size() != 2) throw std::invalid_argument("t_injection: single-qubit state expected");
  const std::size_t n = 3, d = 0, a = 1, s = 2;
  const StateVector start = circuit::tensor(circuit::tensor(state, circuit::t_state()), circuit::s_state());
  auto br = detail::inject({{start, {}}}, n, a, d);
  std::vector<circuit::Branch> done, need_s;
  for (auto& b : br) (b.outcomes[0] ? need_s : done).push_back(std::move(b));

  if (!need_s.empty()) {
    // Reset the injection site: Z(a), with X_a in the frame if it reads -1.
    need_s = circuit::measure(need_s, PauliString::single(n, a, 'Z'));
    for (auto& b : need_s)
      if (b.outcomes.back()) circuit::apply(b, PauliString::single(n, a, 'X'));
    // Teleport |S> from s to a (XX flavor).
    need_s = circuit::measure(need_s, PauliString::x_type(n, (std::uint64_t{1} << s) | (std::uint64_t{1} << a)));
    need_s = circuit::measure(need_s, PauliString::single(n, s, 'Z'));
    for (auto& b : need_s) {
      const std::size_t k = b.outcomes.size();
      if (b.outcomes[k - 1]) circuit::apply(b, PauliString::single(n, a, 'X'));
      if (b.outcomes[k - 2]) circuit::apply(b, PauliString::single(n, a, 'Z'));
    }
    // S injection; a -1 joint outcome leaves S-dagger, which Z fixes.
    need_s = detail::inject(need_s, n, a, d);
    for (auto& b : need_s)
      if (b.outcomes[b.outcomes.size() - 2]) circuit::apply(b, PauliString::single(n, d, 'Z'));
    for (auto& b : need_s) done.push_back(std::move(b));
  }

  std::vector<CircuitBranch> out;
  for (auto& b : done) {
    // every ancilla has just been measured in the Z or X basis; project each onto its
    // value and read off the data amplitudes
    StateVector v = b.psi;
    const bool used_s = b.outcomes[0];
    // a: last measured in X with outcome outcomes.back()
    {
      const double sign = b.outcomes.back() ? -1 : 1;
      StateVector w(v.size() / 2);
      for (std::uint64_t j = 0; j < w.size(); ++j) {
        const std::uint64_t low = j & 1, high = (j >> 1) << 2;
        w[j] = v[low | high] + sign * v[low | 2 | high];
      }
      v = std::move(w);
    }
    // s: untouched (|S>) on the direct path, Z-measured on the correction path; qubit index is now 1
    if (used_s) {
      const bool sz = b.outcomes[b.outcomes.size() - 3];
      v = circuit::restrict_to(v, 2, 2, sz ? 2 : 0);
    } else {
      const auto sv = circuit::s_state();
      v = {std::conj(sv[0]) * v[0] + std::conj(sv[1]) * v[2], std::conj(sv[0]) * v[1] + std::conj(sv[1]) * v[3]};
    }
    out.push_back({b.outcomes, b.weight(), circuit::normalized(v)});
  }
  return out;
}

/// T|psi> for the oracle comparison.
inline StateVector apply_t(StateVector v) {
  if (v.size() != 2) throw std::invalid_argument("apply_t: single-qubit state expected");
  v[1] *= std::polar(1.0, std::acos(-1.0) / 4);
  return v;
}

}  // namespace msd
