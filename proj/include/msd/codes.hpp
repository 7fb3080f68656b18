#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "msd/pauli.hpp"

namespace msd {

/// Stabilizer code with explicitly chosen logical operators.
struct CodeSpec {
  std::string name;
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<PauliString> x_stabilizers;
  std::vector<PauliString> z_stabilizers;
  std::vector<PauliString> logical_x;
  std::vector<PauliString> logical_z;

  std::vector<PauliString> stabilizers() const {
    std::vector<PauliString> all = x_stabilizers;
    all.insert(all.end(), z_stabilizers.begin(), z_stabilizers.end());
    return all;
  }
};

namespace detail {

inline std::vector<PauliString> parse_all(const std::vector<std::string>& texts) {
  std::vector<PauliString> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(PauliString::parse(t));
  return out;
}

inline CodeSpec make_code(std::string name, std::size_t k, const std::vector<std::string>& stabilizers,
                          const std::vector<std::string>& lx, const std::vector<std::string>& lz) {
  CodeSpec code;
  code.name = std::move(name);
  code.k = k;
  for (const auto& s : parse_all(stabilizers)) {
    code.n = s.num_qubits();
    if (s.is_x_type()) code.x_stabilizers.push_back(s);
    else if (s.is_z_type()) code.z_stabilizers.push_back(s);
    else throw std::invalid_argument("CodeSpec " + code.name + ": stabilizer " + s.str() + " is not CSS");
  }
  code.logical_x = parse_all(lx);
  code.logical_z = parse_all(lz);
  return code;
}

}  // namespace detail

inline CodeSpec code_622() {
  return detail::make_code("[[6,2,2]]", 2, {"XXXXII", "IIXXXX", "ZZZZII", "IIZZZZ"}, {"XIXIXI", "IXIXIX"},
                           {"ZIZIZI", "IZIZIZ"});
}

inline CodeSpec code_713() {
  return detail::make_code("[[7,1,3]]", 1, {"XIXIXIX", "IXXIIXX", "IIIXXXX", "ZIZIZIZ", "IZZIIZZ", "IIIZZZZ"},
                           {"XXXXXXX"}, {"ZZZZZZZ"});
}

inline CodeSpec code_832() {
  return detail::make_code("[[8,3,2]]", 3, {"XXXXXXXX", "IZIZIZIZ", "IIZZIIZZ", "IIIIZZZZ"},
                           {"IXIXIXIX", "IIXXIIXX", "IIIIXXXX"}, {"IIIIIIZZ", "IIIIIZIZ", "IIIZIIIZ"});
}

inline std::vector<CodeSpec> builtin_codes() { return {code_622(), code_713(), code_832()}; }

// ---------------------------------------------------------------------------
// JSON encoding: {"name", "n", "k", "stabilizers": [...], "logicals": {"x": [...], "z": [...]}}

inline nlohmann::json to_json(const CodeSpec& code) {
  auto strs = [](const std::vector<PauliString>& ps) {
    std::vector<std::string> out;
    for (const auto& p : ps) out.push_back(p.str());
    return out;
  };
  nlohmann::json j;
  j["name"] = code.name;
  j["n"] = code.n;
  j["k"] = code.k;
  j["stabilizers"] = strs(code.stabilizers());
  j["logicals"] = {{"x", strs(code.logical_x)}, {"z", strs(code.logical_z)}};
  return j;
}

inline CodeSpec code_from_json(const nlohmann::json& j) {
  CodeSpec code = detail::make_code(j.at("name").get<std::string>(), j.at("k").get<std::size_t>(),
                                    j.at("stabilizers").get<std::vector<std::string>>(),
                                    j.at("logicals").at("x").get<std::vector<std::string>>(),
                                    j.at("logicals").at("z").get<std::vector<std::string>>());
  const auto n = j.at("n").get<std::size_t>();
  auto check = [&](const PauliString& p) {
    if (p.num_qubits() != n)
      throw std::invalid_argument("CodeSpec " + code.name + ": operator " + p.str() + " does not have n=" +
                                  std::to_string(n) + " qubits");
  };
  for (const auto& p : code.stabilizers()) check(p);
  for (const auto& p : code.logical_x) check(p);
  for (const auto& p : code.logical_z) check(p);
  code.n = n;
  return code;
}

inline CodeSpec load_code(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open code file " + path);
  return code_from_json(nlohmann::json::parse(in));
}

// ---------------------------------------------------------------------------
// Verification.

struct CodeCheck {
  std::string description;
  bool passed = false;
};

struct CodeReport {
  std::string code_name;
  std::vector<CodeCheck> checks;
  std::vector<std::size_t> logical_x_weights;
  /// n - rank(stabilizers) - k; nonzero means some encoded qubits are left unnamed (gauge).
  long unnamed_logical_qubits = 0;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
  std::vector<std::size_t> logical_x_weights_mod(std::size_t m) const {
    std::vector<std::size_t> out;
    for (auto w : logical_x_weights) out.push_back(w % m);
    return out;
  }
};

/// Rank over GF(2) of the symplectic vectors of `ops`.
inline std::size_t symplectic_rank(const std::vector<PauliString>& ops) {
  std::vector<std::uint64_t> lo, hi;  // x mask, z mask packed as a 128-bit row
  for (const auto& p : ops) {
    lo.push_back(p.x_mask());
    hi.push_back(p.z_mask());
  }
  std::size_t rank = 0;
  for (int bit = 0; bit < 128 && rank < lo.size(); ++bit) {
    auto get = [&](std::size_t r) { return bit < 64 ? (lo[r] >> bit) & 1 : (hi[r] >> (bit - 64)) & 1; };
    std::size_t pivot = rank;
    while (pivot < lo.size() && !get(pivot)) ++pivot;
    if (pivot == lo.size()) continue;
    std::swap(lo[pivot], lo[rank]);
    std::swap(hi[pivot], hi[rank]);
    for (std::size_t r = 0; r < lo.size(); ++r) {
      if (r != rank && get(r)) {
        lo[r] ^= lo[rank];
        hi[r] ^= hi[rank];
      }
    }
    ++rank;
  }
  return rank;
}

inline CodeReport verify_code(const CodeSpec& code) {
  CodeReport report;
  report.code_name = code.name;
  auto add = [&](std::string what, bool ok) { report.checks.push_back({std::move(what), ok}); };

  const auto stabs = code.stabilizers();
  bool sizes_ok = true;
  for (const auto* group : {&stabs, &code.logical_x, &code.logical_z})
    for (const auto& p : *group) sizes_ok = sizes_ok && p.num_qubits() == code.n;
  add("all operators act on n=" + std::to_string(code.n) + " qubits", sizes_ok);
  add("k logical X and k logical Z operators",
      code.logical_x.size() == code.k && code.logical_z.size() == code.k);
  if (!report.checks.back().passed || !sizes_ok) return report;

  for (std::size_t a = 0; a < stabs.size(); ++a)
    for (std::size_t b = a + 1; b < stabs.size(); ++b)
      add("stabilizers " + stabs[a].str() + " and " + stabs[b].str() + " commute", commutes(stabs[a], stabs[b]));

  add("stabilizer generators are independent", symplectic_rank(stabs) == stabs.size());

  for (std::size_t i = 0; i < code.k; ++i) {
    for (const auto& s : stabs) {
      add("logical X" + std::to_string(i + 1) + " commutes with " + s.str(), commutes(code.logical_x[i], s));
      add("logical Z" + std::to_string(i + 1) + " commutes with " + s.str(), commutes(code.logical_z[i], s));
    }
    for (std::size_t j = 0; j < code.k; ++j) {
      const bool should_commute = i != j;
      add("logical X" + std::to_string(i + 1) + (should_commute ? " commutes with" : " anticommutes with") +
              " logical Z" + std::to_string(j + 1),
          commutes(code.logical_x[i], code.logical_z[j]) == should_commute);
      if (j > i) {
        add("logical X" + std::to_string(i + 1) + " commutes with logical X" + std::to_string(j + 1),
            commutes(code.logical_x[i], code.logical_x[j]));
        add("logical Z" + std::to_string(i + 1) + " commutes with logical Z" + std::to_string(j + 1),
            commutes(code.logical_z[i], code.logical_z[j]));
      }
    }
    report.logical_x_weights.push_back(code.logical_x[i].weight());
  }
  report.unnamed_logical_qubits =
      static_cast<long>(code.n) - static_cast<long>(symplectic_rank(stabs)) - static_cast<long>(code.k);
  add("named logical qubits do not exceed the encoded dimension", report.unnamed_logical_qubits >= 0);
  return report;
}

// ---------------------------------------------------------------------------
// Transversal diagonal gates.

enum class DiagonalGate : std::uint8_t { I, T, Tdg, S, Sdg, Z };

/// Phase of |1> in units of pi/4.
constexpr int eighth_turns(DiagonalGate g) {
  switch (g) {
    case DiagonalGate::I: return 0;
    case DiagonalGate::T: return 1;
    case DiagonalGate::Tdg: return 7;
    case DiagonalGate::S: return 2;
    case DiagonalGate::Sdg: return 6;
    case DiagonalGate::Z: return 4;
  }
  return 0;
}

constexpr bool is_t_like(DiagonalGate g) { return g == DiagonalGate::T || g == DiagonalGate::Tdg; }

inline std::string gate_name(DiagonalGate g) {
  switch (g) {
    case DiagonalGate::I: return "I";
    case DiagonalGate::T: return "T";
    case DiagonalGate::Tdg: return "Tdg";
    case DiagonalGate::S: return "S";
    case DiagonalGate::Sdg: return "Sdg";
    case DiagonalGate::Z: return "Z";
  }
  return "?";
}

inline DiagonalGate parse_gate(const std::string& s) {
  if (s == "I") return DiagonalGate::I;
  if (s == "T") return DiagonalGate::T;
  if (s == "Tdg" || s == "T†" || s == "T^dag") return DiagonalGate::Tdg;
  if (s == "S") return DiagonalGate::S;
  if (s == "Sdg" || s == "S†" || s == "S^dag") return DiagonalGate::Sdg;
  if (s == "Z") return DiagonalGate::Z;
  throw std::invalid_argument("unknown diagonal gate '" + s + "'");
}

/// Per-qubit diagonal single-qubit gates, qubit 0 first.
struct DiagonalGatePattern {
  std::vector<DiagonalGate> gates;

  static DiagonalGatePattern uniform(std::size_t n, DiagonalGate g) { return {std::vector<DiagonalGate>(n, g)}; }

  /// Parses whitespace- or comma-separated gate names, e.g. "Tdg T T Tdg".
  static DiagonalGatePattern parse(const std::string& text) {
    std::string cleaned = text;
    for (auto& c : cleaned)
      if (c == ',') c = ' ';
    std::istringstream in(cleaned);
    DiagonalGatePattern out;
    for (std::string tok; in >> tok;) out.gates.push_back(parse_gate(tok));
    return out;
  }

  std::size_t size() const { return gates.size(); }

  /// Total phase exponent (units of pi/4) on computational basis state `basis`.
  int eighth_turns_on(std::uint64_t basis) const {
    int total = 0;
    for (std::size_t q = 0; q < gates.size(); ++q)
      if ((basis >> q) & 1) total += eighth_turns(gates[q]);
    return total & 7;
  }

  std::string str() const {
    std::string out;
    for (std::size_t q = 0; q < gates.size(); ++q) out += (q ? " " : "") + gate_name(gates[q]);
    return out;
  }
};

/// T-dagger/T pattern on [[8,3,2]] whose transversal action is exactly logical CCZ.
inline DiagonalGatePattern ccz_pattern_832() { return DiagonalGatePattern::parse("Tdg T T Tdg T Tdg Tdg T"); }

struct LogicalAction {
  bool ok = false;
  std::string failure;
  /// Diagonal entries on logical basis states |a_1 ... a_k> (logical qubit i is bit i of the index),
  /// normalized so that entry 0 is 1.
  std::vector<std::complex<double>> diagonal;
};

namespace detail {

using StateVec = std::vector<std::complex<double>>;

inline void apply_pauli(StateVec& v, const PauliString& p) {
  StateVec out(v.size());
  const std::uint64_t x = p.x_mask(), z = p.z_mask();
  const std::complex<double> base = std::pow(std::complex<double>(0, 1), std::popcount(x & z)) * double(p.sign());
  for (std::uint64_t j = 0; j < v.size(); ++j) {
    const double s = (std::popcount(j & z) & 1) ? -1.0 : 1.0;
    out[j ^ x] += base * s * v[j];
  }
  v = std::move(out);
}

/// v <- (1 + sign*P)/2 v.
inline void project(StateVec& v, const PauliString& p, int sign) {
  StateVec pv = v;
  apply_pauli(pv, p);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.5 * (v[i] + double(sign) * pv[i]);
}

inline double norm2(const StateVec& v) {
  double s = 0;
  for (const auto& a : v) s += std::norm(a);
  return s;
}

inline std::complex<double> inner(const StateVec& a, const StateVec& b) {
  std::complex<double> s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

}  // namespace detail

/// Normalized codeword states |a>_L for a in [0, 2^k), built by projection.
inline std::vector<detail::StateVec> logical_basis_states(const CodeSpec& code) {
  if (code.n > 16) throw std::invalid_argument("logical_basis_states: block too long for dense projection");
  const std::size_t dim = std::size_t{1} << code.n;
  std::optional<detail::StateVec> zero;
  for (int start = 0; start < 2 && !zero; ++start) {
    detail::StateVec v(dim, 0.0);
    if (start == 0) v[0] = 1.0;
    else std::fill(v.begin(), v.end(), 1.0 / std::sqrt(double(dim)));
    for (const auto& s : code.stabilizers()) detail::project(v, s, +1);
    for (const auto& lz : code.logical_z) detail::project(v, lz, +1);
    const double nn = detail::norm2(v);
    if (nn > 1e-12) {
      for (auto& a : v) a /= std::sqrt(nn);
      zero = std::move(v);
    }
  }
  if (!zero) throw std::runtime_error("logical_basis_states: could not construct |0...0>_L for " + code.name);
  std::vector<detail::StateVec> basis;
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << code.k); ++a) {
    detail::StateVec v = *zero;
    for (std::size_t i = 0; i < code.k; ++i)
      if ((a >> i) & 1) detail::apply_pauli(v, code.logical_x[i]);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Logical diagonal gate induced by applying `pattern` transversally.
inline LogicalAction induced_logical_action(const DiagonalGatePattern& pattern, const CodeSpec& code,
                                            double tolerance = 1e-10) {
  LogicalAction result;
  if (pattern.size() != code.n) {
    result.failure = "pattern length " + std::to_string(pattern.size()) + " differs from block length " +
                     std::to_string(code.n);
    return result;
  }
  const auto basis = logical_basis_states(code);
  const double pi = std::acos(-1.0);
  std::vector<std::complex<double>> phases(8);
  for (int t = 0; t < 8; ++t) phases[t] = std::polar(1.0, pi * t / 4.0);

  std::vector<std::complex<double>> diag;
  for (std::size_t a = 0; a < basis.size(); ++a) {
    detail::StateVec image = basis[a];
    for (std::uint64_t j = 0; j < image.size(); ++j) image[j] *= phases[pattern.eighth_turns_on(j)];
    std::complex<double> self = 0;
    double captured = 0;
    for (std::size_t b = 0; b < basis.size(); ++b) {
      const auto amp = detail::inner(basis[b], image);
      captured += std::norm(amp);
      if (b == a) self = amp;
      else if (std::abs(amp) > tolerance) {
        result.failure = "logical basis state " + std::to_string(a) + " is mapped onto logical state " +
                         std::to_string(b) + " (action is not diagonal)";
        return result;
      }
    }
    if (std::abs(captured - 1.0) > tolerance) {
      result.failure = "pattern " + pattern.str() + " does not preserve the code space of " + code.name;
      return result;
    }
    diag.push_back(self);
  }
  const auto ref = diag.front() / std::abs(diag.front());
  for (auto& d : diag) d /= ref;
  result.ok = true;
  result.diagonal = std::move(diag);
  return result;
}

/// True when two diagonal gates agree up to one global phase.
inline bool equal_up_to_phase(const std::vector<std::complex<double>>& a, const std::vector<std::complex<double>>& b,
                              double tolerance = 1e-10) {
  if (a.size() != b.size() || a.empty()) return false;
  const auto rel = b[0] / a[0];
  if (std::abs(std::abs(rel) - 1.0) > tolerance) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] * rel - b[i]) > tolerance) return false;
  return true;
}

/// Diagonal of CCZ on three qubits: -1 only on |111>.
inline std::vector<std::complex<double>> ccz_diagonal() {
  std::vector<std::complex<double>> d(8, 1.0);
  d[7] = -1.0;
  return d;
}

}  // namespace msd
