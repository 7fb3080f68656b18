#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace msd {

/// Hermitian n-qubit Pauli operator: sign * (tensor product of I, X, Y, Z).
///
/// Qubit q corresponds to bit q of both masks and to character q of the text
/// form, so "XIZ" has X on qubit 0 and Z on qubit 2. A site with both bits
/// set is Y (= iXZ), which keeps every representable operator Hermitian.
class PauliString {
 public:
  static constexpr std::size_t kMaxQubits = 64;

  PauliString() = default;
  PauliString(std::size_t n, std::uint64_t x_mask, std::uint64_t z_mask, bool negative = false)
      : n_(n), x_(x_mask), z_(z_mask), negative_(negative) {
    if (n > kMaxQubits) throw std::invalid_argument("PauliString: too many qubits");
    const std::uint64_t valid = n == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
    if ((x_mask | z_mask) & ~valid) throw std::invalid_argument("PauliString: mask exceeds qubit count");
  }

  static PauliString identity(std::size_t n) { return {n, 0, 0}; }
  static PauliString x_type(std::size_t n, std::uint64_t mask) { return {n, mask, 0}; }
  static PauliString z_type(std::size_t n, std::uint64_t mask) { return {n, 0, mask}; }
  static PauliString single(std::size_t n, std::size_t qubit, char kind) {
    if (qubit >= n) throw std::out_of_range("PauliString: qubit index out of range");
    const std::uint64_t bit = std::uint64_t{1} << qubit;
    switch (kind) {
      case 'X': return {n, bit, 0};
      case 'Y': return {n, bit, bit};
      case 'Z': return {n, 0, bit};
      case 'I': return {n, 0, 0};
      default: throw std::invalid_argument(std::string("PauliString: bad Pauli kind ") + kind);
    }
  }

  /// Parses "XIXIXIX", optionally prefixed by '+' or '-'.
  static PauliString parse(std::string_view text) {
    bool negative = false;
    if (!text.empty() && (text.front() == '+' || text.front() == '-')) {
      negative = text.front() == '-';
      text.remove_prefix(1);
    }
    if (text.size() > kMaxQubits) throw std::invalid_argument("PauliString: too many qubits");
    std::uint64_t x = 0, z = 0;
    for (std::size_t q = 0; q < text.size(); ++q) {
      const std::uint64_t bit = std::uint64_t{1} << q;
      switch (text[q]) {
        case 'I': case '_': break;
        case 'X': x |= bit; break;
        case 'Z': z |= bit; break;
        case 'Y': x |= bit; z |= bit; break;
        default:
          throw std::invalid_argument("PauliString: unexpected character '" + std::string(1, text[q]) +
                                      "' in \"" + std::string(text) + "\"");
      }
    }
    return {text.size(), x, z, negative};
  }

  std::size_t num_qubits() const { return n_; }
  std::uint64_t x_mask() const { return x_; }
  std::uint64_t z_mask() const { return z_; }
  bool negative() const { return negative_; }
  int sign() const { return negative_ ? -1 : 1; }
  std::size_t weight() const { return std::popcount(x_ | z_); }
  bool is_identity() const { return (x_ | z_) == 0; }
  bool is_x_type() const { return z_ == 0; }
  bool is_z_type() const { return x_ == 0; }

  char at(std::size_t q) const {
    const bool xb = (x_ >> q) & 1, zb = (z_ >> q) & 1;
    return xb ? (zb ? 'Y' : 'X') : (zb ? 'Z' : 'I');
  }

  /// Text form without a leading '+'; negative operators start with '-'.
  std::string str() const {
    std::string out = negative_ ? "-" : "";
    for (std::size_t q = 0; q < n_; ++q) out += at(q);
    return out;
  }

  PauliString operator-() const { return {n_, x_, z_, !negative_}; }

  friend bool operator==(const PauliString&, const PauliString&) = default;

 private:
  std::size_t n_ = 0;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
  bool negative_ = false;
};

inline void require_same_size(const PauliString& a, const PauliString& b) {
  if (a.num_qubits() != b.num_qubits())
    throw std::invalid_argument("Pauli operators act on different qubit counts: " + a.str() + " vs " + b.str());
}

/// True iff the symplectic product of a and b vanishes.
inline bool commutes(const PauliString& a, const PauliString& b) {
  require_same_size(a, b);
  return (std::popcount((a.x_mask() & b.z_mask()) ^ (a.z_mask() & b.x_mask())) & 1) == 0;
}

/// i^phase * op, with op carrying sign +1. Closed under multiplication.
struct PhasedPauli {
  unsigned phase = 0;  // power of i, mod 4
  PauliString op;

  static PhasedPauli from(const PauliString& p) {
    return {p.negative() ? 2u : 0u, PauliString(p.num_qubits(), p.x_mask(), p.z_mask())};
  }

  /// Converts back to a real-signed operator; an odd power of i is an error
  /// because the product is then anti-Hermitian.
  PauliString hermitian() const {
    if (phase & 1) throw std::domain_error("Pauli product carries a factor of +-i: " + op.str());
    return {op.num_qubits(), op.x_mask(), op.z_mask(), phase == 2};
  }

  friend bool operator==(const PhasedPauli&, const PhasedPauli&) = default;
};

inline PhasedPauli operator*(const PhasedPauli& a, const PhasedPauli& b) {
  require_same_size(a.op, b.op);
  // Per-site exponent of i from sigma(a) sigma(b) = i^g sigma(a xor b); Y is stored as iXZ.
  int g = 0;
  const std::uint64_t ax = a.op.x_mask(), az = a.op.z_mask(), bx = b.op.x_mask(), bz = b.op.z_mask();
  for (std::size_t q = 0; q < a.op.num_qubits(); ++q) {
    const int x1 = (ax >> q) & 1, z1 = (az >> q) & 1, x2 = (bx >> q) & 1, z2 = (bz >> q) & 1;
    if (x1 == 0 && z1 == 0) continue;
    if (x1 == 1 && z1 == 1) g += z2 - x2;
    else if (x1 == 1) g += z2 * (2 * x2 - 1);
    else g += x2 * (1 - 2 * z2);
  }
  const unsigned phase = static_cast<unsigned>(((static_cast<int>(a.phase + b.phase) + g) % 4 + 4) % 4);
  return {phase, PauliString(a.op.num_qubits(), ax ^ bx, az ^ bz)};
}

inline PhasedPauli operator*(const PauliString& a, const PauliString& b) {
  return PhasedPauli::from(a) * PhasedPauli::from(b);
}

/// Product of two commuting operators, which is again Hermitian.
inline PauliString hermitian_product(const PauliString& a, const PauliString& b) {
  return (a * b).hermitian();
}

/// Embeds `p` into a register of `n` qubits, placing its qubit i at `positions[i]`.
template <typename Positions>
PauliString embed(const PauliString& p, std::size_t n, const Positions& positions) {
  std::uint64_t x = 0, z = 0;
  for (std::size_t i = 0; i < p.num_qubits(); ++i) {
    const std::uint64_t bit = std::uint64_t{1} << positions[i];
    if ((p.x_mask() >> i) & 1) x |= bit;
    if ((p.z_mask() >> i) & 1) z |= bit;
  }
  return {n, x, z, p.negative()};
}

}  // namespace msd
