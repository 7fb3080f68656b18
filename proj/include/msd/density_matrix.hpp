#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "msd/codes.hpp"
#include "msd/pauli.hpp"

namespace msd {

inline constexpr std::size_t kMaxDensityQubits = 12;

/// Dense, possibly unnormalized density matrix. Qubit 0 is the least significant
/// bit of the row/column index; storage is row-major.
template <typename Real>
class DensityMatrix {
 public:
  using real_type = Real;
  using Complex = std::complex<Real>;

  DensityMatrix() : DensityMatrix(0) {}
  explicit DensityMatrix(std::size_t num_qubits) : n_(num_qubits), dim_(std::size_t{1} << num_qubits) {
    if (num_qubits > kMaxDensityQubits)
      throw std::invalid_argument("DensityMatrix: at most " + std::to_string(kMaxDensityQubits) + " qubits");
    buf_.assign(dim_ * dim_, Complex(0));
  }

  static DensityMatrix basis_state(std::size_t num_qubits, std::uint64_t index) {
    DensityMatrix rho(num_qubits);
    rho(index, index) = 1;
    return rho;
  }

  /// |psi><psi| for the given amplitudes (not renormalized).
  static DensityMatrix pure(std::span<const Complex> amplitudes) {
    const auto n = static_cast<std::size_t>(std::countr_zero(amplitudes.size()));
    if (amplitudes.size() != (std::size_t{1} << n)) throw std::invalid_argument("pure: size is not a power of two");
    DensityMatrix rho(n);
    for (std::size_t i = 0; i < rho.dim_; ++i)
      for (std::size_t j = 0; j < rho.dim_; ++j) rho(i, j) = amplitudes[i] * std::conj(amplitudes[j]);
    return rho;
  }

  std::size_t num_qubits() const { return n_; }
  std::size_t dim() const { return dim_; }
  Complex& operator()(std::size_t i, std::size_t j) { return buf_[i * dim_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return buf_[i * dim_ + j]; }
  Complex* data() { return buf_.data(); }
  const Complex* data() const { return buf_.data(); }
  std::span<Complex> entries() { return buf_; }
  std::span<const Complex> entries() const { return buf_; }

  Real trace() const {
    Real t = 0;
    for (std::size_t i = 0; i < dim_; ++i) t += buf_[i * dim_ + i].real();
    return t;
  }

  DensityMatrix& operator*=(Real s) {
    for (auto& v : buf_) v *= s;
    return *this;
  }
  DensityMatrix& operator+=(const DensityMatrix& other) {
    require_same_shape(other);
    for (std::size_t k = 0; k < buf_.size(); ++k) buf_[k] += other.buf_[k];
    return *this;
  }

  DensityMatrix normalized() const {
    DensityMatrix out = *this;
    const Real t = trace();
    if (!(t > 0)) throw std::domain_error("cannot normalize a density matrix with zero trace");
    out *= Real(1) / t;
    return out;
  }

  /// max |rho - rho^dagger| over entries.
  Real hermiticity_error() const {
    Real worst = 0;
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = i; j < dim_; ++j) worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return worst;
  }

  void require_same_shape(const DensityMatrix& other) const {
    if (other.n_ != n_) throw std::invalid_argument("density matrices have different qubit counts");
  }

  /// Debug dump: int64 num_qubits, then dim*dim (re, im) doubles, little-endian, row-major.
  void dump(const std::string& path) const {
    static_assert(std::endian::native == std::endian::little, "dump assumes a little-endian host");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    const std::int64_t nq = static_cast<std::int64_t>(n_);
    out.write(reinterpret_cast<const char*>(&nq), sizeof nq);
    for (const auto& v : buf_) {
      const double parts[2] = {static_cast<double>(v.real()), static_cast<double>(v.imag())};
      out.write(reinterpret_cast<const char*>(parts), sizeof parts);
    }
  }

  static DensityMatrix load_dump(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::int64_t nq = 0;
    in.read(reinterpret_cast<char*>(&nq), sizeof nq);
    if (!in || nq < 0 || nq > static_cast<std::int64_t>(kMaxDensityQubits))
      throw std::runtime_error("bad density matrix dump header in " + path);
    DensityMatrix rho(static_cast<std::size_t>(nq));
    for (auto& v : rho.buf_) {
      double parts[2];
      in.read(reinterpret_cast<char*>(parts), sizeof parts);
      v = Complex(static_cast<Real>(parts[0]), static_cast<Real>(parts[1]));
    }
    if (!in) throw std::runtime_error("truncated density matrix dump " + path);
    return rho;
  }

 private:
  std::size_t n_;
  std::size_t dim_;
  std::vector<Complex> buf_;
};

namespace detail {

template <typename Real>
void require_qubits(const DensityMatrix<Real>& rho, const PauliString& p) {
  if (p.num_qubits() != rho.num_qubits())
    throw std::invalid_argument("Pauli " + p.str() + " has " + std::to_string(p.num_qubits()) +
                                " qubits but the state has " + std::to_string(rho.num_qubits()));
}

/// a[i] = <i|P|i^x>, i.e. P|j> = a[j^x] |j^x>.
template <typename Real>
std::vector<std::complex<Real>> pauli_row_phases(const PauliString& p, std::size_t dim) {
  using C = std::complex<Real>;
  const std::uint64_t x = p.x_mask(), z = p.z_mask();
  static const C ipow[4] = {C(1, 0), C(0, 1), C(-1, 0), C(0, -1)};
  const C base = ipow[std::popcount(x & z) & 3] * Real(p.sign());
  std::vector<C> a(dim);
  for (std::uint64_t i = 0; i < dim; ++i) {
    const std::uint64_t j = i ^ x;
    a[i] = (std::popcount(j & z) & 1) ? -base : base;
  }
  return a;
}

}  // namespace detail

/// P rho P^dagger, via index permutation and signs.
template <typename Real>
void conjugate_by_pauli_in_place(DensityMatrix<Real>& rho, const PauliString& p) {
  detail::require_qubits(rho, p);
  const std::uint64_t x = p.x_mask(), z = p.z_mask();
  const std::size_t dim = rho.dim();
  auto sgn = [z](std::uint64_t i) { return (std::popcount(i & z) & 1) ? -1 : 1; };
  if (x == 0) {
    if (z == 0) return;
    for (std::uint64_t i = 0; i < dim; ++i) {
      const int si = sgn(i);
      auto* row = &rho(i, 0);
      for (std::uint64_t j = 0; j < dim; ++j)
        if (si != sgn(j)) row[j] = -row[j];
    }
    return;
  }
  const std::uint64_t top = std::uint64_t{1} << (63 - std::countl_zero(x));
  for (std::uint64_t i = 0; i < dim; ++i) {
    if (i & top) continue;  // visit each row pair once
    const std::uint64_t ix = i ^ x;
    auto* ri = &rho(i, 0);
    auto* rx = &rho(ix, 0);
    for (std::uint64_t j = 0; j < dim; ++j) {
      const std::uint64_t jx = j ^ x;
      // new[i][j] = s(ix) s(jx) old[ix][jx]; new[ix][jx] = s(i) s(j) old[i][j]
      const int s_new_ij = sgn(ix) * sgn(jx);
      const int s_new_xx = sgn(i) * sgn(j);
      const auto a = ri[j];
      const auto b = rx[jx];
      ri[j] = s_new_ij > 0 ? b : -b;
      rx[jx] = s_new_xx > 0 ? a : -a;
    }
  }
}

template <typename Real>
DensityMatrix<Real> apply_pauli_conjugation(DensityMatrix<Real> rho, const PauliString& p) {
  conjugate_by_pauli_in_place(rho, p);
  return rho;
}

/// out = alpha * P+ rho P+ + beta * P- rho P-, with P+- = (1 +- P)/2.
template <typename Real>
DensityMatrix<Real> weighted_projections(const DensityMatrix<Real>& rho, const PauliString& p, Real alpha, Real beta) {
  detail::require_qubits(rho, p);
  using C = std::complex<Real>;
  const std::size_t dim = rho.dim();
  DensityMatrix<Real> out(rho.num_qubits());
  const std::uint64_t x = p.x_mask(), z = p.z_mask();
  if (x == 0) {
    // Diagonal P: keep entries whose row and column eigenvalues agree.
    const int s0 = p.sign();
    auto ev = [&](std::uint64_t i) { return (std::popcount(i & z) & 1) ? -s0 : s0; };
    for (std::uint64_t i = 0; i < dim; ++i) {
      const int ei = ev(i);
      const auto* src = &rho(i, 0);
      auto* dst = &out(i, 0);
      for (std::uint64_t j = 0; j < dim; ++j) {
        if (ev(j) != ei) continue;
        dst[j] = src[j] * (ei > 0 ? alpha : beta);
      }
    }
    return out;
  }
  const auto a = detail::pauli_row_phases<Real>(p, dim);
  const Real c1 = (alpha + beta) / 4, c2 = (alpha - beta) / 4;
  for (std::uint64_t i = 0; i < dim; ++i) {
    const auto* ri = &rho(i, 0);
    const auto* rx = &rho(i ^ x, 0);
    const C ai = a[i];
    auto* dst = &out(i, 0);
    for (std::uint64_t j = 0; j < dim; ++j) {
      const std::uint64_t jx = j ^ x;
      const C aj = std::conj(a[j]);
      dst[j] = c1 * (ri[j] + ai * rx[jx] * aj) + c2 * (ai * rx[j] + ri[jx] * aj);
    }
  }
  return out;
}

/// How a measured Pauli's outcome is used.
struct Corrected {
  PauliString correction;  ///< applied on the -1 outcome; must anticommute with the measured operator
};
struct PostselectPlus {};
struct PostselectConsistentRepeat {
  std::size_t repeats = 2;
  std::optional<PauliString> correction;  ///< applied when all repeats agree on -1; rejected if absent
};
using MeasurementMode = std::variant<Corrected, PostselectPlus, PostselectConsistentRepeat>;

/// Noisy projective measurement of P whose recorded outcome is flipped with probability flip_p.
template <typename Real>
DensityMatrix<Real> measure_pauli(const DensityMatrix<Real>& rho, const PauliString& p, const MeasurementMode& mode,
                                  Real flip_p) {
  detail::require_qubits(rho, p);
  if (flip_p < 0 || flip_p > 1) throw std::invalid_argument("measure_pauli: flip probability out of range");
  const Real keep = 1 - flip_p;
  if (const auto* c = std::get_if<Corrected>(&mode)) {
    detail::require_qubits(rho, c->correction);
    if (commutes(c->correction, p))
      throw std::invalid_argument("measure_pauli: correction " + c->correction.str() + " commutes with " + p.str());
    auto out = weighted_projections(rho, p, keep, flip_p);
    auto other = weighted_projections(rho, p, flip_p, keep);
    conjugate_by_pauli_in_place(other, c->correction);
    out += other;
    return out;
  }
  if (std::holds_alternative<PostselectPlus>(mode)) return weighted_projections(rho, p, keep, flip_p);

  const auto& rep = std::get<PostselectConsistentRepeat>(mode);
  if (rep.repeats == 0) throw std::invalid_argument("measure_pauli: zero repeats");
  const Real all_keep = std::pow(keep, Real(rep.repeats));
  const Real all_flip = std::pow(flip_p, Real(rep.repeats));
  auto out = weighted_projections(rho, p, all_keep, all_flip);
  if (rep.correction) {
    detail::require_qubits(rho, *rep.correction);
    if (commutes(*rep.correction, p))
      throw std::invalid_argument("measure_pauli: correction " + rep.correction->str() + " commutes with " + p.str());
    auto minus = weighted_projections(rho, p, all_flip, all_keep);
    conjugate_by_pauli_in_place(minus, *rep.correction);
    out += minus;
  }
  return out;
}

/// Entrywise U rho U^dagger for U = tensor of diagonal gates.
template <typename Real>
void apply_diagonal_in_place(DensityMatrix<Real>& rho, const DiagonalGatePattern& pattern) {
  if (pattern.size() != rho.num_qubits())
    throw std::invalid_argument("apply_diagonal: pattern length differs from qubit count");
  using C = std::complex<Real>;
  const Real pi = std::acos(Real(-1));
  C phase[8];
  for (int t = 0; t < 8; ++t) phase[t] = std::polar(Real(1), pi * Real(t) / 4);
  const std::size_t dim = rho.dim();
  std::vector<int> turns(dim);
  for (std::uint64_t i = 0; i < dim; ++i) turns[i] = pattern.eighth_turns_on(i);
  for (std::uint64_t i = 0; i < dim; ++i) {
    auto* row = &rho(i, 0);
    for (std::uint64_t j = 0; j < dim; ++j) {
      const int t = (turns[i] - turns[j]) & 7;
      if (t) row[j] *= phase[t];
    }
  }
}

template <typename Real>
DensityMatrix<Real> apply_diagonal(DensityMatrix<Real> rho, const DiagonalGatePattern& pattern) {
  apply_diagonal_in_place(rho, pattern);
  return rho;
}

/// Single-qubit Pauli channel rho -> wI rho + wX XrX + wY YrY + wZ ZrZ.
struct PauliChannel {
  double w_i = 1, w_x = 0, w_y = 0, w_z = 0;

  static PauliChannel identity() { return {}; }
  static PauliChannel deterministic(char pauli) {
    switch (pauli) {
      case 'I': return {1, 0, 0, 0};
      case 'X': return {0, 1, 0, 0};
      case 'Y': return {0, 0, 1, 0};
      case 'Z': return {0, 0, 0, 1};
      default: throw std::invalid_argument(std::string("PauliChannel: bad Pauli ") + pauli);
    }
  }
  bool is_identity() const { return w_x == 0 && w_y == 0 && w_z == 0; }
};

template <typename Real>
void apply_pauli_channel_in_place(DensityMatrix<Real>& rho, std::size_t qubit, const PauliChannel& ch) {
  if (qubit >= rho.num_qubits()) throw std::out_of_range("apply_pauli_channel: qubit index out of range");
  if (ch.is_identity() && ch.w_i == 1) return;
  // On the 2x2 block [[a, b], [c, d]] of `qubit`:
  //   a' = (wI+wZ) a + (wX+wY) d,  b' = (wI-wZ) b + (wX-wY) c, and symmetrically.
  const Real diag_keep = Real(ch.w_i) + Real(ch.w_z), diag_swap = Real(ch.w_x) + Real(ch.w_y);
  const Real off_keep = Real(ch.w_i) - Real(ch.w_z), off_swap = Real(ch.w_x) - Real(ch.w_y);
  const std::size_t dim = rho.dim();
  const std::uint64_t bit = std::uint64_t{1} << qubit;
  for (std::uint64_t i = 0; i < dim; ++i) {
    if (i & bit) continue;
    auto* r0 = &rho(i, 0);
    auto* r1 = &rho(i | bit, 0);
    for (std::uint64_t j = 0; j < dim; ++j) {
      if (j & bit) continue;
      const std::uint64_t j1 = j | bit;
      const auto a = r0[j], b = r0[j1], c = r1[j], d = r1[j1];
      r0[j] = diag_keep * a + diag_swap * d;
      r1[j1] = diag_keep * d + diag_swap * a;
      r0[j1] = off_keep * b + off_swap * c;
      r1[j] = off_keep * c + off_swap * b;
    }
  }
}

/// |0><0| (x) rho, with the new qubit as the most significant index bit.
template <typename Real>
DensityMatrix<Real> append_zero_qubit(const DensityMatrix<Real>& rho) {
  DensityMatrix<Real> out(rho.num_qubits() + 1);
  const std::size_t dim = rho.dim();
  for (std::size_t i = 0; i < dim; ++i) std::copy_n(&rho(i, 0), dim, &out(i, 0));
  return out;
}

/// Partial trace over one qubit; higher qubits shift down by one position.
template <typename Real>
DensityMatrix<Real> trace_out_qubit(const DensityMatrix<Real>& rho, std::size_t qubit) {
  if (qubit >= rho.num_qubits()) throw std::out_of_range("trace_out_qubit: qubit index out of range");
  DensityMatrix<Real> out(rho.num_qubits() - 1);
  const std::uint64_t low = (std::uint64_t{1} << qubit) - 1;
  auto widen = [&](std::uint64_t i, std::uint64_t b) { return (i & low) | (b << qubit) | ((i & ~low) << 1); };
  for (std::uint64_t i = 0; i < out.dim(); ++i)
    for (std::uint64_t j = 0; j < out.dim(); ++j) out(i, j) = rho(widen(i, 0), widen(j, 0)) + rho(widen(i, 1), widen(j, 1));
  return out;
}

/// A parity of recorded data outcomes that triggers a Pauli on the surviving qubits when odd.
struct ReadoutCorrection {
  std::uint64_t parity_mask = 0;  ///< register positions (subset of the data qubits)
  PauliString correction;         ///< on the surviving qubits, in their compacted order
};

/// Destructive Z measurement of `data_mask`; keeps records whose parities over every
/// condition mask are even, applies record-conditioned corrections, and returns the
/// unnormalized state of the remaining qubits (relative order preserved).
template <typename Real>
DensityMatrix<Real> destructive_z_readout(const DensityMatrix<Real>& rho, std::uint64_t data_mask,
                                          const std::vector<std::uint64_t>& conditions,
                                          const std::vector<ReadoutCorrection>& corrections,
                                          const std::vector<Real>& flip_p) {
  const std::size_t n = rho.num_qubits();
  std::vector<std::size_t> data, rest;
  for (std::size_t q = 0; q < n; ++q) ((data_mask >> q) & 1 ? data : rest).push_back(q);
  if (data_mask >> n) throw std::invalid_argument("destructive_z_readout: data qubit out of range");
  if (flip_p.size() != data.size()) throw std::invalid_argument("destructive_z_readout: one flip probability per data qubit");
  for (auto m : conditions)
    if (m & ~data_mask) throw std::invalid_argument("destructive_z_readout: condition touches a non-data qubit");
  for (const auto& c : corrections) {
    if (c.parity_mask & ~data_mask) throw std::invalid_argument("destructive_z_readout: correction parity touches a non-data qubit");
    if (c.correction.num_qubits() != rest.size())
      throw std::invalid_argument("destructive_z_readout: correction must act on the remaining qubits only");
  }
  const std::size_t nd = data.size(), nc = conditions.size(), nk = corrections.size();
  if (nc + nk > 20) throw std::invalid_argument("destructive_z_readout: too many parity checks");

  auto compact = [&](std::uint64_t full_mask) {
    std::uint64_t m = 0;
    for (std::size_t b = 0; b < nd; ++b)
      if ((full_mask >> data[b]) & 1) m |= std::uint64_t{1} << b;
    return m;
  };
  std::vector<std::uint64_t> masks;  // conditions first, then corrections, over compact data bits
  for (auto m : conditions) masks.push_back(compact(m));
  for (const auto& c : corrections) masks.push_back(compact(c.parity_mask));
  auto syndrome = [&](std::uint64_t bits) {
    std::uint64_t s = 0;
    for (std::size_t t = 0; t < masks.size(); ++t)
      if (std::popcount(bits & masks[t]) & 1) s |= std::uint64_t{1} << t;
    return s;
  };

  // Distribution of the syndrome of the flip pattern e = recorded xor actual.
  const std::size_t nsyn = std::size_t{1} << (nc + nk);
  std::vector<Real> flip_syndrome(nsyn, Real(0));
  for (std::uint64_t e = 0; e < (std::uint64_t{1} << nd); ++e) {
    Real pr = 1;
    for (std::size_t b = 0; b < nd; ++b) pr *= ((e >> b) & 1) ? flip_p[b] : 1 - flip_p[b];
    if (pr != 0) flip_syndrome[syndrome(e)] += pr;
  }

  const std::uint64_t cond_bits = (std::uint64_t{1} << nc) - 1;
  std::vector<PauliString> pattern_ops(std::size_t{1} << nk);
  for (std::uint64_t k = 0; k < pattern_ops.size(); ++k) {
    PhasedPauli acc = PhasedPauli::from(PauliString::identity(rest.size()));
    for (std::size_t t = 0; t < nk; ++t)
      if ((k >> t) & 1) acc = acc * PhasedPauli::from(corrections[t].correction);
    pattern_ops[k] = acc.hermitian();
  }

  DensityMatrix<Real> out(rest.size());
  DensityMatrix<Real> block(rest.size());
  const std::size_t od = out.dim();
  std::vector<std::uint64_t> rest_index(od);
  for (std::uint64_t o = 0; o < od; ++o) {
    std::uint64_t full = 0;
    for (std::size_t b = 0; b < rest.size(); ++b)
      if ((o >> b) & 1) full |= std::uint64_t{1} << rest[b];
    rest_index[o] = full;
  }
  std::vector<Real> weight(pattern_ops.size());
  for (std::uint64_t zc = 0; zc < (std::uint64_t{1} << nd); ++zc) {
    std::uint64_t zfull = 0;
    for (std::size_t b = 0; b < nd; ++b)
      if ((zc >> b) & 1) zfull |= std::uint64_t{1} << data[b];
    Real pop = 0;
    for (std::uint64_t o = 0; o < od; ++o) pop += rho(zfull | rest_index[o], zfull | rest_index[o]).real();
    if (pop == 0) continue;
    std::fill(weight.begin(), weight.end(), Real(0));
    const std::uint64_t sz = syndrome(zc);
    for (std::uint64_t se = 0; se < nsyn; ++se) {
      if (flip_syndrome[se] == 0) continue;
      const std::uint64_t sr = sz ^ se;
      if (sr & cond_bits) continue;
      weight[sr >> nc] += flip_syndrome[se];
    }
    for (std::uint64_t k = 0; k < weight.size(); ++k) {
      if (weight[k] == 0) continue;
      for (std::uint64_t a = 0; a < od; ++a)
        for (std::uint64_t b = 0; b < od; ++b) block(a, b) = rho(zfull | rest_index[a], zfull | rest_index[b]);
      conjugate_by_pauli_in_place(block, pattern_ops[k]);
      block *= weight[k];
      out += block;
    }
  }
  return out;
}

/// Same flip probability on every data qubit.
template <typename Real>
DensityMatrix<Real> destructive_z_readout(const DensityMatrix<Real>& rho, std::uint64_t data_mask,
                                          const std::vector<std::uint64_t>& conditions,
                                          const std::vector<ReadoutCorrection>& corrections, Real flip_p) {
  return destructive_z_readout(rho, data_mask, conditions, corrections,
                               std::vector<Real>(std::popcount(data_mask), flip_p));
}

/// Eigenvalues of a Hermitian matrix given as a density matrix buffer.
template <typename Real>
std::vector<Real> hermitian_eigenvalues(const DensityMatrix<Real>& m) {
  using Mat = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
  const auto dim = static_cast<Eigen::Index>(m.dim());
  Mat a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = m(i, j);
  Eigen::SelfAdjointEigenSolver<Mat> solver(a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("hermitian eigenvalue solver failed");
  std::vector<Real> ev(m.dim());
  for (Eigen::Index i = 0; i < dim; ++i) ev[i] = solver.eigenvalues()[i];
  return ev;
}

/// Half the trace norm of rho - sigma.
template <typename Real>
Real trace_distance(const DensityMatrix<Real>& rho, const DensityMatrix<Real>& sigma) {
  rho.require_same_shape(sigma);
  DensityMatrix<Real> diff = rho;
  for (std::size_t k = 0; k < diff.entries().size(); ++k) diff.entries()[k] -= sigma.entries()[k];
  Real sum = 0;
  for (auto e : hermitian_eigenvalues(diff)) sum += std::abs(e);
  return sum / 2;
}

/// Smallest eigenvalue, for physicality checks on small states.
template <typename Real>
Real min_eigenvalue(const DensityMatrix<Real>& rho) {
  const auto ev = hermitian_eigenvalues(rho);
  return *std::min_element(ev.begin(), ev.end());
}

}  // namespace msd
