#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "msd/density_matrix.hpp"
#include "msd/noise.hpp"
#include "msd/protocol.hpp"

namespace msd {

template <typename Real>
struct SimResult {
  Real p_accept = 0;
  Real p_out = 0;
  DensityMatrix<Real> rho_out;  ///< normalized; empty when degenerate
  bool degenerate = false;
};

inline constexpr double kDegenerateAcceptance = 1e-300;

/// What happens at each schedule location during one run.
struct LocationAction {
  PauliChannel channel;  ///< E / ET locations
  double flip_p = 0;     ///< OutcomeFlip locations
};

/// A deterministic single fault for fault-injection runs.
struct InjectedFault {
  std::size_t location = 0;  ///< index into the protocol schedule
  char pauli = 'Z';          ///< X, Y or Z for E/ET; ignored for outcome flips
};

inline std::vector<LocationAction> actions_for(const Protocol& protocol, const NoiseModel& model) {
  model.validate();
  std::vector<LocationAction> out;
  for (const auto& loc : protocol.schedule.locations) {
    switch (loc.kind) {
      case LocationKind::E: out.push_back({model.clifford_channel(), 0}); break;
      case LocationKind::ET: out.push_back({model.t_channel(), 0}); break;
      case LocationKind::OutcomeFlip: out.push_back({PauliChannel::identity(), model.p}); break;
    }
  }
  return out;
}

inline std::vector<LocationAction> actions_for(const Protocol& protocol, const std::vector<InjectedFault>& faults) {
  std::vector<LocationAction> out(protocol.schedule.locations.size());
  for (const auto& f : faults) {
    if (f.location >= out.size()) throw std::out_of_range("injected fault: location index out of range");
    if (protocol.schedule.locations[f.location].kind == LocationKind::OutcomeFlip) out[f.location].flip_p = 1;
    else out[f.location].channel = PauliChannel::deterministic(f.pauli);
  }
  return out;
}

/// Called after every step with the step index and the current unnormalized state.
template <typename Real>
using StepObserver = std::function<void(std::size_t, const DensityMatrix<Real>&)>;

namespace detail {

template <typename Real>
class Interpreter {
 public:
  Interpreter(const Protocol& protocol, const std::vector<LocationAction>& actions)
      : proto_(protocol), actions_(actions), position_(protocol.register_size(), -1) {
    if (actions.size() != protocol.schedule.locations.size())
      throw std::invalid_argument("one action per schedule location expected");
    for (std::size_t k = 0; k < protocol.schedule.locations.size(); ++k) {
      const auto& l = protocol.schedule.locations[k];
      if (l.step >= protocol.steps.size()) throw std::invalid_argument("schedule location refers to a missing step");
      by_step_[{l.step, l.sub}].push_back(k);
    }
  }

  SimResult<Real> run(const StepObserver<Real>& observer) {
    rho_ = DensityMatrix<Real>::basis_state(0, 0);
    for (step_ = 0; step_ < proto_.steps.size(); ++step_) {
      std::visit([this](const auto& op) { exec(op); }, proto_.steps[step_].op);
      if (observer) observer(step_, rho_);
    }
    return finish();
  }

 private:
  const Protocol& proto_;
  const std::vector<LocationAction>& actions_;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> by_step_;
  std::vector<int> position_;  // slot -> register position, -1 when absent
  std::vector<int> slot_at_;   // register position -> slot
  DensityMatrix<Real> rho_;
  std::size_t step_ = 0;

  const std::vector<std::size_t>& locations(std::size_t sub) const {
    static const std::vector<std::size_t> none;
    auto it = by_step_.find({step_, sub});
    return it == by_step_.end() ? none : it->second;
  }

  /// Outcome-flip probabilities of (step, sub); `qubit` -1 selects multi-qubit measurements.
  std::vector<Real> flips(std::size_t sub, int qubit) const {
    std::vector<Real> out;
    for (auto k : locations(sub)) {
      const auto& l = proto_.schedule.locations[k];
      if (l.kind == LocationKind::OutcomeFlip && l.qubit == qubit) out.push_back(Real(actions_[k].flip_p));
    }
    return out;
  }
  Real flip_at(std::size_t sub, int qubit, std::size_t index) const {
    const auto f = flips(sub, qubit);
    return index < f.size() ? f[index] : Real(0);
  }

  int pos(int slot) const {
    if (slot < 0 || static_cast<std::size_t>(slot) >= position_.size() || position_[slot] < 0)
      throw std::logic_error(proto_.name + " step " + proto_.steps[step_].label + ": qubit slot " +
                             std::to_string(slot) + " is not present");
    return position_[slot];
  }

  PauliString local(const PauliString& op) const {
    if (op.num_qubits() != proto_.register_size())
      throw std::invalid_argument("protocol operator " + op.str() + " does not span the register");
    std::uint64_t x = 0, z = 0;
    for (std::size_t s = 0; s < op.num_qubits(); ++s) {
      const char c = op.at(s);
      if (c == 'I') continue;
      const std::uint64_t bit = std::uint64_t{1} << pos(static_cast<int>(s));
      if (c == 'X' || c == 'Y') x |= bit;
      if (c == 'Z' || c == 'Y') z |= bit;
    }
    return {rho_.num_qubits(), x, z, op.negative()};
  }

  void add_qubit(int slot) {
    if (position_.at(slot) >= 0) throw std::logic_error("qubit slot initialized twice");
    position_[slot] = static_cast<int>(rho_.num_qubits());
    slot_at_.push_back(slot);
    rho_ = append_zero_qubit(rho_);
  }

  void drop_qubit(int slot) {
    const int p = pos(slot);
    rho_ = trace_out_qubit(rho_, static_cast<std::size_t>(p));
    slot_at_.erase(slot_at_.begin() + p);
    position_[slot] = -1;
    for (std::size_t q = 0; q < slot_at_.size(); ++q) position_[slot_at_[q]] = static_cast<int>(q);
  }

  /// Applies the E / ET channels scheduled at (step, sub) to `target`.
  void apply_channels(std::size_t sub, DensityMatrix<Real>& target) const {
    for (auto k : locations(sub)) {
      const auto& l = proto_.schedule.locations[k];
      if (l.kind == LocationKind::OutcomeFlip) continue;
      apply_pauli_channel_in_place(target, static_cast<std::size_t>(pos(l.qubit)), actions_[k].channel);
    }
  }
  void apply_channels(std::size_t sub) { apply_channels(sub, rho_); }

  void exec(const InitZero& op) {
    for (int q : op.qubits) add_qubit(q);
    apply_channels(0);
  }
  void exec(const InitTState& op) {
    add_qubit(op.qubit);
    const int p = pos(op.qubit);
    // |T> = H-then-T on |0>: fill the 2x2 block of the new qubit directly.
    using C = std::complex<Real>;
    const C w = std::polar(Real(1), std::acos(Real(-1)) / 4);
    const C amp[2] = {C(Real(1) / std::sqrt(Real(2))), w / std::sqrt(Real(2))};
    const std::uint64_t bit = std::uint64_t{1} << p;
    DensityMatrix<Real> next(rho_.num_qubits());
    for (std::uint64_t i = 0; i < rho_.dim(); ++i) {
      if (i & bit) continue;
      for (std::uint64_t j = 0; j < rho_.dim(); ++j) {
        if (j & bit) continue;
        const C v = rho_(i, j);
        if (v == C(0)) continue;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) next(i | (a ? bit : 0), j | (b ? bit : 0)) = v * amp[a] * std::conj(amp[b]);
      }
    }
    rho_ = std::move(next);
    apply_channels(0);
  }
  void exec(const InitOutputs& op) {
    for (int q : op.qubits) add_qubit(q);
    apply_channels(0);
  }
  void exec(const MeasureStabilizer& op) {
    MeasurementMode mode = op.mode;
    if (auto* c = std::get_if<Corrected>(&mode)) c->correction = local(c->correction);
    if (auto* r = std::get_if<PostselectConsistentRepeat>(&mode); r && r->correction) r->correction = local(*r->correction);
    rho_ = measure_pauli(rho_, local(op.op), mode, flip_at(0, -1, 0));
    apply_channels(0);
  }
  void exec(const ApplyNoisyDiagonal& op) {
    if (op.qubits.size() != op.pattern.size()) throw std::invalid_argument("diagonal step: one gate per qubit expected");
    DiagonalGatePattern full = DiagonalGatePattern::uniform(rho_.num_qubits(), DiagonalGate::I);
    for (std::size_t k = 0; k < op.qubits.size(); ++k) full.gates[pos(op.qubits[k])] = op.pattern.gates[k];
    apply_diagonal_in_place(rho_, full);
    apply_channels(0);
  }
  void exec(const TeleportIn& op) {
    for (std::size_t l = 0; l < op.lanes.size(); ++l) {
      const auto& lane = op.lanes[l];
      const auto xs = PauliString::single(proto_.register_size(), lane.source, 'X');
      const auto joint = hermitian_product(xs, lane.logical_x);
      rho_ = measure_pauli(rho_, local(joint), Corrected{local(lane.logical_z)}, flip_at(0, -1, l));
    }
    apply_channels(0);
    for (const auto& lane : op.lanes) {
      const auto xs = PauliString::single(proto_.register_size(), lane.source, 'X');
      const auto zs = PauliString::single(proto_.register_size(), lane.source, 'Z');
      const auto fix = hermitian_product(xs, lane.logical_x);
      rho_ = measure_pauli(rho_, local(zs), Corrected{local(fix)}, flip_at(1, lane.source, 0));
    }
    apply_channels(1);
    for (const auto& lane : op.lanes) drop_qubit(lane.source);
  }
  void exec(const JointXMeasure& op) {
    const std::size_t lanes = op.lanes.size();
    if (lanes == 0 || lanes > 4) throw std::invalid_argument("joint X measurement: 1 to 4 lanes supported");
    const std::size_t rounds = op.lanes[0].logical_x.size();
    for (const auto& lane : op.lanes)
      if (lane.logical_x.size() != rounds) throw std::invalid_argument("joint X measurement: lanes differ in rounds");
    // branch[b]: bit l of b is lane l's first recorded outcome (1 = -1)
    std::vector<DensityMatrix<Real>> branch{rho_};
    for (std::size_t r = 0; r < rounds; ++r) {
      for (std::size_t l = 0; l < lanes; ++l) {
        const auto& lane = op.lanes[l];
        const auto xo = PauliString::single(proto_.register_size(), lane.output, 'X');
        const auto meas = local(hermitian_product(xo, lane.logical_x[r]));
        const Real f = flip_at(r, -1, l), keep = 1 - f;
        if (r == 0) {
          std::vector<DensityMatrix<Real>> next(branch.size() * 2);
          for (std::size_t b = 0; b < branch.size(); ++b) {
            next[b] = weighted_projections(branch[b], meas, keep, f);
            next[b | (std::size_t{1} << l)] = weighted_projections(branch[b], meas, f, keep);
          }
          branch = std::move(next);
        } else {
          for (std::size_t b = 0; b < branch.size(); ++b) {
            const bool minus = (b >> l) & 1;
            branch[b] = minus ? weighted_projections(branch[b], meas, f, keep) : weighted_projections(branch[b], meas, keep, f);
          }
        }
      }
      for (auto& br : branch) apply_channels(r, br);
    }
    DensityMatrix<Real> total(rho_.num_qubits());
    for (std::size_t b = 0; b < branch.size(); ++b) {
      for (std::size_t l = 0; l < lanes; ++l)
        if ((b >> l) & 1) conjugate_by_pauli_in_place(branch[b], local(op.lanes[l].z_correction));
      total += branch[b];
    }
    rho_ = std::move(total);
  }
  void exec(const DestructiveReadout& op) {
    std::uint64_t data_mask = 0;
    std::vector<Real> flip_p;
    // positions ascending, matching destructive_z_readout's data order
    std::vector<std::pair<int, int>> by_pos;
    for (int q : op.data) by_pos.push_back({pos(q), q});
    std::sort(by_pos.begin(), by_pos.end());
    for (auto [p, q] : by_pos) {
      data_mask |= std::uint64_t{1} << p;
      flip_p.push_back(flip_at(0, q, 0));
    }
    auto to_pos_mask = [&](std::uint64_t slots) {
      std::uint64_t m = 0;
      for (std::size_t s = 0; s < proto_.register_size(); ++s)
        if ((slots >> s) & 1) m |= std::uint64_t{1} << pos(static_cast<int>(s));
      return m;
    };
    std::vector<std::uint64_t> conditions;
    for (auto c : op.conditions) conditions.push_back(to_pos_mask(c));
    // corrections act on the survivors, compacted in position order
    std::vector<int> survivors;
    for (std::size_t p = 0; p < slot_at_.size(); ++p)
      if (!((data_mask >> p) & 1)) survivors.push_back(slot_at_[p]);
    std::vector<ReadoutCorrection> corrections;
    for (const auto& c : op.corrections) {
      const auto full = local(c.op);
      std::uint64_t x = 0, z = 0;
      for (std::size_t k = 0; k < survivors.size(); ++k) {
        const int p = pos(survivors[k]);
        if ((full.x_mask() >> p) & 1) x |= std::uint64_t{1} << k;
        if ((full.z_mask() >> p) & 1) z |= std::uint64_t{1} << k;
      }
      if ((x | z) != 0 && std::popcount(x | z) != std::popcount(full.x_mask() | full.z_mask()))
        throw std::invalid_argument("readout correction touches a measured qubit");
      corrections.push_back({to_pos_mask(c.parity_mask), PauliString(survivors.size(), x, z, full.negative())});
    }
    rho_ = destructive_z_readout(rho_, data_mask, conditions, corrections, flip_p);
    for (auto [p, q] : by_pos) position_[q] = -1;
    slot_at_ = survivors;
    for (std::size_t q = 0; q < slot_at_.size(); ++q) position_[slot_at_[q]] = static_cast<int>(q);
    apply_channels(0);
  }
  void exec(const NoiseTick&) { apply_channels(0); }

  SimResult<Real> finish() {
    SimResult<Real> res;
    res.p_accept = rho_.trace();
    if (!(res.p_accept >= Real(kDegenerateAcceptance))) {
      res.degenerate = true;
      res.p_out = 0;
      return res;
    }
    // Reduce to the output qubits, in output order.
    DensityMatrix<Real> out = rho_;
    std::vector<int> present = slot_at_;
    for (int p = static_cast<int>(present.size()) - 1; p >= 0; --p) {
      if (std::find(proto_.output_qubits.begin(), proto_.output_qubits.end(), present[p]) != proto_.output_qubits.end())
        continue;
      out = trace_out_qubit(out, static_cast<std::size_t>(p));
      present.erase(present.begin() + p);
    }
    if (present.size() != proto_.output_qubits.size()) throw std::logic_error("output qubits missing at the end of the run");
    // reorder so that output_qubits[k] sits at position k
    const std::size_t m = present.size();
    std::vector<int> perm(m);  // perm[k] = current position of output k
    for (std::size_t k = 0; k < m; ++k)
      perm[k] = static_cast<int>(std::find(present.begin(), present.end(), proto_.output_qubits[k]) - present.begin());
    DensityMatrix<Real> ordered(m);
    auto remap = [&](std::uint64_t i) {
      std::uint64_t r = 0;
      for (std::size_t k = 0; k < m; ++k)
        if ((i >> perm[k]) & 1) r |= std::uint64_t{1} << k;
      return r;
    };
    for (std::uint64_t i = 0; i < out.dim(); ++i)
      for (std::uint64_t j = 0; j < out.dim(); ++j) ordered(remap(i), remap(j)) = out(i, j);
    res.rho_out = ordered.normalized();
    res.p_out = trace_distance(res.rho_out, ideal_state());
    return res;
  }

  DensityMatrix<Real> ideal_state() const {
    std::vector<std::complex<Real>> amps;
    for (const auto& a : proto_.ideal_amplitudes)
      amps.emplace_back(static_cast<Real>(a.real()), static_cast<Real>(a.imag()));
    return DensityMatrix<Real>::pure(amps);
  }
};

}  // namespace detail

template <typename Real>
SimResult<Real> run_actions(const Protocol& protocol, const std::vector<LocationAction>& actions,
                            const StepObserver<Real>& observer = {}) {
  return detail::Interpreter<Real>(protocol, actions).run(observer);
}

template <typename Real>
SimResult<Real> run(const Protocol& protocol, const NoiseModel& model, const StepObserver<Real>& observer = {}) {
  return run_actions<Real>(protocol, actions_for(protocol, model), observer);
}

template <typename Real>
SimResult<Real> run_with_faults(const Protocol& protocol, const std::vector<InjectedFault>& faults) {
  return run_actions<Real>(protocol, actions_for(protocol, faults));
}

/// Ideal output state of a protocol as a density matrix.
template <typename Real>
DensityMatrix<Real> ideal_output(const Protocol& protocol) {
  std::vector<std::complex<Real>> amps;
  for (const auto& a : protocol.ideal_amplitudes)
    amps.emplace_back(static_cast<Real>(a.real()), static_cast<Real>(a.imag()));
  return DensityMatrix<Real>::pure(amps);
}

/// Precision used for a protocol by default: long double where the signal sits
/// near double rounding (cubic suppression) and the register is small.
enum class Precision { Double, LongDouble };

inline Precision default_precision(const Protocol& protocol) {
  return protocol.register_size() <= 10 ? Precision::LongDouble : Precision::Double;
}

/// Result converted to double for reporting.
struct RunSummary {
  double p_accept = 0;
  double p_out = 0;
  bool degenerate = false;
  DensityMatrix<double> rho_out;
};

template <typename Real>
RunSummary summarize(const SimResult<Real>& r) {
  RunSummary s{static_cast<double>(r.p_accept), static_cast<double>(r.p_out), r.degenerate, DensityMatrix<double>(0)};
  if (!r.degenerate) {
    s.rho_out = DensityMatrix<double>(r.rho_out.num_qubits());
    for (std::size_t k = 0; k < r.rho_out.entries().size(); ++k) {
      const auto v = r.rho_out.entries()[k];
      s.rho_out.entries()[k] = {static_cast<double>(v.real()), static_cast<double>(v.imag())};
    }
  }
  return s;
}

inline RunSummary simulate(const Protocol& protocol, const NoiseModel& model, Precision precision) {
  if (precision == Precision::LongDouble) return summarize(run<long double>(protocol, model));
  return summarize(run<double>(protocol, model));
}

inline RunSummary simulate(const Protocol& protocol, const NoiseModel& model) {
  return simulate(protocol, model, default_precision(protocol));
}

}  // namespace msd
