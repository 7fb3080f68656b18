#pragma once

#include <complex>
#include <cstdint>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "msd/codes.hpp"
#include "msd/density_matrix.hpp"
#include "msd/noise.hpp"
#include "msd/pauli.hpp"

namespace msd {

// Step vocabulary. Qubit indices are protocol register slots; Pauli operators act on the
// full register. Each step lists its operations in order; the `sub` index of an error
// location refers to that order.

/// Prepare noisy qubits in |0>.
struct InitZero {
  std::vector<int> qubits;
};

/// Bring in an ideal |T> (followed by one ET location).
struct InitTState {
  int qubit = 0;
};

/// Prepare noise-free output qubits in |0>.
struct InitOutputs {
  std::vector<int> qubits;
};

/// One multi-qubit Pauli measurement with correction or postselection.
struct MeasureStabilizer {
  PauliString op;
  MeasurementMode mode;
};

/// Ideal diagonal gates on `qubits`, each T or T-dagger followed by ET.
struct ApplyNoisyDiagonal {
  std::vector<int> qubits;
  DiagonalGatePattern pattern;  ///< one gate per entry of `qubits`
};

/// Teleport a source qubit into a logical qubit: measure X_source X_L (Z_L on -1),
/// then Z_source (X_L on -1), then discard the source. Lanes run simultaneously.
struct TeleportIn {
  struct Lane {
    int source = 0;
    PauliString logical_x;
    PauliString logical_z;
  };
  std::vector<Lane> lanes;
};

/// Half-teleportation to an output qubit: measure X_output times each logical
/// representative in turn, postselect on identical recorded outcomes, and apply
/// `z_correction` when they all read -1. Lanes run simultaneously, round by round,
/// and must have the same number of representatives.
struct JointXMeasure {
  struct Lane {
    int output = 0;
    std::vector<PauliString> logical_x;
    PauliString z_correction;
  };
  std::vector<Lane> lanes;
};

/// Destructive Z readout of `data`; parity conditions and corrections are slot masks.
struct DestructiveReadout {
  struct Correction {
    std::uint64_t parity_mask = 0;
    PauliString op;  ///< on the full register, supported on surviving qubits
  };
  std::vector<int> data;
  std::vector<std::uint64_t> conditions;
  std::vector<Correction> corrections;
};

/// Idle time on `qubits` (one E location each).
struct NoiseTick {
  std::vector<int> qubits;
};

using StepOp = std::variant<InitZero, InitTState, InitOutputs, MeasureStabilizer, ApplyNoisyDiagonal, TeleportIn,
                            JointXMeasure, DestructiveReadout, NoiseTick>;

struct Step {
  std::string label;  ///< protocol step number, e.g. "5" or "7a"
  StepOp op;
};

enum class QubitRole { Data, Source, Output };

struct QubitSlot {
  std::string name;
  QubitRole role = QubitRole::Data;
};

enum class Ccz832Variant { Step7, Step7a };

struct Protocol {
  std::string name;
  CodeSpec code;
  std::vector<QubitSlot> qubits;
  std::vector<Step> steps;
  ErrorLocationSchedule schedule;
  std::vector<int> output_qubits;
  /// Ideal joint state of the outputs, output_qubits[0] as the least significant bit.
  std::vector<std::complex<long double>> ideal_amplitudes;
  bool joint_output_comparison = true;
  /// Order of the leading error terms (2 for quadratic suppression, 3 for cubic).
  int degree = 2;

  std::size_t register_size() const { return qubits.size(); }
};

// ---------------------------------------------------------------------------
// Schedule construction.
//
// Rules, applied to the step list:
//   * InitZero: one E on each prepared qubit.
//   * InitTState: one ET. T / T-dagger in ApplyNoisyDiagonal: one ET per qubit, no E.
//   * Every multi-qubit measurement round (MeasureStabilizer, the joint round of
//     TeleportIn, each round of JointXMeasure): one OutcomeFlip per measured operator,
//     then one E on every live non-output qubit ("noise after any operation including
//     the identity").
//   * Single-qubit destructive measurements (TeleportIn sources, DestructiveReadout):
//     one OutcomeFlip per qubit; the qubit is gone afterwards.
//   * NoiseTick: one E per listed qubit.
//   * Output qubits never carry locations.

inline ErrorLocationSchedule build_schedule(const Protocol& protocol, int version = 1) {
  ErrorLocationSchedule s;
  s.protocol = protocol.name;
  s.version = version;
  std::set<int> live;
  auto noisy = [&](int q) { return protocol.qubits.at(q).role != QubitRole::Output; };
  auto layer = [&](std::size_t step, std::size_t sub) {
    for (int q : live)
      if (noisy(q)) s.locations.push_back({step, sub, q, LocationKind::E});
  };
  auto flip = [&](std::size_t step, std::size_t sub, int qubit) {
    s.locations.push_back({step, sub, qubit, LocationKind::OutcomeFlip});
  };
  for (std::size_t i = 0; i < protocol.steps.size(); ++i) {
    const auto& op = protocol.steps[i].op;
    if (const auto* st = std::get_if<InitZero>(&op)) {
      for (int q : st->qubits) {
        live.insert(q);
        s.locations.push_back({i, 0, q, LocationKind::E});
      }
    } else if (const auto* st = std::get_if<InitTState>(&op)) {
      live.insert(st->qubit);
      s.locations.push_back({i, 0, st->qubit, LocationKind::ET});
    } else if (const auto* st = std::get_if<InitOutputs>(&op)) {
      for (int q : st->qubits) live.insert(q);
    } else if (std::holds_alternative<MeasureStabilizer>(op)) {
      flip(i, 0, -1);
      layer(i, 0);
    } else if (const auto* st = std::get_if<ApplyNoisyDiagonal>(&op)) {
      for (std::size_t k = 0; k < st->qubits.size(); ++k)
        if (is_t_like(st->pattern.gates.at(k))) s.locations.push_back({i, 0, st->qubits[k], LocationKind::ET});
    } else if (const auto* st = std::get_if<TeleportIn>(&op)) {
      for (std::size_t l = 0; l < st->lanes.size(); ++l) flip(i, 0, -1);
      layer(i, 0);
      for (const auto& lane : st->lanes) {
        flip(i, 1, lane.source);
        live.erase(lane.source);
      }
    } else if (const auto* st = std::get_if<JointXMeasure>(&op)) {
      const std::size_t rounds = st->lanes.at(0).logical_x.size();
      for (std::size_t r = 0; r < rounds; ++r) {
        for (std::size_t l = 0; l < st->lanes.size(); ++l) flip(i, r, -1);
        layer(i, r);
      }
    } else if (const auto* st = std::get_if<DestructiveReadout>(&op)) {
      for (int q : st->data) {
        flip(i, 0, q);
        live.erase(q);
      }
    } else if (const auto* st = std::get_if<NoiseTick>(&op)) {
      for (int q : st->qubits) s.locations.push_back({i, 0, q, LocationKind::E});
    }
  }
  return s;
}

inline LocationCounts count_locations(const Protocol& protocol) { return protocol.schedule.counts(); }

// ---------------------------------------------------------------------------
// Builders.

namespace detail {

inline std::uint64_t slot_mask(std::initializer_list<int> slots) {
  std::uint64_t m = 0;
  for (int s : slots) m |= std::uint64_t{1} << s;
  return m;
}

/// Places a code-block operator on the data slots [0, n) of a register.
inline PauliString on_data(const PauliString& block_op, std::size_t register_size) {
  std::vector<std::size_t> pos(block_op.num_qubits());
  for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = i;
  return embed(block_op, register_size, pos);
}

inline PauliString on_data(const std::string& text, std::size_t register_size) {
  return on_data(PauliString::parse(text), register_size);
}

inline std::complex<long double> t_phase(int power) {
  const long double pi = std::acos(-1.0L);
  return std::polar(1.0L, pi * power / 4);
}

/// Round-robin idle locations on the first data qubits, used to match the published
/// location totals.
inline Step calibration_tick(std::size_t count, std::size_t data_qubits) {
  NoiseTick tick;
  for (std::size_t k = 0; k < count; ++k) tick.qubits.push_back(static_cast<int>(k % data_qubits));
  return {"idle", tick};
}

inline std::vector<QubitSlot> data_slots(std::size_t n) {
  std::vector<QubitSlot> slots;
  for (std::size_t i = 0; i < n; ++i) slots.push_back({"d" + std::to_string(i + 1), QubitRole::Data});
  return slots;
}

}  // namespace detail

/// Second-order T distillation with the [[6,2,2]] code; outputs |T>|T>.
inline Protocol build_protocol_622() {
  using detail::on_data;
  Protocol p;
  p.name = "t622";
  p.code = code_622();
  p.qubits = detail::data_slots(6);
  p.qubits.push_back({"t1", QubitRole::Source});
  p.qubits.push_back({"t2", QubitRole::Source});
  p.qubits.push_back({"o1", QubitRole::Output});
  p.qubits.push_back({"o2", QubitRole::Output});
  const std::size_t R = p.register_size();
  const int t1 = 6, t2 = 7, o1 = 8, o2 = 9;
  const auto X1 = on_data(p.code.logical_x[0], R), X2 = on_data(p.code.logical_x[1], R);
  const auto Z1 = on_data(p.code.logical_z[0], R), Z2 = on_data(p.code.logical_z[1], R);
  const auto xs1 = on_data("XXXXII", R), xs2 = on_data("IIXXXX", R);

  auto& s = p.steps;
  s.push_back({"1", InitZero{{0, 1, 2, 3, 4, 5}}});
  s.push_back({"1", InitTState{t1}});
  s.push_back({"1", InitTState{t2}});
  s.push_back({"2", MeasureStabilizer{xs1, Corrected{PauliString::single(R, 0, 'Z')}}});
  s.push_back({"2", MeasureStabilizer{xs2, Corrected{PauliString::single(R, 5, 'Z')}}});
  s.push_back({"3", TeleportIn{{{t1, X1, Z1}, {t2, X2, Z2}}}});
  s.push_back(detail::calibration_tick(5, 6));
  s.push_back({"4", ApplyNoisyDiagonal{{0, 1, 2, 3, 4, 5}, DiagonalGatePattern::uniform(6, DiagonalGate::T)}});
  s.push_back({"5", MeasureStabilizer{on_data("XXXXXX", R), PostselectPlus{}}});
  s.push_back({"5", MeasureStabilizer{on_data("XXXXXX", R), PostselectPlus{}}});
  s.push_back({"6", ApplyNoisyDiagonal{{0, 1, 2, 3, 4, 5}, DiagonalGatePattern::uniform(6, DiagonalGate::Tdg)}});
  s.push_back({"7", InitOutputs{{o1, o2}}});
  s.push_back({"7", JointXMeasure{{{o1, {X1, X1}, PauliString::single(R, o1, 'Z')},
                                   {o2, {X2, X2}, PauliString::single(R, o2, 'Z')}}}});
  s.push_back({"8", MeasureStabilizer{xs1, PostselectPlus{}}});
  s.push_back({"8", MeasureStabilizer{xs2, PostselectPlus{}}});
  using detail::slot_mask;
  s.push_back({"9", DestructiveReadout{{0, 1, 2, 3, 4, 5},
                                       {slot_mask({0, 1, 2, 3}), slot_mask({2, 3, 4, 5})},
                                       {{slot_mask({0, 2, 4}), PauliString::single(R, o1, 'X')},
                                        {slot_mask({1, 3, 5}), PauliString::single(R, o2, 'X')}}}});
  p.output_qubits = {o1, o2};
  for (int b = 0; b < 4; ++b) p.ideal_amplitudes.push_back(detail::t_phase(std::popcount(unsigned(b))) / 2.0L);
  p.joint_output_comparison = true;
  p.degree = 2;
  p.schedule = build_schedule(p);
  return p;
}

/// Third-order T distillation with the [[7,1,3]] Steane code; outputs |T>.
inline Protocol build_protocol_713() {
  using detail::on_data;
  Protocol p;
  p.name = "t713";
  p.code = code_713();
  p.qubits = detail::data_slots(7);
  p.qubits.push_back({"t", QubitRole::Source});
  p.qubits.push_back({"o", QubitRole::Output});
  const std::size_t R = p.register_size();
  const int t = 7, o = 8;
  const auto XL = on_data(p.code.logical_x[0], R), ZL = on_data(p.code.logical_z[0], R);
  const std::vector<PauliString> xstabs = {on_data("XIXIXIX", R), on_data("IXXIIXX", R), on_data("IIIXXXX", R)};
  const int corr_qubit[3] = {0, 1, 3};  // Z here flips only the matching X stabilizer

  auto& s = p.steps;
  s.push_back({"1", InitZero{{0, 1, 2, 3, 4, 5, 6}}});
  s.push_back({"1", InitTState{t}});
  for (int k = 0; k < 3; ++k)
    s.push_back({"2", MeasureStabilizer{xstabs[k], Corrected{PauliString::single(R, corr_qubit[k], 'Z')}}});
  s.push_back({"3", TeleportIn{{{t, XL, ZL}}}});
  for (int k = 0; k < 3; ++k) s.push_back({"4", MeasureStabilizer{xstabs[k], PostselectPlus{}}});
  s.push_back(detail::calibration_tick(2, 7));
  s.push_back({"5", ApplyNoisyDiagonal{{0, 1, 2, 3, 4, 5, 6}, DiagonalGatePattern::uniform(7, DiagonalGate::T)}});
  s.push_back({"6", MeasureStabilizer{XL, PostselectPlus{}}});
  s.push_back({"6", MeasureStabilizer{XL, PostselectPlus{}}});
  s.push_back({"7", ApplyNoisyDiagonal{{0, 1, 2, 3, 4, 5, 6}, DiagonalGatePattern::uniform(7, DiagonalGate::Tdg)}});
  s.push_back({"8", InitOutputs{{o}}});
  s.push_back({"9", JointXMeasure{{{o,
                                     {on_data("IXIXIXI", R), on_data("XIIXXII", R), on_data("XXXIIII", R)},
                                     PauliString::single(R, o, 'Z')}}}});
  for (int k = 0; k < 3; ++k) s.push_back({"10", MeasureStabilizer{xstabs[k], PostselectPlus{}}});
  using detail::slot_mask;
  s.push_back({"11", DestructiveReadout{{0, 1, 2, 3, 4, 5, 6},
                                        {slot_mask({0, 2, 4, 6}), slot_mask({1, 2, 5, 6}), slot_mask({3, 4, 5, 6})},
                                        {{slot_mask({0, 1, 2}), PauliString::single(R, o, 'X')}}}});
  p.output_qubits = {o};
  const long double h = 1.0L / std::sqrt(2.0L);
  p.ideal_amplitudes = {h, detail::t_phase(1) * h};
  p.joint_output_comparison = true;
  p.degree = 3;
  p.schedule = build_schedule(p);
  return p;
}

/// Second-order CCZ distillation with the [[8,3,2]] code; outputs |CCZ>.
inline Protocol build_protocol_832(Ccz832Variant variant = Ccz832Variant::Step7a) {
  using detail::on_data;
  Protocol p;
  p.name = variant == Ccz832Variant::Step7a ? "ccz832" : "ccz832-step7";
  p.code = code_832();
  p.qubits = detail::data_slots(8);
  p.qubits.push_back({"o1", QubitRole::Output});
  p.qubits.push_back({"o2", QubitRole::Output});
  p.qubits.push_back({"o3", QubitRole::Output});
  const std::size_t R = p.register_size();
  const int o[3] = {8, 9, 10};
  std::vector<PauliString> LX, LZ;
  for (int j = 0; j < 3; ++j) {
    LX.push_back(on_data(p.code.logical_x[j], R));
    LZ.push_back(on_data(p.code.logical_z[j], R));
  }
  const auto xall = on_data("XXXXXXXX", R);

  auto& s = p.steps;
  s.push_back({"1", InitZero{{0, 1, 2, 3, 4, 5, 6, 7}}});
  s.push_back({"2", MeasureStabilizer{xall, Corrected{PauliString::single(R, 0, 'Z')}}});
  for (int j = 0; j < 3; ++j) s.push_back({"2", MeasureStabilizer{LX[j], Corrected{LZ[j]}}});
  s.push_back({"3", MeasureStabilizer{on_data("IXXIXIIX", R), PostselectPlus{}}});
  s.push_back({"4", ApplyNoisyDiagonal{{0, 1, 2, 3, 4, 5, 6, 7}, ccz_pattern_832()}});
  s.push_back({"5", InitOutputs{{o[0], o[1], o[2]}}});
  for (int j = 0; j < 3; ++j)
    s.push_back({"5", JointXMeasure{{{o[j], {LX[j], LX[j]}, PauliString::single(R, o[j], 'Z')}}}});
  s.push_back({"6", MeasureStabilizer{xall, PostselectPlus{}}});
  using detail::slot_mask;
  const std::vector<DestructiveReadout::Correction> corrections = {
      {slot_mask({6, 7}), PauliString::single(R, o[0], 'X')},
      {slot_mask({5, 7}), PauliString::single(R, o[1], 'X')},
      {slot_mask({3, 7}), PauliString::single(R, o[2], 'X')}};
  if (variant == Ccz832Variant::Step7) {
    s.push_back({"7", DestructiveReadout{{0, 1, 2, 3, 4, 5, 6, 7},
                                         {slot_mask({0, 1, 2, 3}), slot_mask({1, 3, 5, 7}), slot_mask({2, 3, 6, 7}),
                                          slot_mask({4, 5, 6, 7})},
                                         corrections}});
  } else {
    s.push_back({"7a", DestructiveReadout{{0, 1, 2, 3, 4, 5, 6, 7}, {slot_mask({0, 1, 2, 3, 4, 5, 6, 7})}, corrections}});
  }
  p.output_qubits = {o[0], o[1], o[2]};
  const long double amp = 1.0L / std::sqrt(8.0L);
  for (int b = 0; b < 8; ++b) p.ideal_amplitudes.push_back(b == 7 ? -amp : amp);
  p.joint_output_comparison = true;
  p.degree = 2;
  p.schedule = build_schedule(p);
  return p;
}

inline const std::vector<std::string>& protocol_names() {
  static const std::vector<std::string> names{"t622", "t713", "ccz832", "ccz832-step7"};
  return names;
}

inline Protocol build_protocol(const std::string& name) {
  if (name == "t622") return build_protocol_622();
  if (name == "t713") return build_protocol_713();
  if (name == "ccz832" || name == "ccz832-step7a") return build_protocol_832(Ccz832Variant::Step7a);
  if (name == "ccz832-step7") return build_protocol_832(Ccz832Variant::Step7);
  throw std::invalid_argument("unknown protocol '" + name + "' (expected t622, t713, ccz832, ccz832-step7)");
}

}  // namespace msd
