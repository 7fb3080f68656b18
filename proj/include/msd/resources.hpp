#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace msd {

/// Measurement-depth accounting for one protocol.
struct DepthCount {
  int m1 = 0;               ///< rounds of single-qubit measurements on data qubits
  int m2 = 0;               ///< multiqubit X measurements on data qubits only
  int m_t = 0;              ///< one- and two-qubit measurement rounds for T injection
  int m_out = 0;            ///< joint measurements involving output qubits
  int cat_ft_order = 2;     ///< fault-tolerance order of the cat states
  int cat_prep_rounds = 8;  ///< logical rounds to prepare one cat state
  int block_n = 0;          ///< data qubits of the block code
  int block_k = 0;          ///< logical qubits of the block code
};

inline std::string canonical_protocol(const std::string& name) {
  if (name == "t622") return "t622";
  if (name == "t713") return "t713";
  if (name == "ccz832" || name == "ccz832-step7" || name == "ccz832-step7a") return "ccz832";
  throw std::invalid_argument("unknown protocol '" + name + "' (expected t622, t713, ccz832)");
}

inline DepthCount depth_counts(const std::string& name) {
  const auto p = canonical_protocol(name);
  // m1 counts the data-qubit rounds of single-qubit Z measurements (initialization,
  // teleport-in, readout); m_t is 6 measurements per transversal T round.
  if (p == "t622") return {3, 2 + 2 + 2 + 2, 12, 4, 2, 8, 6, 2};
  if (p == "t713") return {3, 3 + 3 + 2 + 3, 12, 1 + 3, 3, 10, 7, 1};
  return {2, 4 + 1 + 1, 6, 6, 2, 8, 8, 3};
}

/// time = a*d + b*d', qubits = c*d^2 + e*d'^2.
struct LinearForm {
  std::int64_t coef_d = 0;
  std::int64_t coef_dprime = 0;
  std::int64_t eval(std::int64_t d, std::int64_t dprime) const { return coef_d * d + coef_dprime * dprime; }
};

inline void require_distances(std::int64_t d, std::int64_t dprime) {
  if (d < 1 || dprime < 1) throw std::invalid_argument("code distances must be at least 1");
}

/// Syndrome rounds of one multiqubit X measurement on data only, in units of d:
/// cat preparation plus one round for the XX / Z measurements.
inline std::int64_t data_measurement_cost(const DepthCount& c) { return c.cat_prep_rounds + 1; }
/// Output-involving measurements cost (cat_prep_rounds - 1) d + 2 d'.
inline std::int64_t output_measurement_cost_d(const DepthCount& c) { return c.cat_prep_rounds - 1; }

/// Coefficients of d and d' in the protocol's syndrome-round count.
inline LinearForm surface_time_form(const std::string& name) {
  const auto c = depth_counts(name);
  return {c.m2 * data_measurement_cost(c) + c.m_out * output_measurement_cost_d(c), 2 * std::int64_t{c.m_out}};
}

inline std::int64_t surface_time(const std::string& name, std::int64_t d, std::int64_t dprime) {
  require_distances(d, dprime);
  const auto p = canonical_protocol(name);
  // closed forms as published
  if (p == "t622") return 8 * 9 * d + 4 * (7 * d + 2 * dprime);
  if (p == "t713") return 11 * 11 * d + 4 * (9 * d + 2 * dprime);
  return 6 * 9 * d + 6 * (7 * d + 2 * dprime);
}

/// Coefficients of d^2 and d'^2: a 4 x 2n rectangle of data-distance patches plus k + 2 output patches.
inline LinearForm surface_qubits_form(const std::string& name) {
  const auto c = depth_counts(name);
  return {8 * std::int64_t{c.block_n}, c.block_k + 2};
}

inline std::int64_t surface_qubits(const std::string& name, std::int64_t d, std::int64_t dprime) {
  require_distances(d, dprime);
  const auto p = canonical_protocol(name);
  if (p == "t622") return 4 * 12 * d * d + 4 * dprime * dprime;
  if (p == "t713") return 56 * d * d + 3 * dprime * dprime;
  return 4 * 16 * d * d + 5 * dprime * dprime;
}

struct DetectionModeReport {
  std::int64_t syndrome_measurements_per_patch_round = 0;  ///< d(d^2 - 1)
  std::int64_t total_locations = 0;                       ///< patches * rounds * d(d^2 - 1)
  double accept_feasibility_ratio = 0;                     ///< total * p, must be << 1
};

inline void require_analysis_inputs(std::int64_t d, double p, std::int64_t patches, std::int64_t rounds) {
  if (d < 3 || d % 2 == 0) throw std::invalid_argument("surface code distance must be odd and at least 3");
  if (!(p > 0 && p < 1)) throw std::invalid_argument("p must lie in (0, 1)");
  if (patches < 1 || rounds < 1) throw std::invalid_argument("patches and rounds must be positive");
}

inline DetectionModeReport detection_mode_analysis(std::int64_t d, double p, std::int64_t patches, std::int64_t rounds) {
  require_analysis_inputs(d, p, patches, rounds);
  DetectionModeReport r;
  r.syndrome_measurements_per_patch_round = d * (d * d - 1);
  r.total_locations = patches * rounds * r.syndrome_measurements_per_patch_round;
  r.accept_feasibility_ratio = static_cast<double>(r.total_locations) * p;
  return r;
}

struct PartialCorrectionReport {
  double per_patch_discard_exact = 0;   ///< C(d(d^2-1), 2) p^2
  double per_patch_discard_approx = 0;  ///< (d^3 p)^2 / 2
  double total_condition = 0;           ///< patches * rounds * (d^3 p)^2 / 2
  double sqrt_condition = 0;            ///< sqrt(patches * rounds) * d^3 p
};

inline PartialCorrectionReport partial_correction_analysis(std::int64_t d, double p, std::int64_t patches,
                                                           std::int64_t rounds) {
  require_analysis_inputs(d, p, patches, rounds);
  const std::int64_t loc = d * (d * d - 1);
  const double d3p = static_cast<double>(d * d * d) * p;
  PartialCorrectionReport r;
  r.per_patch_discard_exact = static_cast<double>(loc * (loc - 1) / 2) * p * p;
  r.per_patch_discard_approx = d3p * d3p / 2;
  r.total_condition = static_cast<double>(patches * rounds) * r.per_patch_discard_approx;
  r.sqrt_condition = std::sqrt(static_cast<double>(patches * rounds)) * d3p;
  return r;
}

/// Verdict threshold for the "<< 1" conditions.
inline constexpr double kFeasibleRatio = 0.1;

}  // namespace msd
