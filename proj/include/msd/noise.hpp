#pragma once

#include <cstddef>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "msd/density_matrix.hpp"

namespace msd {

/// The error channel D shared by Clifford-location noise and T noise.
enum class DChannel { Depolarizing, XFlip, ZFlip };

inline std::string channel_name(DChannel d) {
  switch (d) {
    case DChannel::Depolarizing: return "depolarizing";
    case DChannel::XFlip: return "x";
    case DChannel::ZFlip: return "z";
  }
  return "?";
}

inline DChannel parse_channel(const std::string& s) {
  if (s == "depolarizing" || s == "depol" || s == "d") return DChannel::Depolarizing;
  if (s == "x" || s == "X") return DChannel::XFlip;
  if (s == "z" || s == "Z") return DChannel::ZFlip;
  throw std::invalid_argument("unknown channel '" + s + "' (expected depolarizing, x or z)");
}

inline const std::vector<DChannel>& all_channels() {
  static const std::vector<DChannel> v{DChannel::Depolarizing, DChannel::XFlip, DChannel::ZFlip};
  return v;
}

/// rho -> (1 - prob) rho + prob D(rho) as a Pauli channel.
inline PauliChannel mixed_channel(DChannel d, double prob) {
  switch (d) {
    case DChannel::Depolarizing: return {1 - prob, prob / 3, prob / 3, prob / 3};
    case DChannel::XFlip: return {1 - prob, prob, 0, 0};
    case DChannel::ZFlip: return {1 - prob, 0, 0, prob};
  }
  return {};
}

struct NoiseModel {
  double p = 0;    ///< Clifford-location qubit noise and measurement outcome flips
  double p_t = 0;  ///< noise after T states and T / T-dagger gates
  DChannel d = DChannel::Depolarizing;

  void validate() const {
    if (!(p >= 0 && p < 1)) throw std::invalid_argument("noise model: p must lie in [0, 1)");
    if (!(p_t >= 0 && p_t < 1)) throw std::invalid_argument("noise model: p_t must lie in [0, 1)");
  }
  PauliChannel clifford_channel() const { return mixed_channel(d, p); }
  PauliChannel t_channel() const { return mixed_channel(d, p_t); }
};

template <typename Real>
void apply_E(DensityMatrix<Real>& rho, std::size_t qubit, const NoiseModel& model) {
  apply_pauli_channel_in_place(rho, qubit, model.clifford_channel());
}

template <typename Real>
void apply_ET(DensityMatrix<Real>& rho, std::size_t qubit, const NoiseModel& model) {
  apply_pauli_channel_in_place(rho, qubit, model.t_channel());
}

enum class LocationKind { E, ET, OutcomeFlip };

inline std::string kind_name(LocationKind k) {
  switch (k) {
    case LocationKind::E: return "E";
    case LocationKind::ET: return "ET";
    case LocationKind::OutcomeFlip: return "OutcomeFlip";
  }
  return "?";
}

inline LocationKind parse_kind(const std::string& s) {
  if (s == "E") return LocationKind::E;
  if (s == "ET") return LocationKind::ET;
  if (s == "OutcomeFlip") return LocationKind::OutcomeFlip;
  throw std::invalid_argument("unknown location kind '" + s + "'");
}

/// One place where an independent fault may occur.
///
/// `step` indexes the protocol's step list and `sub` the operation inside that step
/// (e.g. the repeat of a joint measurement). E and ET act right after that operation.
/// OutcomeFlip makes that operation's recorded outcome unreliable; `qubit` is -1 for
/// multi-qubit measurements and names the measured qubit for single-qubit ones.
struct ErrorLocation {
  std::size_t step = 0;
  std::size_t sub = 0;
  int qubit = -1;
  LocationKind kind = LocationKind::E;

  friend bool operator==(const ErrorLocation&, const ErrorLocation&) = default;
};

struct LocationCounts {
  std::size_t n_clifford = 0;  ///< E locations plus outcome flips
  std::size_t n_t = 0;         ///< ET locations
  std::size_t n_e = 0;
  std::size_t n_flip = 0;
};

struct ErrorLocationSchedule {
  static constexpr int kSchemaVersion = 1;

  std::string protocol;
  int version = 1;
  std::vector<ErrorLocation> locations;

  LocationCounts counts() const {
    LocationCounts c;
    for (const auto& l : locations) {
      if (l.kind == LocationKind::ET) ++c.n_t;
      else if (l.kind == LocationKind::E) ++c.n_e;
      else ++c.n_flip;
    }
    c.n_clifford = c.n_e + c.n_flip;
    return c;
  }

  friend bool operator==(const ErrorLocationSchedule&, const ErrorLocationSchedule&) = default;
};

inline nlohmann::json to_json(const ErrorLocationSchedule& s) {
  nlohmann::json locs = nlohmann::json::array();
  for (const auto& l : s.locations)
    locs.push_back({{"step", l.step}, {"sub", l.sub}, {"qubit", l.qubit}, {"kind", kind_name(l.kind)}});
  const auto c = s.counts();
  return {{"schema_version", ErrorLocationSchedule::kSchemaVersion},
          {"protocol", s.protocol},
          {"version", s.version},
          {"totals", {{"n_clifford", c.n_clifford}, {"n_t", c.n_t}, {"n_e", c.n_e}, {"n_outcome_flip", c.n_flip}}},
          {"locations", locs}};
}

inline ErrorLocationSchedule schedule_from_json(const nlohmann::json& j) {
  if (j.at("schema_version").get<int>() != ErrorLocationSchedule::kSchemaVersion)
    throw std::invalid_argument("unsupported schedule schema_version");
  ErrorLocationSchedule s;
  s.protocol = j.at("protocol").get<std::string>();
  s.version = j.at("version").get<int>();
  for (const auto& l : j.at("locations"))
    s.locations.push_back({l.at("step").get<std::size_t>(), l.at("sub").get<std::size_t>(), l.at("qubit").get<int>(),
                           parse_kind(l.at("kind").get<std::string>())});
  return s;
}

inline ErrorLocationSchedule load_schedule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open schedule file " + path);
  return schedule_from_json(nlohmann::json::parse(in));
}

}  // namespace msd
