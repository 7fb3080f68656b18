#include <cmath>

#include <gtest/gtest.h>

#include "msd/protocol.hpp"
#include "msd/simulator.hpp"

using msd::DChannel;
using msd::LocationKind;

namespace {

std::vector<std::size_t> et_locations(const msd::Protocol& p) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < p.schedule.locations.size(); ++i)
    if (p.schedule.locations[i].kind == LocationKind::ET) out.push_back(i);
  return out;
}

// Accepted weight times output error for a fixed set of Z faults on ET locations.
template <typename Real>
double harmful_weight(const msd::Protocol& p, const std::vector<msd::InjectedFault>& faults) {
  const auto r = msd::run_with_faults<Real>(p, faults);
  if (r.degenerate) return 0;
  return double(r.p_accept * r.p_out);
}

struct FaultScan {
  std::size_t runs = 0;
  std::size_t failures = 0;
  std::string first_failure;
};

// Every single Pauli fault (or outcome flip) at the chosen locations must be rejected
// or leave the accepted output exact.
template <typename Real>
FaultScan scan_single_faults(const msd::Protocol& p, std::size_t stride = 1) {
  FaultScan s;
  for (std::size_t i = 0; i < p.schedule.locations.size(); i += stride) {
    const bool flip = p.schedule.locations[i].kind == LocationKind::OutcomeFlip;
    for (char c : std::string(flip ? "X" : "XYZ")) {
      const auto r = msd::run_with_faults<Real>(p, {{i, c}});
      ++s.runs;
      if (!r.degenerate && r.p_accept > 1e-12 && r.p_out > 1e-9) {
        if (s.failures++ == 0)
          s.first_failure = "location " + std::to_string(i) + " Pauli " + c + ": p_out " + std::to_string(double(r.p_out));
      }
    }
  }
  return s;
}

}  // namespace

TEST(Protocol, NamesAndLookup) {
  for (const auto& name : msd::protocol_names()) EXPECT_EQ(msd::build_protocol(name).name, name);
  EXPECT_EQ(msd::build_protocol("ccz832-step7a").name, "ccz832");
  EXPECT_THROW(msd::build_protocol("t999"), std::invalid_argument);
  EXPECT_EQ(msd::build_protocol("t713").degree, 3);
  EXPECT_EQ(msd::build_protocol("t622").degree, 2);
}

TEST(Protocol, OutputRegisterSizes) {
  EXPECT_EQ(msd::build_protocol("t622").output_qubits.size(), 2u);
  EXPECT_EQ(msd::build_protocol("t713").output_qubits.size(), 1u);
  EXPECT_EQ(msd::build_protocol("ccz832").output_qubits.size(), 3u);
}

TEST(Protocol, NoiselessRunsAreExact) {
  for (const auto& name : msd::protocol_names()) {
    const auto p = msd::build_protocol(name);
    const auto r = msd::simulate(p, {0, 0, DChannel::Depolarizing});
    EXPECT_NEAR(r.p_accept, 1.0, 1e-12) << name;
    EXPECT_LE(r.p_out, 1e-10) << name;
    EXPECT_FALSE(r.degenerate);
  }
}

TEST(Protocol, IdealOutputIsNormalizedPure) {
  for (const auto& name : msd::protocol_names()) {
    const auto rho = msd::ideal_output<double>(msd::build_protocol(name));
    EXPECT_NEAR(rho.trace(), 1.0, 1e-14);
    double purity = 0;
    for (std::size_t i = 0; i < rho.dim(); ++i)
      for (std::size_t j = 0; j < rho.dim(); ++j) purity += std::norm(rho(i, j));
    EXPECT_NEAR(purity, 1.0, 1e-13) << name;
  }
}

TEST(Protocol, ClassicLeadingOrderFor622) {
  // p = 0 with Z noise: p_out = 7 p_t^2 at leading order.
  const auto r = msd::simulate(msd::build_protocol("t622"), {0, 1e-4, DChannel::ZFlip});
  EXPECT_NEAR(r.p_out / 1e-8, 7.0, 0.35);
}

TEST(Protocol, MonotoneInNoiseStrength) {
  const auto p = msd::build_protocol("t622");
  for (auto d : msd::all_channels()) {
    double last_out = -1, last_acc = 2;
    for (double pt : {1e-5, 3e-5, 1e-4, 3e-4}) {
      const auto r = msd::simulate(p, {pt / 2, pt, d});
      EXPECT_GT(r.p_out, last_out) << msd::channel_name(d);
      EXPECT_LT(r.p_accept, last_acc) << msd::channel_name(d);
      last_out = r.p_out;
      last_acc = r.p_accept;
    }
  }
}

TEST(Protocol, PrecisionsAgree) {
  const auto p = msd::build_protocol("t622");
  const msd::NoiseModel m{1e-3, 1e-3, DChannel::Depolarizing};
  const auto a = msd::simulate(p, m, msd::Precision::Double);
  const auto b = msd::simulate(p, m, msd::Precision::LongDouble);
  EXPECT_NEAR(a.p_accept, b.p_accept, 1e-12);
  EXPECT_NEAR(a.p_out / b.p_out, 1.0, 1e-6);
}

TEST(Protocol, FaultActionsTouchOnlyChosenLocations) {
  const auto p = msd::build_protocol("t622");
  std::vector<msd::InjectedFault> faults;
  for (auto i : et_locations(p)) faults.push_back({i, 'Z'});
  const auto a = msd::run_with_faults<long double>(p, faults);
  const auto actions = msd::actions_for(p, faults);
  std::size_t nontrivial = 0;
  for (const auto& act : actions) nontrivial += !act.channel.is_identity();
  EXPECT_EQ(nontrivial, faults.size());
  EXPECT_GE(a.p_accept, 0.0L);
}

TEST(Protocol, FirstOrderFaultTolerance622) {
  const auto s = scan_single_faults<long double>(msd::build_protocol("t622"));
  EXPECT_EQ(s.failures, 0u) << s.first_failure;
  EXPECT_EQ(s.runs, 275u);
}

TEST(Protocol, FirstOrderFaultTolerance713) {
  const auto s = scan_single_faults<long double>(msd::build_protocol("t713"));
  EXPECT_EQ(s.failures, 0u) << s.first_failure;
}

TEST(Protocol, FirstOrderFaultToleranceCczSampled) {
  // Every thirteenth location here; the exhaustive scan runs in the acceptance suite.
  for (const char* name : {"ccz832", "ccz832-step7"}) {
    const auto s = scan_single_faults<double>(msd::build_protocol(name), 13);
    EXPECT_EQ(s.failures, 0u) << name << ": " << s.first_failure;
  }
}

TEST(Protocol, HarmfulZPairs622) {
  // Enumerating pairs of Z faults on T locations reproduces the 7 p_t^2 coefficient.
  const auto p = msd::build_protocol("t622");
  const auto et = et_locations(p);
  int harmful = 0;
  double weight = 0;
  for (std::size_t a = 0; a < et.size(); ++a)
    for (std::size_t b = a + 1; b < et.size(); ++b) {
      const double w = harmful_weight<long double>(p, {{et[a], 'Z'}, {et[b], 'Z'}});
      harmful += w > 1e-9;
      weight += w;
    }
  EXPECT_EQ(harmful, 7);
  EXPECT_NEAR(weight, 7.0, 1e-9);
}

TEST(Protocol, ZPairsAreHarmlessAndTriplesGive35For713) {
  const auto p = msd::build_protocol("t713");
  const auto et = et_locations(p);
  ASSERT_EQ(et.size(), 15u);
  double pair_weight = 0;
  for (std::size_t a = 0; a < et.size(); ++a)
    for (std::size_t b = a + 1; b < et.size(); ++b) pair_weight += harmful_weight<long double>(p, {{et[a], 'Z'}, {et[b], 'Z'}});
  EXPECT_LT(pair_weight, 1e-9);
  double triple_weight = 0;
  int harmful = 0;
  for (std::size_t a = 0; a < et.size(); ++a)
    for (std::size_t b = a + 1; b < et.size(); ++b)
      for (std::size_t c = b + 1; c < et.size(); ++c) {
        const double w = harmful_weight<long double>(p, {{et[a], 'Z'}, {et[b], 'Z'}, {et[c], 'Z'}});
        harmful += w > 1e-9;
        triple_weight += w;
      }
  EXPECT_EQ(harmful, 35);
  EXPECT_NEAR(triple_weight, 35.0, 1e-9);
}

TEST(Protocol, HarmfulZPairsCcz) {
  const auto p = msd::build_protocol("ccz832");
  const auto et = et_locations(p);
  ASSERT_EQ(et.size(), 8u);
  double weight = 0;
  for (std::size_t a = 0; a < et.size(); ++a)
    for (std::size_t b = a + 1; b < et.size(); ++b) weight += harmful_weight<double>(p, {{et[a], 'Z'}, {et[b], 'Z'}});
  EXPECT_NEAR(weight, 28.0, 1e-6);
}

TEST(Protocol, CustomScheduleIsHonored) {
  auto p = msd::build_protocol("t622");
  const auto base = msd::simulate(p, {1e-3, 0, DChannel::ZFlip});
  p.schedule.locations.erase(
      std::remove_if(p.schedule.locations.begin(), p.schedule.locations.end(),
                     [](const msd::ErrorLocation& l) { return l.kind != LocationKind::ET; }),
      p.schedule.locations.end());
  const auto t_only = msd::simulate(p, {1e-3, 0, DChannel::ZFlip});
  EXPECT_GT(base.p_out, 0.0);
  EXPECT_LT(t_only.p_out, 1e-15);
  EXPECT_NEAR(t_only.p_accept, 1.0, 1e-12);
}
