#include <cstdio>
#include <random>

#include <gtest/gtest.h>

#include "msd/density_matrix.hpp"
#include "oracle.hpp"

using msd::DensityMatrix;
using msd::PauliString;
using oracle::Mat;

namespace {

Mat projector(const PauliString& p, int sign) {
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << p.num_qubits());
  return 0.5 * (Mat::Identity(d, d) + double(sign) * oracle::pauli(p));
}

DensityMatrix<double> random_rho(std::size_t n, std::mt19937_64& rng) {
  return oracle::from_matrix(oracle::random_density(n, rng));
}

// Destructive readout by enumerating actual outcomes and flip patterns separately.
Mat readout_oracle(const Mat& rho, std::size_t n, std::uint64_t data_mask, const std::vector<std::uint64_t>& conditions,
                   const std::vector<msd::ReadoutCorrection>& corrections, const std::vector<double>& flip) {
  std::vector<std::size_t> data, rest;
  for (std::size_t q = 0; q < n; ++q) ((data_mask >> q) & 1 ? data : rest).push_back(q);
  const auto od = static_cast<Eigen::Index>(std::size_t{1} << rest.size());
  Mat out = Mat::Zero(od, od);
  auto full_index = [&](std::uint64_t zdata, std::uint64_t o) {
    std::uint64_t idx = 0;
    for (std::size_t b = 0; b < data.size(); ++b)
      if ((zdata >> b) & 1) idx |= 1ull << data[b];
    for (std::size_t b = 0; b < rest.size(); ++b)
      if ((o >> b) & 1) idx |= 1ull << rest[b];
    return static_cast<Eigen::Index>(idx);
  };
  auto parity_of = [&](std::uint64_t record, std::uint64_t mask) {
    int par = 0;
    for (std::size_t b = 0; b < data.size(); ++b)
      if ((mask >> data[b]) & 1) par ^= (record >> b) & 1;
    return par;
  };
  for (std::uint64_t z = 0; z < (1ull << data.size()); ++z) {
    Mat block(od, od);
    for (Eigen::Index a = 0; a < od; ++a)
      for (Eigen::Index b = 0; b < od; ++b) block(a, b) = rho(full_index(z, a), full_index(z, b));
    for (std::uint64_t e = 0; e < (1ull << data.size()); ++e) {
      double pr = 1;
      for (std::size_t b = 0; b < data.size(); ++b) pr *= ((e >> b) & 1) ? flip[b] : 1 - flip[b];
      const std::uint64_t record = z ^ e;
      bool accept = true;
      for (auto c : conditions) accept = accept && parity_of(record, c) == 0;
      if (!accept) continue;
      Mat k = Mat::Identity(od, od);
      for (const auto& c : corrections)
        if (parity_of(record, c.parity_mask)) k = oracle::pauli(c.correction) * k;
      out += pr * k * block * k.adjoint();
    }
  }
  return out;
}

}  // namespace

TEST(DensityMatrix, BasisAndPureStates) {
  const auto rho = DensityMatrix<double>::basis_state(2, 3);
  EXPECT_EQ(rho.trace(), 1.0);
  EXPECT_EQ(rho(3, 3), std::complex<double>(1));
  const std::vector<std::complex<double>> amps{std::sqrt(0.5), std::sqrt(0.5)};
  const auto plus = DensityMatrix<double>::pure(amps);
  EXPECT_NEAR(plus(0, 1).real(), 0.5, 1e-15);
  EXPECT_THROW(DensityMatrix<double>(msd::kMaxDensityQubits + 1), std::invalid_argument);
}

TEST(DensityMatrix, ConjugationMatchesOracle) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 1 + rng() % 4;
    const auto rho = random_rho(n, rng);
    const auto p = oracle::random_pauli(n, rng);
    const Mat want = oracle::pauli(p) * oracle::to_matrix(rho) * oracle::pauli(p).adjoint();
    EXPECT_LT(oracle::max_abs_diff(oracle::to_matrix(msd::apply_pauli_conjugation(rho, p)), want), 1e-14) << p.str();
  }
}

TEST(DensityMatrix, WeightedProjectionsMatchOracle) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 1 + rng() % 4;
    const auto rho = random_rho(n, rng);
    const auto p = oracle::random_pauli(n, rng);
    const double alpha = 0.3, beta = 0.9;
    const Mat r = oracle::to_matrix(rho);
    const Mat want = alpha * projector(p, 1) * r * projector(p, 1) + beta * projector(p, -1) * r * projector(p, -1);
    EXPECT_LT(oracle::max_abs_diff(oracle::to_matrix(msd::weighted_projections(rho, p, alpha, beta)), want), 1e-14);
  }
}

TEST(DensityMatrix, MeasureExamples) {
  // Z measurement of |0> with outcome flips: postselecting +1 keeps 1 - f.
  const auto zero = DensityMatrix<double>::basis_state(1, 0);
  const auto z = PauliString::parse("Z");
  EXPECT_NEAR(msd::measure_pauli(zero, z, msd::PostselectPlus{}, 0.1).trace(), 0.9, 1e-15);
  // |+> measured in Z keeps half.
  const std::vector<std::complex<double>> amps{std::sqrt(0.5), std::sqrt(0.5)};
  const auto plus = DensityMatrix<double>::pure(amps);
  const auto kept = msd::measure_pauli(plus, z, msd::PostselectPlus{}, 0.0);
  EXPECT_NEAR(kept.trace(), 0.5, 1e-15);
  EXPECT_NEAR(kept(0, 0).real(), 0.5, 1e-15);
  // Corrected measurement of Z on |1> with X correction returns |0> with certainty.
  const auto one = DensityMatrix<double>::basis_state(1, 1);
  const auto fixed = msd::measure_pauli(one, z, msd::Corrected{PauliString::parse("X")}, 0.0);
  EXPECT_NEAR(fixed(0, 0).real(), 1.0, 1e-15);
  EXPECT_THROW(msd::measure_pauli(one, z, msd::Corrected{PauliString::parse("Z")}, 0.0), std::invalid_argument);
  EXPECT_THROW(msd::measure_pauli(one, z, msd::PostselectPlus{}, 1.5), std::invalid_argument);
}

TEST(DensityMatrix, RepeatedMeasurementAgreement) {
  // Two agreeing outcomes out of two noisy measurements of Z on |0>: (1-f)^2 kept, f^2 on the -1 side.
  const auto zero = DensityMatrix<double>::basis_state(1, 0);
  const auto z = PauliString::parse("Z");
  const double f = 0.1;
  const auto rejected = msd::measure_pauli(zero, z, msd::PostselectConsistentRepeat{2, std::nullopt}, f);
  EXPECT_NEAR(rejected.trace(), 0.81, 1e-15);
  const auto corrected = msd::measure_pauli(zero, z, msd::PostselectConsistentRepeat{2, PauliString::parse("X")}, f);
  EXPECT_NEAR(corrected.trace(), 0.82, 1e-15);
  EXPECT_NEAR(corrected(1, 1).real(), 0.01, 1e-15);
}

TEST(DensityMatrix, PauliChannelMatchesOracle) {
  std::mt19937_64 rng(3);
  const msd::PauliChannel ch{0.7, 0.1, 0.05, 0.15};
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 1 + rng() % 3;
    const std::size_t q = rng() % n;
    auto rho = random_rho(n, rng);
    const Mat r = oracle::to_matrix(rho);
    Mat want = ch.w_i * r;
    const double w[3] = {ch.w_x, ch.w_y, ch.w_z};
    const char k[3] = {'X', 'Y', 'Z'};
    for (int i = 0; i < 3; ++i) {
      const Mat p = oracle::pauli(PauliString::single(n, q, k[i]));
      want += w[i] * p * r * p;
    }
    msd::apply_pauli_channel_in_place(rho, q, ch);
    EXPECT_LT(oracle::max_abs_diff(oracle::to_matrix(rho), want), 1e-14);
  }
  EXPECT_EQ(msd::PauliChannel::deterministic('Y').w_y, 1.0);
}

TEST(DensityMatrix, AppendAndTraceOut) {
  std::mt19937_64 rng(4);
  const auto rho = random_rho(3, rng);
  const auto bigger = msd::append_zero_qubit(rho);
  EXPECT_EQ(bigger.num_qubits(), 4u);
  EXPECT_LT(oracle::max_abs_diff(oracle::to_matrix(bigger),
                                 oracle::kron(oracle::to_matrix(DensityMatrix<double>::basis_state(1, 0)),
                                              oracle::to_matrix(rho))),
            1e-15);
  EXPECT_LT(oracle::max_abs_diff(oracle::to_matrix(msd::trace_out_qubit(bigger, 3)), oracle::to_matrix(rho)), 1e-15);

  // Tracing a middle qubit of a product state returns the product of the others.
  const Mat a = oracle::random_density(1, rng), b = oracle::random_density(1, rng), c = oracle::random_density(1, rng);
  const auto prod = oracle::from_matrix(oracle::kron(c, oracle::kron(b, a)));
  EXPECT_LT(oracle::max_abs_diff(oracle::to_matrix(msd::trace_out_qubit(prod, 1)), oracle::kron(c, a)), 1e-14);
}

TEST(DensityMatrix, DestructiveReadoutMatchesOracle) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 2 + rng() % 3;  // 2..4 qubits
    std::uint64_t data_mask = 0;
    while (data_mask == 0 || data_mask == (1ull << n) - 1) data_mask = rng() & ((1ull << n) - 1);
    const std::size_t rest = n - std::popcount(data_mask);
    std::vector<std::uint64_t> conditions;
    if (rng() & 1) conditions.push_back(rng() & data_mask);
    std::vector<msd::ReadoutCorrection> corrections;
    // corrections of one type commute, as in the protocols
    const bool x_type = rng() & 1;
    for (int k = 0, nk = int(rng() % 3); k < nk; ++k) {
      const std::uint64_t bits = rng() & ((1ull << rest) - 1);
      corrections.push_back({rng() & data_mask, x_type ? PauliString::x_type(rest, bits) : PauliString::z_type(rest, bits)});
    }
    std::vector<double> flip;
    for (int b = 0; b < std::popcount(data_mask); ++b) flip.push_back(0.05 * double(rng() % 5));
    const auto rho = random_rho(n, rng);
    const auto got = msd::destructive_z_readout(rho, data_mask, conditions, corrections, flip);
    const Mat want = readout_oracle(oracle::to_matrix(rho), n, data_mask, conditions, corrections, flip);
    ASSERT_LT(oracle::max_abs_diff(oracle::to_matrix(got), want), 1e-14) << "trial " << t;
  }
}

TEST(DensityMatrix, DestructiveReadoutRejectsBadArguments) {
  const auto rho = DensityMatrix<double>::basis_state(3, 0);
  EXPECT_THROW(msd::destructive_z_readout(rho, 0b011, {0b100}, {}, 0.0), std::invalid_argument);
  EXPECT_THROW(msd::destructive_z_readout(rho, 0b011, {}, {{0b001, PauliString::parse("XX")}}, 0.0),
               std::invalid_argument);
  EXPECT_THROW(msd::destructive_z_readout(rho, 0b011, {}, {}, std::vector<double>{0.1}), std::invalid_argument);
}

TEST(DensityMatrix, TraceDistanceExamples) {
  const auto zero = DensityMatrix<double>::basis_state(1, 0);
  const auto one = DensityMatrix<double>::basis_state(1, 1);
  EXPECT_NEAR(msd::trace_distance(zero, one), 1.0, 1e-15);
  EXPECT_NEAR(msd::trace_distance(zero, zero), 0.0, 1e-15);
  const std::vector<std::complex<double>> amps{std::sqrt(0.5), std::sqrt(0.5)};
  // |0> vs |+>: sqrt(1 - 1/2)
  EXPECT_NEAR(msd::trace_distance(zero, DensityMatrix<double>::pure(amps)), std::sqrt(0.5), 1e-14);
  std::mt19937_64 rng(6);
  const Mat a = oracle::random_density(3, rng), b = oracle::random_density(3, rng);
  EXPECT_NEAR(msd::trace_distance(oracle::from_matrix(a), oracle::from_matrix(b)), oracle::trace_norm_distance(a, b),
              1e-13);
  EXPECT_GT(msd::min_eigenvalue(oracle::from_matrix(a)), 0.0);
}

TEST(DensityMatrix, LongDoubleAgreesWithDouble) {
  std::mt19937_64 rng(8);
  const auto rho = random_rho(3, rng);
  DensityMatrix<long double> rl(3);
  for (std::size_t i = 0; i < rho.dim(); ++i)
    for (std::size_t j = 0; j < rho.dim(); ++j) rl(i, j) = {rho(i, j).real(), rho(i, j).imag()};
  const auto p = PauliString::parse("XYZ");
  const auto a = msd::weighted_projections(rho, p, 1.0, 0.0);
  const auto b = msd::weighted_projections(rl, p, 1.0L, 0.0L);
  EXPECT_LT(oracle::max_abs_diff(oracle::to_matrix(a), oracle::to_matrix(b)), 1e-15);
}

TEST(DensityMatrix, DumpRoundTrip) {
  std::mt19937_64 rng(9);
  const auto rho = random_rho(2, rng);
  const std::string path = testing::TempDir() + "rho_dump.bin";
  rho.dump(path);
  const auto back = DensityMatrix<double>::load_dump(path);
  EXPECT_EQ(oracle::max_abs_diff(oracle::to_matrix(back), oracle::to_matrix(rho)), 0.0);
  std::remove(path.c_str());
  EXPECT_THROW(DensityMatrix<double>::load_dump(path), std::runtime_error);
}
