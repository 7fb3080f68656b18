#pragma once

// Dense-matrix reference implementations used only by the tests.

#include <complex>
#include <random>

#include <Eigen/Dense>

#include "msd/density_matrix.hpp"
#include "msd/pauli.hpp"

namespace oracle {

using Mat = Eigen::MatrixXcd;
using C = std::complex<double>;

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Mat single(char c) {
  Mat m(2, 2);
  switch (c) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, C(0, -1), C(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m << 1, 0, 0, 1;
  }
  return m;
}

/// Matrix of a Pauli string; qubit 0 is the least significant index bit.
inline Mat pauli(const msd::PauliString& p) {
  Mat m = Mat::Identity(1, 1);
  for (std::size_t q = 0; q < p.num_qubits(); ++q) m = kron(single(p.at(q)), m);
  return double(p.sign()) * m;
}

inline Mat phased(const msd::PhasedPauli& p) {
  static const C ipow[4] = {1, C(0, 1), -1, C(0, -1)};
  return ipow[p.phase & 3] * pauli(p.op);
}

template <typename Real>
Mat to_matrix(const msd::DensityMatrix<Real>& rho) {
  Mat m(rho.dim(), rho.dim());
  for (std::size_t i = 0; i < rho.dim(); ++i)
    for (std::size_t j = 0; j < rho.dim(); ++j) m(i, j) = C(double(rho(i, j).real()), double(rho(i, j).imag()));
  return m;
}

inline msd::DensityMatrix<double> from_matrix(const Mat& m) {
  msd::DensityMatrix<double> rho(static_cast<std::size_t>(std::countr_zero(static_cast<std::size_t>(m.rows()))));
  for (std::size_t i = 0; i < rho.dim(); ++i)
    for (std::size_t j = 0; j < rho.dim(); ++j) rho(i, j) = m(i, j);
  return rho;
}

/// Random full-rank density matrix.
inline Mat random_density(std::size_t qubits, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << qubits);
  Mat a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = C(g(rng), g(rng));
  Mat r = a * a.adjoint();
  return r / r.trace();
}

inline msd::PauliString random_pauli(std::size_t n, std::mt19937_64& rng) {
  const std::uint64_t full = n == 64 ? ~0ull : (1ull << n) - 1;
  return msd::PauliString(n, rng() & full, rng() & full, rng() & 1);
}

inline double max_abs_diff(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }

inline double trace_norm_distance(const Mat& a, const Mat& b) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(a - b);
  return 0.5 * eig.eigenvalues().cwiseAbs().sum();
}

}  // namespace oracle
