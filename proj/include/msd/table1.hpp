#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "msd/fit.hpp"
#include "msd/noise.hpp"

namespace msd {

/// Published leading-order coefficients, highest p_t power first.
struct PublishedRow {
  std::string protocol;
  DChannel channel;
  std::vector<double> coefficients;
};

inline const std::vector<PublishedRow>& published_table() {
  static const std::vector<PublishedRow> rows = {
      {"t622", DChannel::Depolarizing, {2, 32, 84}},
      {"t622", DChannel::XFlip, {6, 62, 188}},
      {"t622", DChannel::ZFlip, {7, 89, 97}},
      {"t713", DChannel::Depolarizing, {3, 34, 276, 855}},
      {"t713", DChannel::XFlip, {16, 335, 2606, 6977}},
      {"t713", DChannel::ZFlip, {35, 183, 429, 355}},
      {"ccz832", DChannel::Depolarizing, {8, 171, 958}},
      {"ccz832", DChannel::XFlip, {18, 397, 2340}},
      {"ccz832", DChannel::ZFlip, {28, 462, 1414}},
  };
  return rows;
}

/// Quadratic formulas quoted for the four-condition Step 7 readout.
inline const std::vector<PublishedRow>& published_step7() {
  static const std::vector<PublishedRow> rows = {
      {"ccz832-step7", DChannel::Depolarizing, {3, 58, 200}},
      {"ccz832-step7", DChannel::ZFlip, {28, 462, 1397}},
  };
  return rows;
}

/// Step 7 with XrhoX: 12 p_t^4 + 0.035 p_t p + 9 p^2 + 2300 p^3.
inline constexpr double kStep7XQuartic = 12;
inline constexpr double kStep7XQuarticTolerance = 0.30;
/// Absolute bound on a p_t^2 coefficient that must be absent.
inline constexpr double kStep7XQuadraticBound = 1e-3;

/// Relative band for the pure-p_t coefficient.
inline constexpr double kPureTTolerance = 0.10;
/// Relative band for mixed and pure-p coefficients, which depend on Clifford locations.
inline constexpr double kScheduleTolerance = 0.50;

inline double relative_deviation(double fitted, double published) {
  return published == 0 ? std::abs(fitted) : (fitted - published) / published;
}

struct CoefficientComparison {
  Monomial monomial;
  double fitted = 0;
  double published = 0;
  double deviation = 0;  ///< (fitted - published) / published
  double tolerance = 0;
  bool passed = false;
};

inline std::vector<CoefficientComparison> compare_with_published(const FitResult& fit, const PublishedRow& row) {
  std::vector<CoefficientComparison> out;
  for (std::size_t k = 0; k < row.coefficients.size() && k < fit.coefficients.size(); ++k) {
    CoefficientComparison c;
    c.monomial = fit.monomials[k];
    c.fitted = fit.coefficients[k];
    c.published = row.coefficients[k];
    c.deviation = relative_deviation(c.fitted, c.published);
    c.tolerance = fit.monomials[k].p_power == 0 ? kPureTTolerance : kScheduleTolerance;
    c.passed = std::abs(c.deviation) <= c.tolerance;
    out.push_back(c);
  }
  return out;
}

}  // namespace msd
