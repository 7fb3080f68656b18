#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "msd/noise.hpp"
#include "msd/parallel.hpp"
#include "msd/protocol.hpp"
#include "msd/simulator.hpp"

namespace msd {

struct GridPoint {
  double p = 0;
  double p_t = 0;
};

/// A monomial p_t^i p^j.
struct Monomial {
  int pt_power = 0;
  int p_power = 0;

  double eval(double p, double p_t) const { return std::pow(p_t, pt_power) * std::pow(p, p_power); }
  std::string name() const {
    auto part = [](const char* sym, int k) -> std::string {
      if (k == 0) return "";
      return k == 1 ? sym : std::string(sym) + "^" + std::to_string(k);
    };
    std::string s = part("p_t", pt_power);
    const std::string q = part("p", p_power);
    if (!s.empty() && !q.empty()) s += " ";
    return s + q;
  }
};

/// Homogeneous monomials of the given degree, highest p_t power first.
inline std::vector<Monomial> homogeneous_monomials(int degree) {
  std::vector<Monomial> m;
  for (int i = degree; i >= 0; --i) m.push_back({i, degree - i});
  return m;
}

struct FitSpec {
  int degree = 2;
  std::vector<GridPoint> grid;
};

inline std::vector<double> log_space(double lo, double hi, int points) {
  if (points < 1 || !(lo > 0) || !(hi >= lo)) throw std::invalid_argument("log_space: need 0 < lo <= hi and points >= 1");
  std::vector<double> v;
  for (int i = 0; i < points; ++i)
    v.push_back(points == 1 ? lo : lo * std::pow(hi / lo, double(i) / (points - 1)));
  return v;
}

/// points x points logarithmic grid over [lo, hi]^2 plus the p = 0 and p_t = 0 axes.
inline std::vector<GridPoint> default_grid(double lo = 1e-5, double hi = 1e-4, int points = 5) {
  if (hi > 1e-3) throw std::invalid_argument("fit grid values must not exceed 1e-3");
  const auto axis = log_space(lo, hi, points);
  std::vector<GridPoint> g;
  for (double p : axis)
    for (double pt : axis) g.push_back({p, pt});
  for (double pt : axis) g.push_back({0, pt});
  for (double p : axis) g.push_back({p, 0});
  return g;
}

inline FitSpec default_fit_spec(const Protocol& protocol) { return {protocol.degree, default_grid()}; }

struct FitPoint {
  GridPoint at;
  double p_out = 0;
  double p_accept = 0;
  double fitted = 0;
};

struct FitResult {
  std::vector<Monomial> monomials;
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  std::vector<long long> rounded;
  double max_relative_residual = 0;
  double condition = 0;  ///< eigenvalue ratio of the column-scaled normal matrix
  std::vector<FitPoint> points;

  double evaluate(double p, double p_t) const {
    double s = 0;
    for (std::size_t k = 0; k < monomials.size(); ++k) s += coefficients[k] * monomials[k].eval(p, p_t);
    return s;
  }
};

inline constexpr double kRankTolerance = 1e-12;

/// Ordinary least squares of `values` on `monomials` at `grid`, via normal equations
/// with each column scaled to unit max.
inline FitResult least_squares(const std::vector<GridPoint>& grid, const std::vector<double>& values,
                               const std::vector<Monomial>& monomials) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  const auto k = static_cast<Eigen::Index>(monomials.size());
  if (values.size() != grid.size()) throw std::invalid_argument("least_squares: one value per grid point expected");
  if (n < k) throw std::invalid_argument("least_squares: fewer grid points than monomials");
  Eigen::MatrixXd a(n, k);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i) = values[i];
    for (Eigen::Index j = 0; j < k; ++j) a(i, j) = monomials[j].eval(grid[i].p, grid[i].p_t);
  }
  Eigen::VectorXd scale(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    scale(j) = a.col(j).cwiseAbs().maxCoeff();
    if (scale(j) == 0) throw std::invalid_argument("degenerate fit grid: monomial " + monomials[j].name() + " vanishes on every grid point");
    a.col(j) /= scale(j);
  }
  const Eigen::MatrixXd normal = a.transpose() * a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normal, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff(), lmax = eig.eigenvalues().maxCoeff();
  if (!(lmin > kRankTolerance * lmax))
    throw std::invalid_argument("degenerate fit grid: design matrix is rank deficient for " + std::to_string(k) +
                                " monomials on " + std::to_string(n) + " points");
  const Eigen::LDLT<Eigen::MatrixXd> solver(normal);
  const Eigen::VectorXd scaled = solver.solve(a.transpose() * y);
  const Eigen::VectorXd residual = y - a * scaled;
  const double dof = static_cast<double>(n - k);
  const double sigma2 = dof > 0 ? residual.squaredNorm() / dof : 0.0;
  const Eigen::MatrixXd cov = solver.solve(Eigen::MatrixXd::Identity(k, k)) * sigma2;

  FitResult r;
  r.monomials = monomials;
  r.condition = lmax / lmin;
  for (Eigen::Index j = 0; j < k; ++j) {
    r.coefficients.push_back(scaled(j) / scale(j));
    r.std_errors.push_back(std::sqrt(std::max(0.0, cov(j, j))) / scale(j));
    r.rounded.push_back(std::llround(r.coefficients.back()));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    FitPoint pt{grid[i], values[i], 0, y(i) - residual(i)};
    if (values[i] != 0) r.max_relative_residual = std::max(r.max_relative_residual, std::abs(residual(i) / values[i]));
    r.points.push_back(pt);
  }
  return r;
}

/// Simulates every grid point (in parallel, results in grid order).
inline std::vector<RunSummary> simulate_grid(const Protocol& protocol, DChannel channel,
                                             const std::vector<GridPoint>& grid, unsigned threads = 0) {
  return parallel_map<RunSummary>(
      grid.size(),
      [&](std::size_t i) {
        auto s = simulate(protocol, {grid[i].p, grid[i].p_t, channel});
        s.rho_out = DensityMatrix<double>(0);  // not needed downstream
        return s;
      },
      threads);
}

inline FitResult fit_pout(const Protocol& protocol, DChannel channel, const FitSpec& spec, unsigned threads = 0) {
  if (spec.degree != protocol.degree)
    throw std::invalid_argument("fit degree " + std::to_string(spec.degree) + " does not match protocol " +
                                protocol.name + " (degree " + std::to_string(protocol.degree) + ")");
  for (const auto& g : spec.grid)
    if (g.p < 0 || g.p > 1e-3 || g.p_t < 0 || g.p_t > 1e-3)
      throw std::invalid_argument("fit grid values must lie in [0, 1e-3]");
  const auto runs = simulate_grid(protocol, channel, spec.grid, threads);
  std::vector<double> values;
  for (const auto& r : runs) values.push_back(r.p_out);
  auto fit = least_squares(spec.grid, values, homogeneous_monomials(spec.degree));
  for (std::size_t i = 0; i < runs.size(); ++i) fit.points[i].p_accept = runs[i].p_accept;
  return fit;
}

inline FitResult fit_pout(const Protocol& protocol, DChannel channel, unsigned threads = 0) {
  return fit_pout(protocol, channel, default_fit_spec(protocol), threads);
}

/// True for the case whose leading p_t behaviour is quartic.
inline bool has_quartic_pt_axis(const Protocol& protocol, DChannel channel) {
  return protocol.name == "ccz832-step7" && channel == DChannel::XFlip;
}

/// Fit along p = 0. Normally a single term p_t^degree over [1e-5, 1e-4]. For the
/// quartic case p_t^2, p_t^4 and p_t^5 over [1e-3, 1e-2], where p_t^4 is resolvable
/// and the p_t^5 term absorbs the visible curvature of p_out / p_t^4.
inline FitResult fit_pout_pt_axis(const Protocol& protocol, DChannel channel, unsigned threads = 0) {
  std::vector<GridPoint> grid;
  std::vector<Monomial> monomials;
  if (has_quartic_pt_axis(protocol, channel)) {
    for (double pt : log_space(1e-3, 1e-2, 7)) grid.push_back({0, pt});
    monomials = {{2, 0}, {4, 0}, {5, 0}};
  } else {
    for (double pt : log_space(1e-5, 1e-4, 5)) grid.push_back({0, pt});
    monomials = {{protocol.degree, 0}};
  }
  const auto runs = simulate_grid(protocol, channel, grid, threads);
  std::vector<double> values;
  for (const auto& r : runs) values.push_back(r.p_out);
  auto fit = least_squares(grid, values, monomials);
  for (std::size_t i = 0; i < runs.size(); ++i) fit.points[i].p_accept = runs[i].p_accept;
  return fit;
}

struct LambdaPoint {
  double lambda = 0;
  double p = 0;
  double p_t = 0;
  double direct = 0;
  double formula = 0;
  double relative_error = 0;
  bool skipped = false;
};

struct LambdaSweep {
  std::vector<LambdaPoint> points;
  double max_relative_error = 0;
};

inline const std::vector<double>& lambda_values() {
  static const std::vector<double> v{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  return v;
}

/// Compares `formula(p, p_t)` with direct values at p = 1e-2 lambda, p_t = 1e-2 (1 - lambda).
template <typename Direct, typename Formula>
LambdaSweep lambda_sweep(const Direct& direct, const Formula& formula) {
  LambdaSweep s;
  for (double lam : lambda_values()) {
    LambdaPoint pt;
    pt.lambda = lam;
    pt.p = 1e-2 * lam;
    pt.p_t = 1e-2 * (1 - lam);
    pt.direct = direct(pt.p, pt.p_t);
    pt.formula = formula(pt.p, pt.p_t);
    if (pt.direct == 0 && pt.formula == 0) {
      pt.skipped = true;
    } else {
      pt.relative_error = pt.direct == 0 ? INFINITY : std::abs(1 - pt.formula / pt.direct);
      s.max_relative_error = std::max(s.max_relative_error, pt.relative_error);
    }
    s.points.push_back(pt);
  }
  return s;
}

inline LambdaSweep lambda_sweep_accuracy(const Protocol& protocol, DChannel channel, const FitResult& fit,
                                         unsigned threads = 0) {
  const auto& lams = lambda_values();
  std::vector<GridPoint> grid;
  for (double lam : lams) grid.push_back({1e-2 * lam, 1e-2 * (1 - lam)});
  const auto runs = simulate_grid(protocol, channel, grid, threads);
  std::size_t i = 0;
  return lambda_sweep([&](double, double) { return runs[i++].p_out; },
                      [&](double p, double pt) { return fit.evaluate(p, pt); });
}

}  // namespace msd
