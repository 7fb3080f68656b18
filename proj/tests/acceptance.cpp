// Acceptance suite: one PASS/FAIL line per criterion, followed by indented detail.
// Exit status 0 only when every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "msd/checks.hpp"
#include "msd/fit.hpp"
#include "msd/protocol.hpp"
#include "msd/resources.hpp"
#include "msd/simulator.hpp"
#include "msd/table1.hpp"

using msd::DChannel;

namespace {

struct Outcome {
  bool passed = true;
  std::vector<std::string> lines;

  void check(bool ok, const std::string& line) {
    passed = passed && ok;
    lines.push_back(std::string(ok ? "ok   " : "FAIL ") + line);
  }
  void note(const std::string& line) { lines.push_back("     " + line); }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string pct(double rel) { return fmt("%+.1f%%", 100 * rel); }

// Simulations are shared between criteria.
class Cache {
 public:
  const msd::Protocol& protocol(const std::string& name) {
    auto it = protocols_.find(name);
    if (it == protocols_.end()) it = protocols_.emplace(name, msd::build_protocol(name)).first;
    return it->second;
  }
  const msd::FitResult& full_fit(const std::string& name, DChannel d) {
    const auto key = name + "/" + msd::channel_name(d);
    auto it = full_.find(key);
    if (it == full_.end()) it = full_.emplace(key, msd::fit_pout(protocol(name), d)).first;
    return it->second;
  }
  const msd::FitResult& axis_fit(const std::string& name, DChannel d) {
    const auto key = name + "/" + msd::channel_name(d);
    auto it = axis_.find(key);
    if (it == axis_.end()) it = axis_.emplace(key, msd::fit_pout_pt_axis(protocol(name), d)).first;
    return it->second;
  }

 private:
  std::map<std::string, msd::Protocol> protocols_;
  std::map<std::string, msd::FitResult> full_, axis_;
};

Cache cache;

const std::vector<std::string> kMain{"t622", "t713", "ccz832"};

Outcome code_verification() {
  Outcome o;
  for (const auto& c : msd::all_code_checks(msd::builtin_codes()))
    o.check(c.passed, c.group + ": " + c.name + (c.detail.empty() ? "" : " (" + c.detail + ")"));
  return o;
}

Outcome noiseless_exactness() {
  Outcome o;
  for (const auto& name : msd::protocol_names()) {
    const auto r = msd::simulate(cache.protocol(name), {0, 0, DChannel::Depolarizing});
    o.check(std::abs(r.p_accept - 1) <= 1e-12 && r.p_out <= 1e-10,
            name + ": p_accept = " + fmt("%.15f", r.p_accept) + ", p_out = " + fmt("%.2e", r.p_out));
  }
  return o;
}

Outcome classic_leading_orders() {
  Outcome o;
  const std::map<std::string, double> want{{"t622", 7}, {"t713", 35}, {"ccz832", 28}};
  for (const auto& name : kMain) {
    const auto& f = cache.axis_fit(name, DChannel::ZFlip);
    const double dev = msd::relative_deviation(f.coefficients[0], want.at(name));
    o.check(std::abs(dev) <= 0.05, name + ": " + f.monomials[0].name() + " coefficient " + fmt("%.3f", f.coefficients[0]) +
                                       " vs " + fmt("%g", want.at(name)) + " (" + pct(dev) + ", band 5%)");
  }
  return o;
}

Outcome pure_pt_coefficients() {
  Outcome o;
  for (const auto& row : msd::published_table()) {
    const auto& f = cache.axis_fit(row.protocol, row.channel);
    const double dev = msd::relative_deviation(f.coefficients[0], row.coefficients[0]);
    o.check(std::abs(dev) <= msd::kPureTTolerance,
            row.protocol + " " + msd::channel_name(row.channel) + ": " + f.monomials[0].name() + " " +
                fmt("%.3f", f.coefficients[0]) + " vs " + fmt("%g", row.coefficients[0]) + " (" + pct(dev) +
                ", band 10%)");
  }
  return o;
}

Outcome step7_formulas() {
  Outcome o;
  for (const auto& row : msd::published_step7()) {
    const auto& f = cache.axis_fit(row.protocol, row.channel);
    const double dev = msd::relative_deviation(f.coefficients[0], row.coefficients[0]);
    o.check(std::abs(dev) <= msd::kPureTTolerance, "step7 " + msd::channel_name(row.channel) + ": " +
                                                       f.monomials[0].name() + " " + fmt("%.3f", f.coefficients[0]) +
                                                       " vs " + fmt("%g", row.coefficients[0]) + " (" + pct(dev) + ")");
  }
  const auto& x = cache.axis_fit("ccz832-step7", DChannel::XFlip);
  o.check(std::abs(x.coefficients[0]) <= msd::kStep7XQuadraticBound,
          "step7 x: p_t^2 coefficient " + fmt("%.2e", x.coefficients[0]) + " (std error " + fmt("%.1e", x.std_errors[0]) +
              ", bound " + fmt("%g", msd::kStep7XQuadraticBound) + ")");
  const double dev = msd::relative_deviation(x.coefficients[1], msd::kStep7XQuartic);
  o.check(std::abs(dev) <= msd::kStep7XQuarticTolerance, "step7 x: p_t^4 coefficient " + fmt("%.3f", x.coefficients[1]) +
                                                             " vs 12 (" + pct(dev) + ", band 30%)");
  o.note("step7 x: p_t^5 coefficient " + fmt("%.1f", x.coefficients[2]) + " absorbs higher orders over p_t in [1e-3, 1e-2]");
  return o;
}

Outcome location_calibration() {
  Outcome o;
  struct Want {
    std::string name;
    std::size_t n_clifford, n_t;
  };
  for (const auto& w : {Want{"t622", 91, 14}, Want{"t713", 141, 15}, Want{"ccz832", 124, 8}}) {
    const auto& p = cache.protocol(w.name);
    const auto c = msd::count_locations(p);
    o.check(c.n_clifford == w.n_clifford && c.n_t == w.n_t,
            w.name + ": " + std::to_string(c.n_clifford) + " Clifford locations (" + std::to_string(c.n_e) + " E + " +
                std::to_string(c.n_flip) + " outcome flips), " + std::to_string(c.n_t) + " T locations");
    const double bound = std::pow(1 - 1e-4, double(c.n_clifford)) * std::pow(1 - 1e-4, double(c.n_t));
    for (auto d : msd::all_channels()) {
      const auto r = msd::simulate(p, {1e-4, 1e-4, d});
      o.check(r.p_accept >= bound - 1e-9, w.name + " " + msd::channel_name(d) + ": p_accept " + fmt("%.6f", r.p_accept) +
                                              " >= bound " + fmt("%.6f", bound));
    }
  }
  return o;
}

Outcome mixed_coefficients() {
  Outcome o;
  for (const auto& row : msd::published_table()) {
    const auto& f = cache.full_fit(row.protocol, row.channel);
    std::string line = row.protocol + " " + msd::channel_name(row.channel) + ":";
    bool ok = true;
    for (const auto& c : msd::compare_with_published(f, row)) {
      if (c.monomial.p_power == 0) continue;
      ok = ok && c.passed;
      line += " " + c.monomial.name() + " " + fmt("%.1f", c.fitted) + " vs " + fmt("%g", c.published) + " (" +
              pct(c.deviation) + ")";
    }
    o.check(ok, line + ", band 50%");
  }
  return o;
}

Outcome lambda_sweeps() {
  Outcome o;
  for (const auto& row : msd::published_table()) {
    const auto& p = cache.protocol(row.protocol);
    const auto& f = cache.full_fit(row.protocol, row.channel);
    const auto s = msd::lambda_sweep_accuracy(p, row.channel, f);
    std::string errs;
    for (const auto& pt : s.points) errs += (errs.empty() ? "" : " ") + fmt("%.3f", pt.relative_error);
    o.check(s.max_relative_error <= 0.35, row.protocol + " " + msd::channel_name(row.channel) + ": max relative error " +
                                              fmt("%.3f", s.max_relative_error) + " [" + errs + "]");
  }
  return o;
}

Outcome first_order_fault_tolerance() {
  Outcome o;
  for (const auto& name : msd::protocol_names()) {
    const auto& p = cache.protocol(name);
    std::size_t runs = 0, rejected = 0, failures = 0;
    double worst = 0;
    std::string first;
    for (std::size_t i = 0; i < p.schedule.locations.size(); ++i) {
      const bool flip = p.schedule.locations[i].kind == msd::LocationKind::OutcomeFlip;
      for (char c : std::string(flip ? "X" : "XYZ")) {
        const auto r = msd::default_precision(p) == msd::Precision::LongDouble
                           ? msd::summarize(msd::run_with_faults<long double>(p, {{i, c}}))
                           : msd::summarize(msd::run_with_faults<double>(p, {{i, c}}));
        ++runs;
        if (r.degenerate || r.p_accept <= 1e-12) {
          ++rejected;
          continue;
        }
        worst = std::max(worst, r.p_out);
        if (r.p_out > 1e-9 && failures++ == 0) first = ", first failure at location " + std::to_string(i) + " " + c;
      }
    }
    o.check(failures == 0, name + ": " + std::to_string(runs) + " single faults, " + std::to_string(rejected) +
                               " always rejected, worst accepted p_out " + fmt("%.1e", worst) + first);
  }
  return o;
}

Outcome circuit_identities() {
  Outcome o;
  for (const auto& c : msd::circuit_checks()) o.check(c.passed, c.name + " (" + c.detail + ")");
  return o;
}

Outcome resource_formulas() {
  Outcome o;
  struct Want {
    std::string name;
    std::int64_t td, tdp, qd, qdp;
  };
  for (const auto& w : {Want{"t622", 100, 8, 48, 4}, Want{"t713", 157, 8, 56, 3}, Want{"ccz832", 96, 12, 64, 5}}) {
    bool ok = true;
    for (std::int64_t d = 3; d <= 31; d += 2)
      for (std::int64_t dp = 3; dp <= 15; dp += 2)
        ok = ok && msd::surface_time(w.name, d, dp) == w.td * d + w.tdp * dp &&
             msd::surface_qubits(w.name, d, dp) == w.qd * d * d + w.qdp * dp * dp;
    const auto tf = msd::surface_time_form(w.name);
    const auto qf = msd::surface_qubits_form(w.name);
    ok = ok && tf.coef_d == w.td && tf.coef_dprime == w.tdp && qf.coef_d == w.qd && qf.coef_dprime == w.qdp;
    o.check(ok, w.name + ": " + std::to_string(tf.coef_d) + "d + " + std::to_string(tf.coef_dprime) + "d', " +
                    std::to_string(qf.coef_d) + "d^2 + " + std::to_string(qf.coef_dprime) + "d'^2");
  }
  const auto det = msd::detection_mode_analysis(3, 1e-3, 60, 100);
  o.check(det.total_locations == 144000,
          "detection mode, d = 3, 60 patches, 100 rounds: " + std::to_string(det.total_locations) + " locations");
  const double p = 1e-3;
  const auto part = msd::partial_correction_analysis(3, p, 60, 100);
  o.check(part.sqrt_condition == std::sqrt(6000.0) * 27 * p,
          "partial correction at p = 1e-3: sqrt(6000) d^3 p = " + fmt("%.6f", part.sqrt_condition));
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "code verification", code_verification},
      {2, "noiseless exactness", noiseless_exactness},
      {3, "classic leading orders 7 / 35 / 28", classic_leading_orders},
      {4, "pure-p_t published coefficients", pure_pt_coefficients},
      {5, "CCZ Step-7 formulas", step7_formulas},
      {6, "error-location calibration and acceptance bounds", location_calibration},
      {7, "mixed and pure-p published coefficients", mixed_coefficients},
      {8, "lambda-sweep self-consistency", lambda_sweeps},
      {9, "first-order fault tolerance", first_order_fault_tolerance},
      {10, "circuit identities", circuit_identities},
      {11, "resource formulas", resource_formulas},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  criterion %2d  %s  [%.1f s]\n", o.passed ? "PASS" : "FAIL", c.id, c.title, secs);
    for (const auto& l : o.lines) std::printf("      %s\n", l.c_str());
    std::fflush(stdout);
    failed += !o.passed;
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
