// msd: command-line front end for the distillation simulator.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "msd/checks.hpp"
#include "msd/fit.hpp"
#include "msd/protocol.hpp"
#include "msd/resources.hpp"
#include "msd/simulator.hpp"
#include "msd/table1.hpp"

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;
constexpr int kExitOk = 0, kExitFailure = 1, kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Output.

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string pct(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%+.1f%%", 100 * v);
  return buf;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }

  void write_csv(std::ostream& os) const {
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_field(r[i]);
      os << "\r\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
  }

  void write_text(std::ostream& os) const {
    std::vector<std::size_t> width(header.size(), 0);
    auto widen = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size() && i < width.size(); ++i) width[i] = std::max(width[i], r[i].size());
    };
    widen(header);
    for (const auto& r : rows) widen(r);
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        os << r[i];
        if (i + 1 < r.size()) os << std::string(width[i] - r[i].size() + 2, ' ');
      }
      os << "\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
  }
};

struct OutputOptions {
  std::string format = "text";
  std::string path;
};

void add_output_options(CLI::App* cmd, OutputOptions& out) {
  cmd->add_option("--format", out.format, "Output format")
      ->check(CLI::IsMember({"text", "csv", "json"}))
      ->capture_default_str();
  cmd->add_option("-o,--output", out.path, "Write to this file instead of stdout");
}

/// Writes either the JSON document or the table, as selected.
void emit(const OutputOptions& opt, const json& doc, const Table& table) {
  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!opt.path.empty()) {
    file.open(opt.path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + opt.path);
    os = &file;
  }
  if (opt.format == "json") *os << doc.dump(2) << "\n";
  else if (opt.format == "csv") table.write_csv(*os);
  else table.write_text(*os);
}

json envelope(const std::string& command) { return {{"schema_version", kSchemaVersion}, {"command", command}}; }

// ---------------------------------------------------------------------------
// Shared argument handling.

struct ProtocolOptions {
  std::string protocol = "t622";
  std::string variant;
  std::string schedule_path;
};

void add_protocol_options(CLI::App* cmd, ProtocolOptions& opt) {
  cmd->add_option("--protocol", opt.protocol, "t622, t713, ccz832 or ccz832-step7")->capture_default_str();
  cmd->add_option("--variant", opt.variant, "Readout variant for ccz832: step7a (default) or step7");
}

msd::Protocol resolve_protocol(const ProtocolOptions& opt) {
  std::string name = opt.protocol;
  if (!opt.variant.empty()) {
    if (name != "ccz832" && name != "ccz832-step7")
      throw UsageError("--variant applies only to ccz832");
    if (opt.variant == "step7") name = "ccz832-step7";
    else if (opt.variant == "step7a") name = "ccz832";
    else throw UsageError("unknown variant '" + opt.variant + "' (expected step7 or step7a)");
  }
  msd::Protocol p;
  try {
    p = msd::build_protocol(name);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (!opt.schedule_path.empty()) {
    auto s = msd::load_schedule(opt.schedule_path);
    if (s.protocol != p.name)
      throw UsageError("schedule file is for protocol " + s.protocol + ", not " + p.name);
    p.schedule = std::move(s);
  }
  return p;
}

std::string variant_of(const msd::Protocol& p) {
  if (p.name == "ccz832") return "step7a";
  if (p.name == "ccz832-step7") return "step7";
  return "";
}

msd::DChannel resolve_channel(const std::string& name) {
  try {
    return msd::parse_channel(name);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void require_probability(const char* flag, double v) {
  if (!(v >= 0 && v <= 1e-2)) throw UsageError(std::string(flag) + " must lie in [0, 1e-2]");
}

json fit_json(const msd::FitResult& f) {
  json coeffs = json::array();
  for (std::size_t k = 0; k < f.monomials.size(); ++k)
    coeffs.push_back({{"monomial", f.monomials[k].name()},
                      {"pt_power", f.monomials[k].pt_power},
                      {"p_power", f.monomials[k].p_power},
                      {"coefficient", f.coefficients[k]},
                      {"std_error", f.std_errors[k]},
                      {"rounded", f.rounded[k]}});
  json pts = json::array();
  for (const auto& p : f.points)
    pts.push_back({{"p", p.at.p}, {"p_t", p.at.p_t}, {"p_out", p.p_out}, {"p_accept", p.p_accept}, {"fitted", p.fitted}});
  return {{"coefficients", coeffs},
          {"max_relative_residual", f.max_relative_residual},
          {"condition", f.condition},
          {"points", pts}};
}

// ---------------------------------------------------------------------------
// Subcommands.

struct VerifyOptions {
  std::string only;
  std::vector<std::string> code_files;
  OutputOptions out;
};

int cmd_verify(const VerifyOptions& opt, bool circuits_only) {
  std::vector<msd::CheckResult> checks;
  const bool codes = !circuits_only && opt.only != "circuits";
  const bool circuits = circuits_only || opt.only != "codes";
  if (codes) {
    std::vector<msd::CodeSpec> specs;
    if (opt.code_files.empty()) specs = msd::builtin_codes();
    for (const auto& path : opt.code_files) {
      try {
        specs.push_back(msd::load_code(path));
      } catch (const std::exception& e) {
        checks.push_back({"code file", path, false, e.what()});
      }
    }
    auto part = msd::all_code_checks(specs);
    checks.insert(checks.end(), part.begin(), part.end());
  }
  if (circuits) {
    auto part = msd::circuit_checks();
    checks.insert(checks.end(), part.begin(), part.end());
  }
  Table t{{"group", "check", "result", "detail"}, {}};
  json arr = json::array();
  for (const auto& c : checks) {
    t.add({c.group, c.name, c.passed ? "pass" : "FAIL", c.detail});
    arr.push_back({{"group", c.group}, {"check", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  const bool ok = msd::all_passed(checks);
  json doc = envelope(circuits_only ? "verify-circuits" : "verify");
  doc["checks"] = arr;
  doc["passed"] = ok;
  emit(opt.out, doc, t);
  return ok ? kExitOk : kExitFailure;
}

struct RunOptions {
  ProtocolOptions proto;
  std::string channel = "depolarizing";
  double p = 0;
  double p_t = 0;
  std::string precision = "auto";
  std::string dump_path;
  OutputOptions out;
};

int cmd_run(const RunOptions& opt) {
  const auto protocol = resolve_protocol(opt.proto);
  const auto channel = resolve_channel(opt.channel);
  require_probability("--p", opt.p);
  require_probability("--pt", opt.p_t);
  msd::Precision precision = msd::default_precision(protocol);
  if (opt.precision == "double") precision = msd::Precision::Double;
  else if (opt.precision == "long-double") precision = msd::Precision::LongDouble;
  const msd::NoiseModel model{opt.p, opt.p_t, channel};
  const auto r = msd::simulate(protocol, model, precision);
  if (!opt.dump_path.empty() && !r.degenerate) r.rho_out.dump(opt.dump_path);

  const auto counts = msd::count_locations(protocol);
  const double bound = std::pow(1 - opt.p, double(counts.n_clifford)) * std::pow(1 - opt.p_t, double(counts.n_t));
  const bool bound_ok = r.p_accept >= bound - 1e-9;
  json doc = envelope("run");
  doc.update({{"protocol", protocol.name},
              {"variant", variant_of(protocol)},
              {"channel", msd::channel_name(channel)},
              {"p", opt.p},
              {"p_t", opt.p_t},
              {"precision", precision == msd::Precision::Double ? "double" : "long-double"},
              {"p_accept", r.p_accept},
              {"p_out", r.p_out},
              {"degenerate", r.degenerate},
              {"n_clifford", counts.n_clifford},
              {"n_t", counts.n_t},
              {"acceptance_bound", bound},
              {"acceptance_bound_satisfied", bound_ok}});
  Table t{{"protocol", "variant", "channel", "p", "p_t", "p_accept", "p_out", "acceptance_bound", "bound_satisfied"}, {}};
  t.add({protocol.name, variant_of(protocol), msd::channel_name(channel), num(opt.p), num(opt.p_t), num(r.p_accept),
         num(r.p_out), num(bound), bound_ok ? "yes" : "no"});
  emit(opt.out, doc, t);
  return kExitOk;
}

struct FitOptions {
  ProtocolOptions proto;
  std::string channel = "depolarizing";
  double grid_min = 1e-5;
  double grid_max = 1e-4;
  int grid_points = 5;
  bool axis = false;
  unsigned threads = 0;
  OutputOptions out;
};

int cmd_fit(const FitOptions& opt) {
  const auto protocol = resolve_protocol(opt.proto);
  const auto channel = resolve_channel(opt.channel);
  msd::FitResult f;
  if (opt.axis) {
    f = msd::fit_pout_pt_axis(protocol, channel, opt.threads);
  } else {
    if (opt.grid_points < 2) throw UsageError("--grid-points must be at least 2");
    std::vector<msd::GridPoint> grid;
    try {
      grid = msd::default_grid(opt.grid_min, opt.grid_max, opt.grid_points);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    f = msd::fit_pout(protocol, channel, {protocol.degree, grid}, opt.threads);
  }
  json doc = envelope("fit");
  doc.update({{"protocol", protocol.name}, {"variant", variant_of(protocol)}, {"channel", msd::channel_name(channel)},
              {"axis_only", opt.axis}});
  doc["fit"] = fit_json(f);
  Table t{{"protocol", "channel", "monomial", "coefficient", "std_error", "rounded", "max_relative_residual"}, {}};
  for (std::size_t k = 0; k < f.monomials.size(); ++k)
    t.add({protocol.name, msd::channel_name(channel), f.monomials[k].name(), num(f.coefficients[k]),
           num(f.std_errors[k]), std::to_string(f.rounded[k]), num(f.max_relative_residual)});
  emit(opt.out, doc, t);
  return kExitOk;
}

struct Table1Options {
  std::string channel;
  std::string protocol;
  bool skip_step7 = false;
  unsigned threads = 0;
  OutputOptions out;
};

int cmd_table1(const Table1Options& opt) {
  std::optional<msd::DChannel> only_channel;
  if (!opt.channel.empty()) only_channel = resolve_channel(opt.channel);
  if (!opt.protocol.empty() && opt.protocol != "t622" && opt.protocol != "t713" && opt.protocol != "ccz832")
    throw UsageError("--protocol must be t622, t713 or ccz832");
  Table t{{"protocol", "channel", "monomial", "fitted", "published", "deviation", "tolerance", "result"}, {}};
  json rows = json::array();
  bool ok = true;
  auto record = [&](const std::string& proto, msd::DChannel ch, const msd::CoefficientComparison& c) {
    ok = ok && c.passed;
    t.add({proto, msd::channel_name(ch), c.monomial.name(), num(c.fitted), num(c.published), c.published == 0 ? "n/a" : pct(c.deviation),
           c.published == 0 ? "|x|<=" + num(c.tolerance) : "+-" + num(100 * c.tolerance) + "%", c.passed ? "pass" : "FAIL"});
    rows.push_back({{"protocol", proto},
                    {"channel", msd::channel_name(ch)},
                    {"monomial", c.monomial.name()},
                    {"fitted", c.fitted},
                    {"published", c.published},
                    {"deviation", c.deviation},
                    {"tolerance", c.tolerance},
                    {"passed", c.passed}});
  };
  std::map<std::string, msd::Protocol> cache;
  auto protocol = [&](const std::string& name) -> const msd::Protocol& {
    auto it = cache.find(name);
    if (it == cache.end()) it = cache.emplace(name, msd::build_protocol(name)).first;
    return it->second;
  };
  for (const auto& row : msd::published_table()) {
    if (only_channel && row.channel != *only_channel) continue;
    if (!opt.protocol.empty() && row.protocol != opt.protocol) continue;
    const auto fit = msd::fit_pout(protocol(row.protocol), row.channel, opt.threads);
    for (const auto& c : msd::compare_with_published(fit, row)) record(row.protocol, row.channel, c);
  }
  const bool want_step7 = !opt.skip_step7 && (opt.protocol.empty() || opt.protocol == "ccz832");
  if (want_step7) {
    const auto& step7 = protocol("ccz832-step7");
    for (const auto& row : msd::published_step7()) {
      if (only_channel && row.channel != *only_channel) continue;
      const auto fit = msd::fit_pout(step7, row.channel, opt.threads);
      for (const auto& c : msd::compare_with_published(fit, row)) record(row.protocol, row.channel, c);
    }
    if (!only_channel || *only_channel == msd::DChannel::XFlip) {
      const auto axis = msd::fit_pout_pt_axis(step7, msd::DChannel::XFlip, opt.threads);
      // no p_t^2 term: absolute bound far below every other quadratic coefficient
      msd::CoefficientComparison quad{axis.monomials[0], axis.coefficients[0], 0, axis.coefficients[0],
                                      msd::kStep7XQuadraticBound, false};
      quad.passed = std::abs(axis.coefficients[0]) <= quad.tolerance;
      record(step7.name, msd::DChannel::XFlip, quad);
      msd::CoefficientComparison quart{axis.monomials[1], axis.coefficients[1], msd::kStep7XQuartic, 0, msd::kStep7XQuarticTolerance, false};
      quart.deviation = msd::relative_deviation(quart.fitted, quart.published);
      quart.passed = std::abs(quart.deviation) <= quart.tolerance;
      record(step7.name, msd::DChannel::XFlip, quart);
    }
  }
  json doc = envelope("table1");
  doc["rows"] = rows;
  doc["passed"] = ok;
  emit(opt.out, doc, t);
  return ok ? kExitOk : kExitFailure;
}

struct ResourceOptions {
  std::string protocol = "t622";
  long long d = 0;
  long long dprime = 0;
  std::optional<double> p;
  long long patches = 60;
  long long rounds = 100;
  OutputOptions out;
};

int cmd_resources(const ResourceOptions& opt) {
  msd::DepthCount c;
  try {
    c = msd::depth_counts(opt.protocol);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (opt.d < 1 || opt.dprime < 1) throw UsageError("--d and --dprime must be at least 1");
  const auto time = msd::surface_time(opt.protocol, opt.d, opt.dprime);
  const auto qubits = msd::surface_qubits(opt.protocol, opt.d, opt.dprime);
  const auto tf = msd::surface_time_form(opt.protocol);
  const auto qf = msd::surface_qubits_form(opt.protocol);
  json doc = envelope("resources");
  doc.update({{"protocol", msd::canonical_protocol(opt.protocol)},
              {"d", opt.d},
              {"dprime", opt.dprime},
              {"depth", {{"m1", c.m1}, {"m2", c.m2}, {"m_t", c.m_t}, {"m_out", c.m_out},
                         {"cat_ft_order", c.cat_ft_order}, {"cat_prep_rounds", c.cat_prep_rounds}}},
              {"time_rounds", time},
              {"time_formula", std::to_string(tf.coef_d) + "d + " + std::to_string(tf.coef_dprime) + "d'"},
              {"qubit_count", qubits},
              {"qubit_formula", std::to_string(qf.coef_d) + "d^2 + " + std::to_string(qf.coef_dprime) + "d'^2"},
              {"note", "surface-code ancillas and order-one ancilla factors are not included"}});
  Table t{{"quantity", "value"}, {}};
  t.add({"protocol", msd::canonical_protocol(opt.protocol)});
  t.add({"m1", std::to_string(c.m1)});
  t.add({"m2", std::to_string(c.m2)});
  t.add({"m_t", std::to_string(c.m_t)});
  t.add({"m_out", std::to_string(c.m_out)});
  t.add({"cat_ft_order", std::to_string(c.cat_ft_order)});
  t.add({"cat_prep_rounds", std::to_string(c.cat_prep_rounds)});
  t.add({"time_rounds", std::to_string(time) + " (" + doc["time_formula"].get<std::string>() + ")"});
  t.add({"qubit_count", std::to_string(qubits) + " (" + doc["qubit_formula"].get<std::string>() + ")"});
  if (opt.p) {
    try {
      const auto det = msd::detection_mode_analysis(opt.d, *opt.p, opt.patches, opt.rounds);
      const auto part = msd::partial_correction_analysis(opt.d, *opt.p, opt.patches, opt.rounds);
      const bool det_ok = det.accept_feasibility_ratio < msd::kFeasibleRatio;
      const bool part_ok = part.sqrt_condition < msd::kFeasibleRatio;
      doc["detection_mode"] = {{"p", *opt.p},
                               {"patches", opt.patches},
                               {"rounds", opt.rounds},
                               {"syndrome_measurements_per_patch_round", det.syndrome_measurements_per_patch_round},
                               {"total_locations", det.total_locations},
                               {"accept_feasibility_ratio", det.accept_feasibility_ratio},
                               {"feasible", det_ok}};
      doc["partial_correction"] = {{"per_patch_discard_exact", part.per_patch_discard_exact},
                                   {"per_patch_discard_approx", part.per_patch_discard_approx},
                                   {"total_condition", part.total_condition},
                                   {"sqrt_condition", part.sqrt_condition},
                                   {"feasible", part_ok}};
      t.add({"detection: syndrome measurements per patch round", std::to_string(det.syndrome_measurements_per_patch_round)});
      t.add({"detection: total locations", std::to_string(det.total_locations)});
      t.add({"detection: total * p", num(det.accept_feasibility_ratio) + (det_ok ? " (feasible)" : " (throughput unlikely)")});
      t.add({"partial correction: C(d(d^2-1),2) p^2", num(part.per_patch_discard_exact)});
      t.add({"partial correction: (d^3 p)^2 / 2", num(part.per_patch_discard_approx)});
      t.add({"partial correction: patches*rounds*(d^3 p)^2/2", num(part.total_condition)});
      t.add({"partial correction: sqrt(patches*rounds) d^3 p",
             num(part.sqrt_condition) + (part_ok ? " (feasible)" : " (not << 1)")});
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  emit(opt.out, doc, t);
  return kExitOk;
}

struct SweepOptions {
  ProtocolOptions proto;
  std::string channel = "depolarizing";
  double tolerance = 0.35;
  unsigned threads = 0;
  OutputOptions out;
};

int cmd_sweep(const SweepOptions& opt) {
  const auto protocol = resolve_protocol(opt.proto);
  const auto channel = resolve_channel(opt.channel);
  const auto fit = msd::fit_pout(protocol, channel, opt.threads);
  const auto sweep = msd::lambda_sweep_accuracy(protocol, channel, fit, opt.threads);
  const bool ok = sweep.max_relative_error <= opt.tolerance;
  Table t{{"lambda", "p", "p_t", "direct", "formula", "relative_error"}, {}};
  json pts = json::array();
  for (const auto& s : sweep.points) {
    t.add({num(s.lambda), num(s.p), num(s.p_t), num(s.direct), num(s.formula), s.skipped ? "skipped" : num(s.relative_error)});
    pts.push_back({{"lambda", s.lambda}, {"p", s.p}, {"p_t", s.p_t}, {"direct", s.direct}, {"formula", s.formula},
                   {"relative_error", s.relative_error}, {"skipped", s.skipped}});
  }
  json doc = envelope("sweep");
  doc.update({{"protocol", protocol.name}, {"variant", variant_of(protocol)}, {"channel", msd::channel_name(channel)},
              {"points", pts}, {"max_relative_error", sweep.max_relative_error}, {"tolerance", opt.tolerance},
              {"passed", ok}});
  doc["fit"] = fit_json(fit);
  emit(opt.out, doc, t);
  if (opt.out.format == "text") std::cout << "max relative error " << num(sweep.max_relative_error) << "\n";
  return ok ? kExitOk : kExitFailure;
}

int cmd_schedule(const ProtocolOptions& opt, const std::string& path) {
  const auto protocol = resolve_protocol(opt);
  const auto doc = msd::to_json(protocol.schedule);
  if (path.empty()) {
    std::cout << doc.dump(1) << "\n";
  } else {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << doc.dump(1) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and resource estimator for measurement-based magic state distillation.\n"
               "Set " + std::string(msd::kThreadsEnv) + " to override the default worker count."};
  app.require_subcommand(1);

  VerifyOptions verify_opt;
  auto* verify = app.add_subcommand("verify", "Check the code definitions and the measurement circuits");
  verify->add_option("--only", verify_opt.only, "Restrict to one suite")->check(CLI::IsMember({"codes", "circuits"}));
  verify->add_option("--code", verify_opt.code_files, "Code JSON file(s) to check instead of the built-in codes");
  add_output_options(verify, verify_opt.out);

  VerifyOptions circuits_opt;
  auto* circuits = app.add_subcommand("verify-circuits", "Check teleportation, T injection and cat-state measurement");
  add_output_options(circuits, circuits_opt.out);

  RunOptions run_opt;
  auto* run = app.add_subcommand("run", "Simulate one protocol at one noise point");
  add_protocol_options(run, run_opt.proto);
  run->add_option("--channel", run_opt.channel, "depolarizing, x or z")->capture_default_str();
  run->add_option("--p", run_opt.p, "Clifford noise and outcome flip probability")->capture_default_str();
  run->add_option("--pt", run_opt.p_t, "T noise probability")->capture_default_str();
  run->add_option("--precision", run_opt.precision, "Scalar type")
      ->check(CLI::IsMember({"auto", "double", "long-double"}))
      ->capture_default_str();
  run->add_option("--schedule", run_opt.proto.schedule_path, "Error-location schedule JSON to use");
  run->add_option("--dump", run_opt.dump_path, "Write the output density matrix (binary)");
  add_output_options(run, run_opt.out);

  FitOptions fit_opt;
  auto* fit = app.add_subcommand("fit", "Fit the leading-order p_out polynomial over a noise grid");
  add_protocol_options(fit, fit_opt.proto);
  fit->add_option("--channel", fit_opt.channel, "depolarizing, x or z")->capture_default_str();
  fit->add_option("--grid-min", fit_opt.grid_min, "Smallest grid value")->capture_default_str();
  fit->add_option("--grid-max", fit_opt.grid_max, "Largest grid value (at most 1e-3)")->capture_default_str();
  fit->add_option("--grid-points", fit_opt.grid_points, "Points per axis")->capture_default_str();
  fit->add_flag("--axis", fit_opt.axis, "Fit only along p = 0");
  fit->add_option("--threads", fit_opt.threads, "Worker threads (0: automatic)");
  fit->add_option("--schedule", fit_opt.proto.schedule_path, "Error-location schedule JSON to use");
  add_output_options(fit, fit_opt.out);

  Table1Options t1_opt;
  auto* table1 = app.add_subcommand("table1", "Reproduce the published coefficient table");
  table1->add_option("--channel", t1_opt.channel, "Only this channel");
  table1->add_option("--protocol", t1_opt.protocol, "Only this protocol (t622, t713, ccz832)");
  table1->add_flag("--skip-step7", t1_opt.skip_step7, "Skip the four-condition CCZ readout formulas");
  table1->add_option("--threads", t1_opt.threads, "Worker threads (0: automatic)");
  add_output_options(table1, t1_opt.out);

  ResourceOptions res_opt;
  auto* resources = app.add_subcommand("resources", "Surface-code time and qubit estimates");
  resources->add_option("--protocol", res_opt.protocol, "t622, t713 or ccz832")->capture_default_str();
  resources->add_option("--d", res_opt.d, "Data patch distance")->required();
  resources->add_option("--dprime", res_opt.dprime, "Output patch distance")->required();
  resources->add_option("--p", res_opt.p, "Physical error rate for the detection / partial-correction analysis");
  resources->add_option("--patches", res_opt.patches, "Number of patches")->capture_default_str();
  resources->add_option("--rounds", res_opt.rounds, "Number of rounds")->capture_default_str();
  add_output_options(resources, res_opt.out);

  SweepOptions sweep_opt;
  auto* sweep = app.add_subcommand("sweep", "Compare the fitted formula with direct simulation along p + p_t = 1e-2");
  add_protocol_options(sweep, sweep_opt.proto);
  sweep->add_option("--channel", sweep_opt.channel, "depolarizing, x or z")->capture_default_str();
  sweep->add_option("--tolerance", sweep_opt.tolerance, "Maximum relative error")->capture_default_str();
  sweep->add_option("--threads", sweep_opt.threads, "Worker threads (0: automatic)");
  add_output_options(sweep, sweep_opt.out);

  ProtocolOptions sched_opt;
  std::string sched_path;
  auto* schedule = app.add_subcommand("schedule", "Print the error-location schedule of a protocol as JSON");
  add_protocol_options(schedule, sched_opt);
  schedule->add_option("-o,--output", sched_path, "Write to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*verify) return cmd_verify(verify_opt, false);
    if (*circuits) return cmd_verify(circuits_opt, true);
    if (*run) return cmd_run(run_opt);
    if (*fit) return cmd_fit(fit_opt);
    if (*table1) return cmd_table1(t1_opt);
    if (*resources) return cmd_resources(res_opt);
    if (*sweep) return cmd_sweep(sweep_opt);
    if (*schedule) return cmd_schedule(sched_opt, sched_path);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
