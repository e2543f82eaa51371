#include "paulisim/cli_app.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "paulisim/bounds.hpp"
#include "paulisim/dense.hpp"
#include "paulisim/errors.hpp"
#include "paulisim/estimation.hpp"
#include "paulisim/expansion.hpp"
#include "paulisim/model.hpp"
#include "paulisim/workflows.hpp"

namespace paulisim {

namespace {

using nlohmann::json;

constexpr const char* kToolVersion = "0.1.0";
constexpr int kSchemaVersion = 1;

// Auto-resolved shot counts above this abort with a guard error instead of
// silently starting a run that cannot finish at desk scale.
constexpr std::uint64_t kAutoShotCap = 100'000'000;

struct Options {
  std::string hamiltonian_path;
  std::string claimed_path;
  std::string observable_path;
  std::string state_text;
  std::string shadows_path;
  std::string output_path;
  std::string mode_text;
  std::string backend_text = "exact";
  double time = -1.0;  // negative = not given
  double tau = -1.0;   // negative = not given
  double eps = 1e-3;
  double delta = 0.05;
  std::int64_t order = -1;     // -1 = auto
  std::int64_t segments = -1;  // -1 = auto
  std::int64_t shots = -1;     // -1 = auto
  std::uint64_t seed = 1;
  std::uint64_t term_cap = 10'000'000;
  std::uint64_t median_groups = 1;
  bool separate_identity = false;
  bool dump_terms = false;
};

// Exactly one of --time/--tau selects real or imaginary duration.
double pick_duration(const Options& opt, bool& imaginary) {
  bool has_time = opt.time >= 0.0;
  bool has_tau = opt.tau >= 0.0;
  if (has_time == has_tau) {
    throw InputError("exactly one of --time and --tau is required");
  }
  imaginary = has_tau;
  return has_tau ? opt.tau : opt.time;
}

json complex_json(Complex v) { return json::array({v.real(), v.imag()}); }

json stats_json(const ExpansionStats& stats) {
  json out;
  out["m_tot"] = stats.m_tot;
  out["gamma_l1"] = stats.gamma_l1;
  out["w_max"] = stats.w_max;
  out["identity_coefficient"] = complex_json(stats.identity_coeff);
  return out;
}

json bound_json(const bounds::BoundReport& bound) {
  json out;
  out["lambda_t"] = bound.lambda_t;
  out["order"] = bound.order;
  out["segments"] = bound.segments;
  out["norm_o"] = bound.norm_o;
  out["segment_tail"] = bound.segment_tail;
  out["unitary_error"] = bound.unitary_error;
  out["total_systematic"] = bound.total_systematic;
  out["gamma_l1_bound"] = bound.gamma_l1_bound;
  out["term_bound"] = bound.term_bound;
  out["term_bound_saturated"] = bound.term_bound == bounds::kCountSaturated;
  return out;
}

json estimate_json(const EstimateReport& report) {
  json out;
  out["value"] = complex_json(report.value);
  out["radius"] = report.radius;
  out["confidence"] = report.confidence;
  out["shots"] = report.shots;
  out["seed"] = report.seed;
  out["method"] = report.method;
  return out;
}

json terms_json(const PauliSum& sum) {
  json arr = json::array();
  for (const auto& [string, coeff] : sum.sorted_terms()) {
    arr.push_back(json::array({string.to_text(), coeff.real(),
                               coeff.imag()}));
  }
  return arr;
}

ExpansionMode parse_mode(const std::string& text, bool has_observable) {
  if (text.empty()) {
    return has_observable ? ExpansionMode::kConcat
                          : ExpansionMode::kPropagator;
  }
  if (text == "propagator") return ExpansionMode::kPropagator;
  if (text == "concat") return ExpansionMode::kConcat;
  if (text == "direct") return ExpansionMode::kDirect;
  if (text == "commutator") return ExpansionMode::kCommutator;
  throw InputError("unknown mode '" + text +
                   "' (propagator, concat, direct, commutator)");
}

const char* mode_name(ExpansionMode mode) {
  switch (mode) {
    case ExpansionMode::kPropagator: return "propagator";
    case ExpansionMode::kConcat: return "concat";
    case ExpansionMode::kDirect: return "direct";
    case ExpansionMode::kCommutator: return "commutator";
  }
  return "?";
}

EstimatorBackend parse_backend(const std::string& text) {
  if (text == "exact") return EstimatorBackend::kExact;
  if (text == "importance") return EstimatorBackend::kImportance;
  if (text == "shadows") return EstimatorBackend::kShadows;
  throw InputError("unknown backend '" + text +
                   "' (exact, importance, shadows)");
}

// Everything auto-resolution decides before any expansion runs. Derived
// only from the config and file contents, so a report reader can replay it.
struct Resolved {
  ExpansionMode mode = ExpansionMode::kPropagator;
  std::size_t order = 0;
  std::size_t segments = 1;
  double lambda = 0.0;
  double duration = 0.0;
  bool imaginary = false;
  double norm_o = 1.0;
  std::size_t w_cap = 0;  // a priori weight cap for shadow planning
  bounds::BoundReport bound;
};

Resolved resolve_expansion(const Options& opt, const HamiltonianSpec& h,
                           const ObservableSpec* obs, double duration,
                           bool imaginary) {
  Resolved res;
  res.mode = parse_mode(opt.mode_text, obs != nullptr);
  if (res.mode != ExpansionMode::kPropagator && obs == nullptr) {
    throw InputError(std::string("mode '") + mode_name(res.mode) +
                     "' needs --observable");
  }
  res.lambda = h.lambda;
  res.duration = duration;
  res.imaginary = imaginary;
  res.norm_o = obs != nullptr ? obs->norm_bound : 1.0;
  double lambda_t = h.lambda * duration;

  bool segmented = res.mode == ExpansionMode::kPropagator ||
                   res.mode == ExpansionMode::kConcat;
  if (opt.segments >= 1) {
    res.segments = static_cast<std::size_t>(opt.segments);
    if (!segmented && res.segments != 1) {
      throw InputError("segmentation applies to the concatenation scheme; "
                       "this mode expands in one piece");
    }
  } else if (segmented) {
    res.segments = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(lambda_t)));
  }

  if (opt.order >= 0) {
    res.order = static_cast<std::size_t>(opt.order);
  } else if (segmented) {
    double r = static_cast<double>(res.segments);
    res.order = select_truncation_order(lambda_t / r, opt.eps / r);
  } else {
    res.order =
        select_truncation_order(2.0 * lambda_t, opt.eps / res.norm_o);
  }

  bounds::SystematicKind kind = bounds::SystematicKind::kPropagatorOnly;
  if (res.mode == ExpansionMode::kConcat) {
    kind = bounds::SystematicKind::kConjugated;
  } else if (res.mode != ExpansionMode::kPropagator) {
    kind = bounds::SystematicKind::kDirect;
  }
  res.bound = bounds::compose_report(h.lambda, duration, res.order,
                                     res.segments, h.num_terms(), res.norm_o,
                                     kind);

  std::size_t sides = res.mode == ExpansionMode::kPropagator ? 1 : 2;
  std::size_t w_obs = obs != nullptr ? obs->max_weight : 0;
  res.w_cap = std::min(
      h.n_qubits,
      sides * res.order * res.segments * h.max_weight + w_obs);
  return res;
}

std::uint64_t resolve_shots(const Options& opt, const Resolved& res,
                            EstimatorBackend backend) {
  if (backend == EstimatorBackend::kExact) return 0;
  if (opt.shots >= 0) return static_cast<std::uint64_t>(opt.shots);
  std::uint64_t shots = 0;
  if (backend == EstimatorBackend::kImportance) {
    shots = bounds::hoeffding_shots(res.bound.gamma_l1_bound, opt.eps,
                                    opt.delta);
  } else {
    std::uint64_t m = std::max<std::uint64_t>(1, res.bound.term_bound);
    shots = bounds::shadow_shots(res.w_cap, m, opt.eps, opt.delta);
  }
  if (shots > kAutoShotCap) {
    char msg[192];
    std::snprintf(msg, sizeof(msg),
                  "auto-resolved shot count %llu exceeds the cap %llu; pass "
                  "--shots explicitly to accept the runtime",
                  static_cast<unsigned long long>(shots),
                  static_cast<unsigned long long>(kAutoShotCap));
    throw GuardError(msg);
  }
  return shots;
}

ExpansionResult run_expansion(const Resolved& res, const HamiltonianSpec& h,
                              const ObservableSpec* obs,
                              const ExpansionOptions& eopt) {
  TimeParameter time = res.imaginary ? TimeParameter::imag(res.duration)
                                     : TimeParameter::real(res.duration);
  switch (res.mode) {
    case ExpansionMode::kPropagator:
      return expand_propagator_result(h, time, res.order, res.segments,
                                      eopt);
    case ExpansionMode::kConcat:
      return heisenberg_taylor_concat(h, *obs, time, res.order, res.segments,
                                      eopt);
    case ExpansionMode::kDirect:
      return heisenberg_direct_expansion(h, *obs, time, res.order, eopt);
    case ExpansionMode::kCommutator:
      return heisenberg_commutator_series(h, *obs, time, res.order, eopt);
  }
  throw InputError("unknown expansion mode");
}

json config_json(const Options& opt, const char* duration_key,
                 double duration) {
  json cfg;
  cfg["hamiltonian"] = opt.hamiltonian_path;
  if (!opt.claimed_path.empty()) cfg["claimed"] = opt.claimed_path;
  if (!opt.observable_path.empty()) cfg["observable"] = opt.observable_path;
  if (!opt.state_text.empty()) cfg["state"] = opt.state_text;
  if (!opt.shadows_path.empty()) cfg["shadows"] = opt.shadows_path;
  cfg[duration_key] = duration;
  cfg["eps"] = opt.eps;
  cfg["delta"] = opt.delta;
  cfg["seed"] = opt.seed;
  cfg["term_cap"] = opt.term_cap;
  return cfg;
}

void add_resolved(json& cfg, const Resolved& res) {
  cfg["mode"] = mode_name(res.mode);
  cfg["order"] = res.order;
  cfg["segments"] = res.segments;
  cfg["lambda"] = res.lambda;
}

void write_report(const Options& opt, json& report,
                  std::chrono::steady_clock::time_point start) {
  double ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - start)
                  .count();
  report["wall_time_ms"] = ms;
  if (!opt.output_path.empty()) {
    std::ofstream out(opt.output_path);
    if (!out) {
      throw InputError("cannot write report file: " + opt.output_path);
    }
    out << report.dump(2) << '\n';
  }
}

void print_line(const char* key, const std::string& value) {
  std::cout << key << ": " << value << '\n';
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void print_expansion_summary(const Resolved& res,
                             const ExpansionStats& stats) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s  order %zu  segments %zu",
                mode_name(res.mode), res.order, res.segments);
  print_line("expansion", buf);
  std::snprintf(buf, sizeof(buf), "m_tot %zu  gamma_l1 %.10g  w_max %zu",
                stats.m_tot, stats.gamma_l1, stats.w_max);
  print_line("stats", buf);
}

void print_estimate_summary(const EstimateReport& est) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%.10g %+.10gi  radius %.4g  confidence %.4g  shots %llu  "
                "method %s",
                est.value.real(), est.value.imag(), est.radius,
                est.confidence, static_cast<unsigned long long>(est.shots),
                est.method.c_str());
  print_line("estimate", buf);
}

EstimationOptions estimation_options(const Options& opt) {
  EstimationOptions eopt;
  eopt.delta = opt.delta;
  eopt.separate_identity = opt.separate_identity;
  eopt.median_groups = static_cast<std::size_t>(opt.median_groups);
  return eopt;
}

DenseState load_state(const Options& opt, std::size_t n_qubits,
                      const DenseOptions& dense) {
  if (opt.state_text.empty()) {
    throw InputError("--state is required unless --shadows provides "
                     "recorded snapshots");
  }
  DenseState state = DenseState::from_spec(parse_state(opt.state_text),
                                           dense);
  if (state.num_qubits() != n_qubits) {
    throw InputError("state qubit count does not match Hamiltonian");
  }
  return state;
}

int run_expand(const Options& opt, bool with_estimate) {
  auto start = std::chrono::steady_clock::now();
  HamiltonianSpec h = load_hamiltonian(opt.hamiltonian_path);
  std::optional<ObservableSpec> obs;
  if (!opt.observable_path.empty()) {
    obs = load_observable(opt.observable_path);
    if (obs->sum.num_qubits() != h.n_qubits) {
      throw InputError("observable qubit count does not match Hamiltonian");
    }
  }
  bool imaginary = false;
  double duration = pick_duration(opt, imaginary);
  Resolved res = resolve_expansion(opt, h, obs ? &*obs : nullptr, duration,
                                   imaginary);

  ExpansionOptions eopt;
  eopt.max_terms = opt.term_cap;
  ExpansionResult result =
      run_expansion(res, h, obs ? &*obs : nullptr, eopt);

  json report;
  report["schema_version"] = kSchemaVersion;
  report["tool_version"] = kToolVersion;
  report["subcommand"] = with_estimate ? "estimate" : "expand";
  report["expansion"] = stats_json(result.stats);
  report["bounds"] = bound_json(res.bound);
  if (opt.dump_terms) report["terms"] = terms_json(result.sum);

  print_expansion_summary(res, result.stats);
  print_line("total_systematic", num(res.bound.total_systematic));

  json cfg = config_json(opt, imaginary ? "tau" : "time", duration);
  add_resolved(cfg, res);

  if (with_estimate) {
    EstimateReport est;
    if (!opt.shadows_path.empty()) {
      auto snapshots = load_shadow_jsonl(opt.shadows_path);
      est = shadow_estimate_sum(snapshots, result.sum,
                                estimation_options(opt));
      cfg["backend"] = "shadows-file";
      cfg["shots"] = est.shots;
    } else {
      EstimatorBackend backend = parse_backend(opt.backend_text);
      std::uint64_t shots = resolve_shots(opt, res, backend);
      DenseOptions dense = DenseOptions::from_env();
      DenseState state = load_state(opt, h.n_qubits, dense);
      SamplingPlan plan;
      plan.backend = backend;
      plan.shots = shots;
      plan.seed = opt.seed;
      plan.options = estimation_options(opt);
      est = estimate_on_state(result.sum, state, plan, dense);
      cfg["backend"] = opt.backend_text;
      cfg["shots"] = shots;
    }
    report["estimate"] = estimate_json(est);
    print_estimate_summary(est);
  }

  report["config"] = cfg;
  write_report(opt, report, start);
  return kExitOk;
}

int run_bounds(const Options& opt) {
  auto start = std::chrono::steady_clock::now();
  HamiltonianSpec h = load_hamiltonian(opt.hamiltonian_path);
  std::optional<ObservableSpec> obs;
  if (!opt.observable_path.empty()) {
    obs = load_observable(opt.observable_path);
  }
  bool imaginary = false;
  double duration = pick_duration(opt, imaginary);
  Resolved res = resolve_expansion(opt, h, obs ? &*obs : nullptr, duration,
                                   imaginary);

  std::uint64_t m = std::max<std::uint64_t>(1, res.bound.term_bound);
  std::uint64_t hoeffding =
      bounds::hoeffding_shots(res.bound.gamma_l1_bound, opt.eps, opt.delta);
  std::uint64_t shadow =
      bounds::shadow_shots(res.w_cap, m, opt.eps, opt.delta);

  json report;
  report["schema_version"] = kSchemaVersion;
  report["tool_version"] = kToolVersion;
  report["subcommand"] = "bounds";
  report["bounds"] = bound_json(res.bound);
  report["bounds"]["hoeffding_shots"] = hoeffding;
  report["bounds"]["shadow_shots"] = shadow;
  report["bounds"]["w_cap"] = res.w_cap;
  json cfg = config_json(opt, imaginary ? "tau" : "time", duration);
  add_resolved(cfg, res);
  report["config"] = cfg;

  char buf[256];
  std::snprintf(buf, sizeof(buf), "order %zu  segments %zu", res.order,
                res.segments);
  print_line("resolved", buf);
  print_line("total_systematic", num(res.bound.total_systematic));
  print_line("gamma_l1_bound", num(res.bound.gamma_l1_bound));
  std::snprintf(buf, sizeof(buf), "hoeffding %llu  shadow %llu",
                static_cast<unsigned long long>(hoeffding),
                static_cast<unsigned long long>(shadow));
  print_line("shots", buf);

  write_report(opt, report, start);
  return kExitOk;
}

int run_loschmidt(const Options& opt) {
  auto start = std::chrono::steady_clock::now();
  HamiltonianSpec h = load_hamiltonian(opt.hamiltonian_path);
  Options local = opt;
  local.mode_text = "propagator";
  Resolved res = resolve_expansion(local, h, nullptr, opt.time, false);

  ExpansionOptions eopt;
  eopt.max_terms = opt.term_cap;

  json report;
  report["schema_version"] = kSchemaVersion;
  report["tool_version"] = kToolVersion;
  report["subcommand"] = "loschmidt";
  json cfg = config_json(opt, "time", opt.time);
  add_resolved(cfg, res);

  LoschmidtReport lr;
  if (!opt.shadows_path.empty()) {
    ExpansionResult expansion = expand_propagator_result(
        h, TimeParameter::real(opt.time), res.order, res.segments, eopt);
    lr.stats = expansion.stats;
    lr.bound = res.bound;
    auto snapshots = load_shadow_jsonl(opt.shadows_path);
    lr.estimate = shadow_estimate_sum(snapshots, expansion.sum,
                                      estimation_options(opt));
    lr.estimate.method = "loschmidt-" + lr.estimate.method;
    cfg["backend"] = "shadows-file";
    cfg["shots"] = lr.estimate.shots;
  } else {
    EstimatorBackend backend = parse_backend(opt.backend_text);
    std::uint64_t shots = resolve_shots(opt, res, backend);
    DenseOptions dense = DenseOptions::from_env();
    DenseState state = load_state(opt, h.n_qubits, dense);
    SamplingPlan plan;
    plan.backend = backend;
    plan.shots = shots;
    plan.seed = opt.seed;
    plan.options = estimation_options(opt);
    lr = loschmidt_overlap(h, opt.time, res.order, res.segments, state, plan,
                           eopt, dense);
    cfg["backend"] = opt.backend_text;
    cfg["shots"] = shots;
  }

  report["expansion"] = stats_json(lr.stats);
  report["bounds"] = bound_json(lr.bound);
  report["estimate"] = estimate_json(lr.estimate);
  report["config"] = cfg;

  print_expansion_summary(res, lr.stats);
  print_estimate_summary(lr.estimate);
  print_line("unitary_error", num(lr.bound.unitary_error));
  write_report(opt, report, start);
  return kExitOk;
}

int run_verify(const Options& opt) {
  auto start = std::chrono::steady_clock::now();
  HamiltonianSpec system = load_hamiltonian(opt.hamiltonian_path);
  HamiltonianSpec claimed = load_hamiltonian(opt.claimed_path);
  ObservableSpec obs = load_observable(opt.observable_path);

  // The truncation budget follows the claimed Hamiltonian, which drives the
  // backpropagation.
  Options local = opt;
  local.mode_text = "concat";
  Resolved res = resolve_expansion(local, claimed, &obs, opt.time, false);
  EstimatorBackend backend = parse_backend(opt.backend_text);
  std::uint64_t shots = resolve_shots(opt, res, backend);

  DenseOptions dense = DenseOptions::from_env();
  DenseState state = load_state(opt, system.n_qubits, dense);

  ExpansionOptions eopt;
  eopt.max_terms = opt.term_cap;
  SamplingPlan plan;
  plan.backend = backend;
  plan.shots = shots;
  plan.seed = opt.seed;
  plan.options = estimation_options(opt);

  VerifyReport vr =
      verify_backpropagation(system, claimed, obs, state, opt.time,
                             res.order, res.segments, plan, eopt, dense);

  json report;
  report["schema_version"] = kSchemaVersion;
  report["tool_version"] = kToolVersion;
  report["subcommand"] = "verify";
  report["expansion"] = stats_json(vr.stats);
  report["bounds"] = bound_json(vr.bound);
  report["estimate"] = estimate_json(vr.raw);
  json wf;
  wf["expected"] = vr.expected;
  wf["residual"] = vr.residual;
  wf["threshold"] = vr.threshold;
  wf["consistent"] = vr.consistent;
  report["workflow"] = wf;
  json cfg = config_json(opt, "time", opt.time);
  add_resolved(cfg, res);
  cfg["backend"] = opt.backend_text;
  cfg["shots"] = shots;
  report["config"] = cfg;

  print_expansion_summary(res, vr.stats);
  print_line("residual", num(vr.residual));
  print_line("threshold", num(vr.threshold));
  print_line("consistent", vr.consistent ? "yes" : "no");
  write_report(opt, report, start);
  return kExitOk;
}

int run_imag_energy(const Options& opt) {
  auto start = std::chrono::steady_clock::now();
  HamiltonianSpec h = load_hamiltonian(opt.hamiltonian_path);
  double lambda_tau = h.lambda * opt.tau;

  std::size_t order;
  if (opt.order >= 0) {
    order = static_cast<std::size_t>(opt.order);
  } else {
    order = select_truncation_order(2.0 * lambda_tau, opt.eps);
  }

  EstimatorBackend backend = parse_backend(opt.backend_text);
  std::uint64_t shots = 0;
  if (backend != EstimatorBackend::kExact) {
    if (opt.shots >= 0) {
      shots = static_cast<std::uint64_t>(opt.shots);
    } else {
      // Shot budget from the larger of the two coefficient bounds; the
      // workflow halves delta per side itself.
      double num_gamma =
          h.lambda * bounds::gamma_l1_bound(h.lambda, opt.tau, order, 1);
      double den_gamma = std::sqrt(
          bounds::gamma_l1_bound(h.lambda, 2.0 * opt.tau, order, 1));
      shots = bounds::hoeffding_shots(std::max(num_gamma, den_gamma),
                                      opt.eps, 0.5 * opt.delta);
      if (shots > kAutoShotCap) {
        throw GuardError("auto-resolved shot count exceeds the cap; pass "
                         "--shots explicitly to accept the runtime");
      }
    }
  }

  DenseOptions dense = DenseOptions::from_env();
  DenseState state = load_state(opt, h.n_qubits, dense);

  ExpansionOptions eopt;
  eopt.max_terms = opt.term_cap;
  SamplingPlan plan;
  plan.backend = backend;
  plan.shots = shots;
  plan.seed = opt.seed;
  plan.options = estimation_options(opt);

  RatioReport rr =
      imaginary_energy(h, state, opt.tau, order, plan, eopt, dense);

  json report;
  report["schema_version"] = kSchemaVersion;
  report["tool_version"] = kToolVersion;
  report["subcommand"] = "imag-energy";
  json wf;
  wf["numerator"] = estimate_json(rr.numerator);
  wf["denominator"] = estimate_json(rr.denominator);
  wf["numerator_tail"] = rr.numerator_tail;
  wf["denominator_tail"] = rr.denominator_tail;
  wf["value"] = rr.value;
  wf["lower"] = rr.lower;
  wf["upper"] = rr.upper;
  report["workflow"] = wf;
  report["expansion"] = stats_json(rr.numerator_stats);
  report["expansion_denominator"] = stats_json(rr.denominator_stats);
  json cfg = config_json(opt, "tau", opt.tau);
  cfg["order"] = order;
  cfg["backend"] = opt.backend_text;
  cfg["shots"] = shots;
  cfg["lambda"] = h.lambda;
  report["config"] = cfg;

  char buf[256];
  std::snprintf(buf, sizeof(buf), "%.10g  in [%.10g, %.10g]", rr.value,
                rr.lower, rr.upper);
  print_line("energy", buf);
  write_report(opt, report, start);
  return kExitOk;
}

int run_trace_z(const Options& opt) {
  auto start = std::chrono::steady_clock::now();
  HamiltonianSpec h = load_hamiltonian(opt.hamiltonian_path);
  double dim = std::ldexp(1.0, static_cast<int>(h.n_qubits));

  std::size_t order;
  if (opt.order >= 0) {
    order = static_cast<std::size_t>(opt.order);
  } else {
    order =
        select_truncation_order(2.0 * h.lambda * opt.tau, opt.eps / dim);
  }

  ExpansionOptions eopt;
  eopt.max_terms = opt.term_cap;
  TraceReport tr = partition_trace(h, opt.tau, order, eopt);

  json report;
  report["schema_version"] = kSchemaVersion;
  report["tool_version"] = kToolVersion;
  report["subcommand"] = "trace-z";
  json wf;
  wf["value"] = tr.value;
  wf["tail"] = tr.tail;
  report["workflow"] = wf;
  report["expansion"] = stats_json(tr.stats);
  json cfg = config_json(opt, "tau", opt.tau);
  cfg["order"] = order;
  cfg["lambda"] = h.lambda;
  report["config"] = cfg;

  char buf[128];
  std::snprintf(buf, sizeof(buf), "%.10g  tail %.4g", tr.value, tr.tail);
  print_line("trace", buf);
  write_report(opt, report, start);
  return kExitOk;
}

enum class StateNeed { kNone, kOptional, kRequired };

void add_common(CLI::App* cmd, Options& opt, bool with_observable,
                StateNeed state, bool sampling) {
  cmd->add_option("-H,--hamiltonian", opt.hamiltonian_path,
                  "Hamiltonian file (one 'coeff paulis' per line)")
      ->required();
  if (with_observable) {
    cmd->add_option("-O,--observable", opt.observable_path,
                    "observable file, same format");
  }
  if (state != StateNeed::kNone) {
    auto* o = cmd->add_option("-s,--state", opt.state_text,
                              "basis:<bits>, neel:<n> or dm:<path>");
    if (state == StateNeed::kRequired) o->required();
  }
  cmd->add_option("-e,--eps", opt.eps, "accuracy budget (default 1e-3)");
  cmd->add_option("-K,--order", opt.order,
                  "truncation order (default: auto from eps)");
  cmd->add_option("--term-cap", opt.term_cap,
                  "abort when an expansion holds more distinct strings");
  cmd->add_option("-o,--output", opt.output_path, "JSON report path");
  if (sampling) {
    cmd->add_option("-d,--delta", opt.delta,
                    "confidence budget (default 0.05)");
    cmd->add_option("-b,--backend", opt.backend_text,
                    "exact | importance | shadows (default exact)");
    cmd->add_option("-N,--shots", opt.shots,
                    "shot/snapshot count (default: auto from bounds)");
    cmd->add_option("--seed", opt.seed, "RNG seed (default 1)");
    cmd->add_flag("--separate-identity", opt.separate_identity,
                  "estimate the identity coefficient analytically");
    cmd->add_option("--median-groups", opt.median_groups,
                    "median-of-means groups for shadow estimates");
  }
}

void add_time_pair(CLI::App* cmd, Options& opt) {
  cmd->add_option("-t,--time", opt.time, "evolution time")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--tau", opt.tau, "imaginary-time duration")
      ->check(CLI::NonNegativeNumber);
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  Options opt;
  CLI::App app{"Weighted-Pauli expansion of evolved observables with "
               "rigorous truncation and sampling bounds"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  CLI::App* expand = app.add_subcommand(
      "expand", "expand a propagator or evolved observable");
  add_common(expand, opt, true, StateNeed::kNone, false);
  add_time_pair(expand, opt);
  expand->add_option("-m,--mode", opt.mode_text,
                     "propagator | concat | direct | commutator");
  expand->add_option("-r,--segments", opt.segments,
                     "concatenation segments (default: auto)");
  expand->add_flag("--dump-terms", opt.dump_terms,
                   "list every term in the report");

  CLI::App* bounds_cmd = app.add_subcommand(
      "bounds", "resolve orders and report bounds without expanding");
  add_common(bounds_cmd, opt, true, StateNeed::kNone, false);
  add_time_pair(bounds_cmd, opt);
  bounds_cmd->add_option("-m,--mode", opt.mode_text,
                         "propagator | concat | direct | commutator");
  bounds_cmd->add_option("-r,--segments", opt.segments,
                         "concatenation segments (default: auto)");
  bounds_cmd->add_option("-d,--delta", opt.delta,
                         "confidence budget (default 0.05)");

  CLI::App* estimate = app.add_subcommand(
      "estimate", "expand and estimate on a state");
  add_common(estimate, opt, true, StateNeed::kOptional, true);
  add_time_pair(estimate, opt);
  estimate->add_option("-m,--mode", opt.mode_text,
                       "propagator | concat | direct | commutator");
  estimate->add_option("-r,--segments", opt.segments,
                       "concatenation segments (default: auto)");
  estimate->add_option("--shadows", opt.shadows_path,
                       "recorded snapshots (JSON lines) to reuse");
  estimate->add_flag("--dump-terms", opt.dump_terms,
                     "list every term in the report");

  CLI::App* loschmidt = app.add_subcommand(
      "loschmidt", "overlap of the state with the expanded propagator");
  add_common(loschmidt, opt, false, StateNeed::kOptional, true);
  loschmidt->add_option("-t,--time", opt.time, "evolution time")
      ->check(CLI::NonNegativeNumber)
      ->required();
  loschmidt->add_option("-r,--segments", opt.segments,
                        "concatenation segments (default: auto)");
  loschmidt->add_option("--shadows", opt.shadows_path,
                        "recorded snapshots (JSON lines) to reuse");

  CLI::App* verify = app.add_subcommand(
      "verify", "test a claimed Hamiltonian against the system");
  add_common(verify, opt, true, StateNeed::kRequired, true);
  verify->get_option("--observable")->required();
  verify->add_option("-c,--claimed", opt.claimed_path,
                     "claimed Hamiltonian file")
      ->required();
  verify->add_option("-t,--time", opt.time, "evolution time")
      ->check(CLI::NonNegativeNumber)
      ->required();
  verify->add_option("-r,--segments", opt.segments,
                     "concatenation segments (default: auto)");

  CLI::App* imag = app.add_subcommand(
      "imag-energy", "imaginary-time energy with measured normalizer");
  add_common(imag, opt, false, StateNeed::kRequired, true);
  imag->add_option("--tau", opt.tau, "imaginary-time duration")
      ->check(CLI::NonNegativeNumber)
      ->required();

  CLI::App* trace = app.add_subcommand(
      "trace-z", "partition-style trace of the expanded e^{-2 tau H}");
  add_common(trace, opt, false, StateNeed::kNone, false);
  trace->add_option("--tau", opt.tau, "imaginary-time duration")
      ->check(CLI::NonNegativeNumber)
      ->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (expand->parsed()) return run_expand(opt, false);
    if (bounds_cmd->parsed()) return run_bounds(opt);
    if (estimate->parsed()) return run_expand(opt, true);
    if (loschmidt->parsed()) return run_loschmidt(opt);
    if (verify->parsed()) return run_verify(opt);
    if (imag->parsed()) return run_imag_energy(opt);
    if (trace->parsed()) return run_trace_z(opt);
    std::cerr << "no subcommand given\n";
    return kExitInput;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const GuardError& e) {
    std::cerr << "guard abort: " << e.what() << '\n';
    return kExitGuard;
  } catch (const RefusalError& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return kExitRefusal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  if (argc > 1) args.reserve(static_cast<std::size_t>(argc - 1));
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace paulisim
