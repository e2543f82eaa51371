#include "paulisim/workflows.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "paulisim/errors.hpp"

namespace paulisim {

namespace {

EstimateReport exact_estimate(const PauliSum& sum, const DenseState& state) {
  EstimateReport report;
  report.value = exact_expectation(state, sum);
  report.radius = 0.0;
  report.confidence = 1.0;
  report.method = "exact";
  return report;
}

}  // namespace

EstimateReport estimate_on_state(const PauliSum& sum, const DenseState& state,
                                 const SamplingPlan& plan,
                                 const DenseOptions& dense) {
  (void)dense;
  switch (plan.backend) {
    case EstimatorBackend::kExact:
      return exact_estimate(sum, state);
    case EstimatorBackend::kImportance: {
      DenseSource source(state);
      return importance_estimate(sum, source, plan.shots, plan.seed,
                                 plan.options);
    }
    case EstimatorBackend::kShadows: {
      if (plan.shots == 0) {
        throw InputError("shadow estimation needs a positive snapshot count");
      }
      auto snapshots = generate_shadows(state, plan.shots, plan.seed);
      return shadow_estimate_sum(snapshots, sum, plan.options);
    }
  }
  throw InputError("unknown estimator backend");
}

VerifyReport verify_backpropagation(const HamiltonianSpec& system,
                                    const HamiltonianSpec& claimed,
                                    const ObservableSpec& obs,
                                    const DenseState& initial, double time,
                                    std::size_t order, std::size_t segments,
                                    const SamplingPlan& plan,
                                    const ExpansionOptions& expansion,
                                    const DenseOptions& dense) {
  if (system.n_qubits != claimed.n_qubits ||
      system.n_qubits != obs.sum.num_qubits()) {
    throw InputError("system, claim and observable qubit counts differ");
  }
  if (!(time >= 0.0) || !std::isfinite(time)) {
    throw InputError("time must be finite and nonnegative");
  }

  VerifyReport report;
  report.expected = exact_expectation(initial, obs.sum).real();

  DenseState evolved =
      exact_evolve(initial, system, TimeParameter::real(time), dense);

  // O(-t) = conjugation by e^{+iHt}, i.e. the propagator of -H.
  HamiltonianSpec reversed = scale_hamiltonian(claimed, -1.0);
  ExpansionResult back = heisenberg_taylor_concat(
      reversed, obs, TimeParameter::real(time), order, segments, expansion);
  report.stats = back.stats;

  report.bound = bounds::compose_report(claimed.lambda, time, order, segments,
                                        claimed.num_terms(), obs.norm_bound,
                                        bounds::SystematicKind::kConjugated);

  report.raw = estimate_on_state(back.sum, evolved, plan, dense);
  report.residual = report.raw.value.real() - report.expected;
  report.threshold = report.bound.total_systematic + report.raw.radius;
  report.consistent = std::abs(report.residual) <= report.threshold;
  return report;
}

RatioReport imaginary_energy(const HamiltonianSpec& h, const DenseState& state,
                             double tau, std::size_t order,
                             const SamplingPlan& plan,
                             const ExpansionOptions& expansion,
                             const DenseOptions& dense) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw InputError("tau must be finite and nonnegative");
  }

  RatioReport report;
  double lambda_tau = h.lambda * tau;

  ObservableSpec energy_obs = ObservableSpec::from_sum(h.to_sum());
  ExpansionResult numerator = heisenberg_direct_expansion(
      h, energy_obs, TimeParameter::imag(tau), order, expansion);
  report.numerator_stats = numerator.stats;
  report.numerator_tail =
      bounds::direct_expansion_tail_bound(lambda_tau, order, h.lambda);

  PauliSum denominator =
      expand_propagator(h, TimeParameter::imag(2.0 * tau), order, expansion);
  report.denominator_stats = expansion_stats(denominator);
  report.denominator_tail =
      bounds::propagator_tail_bound(2.0 * lambda_tau, order);

  // Split the confidence budget. The importance backend runs two passes, so
  // the denominator gets a shifted seed; shadows reuse one snapshot set.
  SamplingPlan num_plan = plan;
  num_plan.options.delta = 0.5 * plan.options.delta;
  SamplingPlan den_plan = num_plan;
  if (plan.backend == EstimatorBackend::kImportance) den_plan.seed += 1;

  if (plan.backend == EstimatorBackend::kShadows) {
    if (plan.shots == 0) {
      throw InputError("shadow estimation needs a positive snapshot count");
    }
    auto snapshots = generate_shadows(state, plan.shots, plan.seed);
    report.numerator =
        shadow_estimate_sum(snapshots, numerator.sum, num_plan.options);
    report.denominator =
        shadow_estimate_sum(snapshots, denominator, den_plan.options);
  } else {
    report.numerator =
        estimate_on_state(numerator.sum, state, num_plan, dense);
    report.denominator =
        estimate_on_state(denominator, state, den_plan, dense);
  }

  double n_hat = report.numerator.value.real();
  double d_hat = report.denominator.value.real();
  double r_n = report.numerator.radius + report.numerator_tail;
  double r_d = report.denominator.radius + report.denominator_tail;

  if (d_hat - r_d <= 0.0) {
    throw RefusalError(
        "normalizer estimate is within its error radius of zero; the energy "
        "ratio cannot be bounded (grow the shot budget or shrink tau)");
  }

  report.value = n_hat / d_hat;
  double corners[4] = {
      (n_hat - r_n) / (d_hat - r_d), (n_hat - r_n) / (d_hat + r_d),
      (n_hat + r_n) / (d_hat - r_d), (n_hat + r_n) / (d_hat + r_d)};
  report.lower = *std::min_element(corners, corners + 4);
  report.upper = *std::max_element(corners, corners + 4);
  return report;
}

TraceReport partition_trace(const HamiltonianSpec& h, double tau,
                            std::size_t order,
                            const ExpansionOptions& expansion) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw InputError("tau must be finite and nonnegative");
  }
  PauliSum sum =
      expand_propagator(h, TimeParameter::imag(2.0 * tau), order, expansion);

  TraceReport report;
  double dim = std::ldexp(1.0, static_cast<int>(h.n_qubits));
  report.value = dim * sum.identity_coefficient().real();
  report.tail =
      dim * bounds::propagator_tail_bound(2.0 * h.lambda * tau, order);
  report.stats = expansion_stats(sum);
  return report;
}

LoschmidtReport loschmidt_overlap(const HamiltonianSpec& h, double time,
                                  std::size_t order, std::size_t segments,
                                  const DenseState& state,
                                  const SamplingPlan& plan,
                                  const ExpansionOptions& expansion,
                                  const DenseOptions& dense) {
  if (!(time >= 0.0) || !std::isfinite(time)) {
    throw InputError("time must be finite and nonnegative");
  }
  ExpansionResult result = expand_propagator_result(
      h, TimeParameter::real(time), order, segments, expansion);

  LoschmidtReport report;
  report.stats = result.stats;
  report.bound = bounds::compose_report(
      h.lambda, time, order, segments, h.num_terms(), 1.0,
      bounds::SystematicKind::kPropagatorOnly);
  report.estimate = estimate_on_state(result.sum, state, plan, dense);
  report.estimate.method = "loschmidt-" + report.estimate.method;
  return report;
}

}  // namespace paulisim
