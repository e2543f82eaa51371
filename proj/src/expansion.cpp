#include "paulisim/expansion.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "paulisim/bounds.hpp"
#include "paulisim/errors.hpp"

namespace paulisim {

namespace {

void check_time(const TimeParameter& time) {
  if (!(time.value >= 0.0) || !std::isfinite(time.value)) {
    throw InputError("time magnitude must be finite and >= 0");
  }
}

// Generator g with e^{g} the target propagator: -i t H or -tau H.
PauliSum generator_sum(const HamiltonianSpec& h, TimeParameter time) {
  PauliSum g = h.to_sum();
  g.set_hermitian_hint(false);
  g.scale(time.imaginary ? Complex{-time.value, 0.0}
                         : Complex{0.0, -time.value});
  return g;
}

// Rethrows a term-cap GuardError with the a priori worst case attached.
[[noreturn]] void rethrow_with_prediction(const GuardError& err,
                                          const HamiltonianSpec& h,
                                          std::size_t order,
                                          std::size_t segments,
                                          bool conjugated) {
  std::uint64_t predicted =
      bounds::term_count_bound(h.num_terms(), order, segments, conjugated);
  throw GuardError(std::string(err.what()) +
                   " (worst-case distinct terms for this configuration: " +
                   (predicted == bounds::kCountSaturated
                        ? std::string("overflow")
                        : std::to_string(predicted)) +
                   ")");
}

ExpansionResult make_result(PauliSum sum, ExpansionMode mode,
                            std::size_t order, std::size_t segments,
                            TimeParameter time) {
  ExpansionResult result{std::move(sum), mode, order, segments, time, {}};
  result.stats = expansion_stats(result.sum);
  return result;
}

}  // namespace

TimeParameter TimeParameter::real(double t) {
  TimeParameter p{t, false};
  check_time(p);
  return p;
}

TimeParameter TimeParameter::imag(double tau) {
  TimeParameter p{tau, true};
  check_time(p);
  return p;
}

ExpansionStats expansion_stats(const PauliSum& sum) {
  ExpansionStats stats;
  stats.m_tot = sum.num_terms();
  stats.gamma_l1 = sum.l1_norm();
  stats.w_max = sum.max_weight();
  stats.identity_coeff = sum.identity_coefficient();
  return stats;
}

std::size_t select_truncation_order(double lambda_t, double eps,
                                    std::size_t cap) {
  if (!(lambda_t >= 0.0) || !std::isfinite(lambda_t)) {
    throw InputError("lambda_t must be finite and >= 0");
  }
  if (!(eps > 0.0)) {
    throw InputError("eps must be > 0");
  }
  double tail = lambda_t;  // order 0 tail: lambda_t^1 / 1!
  for (std::size_t order = 0; order <= cap; ++order) {
    if (tail <= eps) return order;
    tail *= lambda_t / static_cast<double>(order + 2);
  }
  throw GuardError("truncation order exceeds the cap of " +
                   std::to_string(cap) +
                   "; the evolution needs more segments");
}

PauliSum expand_propagator(const HamiltonianSpec& h, TimeParameter time,
                           std::size_t order,
                           const ExpansionOptions& options) {
  check_time(time);
  PauliSum g = generator_sum(h, time);
  PauliSum total = PauliSum::identity(h.n_qubits);
  PauliSum power = PauliSum::identity(h.n_qubits);
  try {
    for (std::size_t k = 1; k <= order; ++k) {
      power = sum_multiply(power, g, options.max_terms);
      power.scale(1.0 / static_cast<double>(k));
      power.canonicalize(options.tolerance);
      if (power.num_terms() == 0) break;  // series vanished (t = 0)
      total.add(power);
    }
  } catch (const GuardError& err) {
    rethrow_with_prediction(err, h, order, 1, false);
  }
  total.canonicalize(options.tolerance);
  return total;
}

PauliSum conjugate_expansion(const PauliSum& u, const ObservableSpec& obs,
                             const ExpansionOptions& options) {
  if (u.num_qubits() != obs.sum.num_qubits()) {
    throw InputError("propagator and observable qubit counts differ");
  }
  PauliSum left = sum_multiply(u.adjoint(), obs.sum, options.max_terms);
  PauliSum out = sum_multiply(left, u, options.max_terms);
  out.set_hermitian_hint(true);
  out.canonicalize(options.tolerance, /*hermitian=*/true);
  return out;
}

ExpansionResult expand_propagator_result(const HamiltonianSpec& h,
                                         TimeParameter time, std::size_t order,
                                         std::size_t segments,
                                         const ExpansionOptions& options) {
  check_time(time);
  if (segments == 0) {
    throw InputError("segments must be >= 1");
  }
  TimeParameter segment_time{time.value / static_cast<double>(segments),
                             time.imaginary};
  PauliSum segment = expand_propagator(h, segment_time, order, options);
  PauliSum total = segment;
  try {
    for (std::size_t s = 1; s < segments; ++s) {
      total = sum_multiply(total, segment, options.max_terms);
      total.canonicalize(options.tolerance);
    }
  } catch (const GuardError& err) {
    rethrow_with_prediction(err, h, order, segments, false);
  }
  return make_result(std::move(total), ExpansionMode::kPropagator, order,
                     segments, time);
}

ExpansionResult heisenberg_taylor_concat(const HamiltonianSpec& h,
                                         const ObservableSpec& obs,
                                         TimeParameter time, std::size_t order,
                                         std::size_t segments,
                                         const ExpansionOptions& options) {
  ExpansionResult propagator =
      expand_propagator_result(h, time, order, segments, options);
  PauliSum conjugated(propagator.sum.num_qubits());
  try {
    conjugated = conjugate_expansion(propagator.sum, obs, options);
  } catch (const GuardError& err) {
    rethrow_with_prediction(err, h, order, segments, true);
  }
  return make_result(std::move(conjugated), ExpansionMode::kConcat, order,
                     segments, time);
}

ExpansionResult heisenberg_direct_expansion(const HamiltonianSpec& h,
                                            const ObservableSpec& obs,
                                            TimeParameter time,
                                            std::size_t order,
                                            const ExpansionOptions& options) {
  check_time(time);
  std::size_t n = h.n_qubits;
  if (obs.sum.num_qubits() != n) {
    throw InputError("Hamiltonian and observable qubit counts differ");
  }

  // Cached powers H^0 .. H^order, merged and pruned once each.
  std::vector<PauliSum> h_power;
  h_power.reserve(order + 1);
  h_power.push_back(PauliSum::identity(n));
  PauliSum h_sum = h.to_sum();
  try {
    for (std::size_t k = 1; k <= order; ++k) {
      PauliSum next = sum_multiply(h_power.back(), h_sum, options.max_terms);
      next.canonicalize(options.tolerance);
      h_power.push_back(std::move(next));
    }

    // Scalar factors: real time   left_k = (+i t)^k / k!,
    //                             right_k = (-i t)^k / k!;
    // imaginary time              left_k = right_k = (-tau)^k / k!.
    std::vector<Complex> left(order + 1), right(order + 1);
    left[0] = right[0] = 1.0;
    Complex lf = time.imaginary ? Complex{-time.value, 0.0}
                                : Complex{0.0, time.value};
    Complex rf = time.imaginary ? Complex{-time.value, 0.0}
                                : Complex{0.0, -time.value};
    for (std::size_t k = 1; k <= order; ++k) {
      left[k] = left[k - 1] * lf / static_cast<double>(k);
      right[k] = right[k - 1] * rf / static_cast<double>(k);
    }

    PauliSum total(n);
    for (std::size_t k = 0; k <= order; ++k) {
      PauliSum lk = sum_multiply(h_power[k], obs.sum, options.max_terms);
      lk.canonicalize(options.tolerance);
      for (std::size_t kp = 0; k + kp <= order; ++kp) {
        PauliSum piece = sum_multiply(lk, h_power[kp], options.max_terms);
        piece.scale(left[k] * right[kp]);
        total.add(piece);
        if (options.max_terms > 0 && total.num_terms() > options.max_terms) {
          throw GuardError("distinct term count " +
                           std::to_string(total.num_terms()) +
                           " exceeds the cap of " +
                           std::to_string(options.max_terms));
        }
      }
    }
    total.set_hermitian_hint(true);
    total.canonicalize(options.tolerance, /*hermitian=*/true);
    return make_result(std::move(total), ExpansionMode::kDirect, order, 1,
                       time);
  } catch (const GuardError& err) {
    rethrow_with_prediction(err, h, order, 1, true);
  }
}

ExpansionResult heisenberg_commutator_series(const HamiltonianSpec& h,
                                             const ObservableSpec& obs,
                                             TimeParameter time,
                                             std::size_t order,
                                             const ExpansionOptions& options) {
  check_time(time);
  if (obs.sum.num_qubits() != h.n_qubits) {
    throw InputError("Hamiltonian and observable qubit counts differ");
  }
  PauliSum h_sum = h.to_sum();
  PauliSum nested = obs.sum;  // ad^0(O) or aad^0(O)
  PauliSum total = obs.sum;
  // Real time: coeff_k = (i t)^k / k!; imaginary: (-tau)^k / k!.
  Complex factor = time.imaginary ? Complex{-time.value, 0.0}
                                  : Complex{0.0, time.value};
  Complex coeff = 1.0;
  try {
    for (std::size_t k = 1; k <= order; ++k) {
      nested = time.imaginary ? anticommutator(h_sum, nested)
                              : commutator(h_sum, nested);
      nested.canonicalize(options.tolerance);
      if (options.max_terms > 0 && nested.num_terms() > options.max_terms) {
        throw GuardError("distinct term count " +
                         std::to_string(nested.num_terms()) +
                         " exceeds the cap of " +
                         std::to_string(options.max_terms));
      }
      if (nested.num_terms() == 0) break;  // series terminated exactly
      coeff *= factor / static_cast<double>(k);
      PauliSum piece = nested;
      piece.scale(coeff);
      total.add(piece);
    }
  } catch (const GuardError& err) {
    rethrow_with_prediction(err, h, order, 1, true);
  }
  total.set_hermitian_hint(true);
  total.canonicalize(options.tolerance, /*hermitian=*/true);
  return make_result(std::move(total), ExpansionMode::kCommutator, order, 1,
                     time);
}

ExpansionResult conjugate_sequence(const std::vector<EvolutionStage>& stages,
                                   const ObservableSpec& obs,
                                   const ExpansionOptions& options) {
  ObservableSpec current = obs;
  std::size_t max_order = 0;
  std::size_t max_segments = 1;
  TimeParameter last_time;
  // Innermost factor first: the last stage touches the observable first.
  for (auto it = stages.rbegin(); it != stages.rend(); ++it) {
    ExpansionResult stage_result = heisenberg_taylor_concat(
        it->hamiltonian, current, it->time, it->order, it->segments, options);
    current = ObservableSpec::from_sum(std::move(stage_result.sum));
    max_order = std::max(max_order, it->order);
    max_segments = std::max(max_segments, it->segments);
    last_time = it->time;
  }
  return make_result(std::move(current.sum), ExpansionMode::kConcat, max_order,
                     max_segments, last_time);
}

}  // namespace paulisim
