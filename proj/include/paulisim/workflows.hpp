#pragma once

// End-to-end procedures combining expansion, bounds, estimation and the
// dense backend: backpropagation-based Hamiltonian verification,
// imaginary-time energy with a measured normalizer, the expansion-side
// partition trace, and the overlap (echo) estimate.

#include <cstdint>
#include <vector>

#include "paulisim/bounds.hpp"
#include "paulisim/dense.hpp"
#include "paulisim/estimation.hpp"
#include "paulisim/expansion.hpp"
#include "paulisim/model.hpp"

namespace paulisim {

enum class EstimatorBackend {
  kExact,       // trace inner product on the dense state; radius 0
  kImportance,  // sampled single-string outcomes, Hoeffding radius
  kShadows,     // randomized-basis snapshots drawn from the dense state
};

struct SamplingPlan {
  EstimatorBackend backend = EstimatorBackend::kExact;
  std::uint64_t shots = 0;  // importance draws or shadow snapshots
  std::uint64_t seed = 1;
  EstimationOptions options;
};

// Estimate tr(sum * rho) through the selected backend. Sampling backends
// need plan.shots > 0; the exact backend ignores shots and seed.
EstimateReport estimate_on_state(const PauliSum& sum, const DenseState& state,
                                 const SamplingPlan& plan,
                                 const DenseOptions& dense = {});

struct VerifyReport {
  double expected = 0.0;   // exact tr(O rho_0)
  EstimateReport raw;      // estimate of tr(O~(-t) rho(t))
  double residual = 0.0;   // raw value minus expected
  double threshold = 0.0;  // truncation systematic + sampling radius
  bool consistent = false; // |residual| <= threshold
  bounds::BoundReport bound;
  ExpansionStats stats;    // backpropagated observable
};

// Consistency check of a claimed Hamiltonian against a system: the state
// evolves exactly under `system` for `time`, the observable is expanded
// backwards (conjugation under the sign-flipped `claimed`, i.e. negative
// time), and the residual estimate of tr(O~(-t) rho(t)) - tr(O rho_0)
// vanishes up to truncation + sampling error iff the claim reproduces the
// dynamics seen by this observable.
VerifyReport verify_backpropagation(const HamiltonianSpec& system,
                                    const HamiltonianSpec& claimed,
                                    const ObservableSpec& obs,
                                    const DenseState& initial, double time,
                                    std::size_t order, std::size_t segments,
                                    const SamplingPlan& plan,
                                    const ExpansionOptions& expansion = {},
                                    const DenseOptions& dense = {});

struct RatioReport {
  EstimateReport numerator;
  EstimateReport denominator;
  double numerator_tail = 0.0;    // truncation contribution, numerator
  double denominator_tail = 0.0;  // truncation contribution, denominator
  double value = 0.0;             // point ratio
  double lower = 0.0;             // interval from the four corners of the
  double upper = 0.0;             // (numerator, denominator) error box
  ExpansionStats numerator_stats;
  ExpansionStats denominator_stats;
};

// Imaginary-time energy  tr(e^{-tau H} H e^{-tau H} rho) / tr(e^{-2 tau H} rho),
// both sides expanded at the same total order and estimated on rho. The
// numerator and denominator confidence budgets are delta/2 each; with the
// importance backend the denominator uses seed + 1 so the two passes draw
// independent streams, while shadows reuse one snapshot set for both.
// Raises RefusalError when the denominator estimate cannot be bounded away
// from zero. Truncation tails are the leading-order proxies reported in the
// result; they are exact envelopes for real time and leading-order for
// imaginary time.
RatioReport imaginary_energy(const HamiltonianSpec& h, const DenseState& state,
                             double tau, std::size_t order,
                             const SamplingPlan& plan,
                             const ExpansionOptions& expansion = {},
                             const DenseOptions& dense = {});

struct TraceReport {
  double value = 0.0;  // 2^n * identity coefficient ~ tr e^{-2 tau H}
  double tail = 0.0;   // 2^n * propagator tail at 2 lambda tau
  ExpansionStats stats;
};

// State-independent normalizer tr(e^{-2 tau H}): every non-identity string
// is traceless, so the trace of the expansion is 2^n times its identity
// coefficient. Purely expansion-side; no sampling.
TraceReport partition_trace(const HamiltonianSpec& h, double tau,
                            std::size_t order,
                            const ExpansionOptions& expansion = {});

struct LoschmidtReport {
  EstimateReport estimate;  // complex tr(rho U~(t))
  bounds::BoundReport bound;
  ExpansionStats stats;
};

// Overlap tr(rho U~(t)) from the propagator-only expansion; complex
// coefficients, so the importance backend runs its two-lane scheme.
LoschmidtReport loschmidt_overlap(const HamiltonianSpec& h, double time,
                                  std::size_t order, std::size_t segments,
                                  const DenseState& state,
                                  const SamplingPlan& plan,
                                  const ExpansionOptions& expansion = {},
                                  const DenseOptions& dense = {});

}  // namespace paulisim
