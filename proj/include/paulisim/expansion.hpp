#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "paulisim/model.hpp"
#include "paulisim/pauli_sum.hpp"

namespace paulisim {

// Evolution time. Real time targets the unitary group e^{-i t H}; imaginary
// time targets the positive semigroup e^{-tau H}. The magnitude is always
// nonnegative; evolve under a sign-flipped Hamiltonian to go backwards.
struct TimeParameter {
  double value = 0.0;
  bool imaginary = false;

  static TimeParameter real(double t);
  static TimeParameter imag(double tau);
};

enum class ExpansionMode {
  kPropagator,  // truncated expansion of the propagator itself
  kConcat,      // conjugation by truncated propagators, r segments
  kDirect,      // two-sided sum over H^k O H^k', total order capped
  kCommutator,  // nested (anti)commutator series
};

struct ExpansionOptions {
  // Hard cap on distinct strings in any intermediate or final sum. The
  // worst-case growth is exponential in the order, so runs abort with
  // GuardError instead of exhausting memory.
  std::size_t max_terms = 10'000'000;
  double tolerance = kCoefficientTolerance;
};

// Summary statistics of an expansion output.
struct ExpansionStats {
  std::size_t m_tot = 0;        // distinct strings
  double gamma_l1 = 0.0;        // sum of |coefficient|
  std::size_t w_max = 0;        // largest string weight
  Complex identity_coeff = 0.0;
};

struct ExpansionResult {
  PauliSum sum;
  ExpansionMode mode = ExpansionMode::kPropagator;
  std::size_t order = 0;
  std::size_t segments = 1;
  TimeParameter time;
  ExpansionStats stats;
};

ExpansionStats expansion_stats(const PauliSum& sum);

// Smallest K with lambda_t^{K+1}/(K+1)! <= eps. The scan is capped (the
// factorial eventually wins for any finite lambda_t, but a cap keeps
// pathological inputs from looping); exceeding the cap raises GuardError.
std::size_t select_truncation_order(double lambda_t, double eps,
                                    std::size_t cap = 64);

// Truncated expansion of one propagator segment:
// sum_{k<=order} g^k / k!  with  g = -i t H (real) or -tau H (imaginary).
// Duplicate strings merge after every multiplication level; near-zero
// coefficients are pruned at options.tolerance.
PauliSum expand_propagator(const HamiltonianSpec& h, TimeParameter time,
                           std::size_t order,
                           const ExpansionOptions& options = {});

// u^dag * obs * u with duplicate merging. The result of conjugating a
// Hermitian observable is Hermitian: imaginary coefficient residue within
// tolerance is zeroed, larger residue raises InputError.
PauliSum conjugate_expansion(const PauliSum& u, const ObservableSpec& obs,
                             const ExpansionOptions& options = {});

// Propagator over `segments` equal segments: (expansion of U(t/segments))
// raised to the power `segments`. order applies per segment.
ExpansionResult expand_propagator_result(const HamiltonianSpec& h,
                                         TimeParameter time, std::size_t order,
                                         std::size_t segments = 1,
                                         const ExpansionOptions& options = {});

// Heisenberg-picture observable by conjugation with segmented truncated
// propagators. Contains spurious polynomial orders above `order` (products
// of two degree-`order` factors).
ExpansionResult heisenberg_taylor_concat(const HamiltonianSpec& h,
                                         const ObservableSpec& obs,
                                         TimeParameter time, std::size_t order,
                                         std::size_t segments = 1,
                                         const ExpansionOptions& options = {});

// Heisenberg-picture observable as the two-sided expansion
//   sum_{k+k'<=order} c_k c'_{k'} H^k O H^{k'},
// with the exact polynomial truncation at total order `order` and cached
// Hamiltonian powers. Real time: c_k c'_{k'} = i^{k-k'} t^{k+k'}/(k! k'!);
// imaginary time: (-tau)^{k+k'}/(k! k'!), i.e. the two-sided sandwich
// e^{-tau H} O e^{-tau H}.
ExpansionResult heisenberg_direct_expansion(
    const HamiltonianSpec& h, const ObservableSpec& obs, TimeParameter time,
    std::size_t order, const ExpansionOptions& options = {});

// Heisenberg-picture observable as a nested series. Real time:
//   sum_{k<=order} (i t)^k / k! ad_H^k(O),        ad_H(X) = [H, X];
// imaginary time (two-sided sandwich, see above):
//   sum_{k<=order} (-tau)^k / k! aad_H^k(O),      aad_H(X) = {H, X}.
// Only nonvanishing (anti)commutators are ever generated. Equals the direct
// expansion at the same order exactly, term by term.
ExpansionResult heisenberg_commutator_series(
    const HamiltonianSpec& h, const ObservableSpec& obs, TimeParameter time,
    std::size_t order, const ExpansionOptions& options = {});

// One factor of an interleaved evolution. Stages are given outermost first;
// conjugate_sequence applies them to the observable innermost first.
struct EvolutionStage {
  HamiltonianSpec hamiltonian;
  TimeParameter time;
  std::size_t order = 0;
  std::size_t segments = 1;
};

ExpansionResult conjugate_sequence(const std::vector<EvolutionStage>& stages,
                                   const ObservableSpec& obs,
                                   const ExpansionOptions& options = {});

}  // namespace paulisim
