#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>

namespace paulisim::bounds {

// Shot counts and term counts saturate here instead of overflowing.
inline constexpr std::uint64_t kCountSaturated =
    std::numeric_limits<std::uint64_t>::max();

// Remainder of the exponential series after truncation order `order`:
// lambda_t^{order+1} / (order+1)!. Upper-bounds the operator-norm distance
// between the exact propagator over a segment with coefficient l1 norm
// lambda_t and its truncated expansion. Monotone in both arguments.
double propagator_tail_bound(double lambda_t, std::size_t order);

// Error of a conjugation u~^dag O u~ when ||u~ - u|| <= unitary_err and u is
// unitary: (2 e + e^2) * norm_o.
double conjugation_error_bound(double unitary_err, double norm_o);

// Error of the two-sided expansion truncated at total order `order`:
// norm_o * (2 lambda_t)^{order+1} / (order+1)!.
double direct_expansion_tail_bound(double lambda_t, std::size_t order,
                                   double norm_o);

// Worst-case distinct-term count of an expansion with num_terms generator
// strings, per-segment order `order`, `segments` factors, and a final
// conjugation doubling the exponent: (sum_{k<=order} num_terms^k)^segments,
// squared when conjugated. Saturates at kCountSaturated.
std::uint64_t term_count_bound(std::size_t num_terms, std::size_t order,
                               std::size_t segments, bool conjugated);

// A priori bound on the coefficient l1 norm of the conjugated expansion:
// (sum_{k<=order} (lambda t / segments)^k / k!)^{2 segments}. Approaches
// exp(2 lambda t) as order grows.
double gamma_l1_bound(double lambda, double t, std::size_t order,
                      std::size_t segments);

// Shots for an importance-sampling estimate within eps at confidence
// 1 - delta: ceil(2 gamma_l1^2 ln(2/delta) / eps^2). Zero when gamma_l1 is
// zero; saturates at kCountSaturated.
std::uint64_t hoeffding_shots(double gamma_l1, double eps, double delta);

// Snapshots for shadow estimation of m_tot strings of weight <= w_max, each
// within eps at overall confidence 1 - delta:
// ceil((2 / (eps^2 (1 - eps))) * 3^w_max * ln(3 m_tot / delta)).
// Natural logarithm. Requires eps < 1; saturates at kCountSaturated.
std::uint64_t shadow_shots(std::size_t w_max, std::uint64_t m_tot, double eps,
                           double delta);

// Largest eps guaranteed by `shots` importance samples at confidence
// 1 - delta: gamma_l1 * sqrt(2 ln(2/delta) / shots).
double invert_hoeffding_radius(double gamma_l1, std::uint64_t shots,
                               double delta);

// Largest per-string eps guaranteed by `shots` shadow snapshots (inverse of
// shadow_shots in eps, solved by bisection on (0, 2/3]); clamped to 1 when
// the snapshot count is too small for any guarantee. Multiply by the
// coefficient l1 norm for the error of a sum estimate.
double invert_shadow_radius(std::size_t w_max, std::uint64_t m_tot,
                            std::uint64_t shots, double delta);

// The systematic (truncation) side of a run, composed from per-segment
// tails. Sampling-side shot counts are derived separately because they use
// the realized expansion statistics.
struct BoundReport {
  double lambda_t = 0.0;        // lambda * t for the whole evolution
  std::size_t order = 0;        // per-segment truncation order
  std::size_t segments = 1;
  double norm_o = 1.0;
  double segment_tail = 0.0;    // propagator tail of one segment
  double unitary_error = 0.0;   // segments * segment_tail
  double total_systematic = 0.0;
  double gamma_l1_bound = 0.0;
  std::uint64_t term_bound = 0;
};

enum class SystematicKind {
  kPropagatorOnly,  // |tr(rho (U - U~))| <= unitary error
  kConjugated,      // conjugation_error_bound on top of the unitary error
  kDirect,          // two-sided tail (also valid for the commutator form)
};

BoundReport compose_report(double lambda, double t, std::size_t order,
                           std::size_t segments, std::size_t num_terms,
                           double norm_o, SystematicKind kind);

}  // namespace paulisim::bounds
