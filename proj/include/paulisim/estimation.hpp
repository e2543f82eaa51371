#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "paulisim/pauli_sum.hpp"
#include "paulisim/rng.hpp"

namespace paulisim {

// Importance-sampling distribution over the terms of a real-coefficient
// Pauli sum: p_i = |gamma_i| / ||gamma||_1, with the coefficient sign kept
// per entry. Entries are in canonical string order and carry a cumulative
// table for O(log m) draws.
struct SamplingDistribution {
  struct Entry {
    PauliString string;
    double probability;
    double cumulative;
    int sign;  // +1 or -1
  };

  std::vector<Entry> entries;
  double gamma_l1 = 0.0;
  // Analytically separated identity contribution (zero unless the
  // distribution was built with separate_identity).
  double identity_offset = 0.0;

  // Builds from the real parts of the coefficients; |imag| above tolerance
  // raises InputError. With separate_identity the identity term is excluded
  // from sampling and its coefficient reported as identity_offset.
  static SamplingDistribution build(const PauliSum& sum,
                                    bool separate_identity = false);

  // Multinomial draw by inverse CDF. Requires a nonempty distribution.
  const Entry& draw(CounterRng& rng) const;
};

// One randomized-basis measurement record: a measurement basis per qubit
// (X, Y or Z) and the observed bit per qubit. Bases reuse the Pauli mask
// encoding; bit q of `bits` is qubit q's outcome.
struct ShadowSnapshot {
  std::uint32_t n_qubits = 0;
  std::uint64_t basis_x = 0;
  std::uint64_t basis_z = 0;
  std::uint64_t bits = 0;

  static ShadowSnapshot from_letters(std::string_view bases,
                                     std::string_view bits);
  std::string bases_text() const;
  std::string bits_text() const;
};

// JSONL exchange format: one {"bases": "XZY...", "bits": "010..."} object
// per line. Lines must agree on the qubit count.
std::vector<ShadowSnapshot> read_shadow_jsonl(std::istream& in);
std::vector<ShadowSnapshot> load_shadow_jsonl(const std::string& path);
void write_shadow_jsonl(std::ostream& out,
                        const std::vector<ShadowSnapshot>& snapshots);

// Where measurement outcomes come from: a simulator or replayed records.
// Implementations must be safe for concurrent sample_pauli calls with
// distinct rng handles once prepare() has run.
class MeasurementSource {
 public:
  virtual ~MeasurementSource() = default;

  // Called once with the sum about to be sampled; lets a simulator
  // precompute per-string expectations.
  virtual void prepare(const PauliSum& sum) {}

  // One +-1 outcome of measuring the given string, i.i.d. with the state's
  // expectation as mean. Identity must return +1.
  virtual int sample_pauli(const PauliString& string, CounterRng& rng) = 0;

  // A batch of randomized-basis snapshots.
  virtual std::vector<ShadowSnapshot> draw_shadows(std::size_t count,
                                                   std::uint64_t seed) = 0;

  virtual bool supports_pauli_sampling() const = 0;
  virtual bool supports_shadows() const = 0;
};

struct EstimateReport {
  Complex value = 0.0;
  double radius = 0.0;      // half-width of the confidence interval
  double confidence = 0.0;  // 1 - delta
  std::uint64_t shots = 0;  // total outcomes consumed
  std::uint64_t seed = 0;
  std::string method;
};

struct EstimationOptions {
  double delta = 0.05;
  bool separate_identity = false;
  // Median-of-means group count for shadow estimates; 1 = plain mean.
  std::size_t median_groups = 1;
};

// Importance-sampling estimate of tr(sum * rho) from `shots` single-string
// outcomes. Shots are split into fixed-width shards, one RNG substream per
// shard (derived from seed and shard index), so the result is identical for
// any thread count and any shard scheduling. Complex sums run as two real
// problems (lane 0: real parts, lane 1: imaginary parts), each with the full
// shot budget at delta/2; the reported radius is then the quadrature
// combination. The radius inverts the Hoeffding shot rule at 1 - delta.
EstimateReport importance_estimate(const PauliSum& sum,
                                   MeasurementSource& source,
                                   std::uint64_t shots, std::uint64_t seed,
                                   const EstimationOptions& options = {});

// Mean single-string shadow estimate: a snapshot contributes
// 3^{weight} * (-1)^{outcome parity on the support} when its bases match the
// string on the whole support, otherwise exactly 0. median_groups > 1
// replaces the mean by a median of contiguous group means.
double shadow_estimate_pauli(const std::vector<ShadowSnapshot>& snapshots,
                             const PauliString& string,
                             std::size_t median_groups = 1);

// Linear combination of per-string shadow estimates; works for complex
// coefficients directly. The radius inverts the shadow shot rule at the
// sum's own w_max and m_tot and scales by the coefficient l1 norm.
EstimateReport shadow_estimate_sum(const std::vector<ShadowSnapshot>& snapshots,
                                   const PauliSum& sum,
                                   const EstimationOptions& options = {});

// Overlap-with-propagator estimate tr(rho U~(t)): the expansion has complex
// coefficients, so importance sampling runs the two-lane scheme above.
EstimateReport loschmidt_estimate(const PauliSum& propagator,
                                  MeasurementSource& source,
                                  std::uint64_t shots, std::uint64_t seed,
                                  const EstimationOptions& options = {});

}  // namespace paulisim
