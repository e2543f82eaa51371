#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "paulisim/estimation.hpp"
#include "paulisim/expansion.hpp"
#include "paulisim/model.hpp"
#include "paulisim/pauli_sum.hpp"
#include "paulisim/rng.hpp"

namespace paulisim {

// Size guards for the dense backend. Matrices are materialized at 2^n x 2^n,
// so the caps are small on purpose; the environment variables
// PAULISIM_QUBIT_CAP and PAULISIM_DM_QUBIT_CAP override the defaults.
struct DenseOptions {
  std::size_t statevector_cap = 12;
  std::size_t density_cap = 8;

  static DenseOptions from_env();
};

// A state the simulator can measure: a pure state vector or a density
// matrix. Construction validates normalization (and, for density matrices,
// Hermiticity and positivity) to 1e-10.
class DenseState {
 public:
  static DenseState basis(std::string_view bits,
                          const DenseOptions& options = {});
  static DenseState from_vector(Eigen::VectorXcd amplitudes);
  static DenseState from_density(Eigen::MatrixXcd rho);
  static DenseState from_spec(const StateSpec& spec,
                              const DenseOptions& options = {});

  // JSON container: {"kind": "density-matrix", "n_qubits": n,
  //                  "entries": [[re, im], ...]} with 4^n row-major entries.
  static DenseState load_density_file(const std::string& path,
                                      const DenseOptions& options = {});
  void save_density_file(const std::string& path) const;

  std::size_t num_qubits() const { return n_; }
  bool is_density() const { return density_; }
  const Eigen::VectorXcd& vector() const;
  const Eigen::MatrixXcd& density() const;

  // The state as a density matrix regardless of representation.
  Eigen::MatrixXcd to_density() const;

 private:
  DenseState() = default;
  std::size_t n_ = 0;
  bool density_ = false;
  Eigen::VectorXcd vec_;
  Eigen::MatrixXcd rho_;
};

// Dense matrix of a Pauli sum. O(m 4^n); refuses above max_qubits.
Eigen::MatrixXcd sum_to_matrix(const PauliSum& sum,
                               std::size_t max_qubits = 12);

// Largest singular value. The distance oracle for bound-validity tests.
double operator_norm(const Eigen::MatrixXcd& m);

// Expectation of one string, computed termwise over basis indices without
// materializing any matrix. Deterministic chunked reduction.
Complex string_expectation(const DenseState& state, const PauliString& p);

// tr(sum * rho), folded over the sum's canonical term order.
Complex exact_expectation(const DenseState& state, const PauliSum& sum);

// Plain-fold reference implementation for tests and benchmarks.
Complex exact_expectation_serial(const DenseState& state, const PauliSum& sum);

// Exact evolution through the eigendecomposition of the dense Hamiltonian.
// Real time applies e^{-i t H}; imaginary time applies e^{-tau H} and
// renormalizes (norm 1, or unit trace for density matrices). This path
// deliberately shares no code with the series expansions it cross-checks.
DenseState exact_evolve(const DenseState& state, const HamiltonianSpec& h,
                        TimeParameter time,
                        const DenseOptions& options = {});

// One +-1 outcome of measuring the string, i.i.d. with mean tr(P rho).
// The identity returns +1 without consuming randomness.
int sample_pauli_measurement(const DenseState& state, const PauliString& p,
                             CounterRng& rng);

// Randomized-basis snapshots: per snapshot, a uniform X/Y/Z basis per qubit
// and one joint bit draw from the rotated state. Snapshot s uses the RNG
// substream (seed, shadow domain, s), so output is independent of thread
// count and scheduling.
std::vector<ShadowSnapshot> generate_shadows(const DenseState& state,
                                             std::size_t count,
                                             std::uint64_t seed);

// Single-thread reference with the identical per-snapshot streams.
std::vector<ShadowSnapshot> generate_shadows_serial(const DenseState& state,
                                                    std::size_t count,
                                                    std::uint64_t seed);

// MeasurementSource backed by the dense simulator. prepare() precomputes
// per-string means so concurrent sampling stays lock-free.
class DenseSource : public MeasurementSource {
 public:
  explicit DenseSource(DenseState state) : state_(std::move(state)) {}

  void prepare(const PauliSum& sum) override;
  int sample_pauli(const PauliString& string, CounterRng& rng) override;
  std::vector<ShadowSnapshot> draw_shadows(std::size_t count,
                                           std::uint64_t seed) override;
  bool supports_pauli_sampling() const override { return true; }
  bool supports_shadows() const override { return true; }

  const DenseState& state() const { return state_; }

 private:
  DenseState state_;
  std::unordered_map<PauliString, double, PauliStringHash> means_;
};

}  // namespace paulisim
