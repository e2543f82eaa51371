#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "paulisim/pauli.hpp"
#include "paulisim/pauli_sum.hpp"

namespace paulisim {

struct HamiltonianTerm {
  double coeff;
  PauliString string;
};

// Static description of a Hamiltonian H = sum_l coeff_l * string_l with real
// nonzero coefficients and no all-identity term. lambda is the l1 norm of
// the coefficients, folded in storage order; it upper-bounds the operator
// norm and drives every truncation and segmentation decision downstream.
struct HamiltonianSpec {
  std::size_t n_qubits = 0;
  std::vector<HamiltonianTerm> terms;
  double lambda = 0.0;
  std::size_t max_weight = 0;

  std::size_t num_terms() const { return terms.size(); }
  PauliSum to_sum() const;
};

// Text format: one "coefficient pauli_string" pair per line, '#' starts a
// comment, blank lines are skipped. Strings use one character per qubit from
// {I,X,Y,Z}, leftmost character = qubit 0, and must all have equal length.
// Duplicate strings are merged by adding coefficients (first occurrence keeps
// its position; exact cancellations drop the term). Throws InputError on
// malformed lines, identity terms, inconsistent lengths, or an empty result.
HamiltonianSpec parse_hamiltonian(std::string_view text);
HamiltonianSpec load_hamiltonian(const std::string& path);

// Inverse of parse_hamiltonian up to comment/blank lines; coefficients are
// printed with enough digits to round-trip exactly.
std::string serialize_hamiltonian(const HamiltonianSpec& spec);

// Open-chain nearest-neighbour Heisenberg model on n >= 2 qubits:
// H = J * sum_{i=0}^{n-2} (X_i X_{i+1} + Y_i Y_{i+1} + Z_i Z_{i+1}).
// 3(n-1) terms, lambda = 3(n-1)|J|.
HamiltonianSpec build_heisenberg_chain(std::size_t n_qubits, double coupling);

// Same terms with every coefficient scaled; lambda scales by |factor|.
HamiltonianSpec scale_hamiltonian(const HamiltonianSpec& spec, double factor);

// A Hermitian observable: real-weighted Pauli sum (identity terms allowed)
// plus the norm bound and max weight the bound formulas need. The default
// norm bound is the coefficient l1 norm.
struct ObservableSpec {
  PauliSum sum;
  double norm_bound = 0.0;
  std::size_t max_weight = 0;

  static ObservableSpec from_sum(PauliSum sum);
};

// Same text format as Hamiltonians; coefficients must be real.
ObservableSpec parse_observable(std::string_view text);
ObservableSpec load_observable(const std::string& path);

// Initial-state description. Supported specs:
//   "basis:<bits>"  computational basis state, one 0/1 per qubit,
//                   leftmost bit = qubit 0
//   "neel:<n>"      alternating basis state 0101... on n qubits
//   "dm:<path>"     density-matrix file reference (JSON container)
struct StateSpec {
  enum class Kind { kBasis, kDensityFile };
  Kind kind = Kind::kBasis;
  std::string bits;
  std::string path;
};

StateSpec parse_state(std::string_view text);

}  // namespace paulisim
