#pragma once

#include <complex>
#include <cstddef>
#include <unordered_map>
#include <utility>
#include <vector>

#include "paulisim/pauli.hpp"

namespace paulisim {

// Linear combination of Pauli strings with complex coefficients, kept as a
// canonical map: at most one entry per distinct string, product phases folded
// into the coefficients. All strings share the qubit count.
//
// Mutation order is observable only through floating point rounding, so every
// routine that builds a sum adds contributions in a documented deterministic
// order; results are identical across thread counts.
class PauliSum {
 public:
  using TermMap = std::unordered_map<PauliString, Complex, PauliStringHash>;
  using Term = std::pair<PauliString, Complex>;

  explicit PauliSum(std::size_t n_qubits);

  static PauliSum identity(std::size_t n_qubits, Complex coeff = 1.0);

  std::size_t num_qubits() const { return n_; }
  std::size_t num_terms() const { return terms_.size(); }
  const TermMap& terms() const { return terms_; }

  bool hermitian_hint() const { return hermitian_hint_; }
  void set_hermitian_hint(bool hint) { hermitian_hint_ = hint; }

  // Adds coeff * string, merging with an existing entry for the string.
  // Exact zeros that result are kept until canonicalize() runs.
  void add_term(Complex coeff, const PauliString& string);

  // Adds every term of other, in other's canonical order.
  void add(const PauliSum& other);

  void scale(Complex factor);

  // Coefficient of the given string, zero if absent.
  Complex coefficient(const PauliString& string) const;

  // Coefficient of the all-identity string.
  Complex identity_coefficient() const;

  // Sum of |coefficient| over terms, folded in canonical order.
  double l1_norm() const;

  // Largest string weight present; zero for an empty sum.
  std::size_t max_weight() const;

  // True when every coefficient has |imag| within tol.
  bool is_real(double tol = kCoefficientTolerance) const;

  // Terms with conjugated coefficients. Strings are Hermitian, so this is
  // the adjoint of the represented operator.
  PauliSum adjoint() const;

  // Terms sorted by the canonical string order. This is the iteration order
  // every deterministic fold in the library uses.
  std::vector<Term> sorted_terms() const;

  // Drops terms with |coefficient| <= tol. With hermitian set (or the stored
  // hint), imaginary parts within tol * max(1, l1) are zeroed and larger ones
  // raise InputError, since they indicate a non-Hermitian conjugation input.
  void canonicalize(double tol = kCoefficientTolerance);
  void canonicalize(double tol, bool hermitian);

  friend bool operator==(const PauliSum& a, const PauliSum& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }

 private:
  std::size_t n_;
  TermMap terms_;
  bool hermitian_hint_ = false;
};

// a * b as operators, duplicate strings merged. Contributions accumulate in
// row-major order over (a term, b term) pairs of the canonically sorted
// inputs; the OpenMP build evaluates rows in parallel but merges them in the
// same order, so the result is bit-identical to the serial build. When
// max_terms > 0 and the merged term count exceeds it, GuardError is thrown.
PauliSum sum_multiply(const PauliSum& a, const PauliSum& b,
                      std::size_t max_terms = 0);

// Naive reference implementation of sum_multiply (flat double loop, no
// buffering). Kept for tests and benchmarks.
PauliSum sum_multiply_serial(const PauliSum& a, const PauliSum& b,
                             std::size_t max_terms = 0);

// [a, b] = ab - ba. Only anticommuting string pairs contribute, each as
// 2 * phase * (product); commuting pairs are skipped outright.
PauliSum commutator(const PauliSum& a, const PauliSum& b);

// {a, b} = ab + ba. Only commuting string pairs contribute, each doubled.
PauliSum anticommutator(const PauliSum& a, const PauliSum& b);

// Single-string commutator [p, q] as a sum: empty when they commute,
// otherwise the single term 2 * phase * (p q).
PauliSum commutator(const PauliString& p, const PauliString& q);

}  // namespace paulisim
