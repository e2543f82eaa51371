#include "paulisim/pauli_sum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "paulisim/errors.hpp"

namespace paulisim {

namespace {

void check_same_size(const PauliSum& a, const PauliSum& b) {
  if (a.num_qubits() != b.num_qubits()) {
    throw InputError("Pauli sums act on different qubit counts");
  }
}

void check_term_cap(std::size_t count, std::size_t max_terms) {
  if (max_terms > 0 && count > max_terms) {
    throw GuardError("distinct term count " + std::to_string(count) +
                     " exceeds the cap of " + std::to_string(max_terms));
  }
}

}  // namespace

PauliSum::PauliSum(std::size_t n_qubits) : n_(n_qubits) {
  if (n_qubits == 0 || n_qubits > kMaxQubits) {
    throw InputError("Pauli sum needs 1.." + std::to_string(kMaxQubits) +
                     " qubits");
  }
}

PauliSum PauliSum::identity(std::size_t n_qubits, Complex coeff) {
  PauliSum s(n_qubits);
  s.add_term(coeff, PauliString(n_qubits));
  return s;
}

void PauliSum::add_term(Complex coeff, const PauliString& string) {
  if (string.num_qubits() != n_) {
    throw InputError("term qubit count does not match the sum");
  }
  terms_[string] += coeff;
}

void PauliSum::add(const PauliSum& other) {
  check_same_size(*this, other);
  for (const auto& [string, coeff] : other.sorted_terms()) {
    terms_[string] += coeff;
  }
}

void PauliSum::scale(Complex factor) {
  for (auto& [string, coeff] : terms_) {
    coeff *= factor;
  }
}

Complex PauliSum::coefficient(const PauliString& string) const {
  auto it = terms_.find(string);
  return it == terms_.end() ? Complex{0.0, 0.0} : it->second;
}

Complex PauliSum::identity_coefficient() const {
  return coefficient(PauliString(n_));
}

double PauliSum::l1_norm() const {
  double total = 0.0;
  for (const auto& [string, coeff] : sorted_terms()) {
    total += std::abs(coeff);
  }
  return total;
}

std::size_t PauliSum::max_weight() const {
  std::size_t w = 0;
  for (const auto& [string, coeff] : terms_) {
    w = std::max(w, string.weight());
  }
  return w;
}

bool PauliSum::is_real(double tol) const {
  for (const auto& [string, coeff] : terms_) {
    if (std::abs(coeff.imag()) > tol) return false;
  }
  return true;
}

PauliSum PauliSum::adjoint() const {
  PauliSum out(n_);
  out.hermitian_hint_ = hermitian_hint_;
  for (const auto& [string, coeff] : terms_) {
    out.terms_.emplace(string, std::conj(coeff));
  }
  return out;
}

std::vector<PauliSum::Term> PauliSum::sorted_terms() const {
  std::vector<Term> out(terms_.begin(), terms_.end());
  std::sort(out.begin(), out.end(),
            [](const Term& a, const Term& b) { return a.first < b.first; });
  return out;
}

void PauliSum::canonicalize(double tol) { canonicalize(tol, hermitian_hint_); }

void PauliSum::canonicalize(double tol, bool hermitian) {
  if (hermitian) {
    // Imaginary residue from rounding scales with the overall magnitude.
    double scale = 0.0;
    for (const auto& [string, coeff] : terms_) {
      scale += std::abs(coeff);
    }
    double imag_tol = tol * std::max(1.0, scale);
    for (auto& [string, coeff] : terms_) {
      if (std::abs(coeff.imag()) > imag_tol) {
        throw InputError(
            "sum marked Hermitian has imaginary coefficient " +
            std::to_string(coeff.imag()) + " on " + string.to_text());
      }
      coeff = Complex{coeff.real(), 0.0};
    }
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (std::abs(it->second) <= tol) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
}

namespace {

// Shared core of sum_multiply and the commutator/anticommutator kernels.
// Rows are the sorted terms of a; row r's contributions are generated in
// column order and merged into the output in row order, in waves of a fixed
// width. The reduction shape is independent of the thread count, so the
// accumulated coefficients are bit-identical to a serial run.
template <typename RowFn>
PauliSum row_merge_product(const PauliSum& a, const PauliSum& b,
                           std::size_t max_terms, RowFn&& fill_row) {
  auto avec = a.sorted_terms();
  auto bvec = b.sorted_terms();
  PauliSum out(a.num_qubits());

  constexpr std::size_t kWave = 64;
  std::vector<std::vector<PauliSum::Term>> rows(
      std::min(kWave, avec.size()));

  for (std::size_t wave = 0; wave < avec.size(); wave += kWave) {
    std::size_t count = std::min(kWave, avec.size() - wave);
#pragma omp parallel for schedule(static)
    for (long long k = 0; k < static_cast<long long>(count); ++k) {
      auto& row = rows[static_cast<std::size_t>(k)];
      row.clear();
      fill_row(avec[wave + static_cast<std::size_t>(k)], bvec, row);
    }
    for (std::size_t k = 0; k < count; ++k) {
      for (const auto& [string, coeff] : rows[k]) {
        out.add_term(coeff, string);
      }
      check_term_cap(out.num_terms(), max_terms);
    }
  }
  return out;
}

}  // namespace

PauliSum sum_multiply(const PauliSum& a, const PauliSum& b,
                      std::size_t max_terms) {
  check_same_size(a, b);
  return row_merge_product(
      a, b, max_terms,
      [](const PauliSum::Term& at, const std::vector<PauliSum::Term>& bvec,
         std::vector<PauliSum::Term>& row) {
        row.reserve(bvec.size());
        for (const auto& bt : bvec) {
          auto [phase, string] = multiply(at.first, bt.first);
          row.emplace_back(string,
                           at.second * bt.second * phase.to_complex());
        }
      });
}

PauliSum sum_multiply_serial(const PauliSum& a, const PauliSum& b,
                             std::size_t max_terms) {
  check_same_size(a, b);
  PauliSum out(a.num_qubits());
  for (const auto& at : a.sorted_terms()) {
    for (const auto& bt : b.sorted_terms()) {
      auto [phase, string] = multiply(at.first, bt.first);
      out.add_term(at.second * bt.second * phase.to_complex(), string);
    }
    check_term_cap(out.num_terms(), max_terms);
  }
  return out;
}

PauliSum commutator(const PauliSum& a, const PauliSum& b) {
  check_same_size(a, b);
  return row_merge_product(
      a, b, 0,
      [](const PauliSum::Term& at, const std::vector<PauliSum::Term>& bvec,
         std::vector<PauliSum::Term>& row) {
        for (const auto& bt : bvec) {
          if (at.first.commutes_with(bt.first)) continue;
          // ab = -ba here, so [a, b] = 2ab.
          auto [phase, string] = multiply(at.first, bt.first);
          row.emplace_back(string,
                           2.0 * at.second * bt.second * phase.to_complex());
        }
      });
}

PauliSum anticommutator(const PauliSum& a, const PauliSum& b) {
  check_same_size(a, b);
  return row_merge_product(
      a, b, 0,
      [](const PauliSum::Term& at, const std::vector<PauliSum::Term>& bvec,
         std::vector<PauliSum::Term>& row) {
        for (const auto& bt : bvec) {
          if (!at.first.commutes_with(bt.first)) continue;
          auto [phase, string] = multiply(at.first, bt.first);
          row.emplace_back(string,
                           2.0 * at.second * bt.second * phase.to_complex());
        }
      });
}

PauliSum commutator(const PauliString& p, const PauliString& q) {
  if (p.num_qubits() != q.num_qubits()) {
    throw InputError("Pauli strings act on different qubit counts");
  }
  PauliSum out(p.num_qubits());
  if (!p.commutes_with(q)) {
    auto [phase, string] = multiply(p, q);
    out.add_term(2.0 * phase.to_complex(), string);
  }
  return out;
}

}  // namespace paulisim
