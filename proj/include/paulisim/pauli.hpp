#pragma once

#include <bit>
#include <compare>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

namespace paulisim {

using Complex = std::complex<double>;

// Coefficients with magnitude at or below this are treated as zero when a
// sum is canonicalized.
inline constexpr double kCoefficientTolerance = 1e-12;

// Strings are stored in two 64-bit masks, so this is a hard cap. Expansions
// become intractable long before it matters.
inline constexpr std::size_t kMaxQubits = 64;

// Integer power of i, reduced mod 4. Closed under addition; these are the
// only phases a product of Pauli strings can produce.
class Phase {
 public:
  constexpr Phase() = default;
  explicit constexpr Phase(unsigned exponent) : exp_(exponent & 3u) {}

  constexpr unsigned exponent() const { return exp_; }

  constexpr Complex to_complex() const {
    switch (exp_) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }

  friend constexpr Phase operator+(Phase a, Phase b) {
    return Phase(a.exp_ + b.exp_);
  }
  constexpr Phase& operator+=(Phase other) {
    exp_ = (exp_ + other.exp_) & 3u;
    return *this;
  }
  friend constexpr bool operator==(Phase, Phase) = default;

 private:
  unsigned exp_ = 0;
};

// A phase-free n-qubit Pauli string. Qubit q corresponds to bit q of both
// masks: x bit set means an X factor, z bit set means a Z factor, both set
// means Y, neither means identity. Phases produced by multiplication are
// returned separately and never stored here.
class PauliString {
 public:
  PauliString() = default;

  // Identity on n qubits.
  explicit PauliString(std::size_t n_qubits);

  PauliString(std::size_t n_qubits, std::uint64_t x_mask, std::uint64_t z_mask);

  // One character per qubit from {I,X,Y,Z}; the leftmost character is
  // qubit 0. Throws InputError on bad characters or unsupported length.
  static PauliString from_text(std::string_view text);

  // Identity everywhere except `letter` on one qubit.
  static PauliString single(std::size_t n_qubits, std::size_t qubit,
                            char letter);

  std::size_t num_qubits() const { return n_; }
  std::uint64_t x_mask() const { return x_; }
  std::uint64_t z_mask() const { return z_; }
  std::uint64_t support() const { return x_ | z_; }
  bool is_identity() const { return (x_ | z_) == 0; }

  // Number of qubits carrying a non-identity factor.
  std::size_t weight() const {
    return static_cast<std::size_t>(std::popcount(x_ | z_));
  }

  char letter(std::size_t qubit) const;
  std::string to_text() const;

  // True when the strings commute; otherwise they anticommute.
  bool commutes_with(const PauliString& other) const {
    unsigned overlap = (std::popcount(x_ & other.z_) +
                        std::popcount(z_ & other.x_)) & 1u;
    return overlap == 0;
  }

  friend bool operator==(const PauliString&, const PauliString&) = default;
  // Canonical order: qubit count, then x mask, then z mask. The identity
  // sorts first among strings of equal size.
  friend std::strong_ordering operator<=>(const PauliString&,
                                          const PauliString&) = default;

 private:
  std::uint32_t n_ = 0;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
};

struct PauliStringHash {
  std::size_t operator()(const PauliString& p) const {
    std::uint64_t h = p.x_mask() * 0x9E3779B97F4A7C15ull;
    h ^= h >> 32;
    h += p.z_mask() * 0xC2B2AE3D27D4EB4Full;
    h ^= h >> 29;
    h += p.num_qubits();
    h *= 0xD6E8FEB86659FD93ull;
    return static_cast<std::size_t>(h ^ (h >> 32));
  }
};

// Product of two strings of equal size: lhs * rhs = phase * string.
// The masks XOR; the phase follows from commuting every Z factor of lhs
// past every X factor of rhs and folding Y = i * X * Z on each qubit.
std::pair<Phase, PauliString> multiply(const PauliString& lhs,
                                       const PauliString& rhs);

// Phase of the product only (masks are cheap to compute at the call site).
Phase multiply_phase(const PauliString& lhs, const PauliString& rhs);

}  // namespace paulisim
