#include "paulisim/pauli.hpp"

#include <bit>

#include "paulisim/errors.hpp"

namespace paulisim {

namespace {

void check_size(std::size_t n_qubits) {
  if (n_qubits == 0) {
    throw InputError("Pauli string needs at least one qubit");
  }
  if (n_qubits > kMaxQubits) {
    throw InputError("Pauli string exceeds the " +
                     std::to_string(kMaxQubits) + "-qubit cap");
  }
}

std::uint64_t qubit_bit(std::size_t qubit) {
  return std::uint64_t{1} << qubit;
}

}  // namespace

PauliString::PauliString(std::size_t n_qubits)
    : n_(static_cast<std::uint32_t>(n_qubits)) {
  check_size(n_qubits);
}

PauliString::PauliString(std::size_t n_qubits, std::uint64_t x_mask,
                         std::uint64_t z_mask)
    : n_(static_cast<std::uint32_t>(n_qubits)), x_(x_mask), z_(z_mask) {
  check_size(n_qubits);
  if (n_qubits < kMaxQubits) {
    std::uint64_t valid = (std::uint64_t{1} << n_qubits) - 1;
    if ((x_mask | z_mask) & ~valid) {
      throw InputError("Pauli mask has bits beyond the qubit count");
    }
  }
}

PauliString PauliString::from_text(std::string_view text) {
  check_size(text.size());
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  for (std::size_t q = 0; q < text.size(); ++q) {
    switch (text[q]) {
      case 'I': break;
      case 'X': x |= qubit_bit(q); break;
      case 'Y': x |= qubit_bit(q); z |= qubit_bit(q); break;
      case 'Z': z |= qubit_bit(q); break;
      default:
        throw InputError(std::string("invalid Pauli character '") +
                         text[q] + "' (expected I, X, Y or Z)");
    }
  }
  return PauliString(text.size(), x, z);
}

PauliString PauliString::single(std::size_t n_qubits, std::size_t qubit,
                                char letter) {
  check_size(n_qubits);
  if (qubit >= n_qubits) {
    throw InputError("qubit index out of range");
  }
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  switch (letter) {
    case 'I': break;
    case 'X': x = qubit_bit(qubit); break;
    case 'Y': x = qubit_bit(qubit); z = qubit_bit(qubit); break;
    case 'Z': z = qubit_bit(qubit); break;
    default:
      throw InputError(std::string("invalid Pauli character '") + letter +
                       "'");
  }
  return PauliString(n_qubits, x, z);
}

char PauliString::letter(std::size_t qubit) const {
  if (qubit >= n_) {
    throw InputError("qubit index out of range");
  }
  bool x = (x_ >> qubit) & 1;
  bool z = (z_ >> qubit) & 1;
  if (x && z) return 'Y';
  if (x) return 'X';
  if (z) return 'Z';
  return 'I';
}

std::string PauliString::to_text() const {
  std::string out(n_, 'I');
  for (std::size_t q = 0; q < n_; ++q) {
    out[q] = letter(q);
  }
  return out;
}

Phase multiply_phase(const PauliString& lhs, const PauliString& rhs) {
  // Per qubit, with the Hermitian convention P(x,z) = i^{xz} X^x Z^z:
  //   P(x1,z1) P(x2,z2) = i^{x1 z1 + x2 z2 + 2 z1 x2 - x3 z3} P(x3,z3)
  // where x3 = x1 ^ x2, z3 = z1 ^ z2. Exponents add over qubits mod 4.
  std::uint64_t x3 = lhs.x_mask() ^ rhs.x_mask();
  std::uint64_t z3 = lhs.z_mask() ^ rhs.z_mask();
  unsigned e = std::popcount(lhs.x_mask() & lhs.z_mask());
  e += std::popcount(rhs.x_mask() & rhs.z_mask());
  e += 2u * static_cast<unsigned>(std::popcount(lhs.z_mask() & rhs.x_mask()));
  e += 3u * static_cast<unsigned>(std::popcount(x3 & z3));
  return Phase(e);
}

std::pair<Phase, PauliString> multiply(const PauliString& lhs,
                                       const PauliString& rhs) {
  if (lhs.num_qubits() != rhs.num_qubits()) {
    throw InputError("cannot multiply Pauli strings of different sizes");
  }
  PauliString product(lhs.num_qubits(), lhs.x_mask() ^ rhs.x_mask(),
                      lhs.z_mask() ^ rhs.z_mask());
  return {multiply_phase(lhs, rhs), product};
}

}  // namespace paulisim
