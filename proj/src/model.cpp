#include "paulisim/model.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "paulisim/errors.hpp"

namespace paulisim {

namespace {

double parse_coefficient(std::string_view token, std::size_t line_no) {
  double value = 0.0;
  auto result = std::from_chars(token.data(), token.data() + token.size(),
                                value);
  if (result.ec != std::errc{} || result.ptr != token.data() + token.size()) {
    throw InputError("line " + std::to_string(line_no) +
                     ": cannot parse coefficient '" + std::string(token) +
                     "'");
  }
  if (!std::isfinite(value)) {
    throw InputError("line " + std::to_string(line_no) +
                     ": coefficient must be finite");
  }
  return value;
}

// Shared line-oriented reader for Hamiltonians and observables.
std::vector<HamiltonianTerm> parse_term_lines(std::string_view text,
                                              bool allow_identity) {
  std::vector<HamiltonianTerm> terms;
  std::unordered_map<PauliString, std::size_t, PauliStringHash> index;
  std::size_t n_qubits = 0;
  std::size_t line_no = 0;

  std::istringstream lines{std::string(text)};
  std::string line;
  while (std::getline(lines, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream fields(line);
    std::string coeff_token;
    std::string string_token;
    if (!(fields >> coeff_token)) continue;  // blank or comment-only line
    if (!(fields >> string_token)) {
      throw InputError("line " + std::to_string(line_no) +
                       ": expected 'coefficient pauli_string'");
    }
    std::string extra;
    if (fields >> extra) {
      throw InputError("line " + std::to_string(line_no) +
                       ": unexpected trailing field '" + extra + "'");
    }

    double coeff = parse_coefficient(coeff_token, line_no);
    PauliString string = PauliString::from_text(string_token);
    if (n_qubits == 0) {
      n_qubits = string.num_qubits();
    } else if (string.num_qubits() != n_qubits) {
      throw InputError("line " + std::to_string(line_no) +
                       ": string length " +
                       std::to_string(string.num_qubits()) +
                       " does not match earlier length " +
                       std::to_string(n_qubits));
    }
    if (!allow_identity && string.is_identity()) {
      throw InputError("line " + std::to_string(line_no) +
                       ": all-identity term is not allowed here");
    }

    if (auto it = index.find(string); it != index.end()) {
      terms[it->second].coeff += coeff;
    } else {
      index.emplace(string, terms.size());
      terms.push_back({coeff, string});
    }
  }

  // Exact cancellations drop out.
  std::vector<HamiltonianTerm> kept;
  kept.reserve(terms.size());
  for (const auto& term : terms) {
    if (term.coeff != 0.0) kept.push_back(term);
  }
  if (kept.empty()) {
    throw InputError("no terms (empty input or all terms cancelled)");
  }
  return kept;
}

HamiltonianSpec spec_from_terms(std::vector<HamiltonianTerm> terms) {
  HamiltonianSpec spec;
  spec.n_qubits = terms.front().string.num_qubits();
  spec.terms = std::move(terms);
  spec.lambda = 0.0;
  spec.max_weight = 0;
  for (const auto& term : spec.terms) {
    spec.lambda += std::abs(term.coeff);
    spec.max_weight = std::max(spec.max_weight, term.string.weight());
  }
  return spec;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

PauliSum HamiltonianSpec::to_sum() const {
  PauliSum sum(n_qubits);
  for (const auto& term : terms) {
    sum.add_term(term.coeff, term.string);
  }
  sum.set_hermitian_hint(true);
  return sum;
}

HamiltonianSpec parse_hamiltonian(std::string_view text) {
  return spec_from_terms(parse_term_lines(text, /*allow_identity=*/false));
}

HamiltonianSpec load_hamiltonian(const std::string& path) {
  return parse_hamiltonian(read_file(path));
}

std::string serialize_hamiltonian(const HamiltonianSpec& spec) {
  std::string out;
  char buffer[64];
  for (const auto& term : spec.terms) {
    std::snprintf(buffer, sizeof buffer, "%.17g", term.coeff);
    out += buffer;
    out += ' ';
    out += term.string.to_text();
    out += '\n';
  }
  return out;
}

HamiltonianSpec build_heisenberg_chain(std::size_t n_qubits, double coupling) {
  if (n_qubits < 2) {
    throw InputError("Heisenberg chain needs at least 2 qubits");
  }
  if (n_qubits > kMaxQubits) {
    throw InputError("Heisenberg chain exceeds the qubit cap");
  }
  if (coupling == 0.0 || !std::isfinite(coupling)) {
    throw InputError("Heisenberg coupling must be finite and nonzero");
  }
  std::vector<HamiltonianTerm> terms;
  terms.reserve(3 * (n_qubits - 1));
  for (std::size_t i = 0; i + 1 < n_qubits; ++i) {
    for (char letter : {'X', 'Y', 'Z'}) {
      std::uint64_t x = 0;
      std::uint64_t z = 0;
      if (letter != 'Z') x = (std::uint64_t{3} << i);
      if (letter != 'X') z = (std::uint64_t{3} << i);
      terms.push_back({coupling, PauliString(n_qubits, x, z)});
    }
  }
  return spec_from_terms(std::move(terms));
}

HamiltonianSpec scale_hamiltonian(const HamiltonianSpec& spec, double factor) {
  if (factor == 0.0 || !std::isfinite(factor)) {
    throw InputError("scale factor must be finite and nonzero");
  }
  std::vector<HamiltonianTerm> terms = spec.terms;
  for (auto& term : terms) {
    term.coeff *= factor;
  }
  return spec_from_terms(std::move(terms));
}

ObservableSpec ObservableSpec::from_sum(PauliSum sum) {
  sum.set_hermitian_hint(true);
  sum.canonicalize(kCoefficientTolerance, /*hermitian=*/true);
  if (sum.num_terms() == 0) {
    throw InputError("observable has no terms");
  }
  ObservableSpec spec{std::move(sum), 0.0, 0};
  spec.norm_bound = spec.sum.l1_norm();
  spec.max_weight = spec.sum.max_weight();
  return spec;
}

ObservableSpec parse_observable(std::string_view text) {
  auto terms = parse_term_lines(text, /*allow_identity=*/true);
  PauliSum sum(terms.front().string.num_qubits());
  for (const auto& term : terms) {
    sum.add_term(term.coeff, term.string);
  }
  return ObservableSpec::from_sum(std::move(sum));
}

ObservableSpec load_observable(const std::string& path) {
  return parse_observable(read_file(path));
}

StateSpec parse_state(std::string_view text) {
  auto split = text.find(':');
  if (split == std::string_view::npos) {
    throw InputError(
        "state spec must look like basis:<bits>, neel:<n> or dm:<path>");
  }
  std::string_view kind = text.substr(0, split);
  std::string_view arg = text.substr(split + 1);

  StateSpec spec;
  if (kind == "basis") {
    if (arg.empty() || arg.size() > kMaxQubits) {
      throw InputError("basis state needs 1.." + std::to_string(kMaxQubits) +
                       " bits");
    }
    for (char c : arg) {
      if (c != '0' && c != '1') {
        throw InputError(std::string("invalid bit character '") + c + "'");
      }
    }
    spec.kind = StateSpec::Kind::kBasis;
    spec.bits = std::string(arg);
  } else if (kind == "neel") {
    std::size_t n = 0;
    auto result = std::from_chars(arg.data(), arg.data() + arg.size(), n);
    if (result.ec != std::errc{} || result.ptr != arg.data() + arg.size() ||
        n == 0 || n > kMaxQubits) {
      throw InputError("neel:<n> needs a qubit count in 1.." +
                       std::to_string(kMaxQubits));
    }
    spec.kind = StateSpec::Kind::kBasis;
    spec.bits.resize(n);
    for (std::size_t q = 0; q < n; ++q) {
      spec.bits[q] = (q % 2 == 0) ? '0' : '1';
    }
  } else if (kind == "dm") {
    if (arg.empty()) {
      throw InputError("dm:<path> needs a file path");
    }
    spec.kind = StateSpec::Kind::kDensityFile;
    spec.path = std::string(arg);
  } else {
    throw InputError("unknown state preset '" + std::string(kind) + "'");
  }
  return spec;
}

}  // namespace paulisim
