#include "paulisim/dense.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "paulisim/errors.hpp"
#include "paulisim/parallel.hpp"

namespace paulisim {

namespace {

constexpr double kStateTolerance = 1e-10;

std::size_t parse_cap_env(const char* name, std::size_t fallback) {
  const char* raw = std::getenv(name);
  if (raw == nullptr || *raw == '\0') return fallback;
  char* end = nullptr;
  long value = std::strtol(raw, &end, 10);
  if (end == nullptr || *end != '\0' || value < 1 || value > 14) {
    throw InputError(std::string(name) + " must be an integer in 1..14");
  }
  return static_cast<std::size_t>(value);
}

std::size_t qubits_for_dim(Eigen::Index dim) {
  if (dim < 2 || (dim & (dim - 1)) != 0) {
    throw InputError("state dimension must be a power of two, >= 2");
  }
  return static_cast<std::size_t>(std::countr_zero(
      static_cast<std::uint64_t>(dim)));
}

// Phase of P(x,z) applied to |b>: P|b> = i^{|x&z|} (-1)^{|z&b|} |b^x>.
inline Complex column_phase(std::uint64_t x, std::uint64_t z,
                            std::uint64_t b) {
  Complex phase = Phase(static_cast<unsigned>(std::popcount(x & z)))
                      .to_complex();
  if (std::popcount(z & b) & 1) phase = -phase;
  return phase;
}

// Applies a single-qubit gate {{g00,g01},{g10,g11}} to a state vector.
void apply_gate_vec(Eigen::VectorXcd& psi, std::size_t qubit, Complex g00,
                    Complex g01, Complex g10, Complex g11) {
  std::uint64_t bit = std::uint64_t{1} << qubit;
  for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(psi.size()); ++b) {
    if (b & bit) continue;
    Complex a0 = psi[static_cast<Eigen::Index>(b)];
    Complex a1 = psi[static_cast<Eigen::Index>(b | bit)];
    psi[static_cast<Eigen::Index>(b)] = g00 * a0 + g01 * a1;
    psi[static_cast<Eigen::Index>(b | bit)] = g10 * a0 + g11 * a1;
  }
}

// rho -> G rho G^dag for the same single-qubit gate.
void apply_gate_rho(Eigen::MatrixXcd& rho, std::size_t qubit, Complex g00,
                    Complex g01, Complex g10, Complex g11) {
  std::uint64_t bit = std::uint64_t{1} << qubit;
  auto dim = static_cast<std::uint64_t>(rho.rows());
  for (std::uint64_t col = 0; col < dim; ++col) {
    for (std::uint64_t b = 0; b < dim; ++b) {
      if (b & bit) continue;
      Complex a0 = rho(static_cast<Eigen::Index>(b),
                       static_cast<Eigen::Index>(col));
      Complex a1 = rho(static_cast<Eigen::Index>(b | bit),
                       static_cast<Eigen::Index>(col));
      rho(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(col)) =
          g00 * a0 + g01 * a1;
      rho(static_cast<Eigen::Index>(b | bit),
          static_cast<Eigen::Index>(col)) = g10 * a0 + g11 * a1;
    }
  }
  for (std::uint64_t row = 0; row < dim; ++row) {
    for (std::uint64_t b = 0; b < dim; ++b) {
      if (b & bit) continue;
      Complex a0 = rho(static_cast<Eigen::Index>(row),
                       static_cast<Eigen::Index>(b));
      Complex a1 = rho(static_cast<Eigen::Index>(row),
                       static_cast<Eigen::Index>(b | bit));
      rho(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(b)) =
          std::conj(g00) * a0 + std::conj(g01) * a1;
      rho(static_cast<Eigen::Index>(row),
          static_cast<Eigen::Index>(b | bit)) =
          std::conj(g10) * a0 + std::conj(g11) * a1;
    }
  }
}

// Rotation taking the chosen measurement basis to the computational basis:
// X -> H, Y -> H * diag(1, -i), Z -> identity.
template <typename Apply>
void apply_basis_rotation(char basis, std::size_t qubit, Apply&& apply) {
  constexpr double s = 0.70710678118654752440;
  switch (basis) {
    case 'X':
      apply(qubit, Complex{s, 0}, Complex{s, 0}, Complex{s, 0},
            Complex{-s, 0});
      break;
    case 'Y':
      apply(qubit, Complex{s, 0}, Complex{0, -s}, Complex{s, 0},
            Complex{0, s});
      break;
    default:
      break;
  }
}

ShadowSnapshot one_shadow(const DenseState& state, CounterRng& rng) {
  std::size_t n = state.num_qubits();
  ShadowSnapshot snap;
  snap.n_qubits = static_cast<std::uint32_t>(n);
  std::string bases(n, 'Z');
  for (std::size_t q = 0; q < n; ++q) {
    switch (rng.uniform_below(3)) {
      case 0:
        bases[q] = 'X';
        snap.basis_x |= std::uint64_t{1} << q;
        break;
      case 1:
        bases[q] = 'Y';
        snap.basis_x |= std::uint64_t{1} << q;
        snap.basis_z |= std::uint64_t{1} << q;
        break;
      default:
        snap.basis_z |= std::uint64_t{1} << q;
        break;
    }
  }

  std::uint64_t dim = std::uint64_t{1} << n;
  double u = rng.next_double();
  double acc = 0.0;
  std::uint64_t outcome = dim - 1;
  if (!state.is_density()) {
    Eigen::VectorXcd psi = state.vector();
    for (std::size_t q = 0; q < n; ++q) {
      apply_basis_rotation(bases[q], q,
                           [&psi](std::size_t qubit, Complex a, Complex b,
                                  Complex c, Complex d) {
                             apply_gate_vec(psi, qubit, a, b, c, d);
                           });
    }
    for (std::uint64_t b = 0; b < dim; ++b) {
      acc += std::norm(psi[static_cast<Eigen::Index>(b)]);
      if (u < acc) {
        outcome = b;
        break;
      }
    }
  } else {
    Eigen::MatrixXcd rho = state.density();
    for (std::size_t q = 0; q < n; ++q) {
      apply_basis_rotation(bases[q], q,
                           [&rho](std::size_t qubit, Complex a, Complex b,
                                  Complex c, Complex d) {
                             apply_gate_rho(rho, qubit, a, b, c, d);
                           });
    }
    for (std::uint64_t b = 0; b < dim; ++b) {
      acc += rho(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b))
                 .real();
      if (u < acc) {
        outcome = b;
        break;
      }
    }
  }
  snap.bits = outcome;
  return snap;
}

}  // namespace

DenseOptions DenseOptions::from_env() {
  DenseOptions options;
  options.statevector_cap =
      parse_cap_env("PAULISIM_QUBIT_CAP", options.statevector_cap);
  options.density_cap =
      parse_cap_env("PAULISIM_DM_QUBIT_CAP", options.density_cap);
  return options;
}

DenseState DenseState::basis(std::string_view bits,
                             const DenseOptions& options) {
  if (bits.empty()) {
    throw InputError("basis state needs at least one bit");
  }
  if (bits.size() > options.statevector_cap) {
    throw GuardError("basis state on " + std::to_string(bits.size()) +
                     " qubits exceeds the dense cap of " +
                     std::to_string(options.statevector_cap));
  }
  std::uint64_t index = 0;
  for (std::size_t q = 0; q < bits.size(); ++q) {
    if (bits[q] == '1') {
      index |= std::uint64_t{1} << q;
    } else if (bits[q] != '0') {
      throw InputError("basis bits must be 0 or 1");
    }
  }
  DenseState state;
  state.n_ = bits.size();
  state.density_ = false;
  state.vec_ = Eigen::VectorXcd::Zero(Eigen::Index{1} << bits.size());
  state.vec_[static_cast<Eigen::Index>(index)] = 1.0;
  return state;
}

DenseState DenseState::from_vector(Eigen::VectorXcd amplitudes) {
  DenseState state;
  state.n_ = qubits_for_dim(amplitudes.size());
  if (std::abs(amplitudes.norm() - 1.0) > kStateTolerance) {
    throw InputError("state vector is not normalized");
  }
  state.density_ = false;
  state.vec_ = std::move(amplitudes);
  return state;
}

DenseState DenseState::from_density(Eigen::MatrixXcd rho) {
  DenseState state;
  if (rho.rows() != rho.cols()) {
    throw InputError("density matrix must be square");
  }
  state.n_ = qubits_for_dim(rho.rows());
  if (std::abs(rho.trace() - Complex{1.0, 0.0}) > kStateTolerance) {
    throw InputError("density matrix trace must be 1");
  }
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kStateTolerance) {
    throw InputError("density matrix must be Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho);
  if (solver.eigenvalues().minCoeff() < -kStateTolerance) {
    throw InputError("density matrix must be positive semidefinite");
  }
  state.density_ = true;
  state.rho_ = std::move(rho);
  return state;
}

DenseState DenseState::from_spec(const StateSpec& spec,
                                 const DenseOptions& options) {
  if (spec.kind == StateSpec::Kind::kBasis) {
    return basis(spec.bits, options);
  }
  return load_density_file(spec.path, options);
}

DenseState DenseState::load_density_file(const std::string& path,
                                         const DenseOptions& options) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open density-matrix file: " + path);
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& err) {
    throw InputError("density-matrix file " + path + ": " + err.what());
  }
  if (doc.value("kind", "") != "density-matrix" ||
      !doc.contains("n_qubits") || !doc.contains("entries")) {
    throw InputError(
        "density-matrix file needs kind=density-matrix, n_qubits, entries");
  }
  std::size_t n = doc["n_qubits"].get<std::size_t>();
  if (n == 0 || n > options.density_cap) {
    throw GuardError("density matrix on " + std::to_string(n) +
                     " qubits exceeds the cap of " +
                     std::to_string(options.density_cap));
  }
  std::uint64_t dim = std::uint64_t{1} << n;
  const auto& entries = doc["entries"];
  if (entries.size() != dim * dim) {
    throw InputError("density-matrix file has " +
                     std::to_string(entries.size()) + " entries, expected " +
                     std::to_string(dim * dim));
  }
  Eigen::MatrixXcd rho(static_cast<Eigen::Index>(dim),
                       static_cast<Eigen::Index>(dim));
  for (std::uint64_t row = 0; row < dim; ++row) {
    for (std::uint64_t col = 0; col < dim; ++col) {
      const auto& cell = entries[row * dim + col];
      if (!cell.is_array() || cell.size() != 2) {
        throw InputError("density-matrix entries must be [re, im] pairs");
      }
      rho(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
          Complex{cell[0].get<double>(), cell[1].get<double>()};
    }
  }
  return from_density(std::move(rho));
}

void DenseState::save_density_file(const std::string& path) const {
  Eigen::MatrixXcd rho = to_density();
  nlohmann::json doc;
  doc["kind"] = "density-matrix";
  doc["n_qubits"] = n_;
  nlohmann::json entries = nlohmann::json::array();
  for (Eigen::Index row = 0; row < rho.rows(); ++row) {
    for (Eigen::Index col = 0; col < rho.cols(); ++col) {
      entries.push_back({rho(row, col).real(), rho(row, col).imag()});
    }
  }
  doc["entries"] = std::move(entries);
  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot write density-matrix file: " + path);
  }
  out << doc.dump() << '\n';
}

const Eigen::VectorXcd& DenseState::vector() const {
  if (density_) {
    throw InputError("state is a density matrix, not a vector");
  }
  return vec_;
}

const Eigen::MatrixXcd& DenseState::density() const {
  if (!density_) {
    throw InputError("state is a vector, not a density matrix");
  }
  return rho_;
}

Eigen::MatrixXcd DenseState::to_density() const {
  if (density_) return rho_;
  return vec_ * vec_.adjoint();
}

Eigen::MatrixXcd sum_to_matrix(const PauliSum& sum, std::size_t max_qubits) {
  std::size_t n = sum.num_qubits();
  if (n > max_qubits) {
    throw GuardError("dense matrix on " + std::to_string(n) +
                     " qubits exceeds the cap of " +
                     std::to_string(max_qubits));
  }
  std::uint64_t dim = std::uint64_t{1} << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(
      static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const auto& [string, coeff] : sum.sorted_terms()) {
    std::uint64_t x = string.x_mask();
    std::uint64_t z = string.z_mask();
    for (std::uint64_t b = 0; b < dim; ++b) {
      m(static_cast<Eigen::Index>(b ^ x), static_cast<Eigen::Index>(b)) +=
          coeff * column_phase(x, z, b);
    }
  }
  return m;
}

double operator_norm(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

Complex string_expectation(const DenseState& state, const PauliString& p) {
  if (p.num_qubits() != state.num_qubits()) {
    throw InputError("string and state qubit counts differ");
  }
  std::uint64_t x = p.x_mask();
  std::uint64_t z = p.z_mask();
  std::uint64_t dim = std::uint64_t{1} << state.num_qubits();
  Complex base = Phase(static_cast<unsigned>(std::popcount(x & z)))
                     .to_complex();
  if (!state.is_density()) {
    const Eigen::VectorXcd& psi = state.vector();
    return deterministic_sum<Complex>(dim, [&](std::size_t b) {
      std::uint64_t idx = static_cast<std::uint64_t>(b);
      Complex phase = (std::popcount(z & idx) & 1) ? -base : base;
      return std::conj(psi[static_cast<Eigen::Index>(idx ^ x)]) * phase *
             psi[static_cast<Eigen::Index>(idx)];
    });
  }
  const Eigen::MatrixXcd& rho = state.density();
  return deterministic_sum<Complex>(dim, [&](std::size_t b) {
    std::uint64_t idx = static_cast<std::uint64_t>(b);
    Complex phase = (std::popcount(z & idx) & 1) ? -base : base;
    return phase * rho(static_cast<Eigen::Index>(idx),
                       static_cast<Eigen::Index>(idx ^ x));
  });
}

Complex exact_expectation(const DenseState& state, const PauliSum& sum) {
  Complex total = 0.0;
  for (const auto& [string, coeff] : sum.sorted_terms()) {
    total += coeff * string_expectation(state, string);
  }
  return total;
}

Complex exact_expectation_serial(const DenseState& state,
                                 const PauliSum& sum) {
  Complex total = 0.0;
  std::uint64_t dim = std::uint64_t{1} << state.num_qubits();
  for (const auto& [string, coeff] : sum.sorted_terms()) {
    std::uint64_t x = string.x_mask();
    std::uint64_t z = string.z_mask();
    Complex base = Phase(static_cast<unsigned>(std::popcount(x & z)))
                       .to_complex();
    Complex term = 0.0;
    for (std::uint64_t b = 0; b < dim; ++b) {
      Complex phase = (std::popcount(z & b) & 1) ? -base : base;
      if (!state.is_density()) {
        term += std::conj(state.vector()[static_cast<Eigen::Index>(b ^ x)]) *
                phase * state.vector()[static_cast<Eigen::Index>(b)];
      } else {
        term += phase * state.density()(static_cast<Eigen::Index>(b),
                                        static_cast<Eigen::Index>(b ^ x));
      }
    }
    total += coeff * term;
  }
  return total;
}

DenseState exact_evolve(const DenseState& state, const HamiltonianSpec& h,
                        TimeParameter time, const DenseOptions& options) {
  if (h.n_qubits != state.num_qubits()) {
    throw InputError("Hamiltonian and state qubit counts differ");
  }
  // Density-matrix evolution conjugates a full 2^n x 2^n matrix, so the
  // tighter density cap governs it.
  std::size_t cap = state.is_density() ? options.density_cap
                                       : options.statevector_cap;
  Eigen::MatrixXcd h_mat = sum_to_matrix(h.to_sum(), cap);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h_mat);
  const Eigen::VectorXd& evals = solver.eigenvalues();
  const Eigen::MatrixXcd& basis = solver.eigenvectors();

  Eigen::VectorXcd weights(evals.size());
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    weights[i] = time.imaginary
                     ? Complex{std::exp(-time.value * evals[i]), 0.0}
                     : std::exp(Complex{0.0, -time.value * evals[i]});
  }
  Eigen::MatrixXcd op =
      basis * weights.asDiagonal() * basis.adjoint();

  if (!state.is_density()) {
    Eigen::VectorXcd psi = op * state.vector();
    if (time.imaginary) {
      double norm = psi.norm();
      if (norm <= 0.0) {
        throw RefusalError("imaginary-time evolution annihilated the state");
      }
      psi /= norm;
    } else {
      // Unitary evolution preserves the norm; renormalize away the rounding
      // drift so repeated evolutions cannot accumulate it.
      psi /= psi.norm();
    }
    return DenseState::from_vector(std::move(psi));
  }
  Eigen::MatrixXcd rho = time.imaginary
                             ? Eigen::MatrixXcd(op * state.density() * op)
                             : Eigen::MatrixXcd(op * state.density() *
                                                op.adjoint());
  double trace = rho.trace().real();
  if (time.imaginary && trace <= 0.0) {
    throw RefusalError("imaginary-time evolution annihilated the state");
  }
  rho /= trace;
  return DenseState::from_density(std::move(rho));
}

int sample_pauli_measurement(const DenseState& state, const PauliString& p,
                             CounterRng& rng) {
  if (p.is_identity()) return 1;
  double mean = string_expectation(state, p).real();
  mean = std::clamp(mean, -1.0, 1.0);
  return rng.bernoulli(0.5 * (1.0 + mean)) ? 1 : -1;
}

std::vector<ShadowSnapshot> generate_shadows(const DenseState& state,
                                             std::size_t count,
                                             std::uint64_t seed) {
  std::vector<ShadowSnapshot> out(count);
#pragma omp parallel for schedule(static)
  for (long long s = 0; s < static_cast<long long>(count); ++s) {
    CounterRng rng(seed, rng_stream(RngDomain::kShadow, 0,
                                    static_cast<std::uint64_t>(s)));
    out[static_cast<std::size_t>(s)] = one_shadow(state, rng);
  }
  return out;
}

std::vector<ShadowSnapshot> generate_shadows_serial(const DenseState& state,
                                                    std::size_t count,
                                                    std::uint64_t seed) {
  std::vector<ShadowSnapshot> out(count);
  for (std::size_t s = 0; s < count; ++s) {
    CounterRng rng(seed, rng_stream(RngDomain::kShadow, 0, s));
    out[s] = one_shadow(state, rng);
  }
  return out;
}

void DenseSource::prepare(const PauliSum& sum) {
  auto terms = sum.sorted_terms();
  std::vector<double> values(terms.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(terms.size()); ++i) {
    values[static_cast<std::size_t>(i)] =
        string_expectation(state_, terms[static_cast<std::size_t>(i)].first)
            .real();
  }
  for (std::size_t i = 0; i < terms.size(); ++i) {
    means_[terms[i].first] = std::clamp(values[i], -1.0, 1.0);
  }
}

int DenseSource::sample_pauli(const PauliString& string, CounterRng& rng) {
  if (string.is_identity()) return 1;
  auto it = means_.find(string);
  double mean =
      it != means_.end()
          ? it->second
          : std::clamp(string_expectation(state_, string).real(), -1.0, 1.0);
  return rng.bernoulli(0.5 * (1.0 + mean)) ? 1 : -1;
}

std::vector<ShadowSnapshot> DenseSource::draw_shadows(std::size_t count,
                                                      std::uint64_t seed) {
  return generate_shadows(state_, count, seed);
}

}  // namespace paulisim
