#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <string>

#include "paulisim/dense.hpp"
#include "paulisim/errors.hpp"
#include "paulisim/expansion.hpp"
#include "paulisim/model.hpp"
#include "paulisim/rng.hpp"

using namespace paulisim;

namespace {

bool close(Complex a, Complex b, double tol = 1e-10) {
  return std::abs(a - b) <= tol;
}

}  // namespace

TEST_CASE("basis states have the right amplitudes") {
  DenseState zero = DenseState::basis("0");
  CHECK(zero.num_qubits() == 1);
  CHECK_FALSE(zero.is_density());
  CHECK(zero.vector()(0) == Complex{1.0, 0.0});
  CHECK(zero.vector()(1) == Complex{0.0, 0.0});

  // Leftmost character is qubit 0; qubit q selects bit q of the index.
  DenseState ten = DenseState::basis("10");
  CHECK(ten.vector()(1) == Complex{1.0, 0.0});

  CHECK_THROWS_AS(DenseState::basis("2"), InputError);
  CHECK_THROWS_AS(DenseState::basis(""), InputError);
  CHECK_THROWS_AS(DenseState::basis("0000000000000"), GuardError);
}

TEST_CASE("vector and density constructors validate") {
  Eigen::VectorXcd good(2);
  good << Complex{std::sqrt(0.5), 0.0}, Complex{0.0, std::sqrt(0.5)};
  DenseState state = DenseState::from_vector(good);
  CHECK(state.num_qubits() == 1);

  Eigen::VectorXcd bad(2);
  bad << 1.0, 1.0;
  CHECK_THROWS_AS(DenseState::from_vector(bad), InputError);
  Eigen::VectorXcd odd(3);
  odd << 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(DenseState::from_vector(odd), InputError);

  Eigen::MatrixXcd mixed = Eigen::MatrixXcd::Identity(2, 2) * 0.5;
  DenseState rho = DenseState::from_density(mixed);
  CHECK(rho.is_density());
  CHECK(close(rho.to_density()(0, 0), Complex{0.5, 0.0}));

  Eigen::MatrixXcd trace_bad = Eigen::MatrixXcd::Identity(2, 2);
  CHECK_THROWS_AS(DenseState::from_density(trace_bad), InputError);
  Eigen::MatrixXcd negative(2, 2);
  negative << 1.5, 0.0, 0.0, -0.5;
  CHECK_THROWS_AS(DenseState::from_density(negative), InputError);
}

TEST_CASE("sum_to_matrix reproduces the Pauli matrices") {
  PauliSum x(1);
  x.add_term(1.0, PauliString::from_text("X"));
  Eigen::MatrixXcd mx = sum_to_matrix(x);
  CHECK(close(mx(0, 1), Complex{1.0, 0.0}));
  CHECK(close(mx(1, 0), Complex{1.0, 0.0}));
  CHECK(close(mx(0, 0), Complex{0.0, 0.0}));

  PauliSum y(1);
  y.add_term(1.0, PauliString::from_text("Y"));
  Eigen::MatrixXcd my = sum_to_matrix(y);
  CHECK(close(my(0, 1), Complex{0.0, -1.0}));
  CHECK(close(my(1, 0), Complex{0.0, 1.0}));

  // Qubit 0 is the low index bit: ZI acts as diag(1,-1,1,-1).
  PauliSum zi(2);
  zi.add_term(1.0, PauliString::from_text("ZI"));
  Eigen::MatrixXcd mzi = sum_to_matrix(zi);
  CHECK(close(mzi(0, 0), Complex{1.0, 0.0}));
  CHECK(close(mzi(1, 1), Complex{-1.0, 0.0}));
  CHECK(close(mzi(2, 2), Complex{1.0, 0.0}));
  CHECK(close(mzi(3, 3), Complex{-1.0, 0.0}));

  CHECK(operator_norm(mzi) == doctest::Approx(1.0));
  CHECK_THROWS_AS(sum_to_matrix(PauliSum::identity(13)), GuardError);
}

TEST_CASE("sum_to_matrix is an algebra homomorphism") {
  CounterRng rng(3, 0);
  static const char kLetters[4] = {'I', 'X', 'Y', 'Z'};
  for (int trial = 0; trial < 10; ++trial) {
    PauliSum a(3);
    PauliSum b(3);
    for (int i = 0; i < 4; ++i) {
      std::string sa, sb;
      for (int q = 0; q < 3; ++q) {
        sa += kLetters[rng.uniform_below(4)];
        sb += kLetters[rng.uniform_below(4)];
      }
      a.add_term(Complex{rng.next_double(), rng.next_double()},
                 PauliString::from_text(sa));
      b.add_term(Complex{rng.next_double(), rng.next_double()},
                 PauliString::from_text(sb));
    }
    Eigen::MatrixXcd prod = sum_to_matrix(a) * sum_to_matrix(b);
    Eigen::MatrixXcd sym = sum_to_matrix(sum_multiply(a, b));
    CHECK((prod - sym).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("string expectations match the density matrix trace") {
  DenseState state = DenseState::basis("01");
  CHECK(close(string_expectation(state, PauliString::from_text("ZI")),
              Complex{1.0, 0.0}));
  CHECK(close(string_expectation(state, PauliString::from_text("IZ")),
              Complex{-1.0, 0.0}));
  CHECK(close(string_expectation(state, PauliString::from_text("XX")),
              Complex{0.0, 0.0}));
  CHECK(close(string_expectation(state, PauliString(2)), Complex{1.0, 0.0}));

  // |+> via from_vector: <X> = 1.
  Eigen::VectorXcd plus(2);
  plus << std::sqrt(0.5), std::sqrt(0.5);
  DenseState sp = DenseState::from_vector(plus);
  CHECK(close(string_expectation(sp, PauliString::from_text("X")),
              Complex{1.0, 0.0}));
}

TEST_CASE("exact expectation folds sums termwise") {
  DenseState state = DenseState::basis("0");
  PauliSum sum(1);
  sum.add_term(0.99, PauliString::from_text("Z"));
  sum.add_term(0.2, PauliString::from_text("Y"));
  CHECK(close(exact_expectation(state, sum), Complex{0.99, 0.0}));
  CHECK(exact_expectation(state, sum) == exact_expectation_serial(state, sum));

  // Against the dense trace oracle on a mixed state.
  Eigen::MatrixXcd rho(2, 2);
  rho << 0.75, Complex{0.1, 0.05}, Complex{0.1, -0.05}, 0.25;
  DenseState mixed = DenseState::from_density(rho);
  Complex traced = (sum_to_matrix(sum) * rho).trace();
  CHECK(close(exact_expectation(mixed, sum), traced));
}

TEST_CASE("exact evolution rotates single qubit observables") {
  // |0> under H=X for time t: <Z> becomes cos(2t).
  HamiltonianSpec h = parse_hamiltonian("1.0 X\n");
  DenseState evolved =
      exact_evolve(DenseState::basis("0"), h, TimeParameter::real(0.1));
  PauliSum z(1);
  z.add_term(1.0, PauliString::from_text("Z"));
  CHECK(close(exact_expectation(evolved, z), Complex{std::cos(0.2), 0.0}));

  // Density-matrix input follows the same dynamics.
  DenseState rho_evolved = exact_evolve(
      DenseState::from_density(DenseState::basis("0").to_density()), h,
      TimeParameter::real(0.1));
  CHECK(close(exact_expectation(rho_evolved, z), Complex{std::cos(0.2), 0.0}));
}

TEST_CASE("imaginary time evolution renormalizes toward the ground state") {
  HamiltonianSpec h = parse_hamiltonian("1.0 X\n");
  PauliSum hx = h.to_sum();
  // e^{-tau X} |0> has energy <X> = -tanh(2 tau)... the state mixes |+>,|->
  // with weights e^{-+tau}; at tau=0.1 the energy is -tanh(0.2).
  DenseState evolved =
      exact_evolve(DenseState::basis("0"), h, TimeParameter::imag(0.1));
  CHECK(close(exact_expectation(evolved, hx),
              Complex{-std::tanh(0.2), 0.0}, 1e-12));
}

TEST_CASE("loschmidt amplitude from the dense propagator") {
  // <+| e^{-i t X} |+> = e^{-i t}: evolving |+> only adds a phase, so check
  // via the expectation of the evolved projector against the initial state.
  HamiltonianSpec h = parse_hamiltonian("1.0 X\n");
  Eigen::VectorXcd plus(2);
  plus << std::sqrt(0.5), std::sqrt(0.5);
  DenseState sp = DenseState::from_vector(plus);
  DenseState evolved = exact_evolve(sp, h, TimeParameter::real(0.1));
  Complex overlap = (sp.vector().adjoint() * evolved.vector())(0);
  CHECK(close(overlap, std::exp(Complex{0.0, -0.1})));
}

TEST_CASE("sampled measurements are fair coins with the right bias") {
  DenseState state = DenseState::basis("0");
  CounterRng rng(21, 0);
  // <Z> = 1: every outcome is +1 and no randomness is consumed for identity.
  for (int i = 0; i < 100; ++i) {
    CHECK(sample_pauli_measurement(state, PauliString::from_text("Z"), rng) == 1);
    CHECK(sample_pauli_measurement(state, PauliString(1), rng) == 1);
  }
  // <X> = 0: outcomes average out.
  int total = 0;
  for (int i = 0; i < 20000; ++i) {
    total += sample_pauli_measurement(state, PauliString::from_text("X"), rng);
  }
  CHECK(std::abs(total) < 600);  // ~4.2 sigma
}

TEST_CASE("generated shadows are reproducible and unbiased") {
  DenseState state = DenseState::basis("00");
  auto a = generate_shadows(state, 3000, 17);
  auto b = generate_shadows(state, 3000, 17);
  REQUIRE(a.size() == 3000);
  bool identical = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].basis_x != b[i].basis_x || a[i].basis_z != b[i].basis_z ||
        a[i].bits != b[i].bits) {
      identical = false;
    }
  }
  CHECK(identical);

  auto serial = generate_shadows_serial(state, 3000, 17);
  bool same_as_serial = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].basis_x != serial[i].basis_x || a[i].bits != serial[i].bits ||
        a[i].basis_z != serial[i].basis_z) {
      same_as_serial = false;
    }
  }
  CHECK(same_as_serial);

  // Unbiasedness: the shadow mean of ZZ on |00> converges to 1.
  double mean = shadow_estimate_pauli(a, PauliString::from_text("ZZ"));
  CHECK(std::abs(mean - 1.0) < 0.5);
}

TEST_CASE("dense source implements the measurement interface") {
  DenseSource source(DenseState::basis("0"));
  CHECK(source.supports_pauli_sampling());
  CHECK(source.supports_shadows());
  PauliSum sum(1);
  sum.add_term(1.0, PauliString::from_text("Z"));
  source.prepare(sum);
  CounterRng rng(1, 0);
  CHECK(source.sample_pauli(PauliString::from_text("Z"), rng) == 1);
  auto snaps = source.draw_shadows(10, 5);
  CHECK(snaps.size() == 10);
}

TEST_CASE("density file round trip") {
  std::string path = "/tmp/paulisim_test_rho.json";
  Eigen::MatrixXcd rho(2, 2);
  rho << 0.6, Complex{0.2, 0.1}, Complex{0.2, -0.1}, 0.4;
  DenseState state = DenseState::from_density(rho);
  state.save_density_file(path);
  DenseState loaded = DenseState::load_density_file(path);
  CHECK(loaded.is_density());
  CHECK((loaded.density() - rho).cwiseAbs().maxCoeff() <= 1e-12);
  std::remove(path.c_str());

  CHECK_THROWS_AS(DenseState::load_density_file("/nonexistent/rho.json"),
                  InputError);
}

TEST_CASE("environment caps guard the dense backend") {
  DenseOptions options;
  options.statevector_cap = 3;
  CHECK_THROWS_AS(DenseState::basis("0000", options), GuardError);
  options.density_cap = 1;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Identity(4, 4) * 0.25;
  DenseState big = DenseState::from_density(rho);
  HamiltonianSpec h = build_heisenberg_chain(2, 1.0);
  CHECK_THROWS_AS(exact_evolve(big, h, TimeParameter::real(0.1), options),
                  GuardError);
}
