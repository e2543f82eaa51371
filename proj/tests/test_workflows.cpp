#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "paulisim/dense.hpp"
#include "paulisim/errors.hpp"
#include "paulisim/model.hpp"
#include "paulisim/workflows.hpp"

using namespace paulisim;

namespace {

SamplingPlan exact_plan() { return SamplingPlan{}; }

SamplingPlan importance_plan(std::uint64_t shots, std::uint64_t seed) {
  SamplingPlan plan;
  plan.backend = EstimatorBackend::kImportance;
  plan.shots = shots;
  plan.seed = seed;
  return plan;
}

}  // namespace

TEST_CASE("estimate_on_state dispatches over backends") {
  DenseState state = DenseState::basis("0");
  PauliSum z(1);
  z.add_term(1.0, PauliString::from_text("Z"));

  EstimateReport exact = estimate_on_state(z, state, exact_plan());
  CHECK(exact.value.real() == doctest::Approx(1.0));
  CHECK(exact.radius == 0.0);
  CHECK(exact.confidence == 1.0);
  CHECK(exact.method == "exact");

  EstimateReport sampled = estimate_on_state(z, state, importance_plan(500, 7));
  CHECK(sampled.method == "importance");
  // <Z> = 1 exactly: every draw hits Z with outcome +1.
  CHECK(sampled.value.real() == doctest::Approx(1.0));

  SamplingPlan shadows;
  shadows.backend = EstimatorBackend::kShadows;
  shadows.shots = 3000;
  shadows.seed = 5;
  EstimateReport shadowed = estimate_on_state(z, state, shadows);
  CHECK(shadowed.method == "shadows");
  CHECK(std::abs(shadowed.value.real() - 1.0) < 0.3);

  SamplingPlan empty = importance_plan(0, 1);
  CHECK_THROWS_AS(estimate_on_state(z, state, empty), InputError);
}

TEST_CASE("verification accepts the true hamiltonian") {
  HamiltonianSpec h = build_heisenberg_chain(3, 1.0);
  ObservableSpec obs = parse_observable("1.0 ZII\n");
  DenseState initial = DenseState::basis("010");

  VerifyReport report = verify_backpropagation(h, h, obs, initial, 0.05, 3, 1,
                                               exact_plan());
  CHECK(report.consistent);
  CHECK(std::abs(report.residual) <= report.threshold);
  // Qubit 0 reads the leftmost bit of "010", so <Z0> = +1.
  CHECK(report.expected == doctest::Approx(1.0));
  // With the exact estimator the threshold is purely systematic.
  CHECK(report.threshold == doctest::Approx(report.bound.total_systematic));
}

TEST_CASE("verification residual is exactly zero at time zero") {
  HamiltonianSpec h = build_heisenberg_chain(2, 0.7);
  ObservableSpec obs = parse_observable("1.0 ZI\n");
  DenseState initial = DenseState::basis("01");
  VerifyReport report =
      verify_backpropagation(h, h, obs, initial, 0.0, 2, 1, exact_plan());
  CHECK(report.residual == 0.0);
  CHECK(report.consistent);
}

TEST_CASE("verification flags a perturbed coefficient") {
  HamiltonianSpec truth = build_heisenberg_chain(3, 1.0);
  // Perturb one coupling by 0.5.
  HamiltonianSpec claimed = parse_hamiltonian(
      "1.5 XXI\n1.0 YYI\n1.0 ZZI\n1.0 IXX\n1.0 IYY\n1.0 IZZ\n");
  ObservableSpec obs = parse_observable("1.0 ZII\n");
  // A state with <Y0 X1> != 0 so the first-order residual survives:
  // (|0> + i|1>)/sqrt(2) on qubit 0, |+> on qubit 1, |0> on qubit 2.
  Eigen::VectorXcd amps(8);
  amps.setZero();
  double inv2 = 0.5;
  amps(0) = Complex{inv2, 0.0};
  amps(1) = Complex{0.0, inv2};
  amps(2) = Complex{inv2, 0.0};
  amps(3) = Complex{0.0, inv2};
  DenseState initial = DenseState::from_vector(amps);

  VerifyReport good = verify_backpropagation(truth, truth, obs, initial, 0.05,
                                             3, 1, exact_plan());
  CHECK(good.consistent);

  VerifyReport bad = verify_backpropagation(truth, claimed, obs, initial, 0.05,
                                            3, 1, exact_plan());
  CHECK_FALSE(bad.consistent);
  CHECK(std::abs(bad.residual) > 10.0 * bad.threshold);
}

TEST_CASE("verification validates its inputs") {
  HamiltonianSpec h = build_heisenberg_chain(2, 1.0);
  ObservableSpec obs = parse_observable("1.0 ZI\n");
  DenseState initial = DenseState::basis("010");
  CHECK_THROWS_AS(verify_backpropagation(h, h, obs, initial, 0.05, 2, 1,
                                         exact_plan()),
                  InputError);
  HamiltonianSpec three = build_heisenberg_chain(3, 1.0);
  CHECK_THROWS_AS(verify_backpropagation(h, three, obs,
                                         DenseState::basis("01"), 0.05, 2, 1,
                                         exact_plan()),
                  InputError);
}

TEST_CASE("imaginary time energy reproduces the single qubit closed form") {
  HamiltonianSpec h = parse_hamiltonian("1.0 X\n");
  DenseState state = DenseState::basis("0");
  RatioReport report =
      imaginary_energy(h, state, 0.1, 5, exact_plan());
  double truth = -std::tanh(0.2);
  CHECK(report.value == doctest::Approx(truth).epsilon(1e-6));
  CHECK(report.lower <= truth);
  CHECK(truth <= report.upper);
  CHECK(report.numerator_tail > 0.0);
  CHECK(report.denominator_tail > 0.0);

  // tau = 0 collapses to the plain energy tr(H rho) = <X> = 0.
  RatioReport zero = imaginary_energy(h, state, 0.0, 3, exact_plan());
  CHECK(zero.value == doctest::Approx(0.0));
  CHECK(zero.numerator_tail == 0.0);
}

TEST_CASE("imaginary time energy under sampling stays in the interval") {
  HamiltonianSpec h = parse_hamiltonian("1.0 X\n");
  DenseState state = DenseState::basis("0");
  RatioReport report =
      imaginary_energy(h, state, 0.1, 5, importance_plan(40000, 31));
  double truth = -std::tanh(0.2);
  CHECK(report.lower <= truth);
  CHECK(truth <= report.upper);
  CHECK(report.lower < report.upper);
  // Denominator ran on an independent stream with half the confidence budget.
  CHECK(report.denominator.confidence == doctest::Approx(0.975));
  CHECK(report.numerator.seed + 1 == report.denominator.seed);
}

TEST_CASE("imaginary time energy refuses an unbounded denominator") {
  HamiltonianSpec h = parse_hamiltonian("1.0 X\n");
  DenseState state = DenseState::basis("0");
  // One shot cannot bound the denominator away from zero: radius spans it.
  CHECK_THROWS_AS(
      imaginary_energy(h, state, 0.1, 5, importance_plan(1, 3)),
      RefusalError);
}

TEST_CASE("partition trace matches the hyperbolic cosine") {
  HamiltonianSpec h = parse_hamiltonian("1.0 X\n");
  TraceReport report = partition_trace(h, 0.1, 8);
  // tr e^{-0.2 X} = 2 cosh(0.2).
  CHECK(report.value == doctest::Approx(2.0 * std::cosh(0.2)).epsilon(1e-9));
  CHECK(report.tail == doctest::Approx(2.0 * bounds::propagator_tail_bound(0.2, 8)));

  // Two qubit chain: tr factors only for commuting terms, so check against
  // the dense oracle instead.
  HamiltonianSpec chain = build_heisenberg_chain(2, 0.5);
  TraceReport chain_report = partition_trace(chain, 0.1, 10);
  Eigen::MatrixXcd mat = sum_to_matrix(chain.to_sum());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(mat);
  double trace = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    trace += std::exp(-0.2 * solver.eigenvalues()(i));
  }
  CHECK(chain_report.value == doctest::Approx(trace).epsilon(1e-8));
}

TEST_CASE("loschmidt overlap from the expansion side") {
  HamiltonianSpec h = parse_hamiltonian("1.0 X\n");
  DenseState state = DenseState::basis("0");
  LoschmidtReport report =
      loschmidt_overlap(h, 0.1, 2, 1, state, exact_plan());
  // K=2 expansion of e^{-i 0.1 X} on |0>: identity coefficient 0.995.
  CHECK(report.estimate.value.real() == doctest::Approx(0.995));
  CHECK(report.estimate.value.imag() == doctest::Approx(0.0));
  CHECK(report.estimate.method == "loschmidt-exact");
  // True overlap <0| e^{-i 0.1 X} |0> = cos(0.1); the truncation bound
  // covers the gap.
  CHECK(std::abs(report.estimate.value - Complex{std::cos(0.1), 0.0}) <=
        report.bound.unitary_error);
  CHECK(report.bound.unitary_error ==
        doctest::Approx(bounds::propagator_tail_bound(0.1, 2)));

  // Sampled two-lane estimate stays near the exact value.
  LoschmidtReport sampled =
      loschmidt_overlap(h, 0.1, 2, 1, state, importance_plan(20000, 13));
  CHECK(std::abs(sampled.estimate.value.real() - 0.995) < 0.05);
  CHECK(std::abs(sampled.estimate.value.imag()) < 0.05);
  CHECK(sampled.estimate.method == "loschmidt-importance");
}
