#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <complex>
#include <vector>

#include "paulisim/dense.hpp"
#include "paulisim/estimation.hpp"
#include "paulisim/expansion.hpp"
#include "paulisim/model.hpp"
#include "paulisim/parallel.hpp"
#include "paulisim/pauli_sum.hpp"
#include "paulisim/rng.hpp"

using namespace paulisim;

namespace {

// Runs `body` once per requested thread count and requires every result to
// be bit-identical to the first.
template <typename Fn>
void across_thread_counts(Fn&& body) {
#ifdef _OPENMP
  int saved = omp_get_max_threads();
  auto baseline = body();
  for (int threads : {1, 2, 8}) {
    omp_set_num_threads(threads);
    auto repeat = body();
    CAPTURE(threads);
    REQUIRE(repeat == baseline);
  }
  omp_set_num_threads(saved);
#else
  auto baseline = body();
  REQUIRE(body() == baseline);
#endif
}

}  // namespace

TEST_CASE("deterministic_sum is invariant across thread counts") {
  // Values chosen so floating point addition is order-sensitive: a naive
  // parallel reduction would differ between thread counts.
  std::vector<double> values;
  CounterRng rng(2, 0);
  for (int i = 0; i < 50000; ++i) {
    values.push_back((rng.next_double() - 0.5) * std::pow(10.0, i % 17));
  }
  across_thread_counts([&] {
    return deterministic_sum<double>(values.size(),
                                     [&](std::size_t i) { return values[i]; });
  });
  // And it equals the chunked fold regardless of OpenMP availability.
  double expected = 0.0;
  std::vector<double> partials;
  for (std::size_t begin = 0; begin < values.size(); begin += 4096) {
    double acc = 0.0;
    for (std::size_t i = begin; i < std::min(begin + 4096, values.size()); ++i) {
      acc += values[i];
    }
    partials.push_back(acc);
  }
  for (double p : partials) expected += p;
  double got = deterministic_sum<double>(
      values.size(), [&](std::size_t i) { return values[i]; });
  CHECK(got == expected);
}

TEST_CASE("sum products are invariant across thread counts") {
  HamiltonianSpec h = build_heisenberg_chain(6, 1.0);
  PauliSum u = expand_propagator(h, TimeParameter::real(0.2), 2);
  PauliSum v = u.adjoint();
  across_thread_counts([&] { return sum_multiply(v, u); });
  // Parallel result equals the serial reference exactly.
  PauliSum fast = sum_multiply(v, u);
  PauliSum slow = sum_multiply_serial(v, u);
  REQUIRE(fast.num_terms() == slow.num_terms());
  for (const auto& [string, coeff] : fast.terms()) {
    REQUIRE(slow.coefficient(string) == coeff);
  }
}

TEST_CASE("expansions are invariant across thread counts") {
  HamiltonianSpec h = build_heisenberg_chain(4, 1.0);
  ObservableSpec obs = parse_observable("1 ZIII\n-1 IZII\n1 IIZI\n-1 IIIZ\n");
  across_thread_counts([&] {
    ExpansionResult res = heisenberg_taylor_concat(
        h, obs, TimeParameter::real(0.1), 3, 1);
    return res.sum;
  });
}

TEST_CASE("exact expectations are invariant across thread counts") {
  HamiltonianSpec h = build_heisenberg_chain(8, 1.0);
  PauliSum expansion = expand_propagator(h, TimeParameter::real(0.05), 2);
  DenseState state = DenseState::basis("01010101");
  across_thread_counts([&] {
    Complex value = exact_expectation(state, expansion);
    return value;
  });
  CHECK(exact_expectation(state, expansion) ==
        exact_expectation_serial(state, expansion));
}

TEST_CASE("importance estimates are invariant across thread counts") {
  DenseState state = DenseState::basis("01");
  DenseSource source(state);
  PauliSum sum(2);
  sum.add_term(0.6, PauliString::from_text("ZZ"));
  sum.add_term(0.4, PauliString::from_text("XX"));
  sum.add_term(-0.2, PauliString::from_text("YI"));
  across_thread_counts([&] {
    EstimateReport report = importance_estimate(sum, source, 5000, 33);
    return report.value;
  });
}

TEST_CASE("shadow generation is invariant across thread counts") {
  DenseState state = DenseState::basis("0110");
  auto pack = [](const std::vector<ShadowSnapshot>& snaps) {
    std::vector<std::uint64_t> packed;
    packed.reserve(snaps.size() * 3);
    for (const auto& snap : snaps) {
      packed.push_back(snap.basis_x);
      packed.push_back(snap.basis_z);
      packed.push_back(snap.bits);
    }
    return packed;
  };
  across_thread_counts([&] { return pack(generate_shadows(state, 4000, 11)); });
  CHECK(pack(generate_shadows(state, 4000, 11)) ==
        pack(generate_shadows_serial(state, 4000, 11)));
}

TEST_CASE("shadow sum estimates are invariant across thread counts") {
  DenseState state = DenseState::basis("01");
  auto snaps = generate_shadows(state, 6000, 19);
  PauliSum sum(2);
  sum.add_term(0.7, PauliString::from_text("ZZ"));
  sum.add_term(0.3, PauliString::from_text("XI"));
  across_thread_counts([&] {
    EstimateReport report = shadow_estimate_sum(snaps, sum);
    return report.value;
  });
}
