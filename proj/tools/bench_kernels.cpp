// Timing comparison of the parallel kernels against their single-thread
// reference implementations. The two paths are required to agree bit for
// bit, so each scenario also checks the results match exactly.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

#include "paulisim/dense.hpp"
#include "paulisim/expansion.hpp"
#include "paulisim/model.hpp"
#include "paulisim/parallel.hpp"
#include "paulisim/pauli_sum.hpp"

using namespace paulisim;

namespace {

double time_best_ms(int reps, const std::function<void()>& body) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    body();
    auto t1 = std::chrono::steady_clock::now();
    best = std::min(best,
                    std::chrono::duration<double, std::milli>(t1 - t0)
                        .count());
  }
  return best;
}

bool sums_identical(const PauliSum& a, const PauliSum& b) {
  auto ta = a.sorted_terms();
  auto tb = b.sorted_terms();
  if (ta.size() != tb.size()) return false;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    if (!(ta[i].first == tb[i].first) || ta[i].second != tb[i].second) {
      return false;
    }
  }
  return true;
}

bool snapshots_identical(const std::vector<ShadowSnapshot>& a,
                         const std::vector<ShadowSnapshot>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].basis_x != b[i].basis_x || a[i].basis_z != b[i].basis_z ||
        a[i].bits != b[i].bits) {
      return false;
    }
  }
  return true;
}

void report(const char* name, double serial_ms, double parallel_ms,
            bool match) {
  std::printf("%-22s serial %9.3f ms   parallel %9.3f ms   speedup %5.2fx   "
              "%s\n",
              name, serial_ms, parallel_ms, serial_ms / parallel_ms,
              match ? "MATCH" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  int reps = argc > 1 ? std::atoi(argv[1]) : 3;
  if (reps < 1) reps = 1;
  std::printf("threads: %d   repetitions per timing: %d\n", max_threads(),
              reps);

  int status = 0;

  {
    // Product of two order-2 propagator expansions of a 10-qubit chain.
    HamiltonianSpec h = build_heisenberg_chain(10, 1.0);
    ExpansionOptions eopt;
    PauliSum u = expand_propagator(h, TimeParameter::real(0.2), 2, eopt);
    PauliSum v = u.adjoint();
    PauliSum serial_out(10), parallel_out(10);
    double s = time_best_ms(reps, [&] {
      serial_out = sum_multiply_serial(v, u, 0);
    });
    double p = time_best_ms(reps, [&] {
      parallel_out = sum_multiply(v, u, 0);
    });
    bool ok = sums_identical(serial_out, parallel_out);
    report("sum product", s, p, ok);
    if (!ok) status = 1;
  }

  {
    // Termwise expectation of a large sum on a 12-qubit basis state.
    HamiltonianSpec h = build_heisenberg_chain(12, 1.0);
    ExpansionOptions eopt;
    PauliSum u = expand_propagator(h, TimeParameter::real(0.1), 2, eopt);
    DenseState state = DenseState::basis("010101010101");
    Complex serial_val, parallel_val;
    double s = time_best_ms(reps, [&] {
      serial_val = exact_expectation_serial(state, u);
    });
    double p = time_best_ms(reps, [&] {
      parallel_val = exact_expectation(state, u);
    });
    bool ok = serial_val == parallel_val;
    report("exact expectation", s, p, ok);
    if (!ok) status = 1;
  }

  {
    // Randomized-basis snapshot generation on 10 qubits.
    DenseState state = DenseState::basis("0101010101");
    std::vector<ShadowSnapshot> serial_out, parallel_out;
    double s = time_best_ms(reps, [&] {
      serial_out = generate_shadows_serial(state, 20000, 7);
    });
    double p = time_best_ms(reps, [&] {
      parallel_out = generate_shadows(state, 20000, 7);
    });
    bool ok = snapshots_identical(serial_out, parallel_out);
    report("shadow generation", s, p, ok);
    if (!ok) status = 1;
  }

  return status;
}
