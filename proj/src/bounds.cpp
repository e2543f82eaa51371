#include "paulisim/bounds.hpp"

#include <cmath>
#include <stdexcept>

#include "paulisim/errors.hpp"

namespace paulisim::bounds {

namespace {

void check_nonnegative(double value, const char* name) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw InputError(std::string(name) + " must be finite and >= 0");
  }
}

void check_probability(double delta) {
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw InputError("delta must lie in (0, 1)");
  }
}

std::uint64_t ceil_to_count(double value) {
  if (value >= static_cast<double>(kCountSaturated)) {
    return kCountSaturated;
  }
  return static_cast<std::uint64_t>(std::ceil(value));
}

}  // namespace

double propagator_tail_bound(double lambda_t, std::size_t order) {
  check_nonnegative(lambda_t, "lambda_t");
  // lambda_t^{K+1}/(K+1)! as an incremental product; monotone, no overflow
  // for any order reachable through the order cap.
  double tail = 1.0;
  for (std::size_t j = 1; j <= order + 1; ++j) {
    tail *= lambda_t / static_cast<double>(j);
  }
  return tail;
}

double conjugation_error_bound(double unitary_err, double norm_o) {
  check_nonnegative(unitary_err, "unitary_err");
  check_nonnegative(norm_o, "norm_o");
  return (2.0 * unitary_err + unitary_err * unitary_err) * norm_o;
}

double direct_expansion_tail_bound(double lambda_t, std::size_t order,
                                   double norm_o) {
  check_nonnegative(norm_o, "norm_o");
  return norm_o * propagator_tail_bound(2.0 * lambda_t, order);
}

std::uint64_t term_count_bound(std::size_t num_terms, std::size_t order,
                               std::size_t segments, bool conjugated) {
  if (segments == 0) {
    throw InputError("segments must be >= 1");
  }
  // sum_{k<=order} num_terms^k with saturating arithmetic.
  unsigned __int128 limit = kCountSaturated;
  unsigned __int128 per_segment = 0;
  unsigned __int128 power = 1;
  for (std::size_t k = 0; k <= order; ++k) {
    per_segment += power;
    if (per_segment >= limit) return kCountSaturated;
    if (k < order) {
      power *= num_terms;
      if (power >= limit) return kCountSaturated;
    }
  }
  unsigned __int128 total = 1;
  std::size_t reps = conjugated ? 2 * segments : segments;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    total *= per_segment;
    if (total >= limit) return kCountSaturated;
  }
  return static_cast<std::uint64_t>(total);
}

double gamma_l1_bound(double lambda, double t, std::size_t order,
                      std::size_t segments) {
  check_nonnegative(lambda, "lambda");
  check_nonnegative(t, "t");
  if (segments == 0) {
    throw InputError("segments must be >= 1");
  }
  double x = lambda * t / static_cast<double>(segments);
  double sum = 1.0;
  double term = 1.0;
  for (std::size_t k = 1; k <= order; ++k) {
    term *= x / static_cast<double>(k);
    sum += term;
    if (term < sum * 1e-18) break;  // converged to exp(x) within double
  }
  return std::pow(sum, 2.0 * static_cast<double>(segments));
}

std::uint64_t hoeffding_shots(double gamma_l1, double eps, double delta) {
  check_nonnegative(gamma_l1, "gamma_l1");
  check_probability(delta);
  if (!(eps > 0.0)) {
    throw InputError("eps must be > 0");
  }
  if (gamma_l1 == 0.0) return 0;
  double shots = 2.0 * gamma_l1 * gamma_l1 * std::log(2.0 / delta) /
                 (eps * eps);
  return ceil_to_count(shots);
}

std::uint64_t shadow_shots(std::size_t w_max, std::uint64_t m_tot, double eps,
                           double delta) {
  check_probability(delta);
  if (!(eps > 0.0) || eps >= 1.0) {
    throw InputError("shadow eps must lie in (0, 1)");
  }
  if (m_tot == 0) return 0;
  double shots = 2.0 / (eps * eps * (1.0 - eps));
  shots *= std::pow(3.0, static_cast<double>(w_max));
  shots *= std::log(3.0 * static_cast<double>(m_tot) / delta);
  return ceil_to_count(shots);
}

double invert_hoeffding_radius(double gamma_l1, std::uint64_t shots,
                               double delta) {
  check_nonnegative(gamma_l1, "gamma_l1");
  check_probability(delta);
  if (shots == 0) {
    throw InputError("cannot invert a zero shot count");
  }
  return gamma_l1 *
         std::sqrt(2.0 * std::log(2.0 / delta) /
                   static_cast<double>(shots));
}

double invert_shadow_radius(std::size_t w_max, std::uint64_t m_tot,
                            std::uint64_t shots, double delta) {
  check_probability(delta);
  if (shots == 0) {
    throw InputError("cannot invert a zero snapshot count");
  }
  if (m_tot == 0) return 0.0;
  // Solve eps^2 (1 - eps) = c on (0, 2/3], where the left side is strictly
  // increasing. c beyond the maximum 4/27 means no guarantee: clamp to 1.
  double c = 2.0 * std::pow(3.0, static_cast<double>(w_max)) *
             std::log(3.0 * static_cast<double>(m_tot) / delta) /
             static_cast<double>(shots);
  if (c >= 4.0 / 27.0) return 1.0;
  double lo = 0.0;
  double hi = 2.0 / 3.0;
  for (int iter = 0; iter < 200; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (mid * mid * (1.0 - mid) < c) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

BoundReport compose_report(double lambda, double t, std::size_t order,
                           std::size_t segments, std::size_t num_terms,
                           double norm_o, SystematicKind kind) {
  if (segments == 0) {
    throw InputError("segments must be >= 1");
  }
  BoundReport report;
  report.lambda_t = lambda * t;
  report.order = order;
  report.segments = segments;
  report.norm_o = norm_o;
  report.segment_tail =
      propagator_tail_bound(report.lambda_t / static_cast<double>(segments),
                            order);
  // Per-segment tails compose by summation (union bound over segments).
  report.unitary_error = static_cast<double>(segments) * report.segment_tail;
  switch (kind) {
    case SystematicKind::kPropagatorOnly:
      report.total_systematic = report.unitary_error;
      break;
    case SystematicKind::kConjugated:
      report.total_systematic =
          conjugation_error_bound(report.unitary_error, norm_o);
      break;
    case SystematicKind::kDirect:
      report.total_systematic =
          direct_expansion_tail_bound(report.lambda_t, order, norm_o);
      break;
  }
  report.gamma_l1_bound = gamma_l1_bound(lambda, t, order, segments);
  if (kind == SystematicKind::kPropagatorOnly) {
    // One-sided expansion: the coefficient bound is the square root of the
    // conjugated one.
    report.gamma_l1_bound = std::sqrt(report.gamma_l1_bound);
  } else {
    // Coefficient norms are submultiplicative under string products, so the
    // sandwiched observable contributes its own l1 norm as a factor.
    report.gamma_l1_bound *= norm_o;
  }
  report.term_bound =
      term_count_bound(num_terms, order, segments,
                       kind != SystematicKind::kPropagatorOnly);
  return report;
}

}  // namespace paulisim::bounds
