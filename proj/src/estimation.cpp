#include "paulisim/estimation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "paulisim/bounds.hpp"
#include "paulisim/errors.hpp"
#include "paulisim/parallel.hpp"

namespace paulisim {

namespace {

// Shots per RNG shard. Fixed so the shard decomposition, and with it every
// substream, depends only on the shot count.
constexpr std::uint64_t kShardShots = 1024;

struct LaneResult {
  double value = 0.0;
  double radius = 0.0;
  std::uint64_t shots = 0;
};

// One real-coefficient importance-sampling pass.
LaneResult run_lane(const PauliSum& sum, MeasurementSource& source,
                    std::uint64_t shots, std::uint64_t seed,
                    std::uint8_t lane, double delta,
                    bool separate_identity) {
  SamplingDistribution dist =
      SamplingDistribution::build(sum, separate_identity);
  LaneResult result;
  if (dist.entries.empty() || dist.gamma_l1 == 0.0) {
    result.value = dist.identity_offset;
    return result;
  }
  if (shots == 0) {
    throw InputError("importance sampling needs a positive shot count");
  }
  source.prepare(sum);

  std::uint64_t shards = (shots + kShardShots - 1) / kShardShots;
  std::vector<long long> partial(shards, 0);
#pragma omp parallel for schedule(static)
  for (long long s = 0; s < static_cast<long long>(shards); ++s) {
    std::uint64_t shard = static_cast<std::uint64_t>(s);
    CounterRng rng(seed, rng_stream(RngDomain::kImportance, lane, shard));
    std::uint64_t begin = shard * kShardShots;
    std::uint64_t end = std::min(shots, begin + kShardShots);
    long long acc = 0;
    for (std::uint64_t shot = begin; shot < end; ++shot) {
      const auto& entry = dist.draw(rng);
      int outcome = source.sample_pauli(entry.string, rng);
      acc += entry.sign * outcome;
    }
    partial[shard] = acc;
  }
  long long total = 0;
  for (long long p : partial) total += p;

  result.value = dist.identity_offset +
                 dist.gamma_l1 * static_cast<double>(total) /
                     static_cast<double>(shots);
  result.radius = bounds::invert_hoeffding_radius(dist.gamma_l1, shots, delta);
  result.shots = shots;
  return result;
}

PauliSum real_part_sum(const PauliSum& sum, bool imag_lane) {
  PauliSum out(sum.num_qubits());
  for (const auto& [string, coeff] : sum.sorted_terms()) {
    double c = imag_lane ? coeff.imag() : coeff.real();
    if (c != 0.0) out.add_term(Complex{c, 0.0}, string);
  }
  return out;
}

double snapshot_value(const ShadowSnapshot& snap, std::uint64_t qx,
                      std::uint64_t qz, std::uint64_t support,
                      double weight_factor) {
  bool match = (((snap.basis_x ^ qx) | (snap.basis_z ^ qz)) & support) == 0;
  if (!match) return 0.0;
  bool odd = std::popcount(snap.bits & support) & 1;
  return odd ? -weight_factor : weight_factor;
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

// Shared per-string kernel so the single-string and sum entry points agree
// bit for bit. Group means accumulate serially in snapshot order.
double term_shadow_mean(const std::vector<ShadowSnapshot>& snapshots,
                        const PauliString& string,
                        std::size_t median_groups) {
  std::uint64_t qx = string.x_mask();
  std::uint64_t qz = string.z_mask();
  std::uint64_t support = string.support();
  double factor = std::pow(3.0, static_cast<double>(string.weight()));
  std::size_t count = snapshots.size();

  if (median_groups <= 1) {
    double total = deterministic_sum<double>(count, [&](std::size_t i) {
      return snapshot_value(snapshots[i], qx, qz, support, factor);
    });
    return total / static_cast<double>(count);
  }

  if (median_groups > count) {
    throw InputError("more median groups than snapshots");
  }
  // Contiguous groups, sizes as equal as possible; the first count%groups
  // groups carry one extra snapshot.
  std::size_t base = count / median_groups;
  std::size_t extra = count % median_groups;
  std::vector<double> means(median_groups, 0.0);
  for (std::size_t g = 0; g < median_groups; ++g) {
    std::size_t begin = g * base + std::min(g, extra);
    std::size_t size = base + (g < extra ? 1 : 0);
    double acc = 0.0;
    for (std::size_t i = begin; i < begin + size; ++i) {
      acc += snapshot_value(snapshots[i], qx, qz, support, factor);
    }
    means[g] = acc / static_cast<double>(size);
  }
  return median_of(std::move(means));
}

void check_snapshots(const std::vector<ShadowSnapshot>& snapshots,
                     std::size_t n_qubits) {
  if (snapshots.empty()) {
    throw InputError("no shadow snapshots given");
  }
  for (const auto& snap : snapshots) {
    if (snap.n_qubits != n_qubits) {
      throw InputError("snapshot qubit count does not match the target");
    }
  }
}

}  // namespace

SamplingDistribution SamplingDistribution::build(const PauliSum& sum,
                                                 bool separate_identity) {
  SamplingDistribution dist;
  auto terms = sum.sorted_terms();
  double scale = 0.0;
  for (const auto& [string, coeff] : terms) scale += std::abs(coeff);
  double imag_tol = kCoefficientTolerance * std::max(1.0, scale);

  std::vector<std::pair<PauliString, double>> kept;
  kept.reserve(terms.size());
  for (const auto& [string, coeff] : terms) {
    if (std::abs(coeff.imag()) > imag_tol) {
      throw InputError(
          "importance sampling needs real coefficients; estimate the real "
          "and imaginary parts separately");
    }
    double c = coeff.real();
    if (c == 0.0) continue;
    if (separate_identity && string.is_identity()) {
      dist.identity_offset += c;
      continue;
    }
    dist.gamma_l1 += std::abs(c);
    kept.emplace_back(string, c);
  }

  dist.entries.reserve(kept.size());
  double cumulative = 0.0;
  for (const auto& [string, c] : kept) {
    Entry entry;
    entry.string = string;
    entry.probability = std::abs(c) / dist.gamma_l1;
    entry.sign = c < 0.0 ? -1 : 1;
    cumulative += entry.probability;
    entry.cumulative = cumulative;
    dist.entries.push_back(entry);
  }
  if (!dist.entries.empty()) {
    dist.entries.back().cumulative = 1.0;  // guard against rounding drift
  }
  return dist;
}

const SamplingDistribution::Entry& SamplingDistribution::draw(
    CounterRng& rng) const {
  if (entries.empty()) {
    throw InputError("cannot draw from an empty distribution");
  }
  double u = rng.next_double();
  auto it = std::upper_bound(
      entries.begin(), entries.end(), u,
      [](double value, const Entry& e) { return value < e.cumulative; });
  if (it == entries.end()) --it;
  return *it;
}

ShadowSnapshot ShadowSnapshot::from_letters(std::string_view bases,
                                            std::string_view bits) {
  if (bases.empty() || bases.size() > kMaxQubits) {
    throw InputError("snapshot needs 1.." + std::to_string(kMaxQubits) +
                     " qubits");
  }
  if (bits.size() != bases.size()) {
    throw InputError("snapshot bases and bits lengths differ");
  }
  ShadowSnapshot snap;
  snap.n_qubits = static_cast<std::uint32_t>(bases.size());
  for (std::size_t q = 0; q < bases.size(); ++q) {
    std::uint64_t bit = std::uint64_t{1} << q;
    switch (bases[q]) {
      case 'X': snap.basis_x |= bit; break;
      case 'Y': snap.basis_x |= bit; snap.basis_z |= bit; break;
      case 'Z': snap.basis_z |= bit; break;
      default:
        throw InputError(std::string("invalid basis character '") +
                         bases[q] + "' (expected X, Y or Z)");
    }
    if (bits[q] == '1') {
      snap.bits |= bit;
    } else if (bits[q] != '0') {
      throw InputError("snapshot bits must be 0 or 1");
    }
  }
  return snap;
}

std::string ShadowSnapshot::bases_text() const {
  std::string out(n_qubits, 'Z');
  for (std::size_t q = 0; q < n_qubits; ++q) {
    bool x = (basis_x >> q) & 1;
    bool z = (basis_z >> q) & 1;
    out[q] = x ? (z ? 'Y' : 'X') : 'Z';
  }
  return out;
}

std::string ShadowSnapshot::bits_text() const {
  std::string out(n_qubits, '0');
  for (std::size_t q = 0; q < n_qubits; ++q) {
    if ((bits >> q) & 1) out[q] = '1';
  }
  return out;
}

std::vector<ShadowSnapshot> read_shadow_jsonl(std::istream& in) {
  std::vector<ShadowSnapshot> snapshots;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& err) {
      throw InputError("shadow line " + std::to_string(line_no) + ": " +
                       err.what());
    }
    if (!doc.contains("bases") || !doc.contains("bits")) {
      throw InputError("shadow line " + std::to_string(line_no) +
                       ": needs \"bases\" and \"bits\"");
    }
    ShadowSnapshot snap = ShadowSnapshot::from_letters(
        doc["bases"].get<std::string>(), doc["bits"].get<std::string>());
    if (!snapshots.empty() && snap.n_qubits != snapshots.front().n_qubits) {
      throw InputError("shadow line " + std::to_string(line_no) +
                       ": qubit count differs from earlier lines");
    }
    snapshots.push_back(snap);
  }
  return snapshots;
}

std::vector<ShadowSnapshot> load_shadow_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open shadow file: " + path);
  }
  return read_shadow_jsonl(in);
}

void write_shadow_jsonl(std::ostream& out,
                        const std::vector<ShadowSnapshot>& snapshots) {
  for (const auto& snap : snapshots) {
    nlohmann::json doc;
    doc["bases"] = snap.bases_text();
    doc["bits"] = snap.bits_text();
    out << doc.dump() << '\n';
  }
}

EstimateReport importance_estimate(const PauliSum& sum,
                                   MeasurementSource& source,
                                   std::uint64_t shots, std::uint64_t seed,
                                   const EstimationOptions& options) {
  if (!source.supports_pauli_sampling()) {
    throw InputError("measurement source cannot sample Pauli strings");
  }
  if (!(options.delta > 0.0) || !(options.delta < 1.0)) {
    throw InputError("delta must lie in (0, 1)");
  }

  EstimateReport report;
  report.seed = seed;
  report.confidence = 1.0 - options.delta;
  report.method = "importance";

  bool complex_sum = !sum.is_real();
  if (!complex_sum) {
    LaneResult lane = run_lane(sum, source, shots, seed, 0, options.delta,
                               options.separate_identity);
    report.value = Complex{lane.value, 0.0};
    report.radius = lane.radius;
    report.shots = lane.shots;
    return report;
  }

  // Two real problems at delta/2 each; lanes get distinct RNG substreams.
  double half_delta = 0.5 * options.delta;
  PauliSum re = real_part_sum(sum, false);
  PauliSum im = real_part_sum(sum, true);
  LaneResult lane_re = run_lane(re, source, shots, seed, 0, half_delta,
                                options.separate_identity);
  LaneResult lane_im = run_lane(im, source, shots, seed, 1, half_delta,
                                options.separate_identity);
  report.value = Complex{lane_re.value, lane_im.value};
  report.radius = std::hypot(lane_re.radius, lane_im.radius);
  report.shots = lane_re.shots + lane_im.shots;
  return report;
}

double shadow_estimate_pauli(const std::vector<ShadowSnapshot>& snapshots,
                             const PauliString& string,
                             std::size_t median_groups) {
  check_snapshots(snapshots, string.num_qubits());
  return term_shadow_mean(snapshots, string, median_groups);
}

EstimateReport shadow_estimate_sum(
    const std::vector<ShadowSnapshot>& snapshots, const PauliSum& sum,
    const EstimationOptions& options) {
  check_snapshots(snapshots, sum.num_qubits());
  if (!(options.delta > 0.0) || !(options.delta < 1.0)) {
    throw InputError("delta must lie in (0, 1)");
  }
  if (options.median_groups > snapshots.size()) {
    throw InputError("more median groups than snapshots");
  }
  auto terms = sum.sorted_terms();
  std::vector<double> means(terms.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(terms.size()); ++i) {
    means[static_cast<std::size_t>(i)] = term_shadow_mean(
        snapshots, terms[static_cast<std::size_t>(i)].first,
        options.median_groups);
  }

  EstimateReport report;
  report.method = "shadows";
  report.confidence = 1.0 - options.delta;
  report.shots = snapshots.size();
  Complex value = 0.0;
  double gamma_l1 = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    value += terms[i].second * means[i];
    gamma_l1 += std::abs(terms[i].second);
  }
  report.value = value;
  report.radius =
      gamma_l1 * bounds::invert_shadow_radius(sum.max_weight(),
                                              terms.size(),
                                              snapshots.size(),
                                              options.delta);
  return report;
}

EstimateReport loschmidt_estimate(const PauliSum& propagator,
                                  MeasurementSource& source,
                                  std::uint64_t shots, std::uint64_t seed,
                                  const EstimationOptions& options) {
  EstimateReport report =
      importance_estimate(propagator, source, shots, seed, options);
  report.method = "loschmidt-importance";
  return report;
}

}  // namespace paulisim
