#include "fsq/set_query.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace fsq {

Schedule compute_schedule(std::size_t k, double eps, double delta, std::uint64_t n,
                          const ScheduleConstants& constants) {
  if (k < 1) throw InvalidArgument("compute_schedule: k must be >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("compute_schedule: eps must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("compute_schedule: delta must lie in (0, 1)");
  if (!(constants.gamma > 0.0 && constants.gamma < 1.0)) {
    throw InvalidArgument("compute_schedule: gamma must lie in (0, 1)");
  }
  if (!(constants.C >= 1.0)) throw InvalidArgument("compute_schedule: C must be >= 1");
  if (!(constants.alpha_const >= 1.0)) throw InvalidArgument("compute_schedule: alpha constant must be >= 1");
  if (!is_power_of_two(n) || n < 2) throw InvalidArgument("compute_schedule: n must be a power of two >= 2");

  Schedule s;
  s.constants = constants;
  s.n = n;
  s.delta = delta;
  const double levels = std::log(static_cast<double>(k)) / std::log(1.0 / constants.gamma);
  s.rounds = std::max(1, static_cast<int>(std::ceil(levels - 1e-9)));

  for (int i = 1; i <= s.rounds; ++i) {
    ScheduleRow row;
    row.iteration = i;
    row.k = static_cast<double>(k) * std::pow(constants.gamma, i - 1);
    const double eps_raw = eps * std::pow(10.0 * constants.gamma, i);
    row.eps = std::min(eps_raw, eps);
    row.eps_capped = eps_raw > eps;
    row.alpha = 1.0 / (constants.alpha_const * std::pow(static_cast<double>(i), 3));
    row.buckets_raw = constants.C * row.k / (row.alpha * row.alpha * row.eps);
    const std::uint64_t rounded = next_power_of_two(row.buckets_raw);
    row.buckets = std::clamp<std::uint64_t>(rounded, 2, n);
    row.clamped = rounded > n;
    s.rows.push_back(row);
  }
  return s;
}

EstimateResult estimate_values(const Signal& x, const SparseSpectrum& zhat, std::span<const Index> query,
                               const FilterPair& fp, const PermutationParams& params) {
  if (query.empty()) throw InvalidArgument("estimate_values: query set is empty");

  EstimateResult out{SparseSpectrum(x.size()), {}, params, hash_to_bins(x, zhat, params, fp)};

  std::map<std::uint64_t, std::size_t> load;
  std::vector<std::uint64_t> bins(query.size());
  for (std::size_t r = 0; r < query.size(); ++r) {
    bins[r] = hash_bin(params, fp.buckets, query[r]);
    ++load[bins[r]];
  }

  const double flat = fp.flat_edge();
  const auto& uhat = out.hashing.bins.values;
  for (std::size_t r = 0; r < query.size(); ++r) {
    const Index t = query[r];
    if (load[bins[r]] != 1) continue;
    if (std::abs(static_cast<double>(offset(params, fp.buckets, t))) >= flat) continue;
    out.isolated.push_back(t);
    out.values.set(t, uhat[bins[r]] * std::conj(permutation_phase(params, t)));
  }
  return out;
}

EstimateResult estimate_values(const Signal& x, const SparseSpectrum& zhat, std::span<const Index> query,
                               const FilterPair& fp, std::mt19937_64& rng) {
  return estimate_values(x, zhat, query, fp, sample_params(rng, x.size()));
}

namespace {

void validate_query(std::span<const Index> query, std::uint64_t n) {
  if (query.empty()) throw InvalidArgument("fourier_set_query: query set is empty");
  std::vector<Index> sorted(query.begin(), query.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.back() >= n) throw InvalidArgument("fourier_set_query: query index out of range");
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidArgument("fourier_set_query: query set has duplicate indices");
  }
}

}  // namespace

QueryReport fourier_set_query(const Signal& x, std::span<const Index> query, const Schedule& schedule,
                              std::mt19937_64& rng, FilterCache* filters) {
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t n = x.size();
  validate_query(query, n);
  if (schedule.n != n) throw InvalidArgument("fourier_set_query: schedule built for a different n");

  QueryReport report;
  report.schedule = schedule;
  report.estimate = SparseSpectrum(n);

  std::vector<Index> remaining(query.begin(), query.end());
  for (const auto& row : schedule.rows) {
    if (remaining.empty()) break;

    std::shared_ptr<const FilterPair> fp;
    if (filters != nullptr) {
      fp = filters->get(n, row.buckets, schedule.delta, row.alpha);
    } else {
      fp = std::make_shared<const FilterPair>(build_filter(n, row.buckets, schedule.delta, row.alpha));
    }

    auto round = estimate_values(x, report.estimate, remaining, *fp, rng);

    IterationRecord rec;
    rec.row = row;
    rec.remaining = remaining.size();
    rec.params = round.params;
    rec.bins_norm = std::sqrt(norm2_squared(round.hashing.bins.values));
    rec.large_offset_in_estimate = round.hashing.large_offset_in_estimate;
    rec.filter_support = fp->support_size();

    for (const auto& [t, v] : round.values) report.estimate.add(t, v);
    std::vector<Index> isolated_sorted = round.isolated;
    std::sort(isolated_sorted.begin(), isolated_sorted.end());
    std::erase_if(remaining, [&](Index t) {
      return std::binary_search(isolated_sorted.begin(), isolated_sorted.end(), t);
    });

    rec.isolated = std::move(round.isolated);
    rec.update = std::move(round.values);
    rec.samples_after = x.distinct_reads();
    report.iterations.push_back(std::move(rec));
  }

  report.unresolved = std::move(remaining);
  report.samples_used = x.distinct_reads();
  report.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start);
  return report;
}

QueryReport fourier_set_query(const Signal& x, std::span<const Index> query, const QueryOptions& options,
                              std::mt19937_64& rng, FilterCache* filters) {
  validate_query(query, x.size());
  const auto schedule = compute_schedule(query.size(), options.eps, options.delta, x.size(), options.constants);
  return fourier_set_query(x, query, schedule, rng, filters);
}

}  // namespace fsq
