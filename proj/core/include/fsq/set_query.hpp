#pragma once

#include <chrono>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "fsq/core_dft.hpp"
#include "fsq/filter.hpp"
#include "fsq/hash_to_bins.hpp"
#include "fsq/permutation.hpp"

namespace fsq {

/// Constants of the geometric parameter schedule. Defaults are the values the
/// algorithm was analysed with; they make B_1 exceed any desk-scale n.
struct ScheduleConstants {
  double gamma = 1.0 / 1000.0;  // shrink factor for k_i
  double C = 1000.0;            // bucket constant
  double alpha_const = 200.0;   // alpha_i = 1 / (alpha_const * i^3)
};

/// Practical profile used by the harness: gamma = 1/4, C = 4.
inline constexpr ScheduleConstants kPracticalConstants{0.25, 4.0, 200.0};

struct ScheduleRow {
  int iteration = 1;         // 1-based
  double k = 0.0;            // k gamma^(i-1)
  double eps = 0.0;          // min(eps (10 gamma)^i, eps)
  bool eps_capped = false;
  double alpha = 0.0;        // 1 / (alpha_const i^3)
  double buckets_raw = 0.0;  // C k_i / (alpha_i^2 eps_i)
  std::uint64_t buckets = 0; // next power of two, clamped to [2, n]
  bool clamped = false;
};

struct Schedule {
  ScheduleConstants constants;
  std::uint64_t n = 0;
  double delta = 0.0;
  int rounds = 0;  // R = max(1, ceil(log_{1/gamma} k))
  std::vector<ScheduleRow> rows;
};

/// Requires k >= 1, eps in (0,1), gamma in (0,1), C >= 1, alpha_const >= 1,
/// n a power of two >= 2.
Schedule compute_schedule(std::size_t k, double eps, double delta, std::uint64_t n,
                          const ScheduleConstants& constants = {});

struct EstimateResult {
  SparseSpectrum values;       // supported exactly on `isolated`
  std::vector<Index> isolated; // T: no collision and no large offset
  PermutationParams params;
  HashToBinsResult hashing;
};

/// One round of estimation with fresh (sigma, a, b) drawn from rng.
EstimateResult estimate_values(const Signal& x, const SparseSpectrum& zhat, std::span<const Index> query,
                               const FilterPair& fp, std::mt19937_64& rng);

/// Same round with caller-chosen permutation parameters.
EstimateResult estimate_values(const Signal& x, const SparseSpectrum& zhat, std::span<const Index> query,
                               const FilterPair& fp, const PermutationParams& params);

struct IterationRecord {
  ScheduleRow row;
  std::size_t remaining = 0;        // |S_i|
  std::vector<Index> isolated;      // T_i
  SparseSpectrum update{0};         // what_i
  PermutationParams params;
  double bins_norm = 0.0;           // ||uhat||_2
  std::size_t large_offset_in_estimate = 0;
  std::size_t filter_support = 0;
  std::size_t samples_after = 0;    // distinct reads of x after this round
};

struct QueryReport {
  SparseSpectrum estimate{0};  // zhat^(R+1), supported inside the query set
  std::size_t samples_used = 0;
  std::chrono::nanoseconds wall_time{0};
  Schedule schedule;
  std::vector<IterationRecord> iterations;
  std::vector<Index> unresolved;  // S_{R+1}: never isolated, estimated as 0
};

struct QueryOptions {
  double eps = 0.5;
  double delta = 1e-3;
  ScheduleConstants constants{};
};

/// Estimates xhat on `query` from samples of x.
///
/// With probability >= 9/10 the result satisfies
///   ||(zhat - xhat)_S||_2^2 <= eps ||xhat_{not S}||_2^2 + delta ||xhat||_1^2.
/// `filters` may be null; pass a shared cache to amortize filter builds.
QueryReport fourier_set_query(const Signal& x, std::span<const Index> query, const QueryOptions& options,
                              std::mt19937_64& rng, FilterCache* filters = nullptr);

/// Runs the outer loop with an explicit schedule (rows are used as given).
QueryReport fourier_set_query(const Signal& x, std::span<const Index> query, const Schedule& schedule,
                              std::mt19937_64& rng, FilterCache* filters = nullptr);

}  // namespace fsq
