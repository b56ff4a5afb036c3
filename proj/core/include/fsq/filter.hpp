#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "fsq/core_dft.hpp"

namespace fsq {

/// Ratio bound c_f in |supp(G)| <= c_f * B / alpha * ln(n / delta).
inline constexpr double kFilterSupportConstant = 4.0;

class FilterBuildError : public std::runtime_error {
 public:
  FilterBuildError(const std::string& what, double achieved_leakage)
      : std::runtime_error(what), achieved_leakage_(achieved_leakage) {}
  double achieved_leakage() const noexcept { return achieved_leakage_; }

 private:
  double achieved_leakage_;
};

/// One nonzero time-domain tap of G at signed offset t in (-n/2, n/2].
struct FilterTap {
  std::int64_t t;
  double value;
};

/// How a FilterPair's leakage was checked at build time.
enum class FilterVerification { DirectSum, Fft, Spot };

/// Flat-window filter pair (G, Ghat').
///
/// G is a real, even, time-sparse window; Ghat' is its ideal frequency
/// response: exactly 1 for |i| <= (1 - alpha) n / (2B), exactly 0 for
/// |i| >= n / (2B), and a Gaussian-smoothed box in between. The unitary DFT
/// of G is within `delta` of Ghat' everywhere.
struct FilterPair {
  std::uint64_t n = 0;
  std::uint64_t buckets = 0;
  double delta = 0.0;
  double alpha = 0.0;

  /// Box half-width (1 - alpha/2) n / (2B), in frequency bins.
  double box_half_width = 0.0;
  /// Standard deviation of the smoothing Gaussian, in frequency bins.
  double smoothing = 0.0;

  std::vector<FilterTap> taps;
  bool full_support = false;

  double measured_leakage = 0.0;
  FilterVerification verification = FilterVerification::DirectSum;

  std::size_t support_size() const noexcept { return taps.size(); }
  double flat_edge() const noexcept;  // (1 - alpha) n / (2B)
  double stop_edge() const noexcept;  // n / (2B)

  /// c_f actually achieved: support / (B / alpha * ln(n / delta)).
  double support_ratio() const noexcept;

  /// Dense length-n time window.
  std::vector<cplx> dense_window() const;
};

/// Ghat'_i for i taken mod n into (-n/2, n/2]. Values lie in [0, 1] and are
/// nonincreasing in |i|.
double eval_ghat(const FilterPair& fp, std::int64_t i);

/// Builds and verifies a filter. Requires B | n, B >= 2, delta and alpha in
/// (0, 1). Throws FilterBuildError when no window meets every property within
/// the support budget.
FilterPair build_filter(std::uint64_t n, std::uint64_t buckets, double delta, double alpha);

/// Outcome of checking the five filter properties.
struct FilterCheck {
  double max_leakage = 0.0;      // max_i |DFT(G)_i - Ghat'_i| over the checked set
  bool flat_region_ok = false;   // Ghat' == 1 on the flat region
  bool stop_region_ok = false;   // Ghat' == 0 outside the bucket
  bool range_ok = false;         // Ghat' in [0, 1]
  bool support_ok = false;       // within kFilterSupportConstant
  std::size_t checked_frequencies = 0;

  bool passed(double delta) const noexcept {
    return flat_region_ok && stop_region_ok && range_ok && support_ok && max_leakage <= delta;
  }
};

/// Re-verifies a filter. Dense by direct summation when n <= dense_limit,
/// otherwise at spot frequencies (band edges plus a deterministic sample).
FilterCheck check_filter(const FilterPair& fp, std::uint64_t dense_limit = 4096);

// ---------------------------------------------------------------------------
// Binary cache.
//
// Layout, all little-endian:
//   char[4]  magic "FSQF"
//   u32      version (1)
//   u64      n
//   u64      B
//   f64      delta
//   f64      alpha
//   f64      smoothing      (Gaussian width needed to evaluate Ghat')
//   u64      count
//   count x { i64 t; f64 value; }

void write_filter(const FilterPair& fp, const std::filesystem::path& path);
FilterPair read_filter(const std::filesystem::path& path);

/// Thread-safe memo of built filters, optionally persisted to a directory.
class FilterCache {
 public:
  FilterCache() = default;
  explicit FilterCache(std::filesystem::path directory);

  std::shared_ptr<const FilterPair> get(std::uint64_t n, std::uint64_t buckets, double delta,
                                        double alpha);

  std::size_t builds() const;
  std::size_t size() const;

 private:
  using Key = std::tuple<std::uint64_t, std::uint64_t, double, double>;
  std::filesystem::path file_for(const Key& key) const;

  mutable std::mutex mutex_;
  std::map<Key, std::shared_ptr<const FilterPair>> filters_;
  std::filesystem::path directory_;
  std::size_t builds_ = 0;
};

}  // namespace fsq
