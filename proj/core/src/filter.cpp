#include "fsq/filter.hpp"

#include "fsq/permutation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>

namespace fsq {

namespace {

// Above this size leakage during the search comes from the tail bound alone.
constexpr std::uint64_t kFftSearchLimit = std::uint64_t{1} << 16;

double smoothed_box(double r, double half_width, double sd) {
  const double scale = 1.0 / (sd * std::numbers::sqrt2);
  return 0.5 * (std::erfc((r - half_width) * scale) - std::erfc((r + half_width) * scale));
}

// z with P(N(0,1) > z) = p, for p in (0, 1/2].
double upper_normal_quantile(double p) {
  double lo = 0.0;
  double hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(mid / std::numbers::sqrt2) > p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

// Gaussian-windowed sinc: the time-domain form of the smoothed box, scaled so
// its unitary DFT approximates the box itself.
double window_value(std::int64_t t, std::uint64_t n, double half_width, double sd) {
  const double dn = static_cast<double>(n);
  const double dt = static_cast<double>(t);
  const double gauss = std::exp(-2.0 * std::numbers::pi * std::numbers::pi * sd * sd * dt * dt / (dn * dn));
  return 2.0 * half_width * sinc(2.0 * half_width * dt / dn) * gauss / std::sqrt(dn);
}

std::vector<FilterTap> truncated_taps(std::uint64_t n, double half_width, double sd, std::int64_t w) {
  std::vector<FilterTap> taps;
  taps.reserve(static_cast<std::size_t>(2 * w + 1));
  for (std::int64_t t = -w; t <= w; ++t) {
    const double v = window_value(t, n, half_width, sd);
    if (v != 0.0) taps.push_back({t, v});
  }
  return taps;
}

// Upper bound on max_k |DFT(G)_k - DFT(G_untruncated)_k| from the dropped taps.
double truncation_bound(std::uint64_t n, double half_width, double sd, std::int64_t w) {
  const auto half = static_cast<std::int64_t>(n / 2);
  double tail = 0.0;
  for (std::int64_t t = w + 1; t <= half; ++t) {
    const double v = std::abs(window_value(t, n, half_width, sd));
    tail += (t == half) ? v : 2.0 * v;
    if (v == 0.0) break;
  }
  return tail / std::sqrt(static_cast<double>(n));
}

std::vector<double> ideal_response(const FilterPair& fp) {
  std::vector<double> out(fp.n);
  for (std::uint64_t k = 0; k < fp.n; ++k) out[k] = eval_ghat(fp, static_cast<std::int64_t>(k));
  return out;
}

double fft_leakage(const FilterPair& fp, const std::vector<double>& ideal) {
  const auto spectrum = fft(fp.dense_window());
  double worst = 0.0;
  for (std::uint64_t k = 0; k < fp.n; ++k) worst = std::max(worst, std::abs(spectrum[k] - ideal[k]));
  return worst;
}

// Direct-sum unitary DFT of G at frequency k; `roots` is either empty or the
// full table of n-th roots of unity.
cplx response_at(const FilterPair& fp, std::int64_t k, const std::vector<cplx>& roots) {
  const std::uint64_t mask = fp.n - 1;
  const auto uk = static_cast<std::uint64_t>(k) & mask;
  cplx acc{};
  for (const auto& tap : fp.taps) {
    const std::uint64_t m = (uk * (static_cast<std::uint64_t>(tap.t) & mask)) & mask;
    acc += tap.value * (roots.empty() ? unit_root(m, fp.n) : roots[m]);
  }
  return acc / std::sqrt(static_cast<double>(fp.n));
}

void fill_full_support(FilterPair& fp) {
  const auto ideal = ideal_response(fp);
  std::vector<cplx> spectrum(ideal.begin(), ideal.end());
  const auto window = ifft(spectrum);
  fp.taps.clear();
  fp.taps.reserve(fp.n);
  const auto half = static_cast<std::int64_t>(fp.n / 2);
  for (std::uint64_t t = 0; t < fp.n; ++t) {
    auto st = static_cast<std::int64_t>(t);
    if (st > half) st -= static_cast<std::int64_t>(fp.n);
    // Ghat' is real and even, so the window is real up to rounding.
    fp.taps.push_back({st, window[t].real()});
  }
  std::sort(fp.taps.begin(), fp.taps.end(), [](const FilterTap& a, const FilterTap& b) { return a.t < b.t; });
  fp.full_support = true;
}

}  // namespace

double FilterPair::flat_edge() const noexcept {
  return (1.0 - alpha) * static_cast<double>(n) / (2.0 * static_cast<double>(buckets));
}

double FilterPair::stop_edge() const noexcept {
  return static_cast<double>(n) / (2.0 * static_cast<double>(buckets));
}

double FilterPair::support_ratio() const noexcept {
  const double budget = static_cast<double>(buckets) / alpha * std::log(static_cast<double>(n) / delta);
  return static_cast<double>(taps.size()) / budget;
}

std::vector<cplx> FilterPair::dense_window() const {
  std::vector<cplx> out(n);
  for (const auto& tap : taps) out[static_cast<std::uint64_t>(tap.t) & (n - 1)] += tap.value;
  return out;
}

double eval_ghat(const FilterPair& fp, std::int64_t i) {
  const double r = std::abs(static_cast<double>(signed_residue(i, fp.n)));
  if (r <= fp.flat_edge()) return 1.0;
  if (r >= fp.stop_edge()) return 0.0;
  return std::clamp(smoothed_box(r, fp.box_half_width, fp.smoothing), 0.0, 1.0);
}

FilterCheck check_filter(const FilterPair& fp, std::uint64_t dense_limit) {
  FilterCheck check;
  check.flat_region_ok = true;
  check.stop_region_ok = true;
  check.range_ok = true;

  std::vector<std::int64_t> freqs;
  const auto half = static_cast<std::int64_t>(fp.n / 2);
  if (fp.n <= dense_limit) {
    for (std::int64_t k = -half + 1; k <= half; ++k) freqs.push_back(k);
  } else {
    const auto flat = static_cast<std::int64_t>(std::floor(fp.flat_edge()));
    const auto stop = static_cast<std::int64_t>(std::ceil(fp.stop_edge()));
    for (std::int64_t d = -3; d <= 3; ++d) {
      freqs.push_back(flat + d);
      freqs.push_back(stop + d);
      freqs.push_back(d);
    }
    freqs.push_back(half);
    // First sidelobes sit just past the stop edge.
    const std::int64_t width = std::max<std::int64_t>(1, stop);
    for (std::int64_t k = stop; k < std::min(half, stop + 8 * width); k += std::max<std::int64_t>(1, width / 16)) {
      freqs.push_back(k);
    }
    std::mt19937_64 rng(0x5eedf117e4ULL ^ fp.n ^ (fp.buckets << 20));
    std::uniform_int_distribution<std::int64_t> any(-half + 1, half);
    for (int s = 0; s < 512; ++s) freqs.push_back(any(rng));
  }

  std::vector<cplx> roots;
  if (fp.n <= (std::uint64_t{1} << 22)) {
    roots.resize(fp.n);
    for (std::uint64_t m = 0; m < fp.n; ++m) roots[m] = unit_root(m, fp.n);
  }
  for (const auto k : freqs) {
    const double ideal = eval_ghat(fp, k);
    const double r = std::abs(static_cast<double>(signed_residue(k, fp.n)));
    if (r <= fp.flat_edge() && ideal != 1.0) check.flat_region_ok = false;
    if (r >= fp.stop_edge() && ideal != 0.0) check.stop_region_ok = false;
    if (ideal < 0.0 || ideal > 1.0) check.range_ok = false;
    check.max_leakage = std::max(check.max_leakage, std::abs(response_at(fp, k, roots) - ideal));
  }
  check.checked_frequencies = freqs.size();
  check.support_ok = fp.support_ratio() <= kFilterSupportConstant;
  return check;
}

FilterPair build_filter(std::uint64_t n, std::uint64_t buckets, double delta, double alpha) {
  if (!is_power_of_two(n)) throw InvalidArgument("build_filter: n must be a power of two");
  if (buckets < 2 || n % buckets != 0) throw InvalidArgument("build_filter: B must divide n and be >= 2");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("build_filter: delta must lie in (0, 1)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("build_filter: alpha must lie in (0, 1)");

  FilterPair fp;
  fp.n = n;
  fp.buckets = buckets;
  fp.delta = delta;
  fp.alpha = alpha;
  fp.box_half_width = (1.0 - alpha / 2.0) * fp.stop_edge();
  // Distance from the box edge to both the flat edge and the stop edge.
  const double guard = alpha * fp.stop_edge() / 2.0;

  const auto half = static_cast<std::int64_t>(n / 2);
  const bool fft_search = n <= kFftSearchLimit;

  struct Candidate {
    double smoothing;
    std::int64_t w;
    double leakage;
  };
  std::optional<Candidate> best;

  // Split delta between the smoothing tail at the band edges and the
  // truncation of the time window; keep whichever split needs fewer taps.
  for (const double share : {0.25, 0.5, 0.75}) {
    fp.smoothing = guard / upper_normal_quantile(share * delta);
    const double budget = (1.0 - share) * delta;

    std::int64_t lo = 0;
    std::int64_t hi = half - 1;
    while (lo < hi) {
      const std::int64_t mid = lo + (hi - lo) / 2;
      if (truncation_bound(n, fp.box_half_width, fp.smoothing, mid) <= budget) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    std::int64_t w = hi;
    if (2 * w + 1 >= static_cast<std::int64_t>(n)) {
      if (!fft_search) continue;
      w = half - 1;
    }

    double leakage = 0.0;
    if (fft_search) {
      const auto ideal = ideal_response(fp);
      auto leakage_at = [&](std::int64_t width) {
        fp.taps = truncated_taps(n, fp.box_half_width, fp.smoothing, width);
        return fft_leakage(fp, ideal);
      };
      // The tail bound is loose; shrink w while the measured leakage allows.
      std::int64_t good = w;
      double good_leak = leakage_at(w);
      if (good_leak > delta) continue;
      std::int64_t bad = 0;
      while (good - bad > 1) {
        const std::int64_t mid = bad + (good - bad) / 2;
        const double leak = leakage_at(mid);
        if (leak <= delta) {
          good = mid;
          good_leak = leak;
        } else {
          bad = mid;
        }
      }
      w = good;
      leakage = good_leak;
    } else {
      leakage = truncation_bound(n, fp.box_half_width, fp.smoothing, w) + share * delta;
    }
    if (!best || w < best->w) best = Candidate{fp.smoothing, w, leakage};
  }

  if (best) {
    fp.smoothing = best->smoothing;
    fp.taps = truncated_taps(n, fp.box_half_width, fp.smoothing, best->w);
    fp.full_support = false;
    fp.measured_leakage = best->leakage;
  } else {
    fp.smoothing = guard / upper_normal_quantile(0.5 * delta);
    fill_full_support(fp);
    fp.measured_leakage = fft_search ? fft_leakage(fp, ideal_response(fp)) : 0.0;
  }

  FilterCheck check;
  if (n <= 4096) {
    check = check_filter(fp, 4096);
    fp.verification = FilterVerification::DirectSum;
    fp.measured_leakage = check.max_leakage;
  } else {
    check = check_filter(fp, 0);
    if (fft_search) {
      fp.verification = FilterVerification::Fft;
      check.max_leakage = std::max(check.max_leakage, fp.measured_leakage);
    } else {
      fp.verification = FilterVerification::Spot;
    }
    fp.measured_leakage = std::max(fp.measured_leakage, check.max_leakage);
  }
  if (!check.passed(delta)) {
    throw FilterBuildError("build_filter: no window for n=" + std::to_string(n) + " B=" + std::to_string(buckets) +
                               " meets the filter properties (leakage " + std::to_string(check.max_leakage) +
                               ", support " + std::to_string(fp.support_size()) + ")",
                           check.max_leakage);
  }
  return fp;
}

}  // namespace fsq
