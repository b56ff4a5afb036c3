#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "fsq/core_dft.hpp"

namespace fsq::testing {

// Reference transforms written straight from the definition, independent of
// the library's own oracle: xhat_f = n^{-1/2} sum_j x_j exp(sign 2 pi i f j / n).
inline std::vector<cplx> reference_dft(std::span<const cplx> x, int sign = -1) {
  const std::size_t n = x.size();
  std::vector<cplx> out(n);
  for (std::size_t f = 0; f < n; ++f) {
    cplx acc{};
    for (std::size_t j = 0; j < n; ++j) {
      const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>((f * j) % n) / static_cast<double>(n);
      acc += x[j] * std::polar(1.0, angle);
    }
    out[f] = acc / std::sqrt(static_cast<double>(n));
  }
  return out;
}

inline std::vector<cplx> random_complex(std::mt19937_64& rng, std::size_t n, double sd = 1.0) {
  std::normal_distribution<double> g(0.0, sd);
  std::vector<cplx> v(n);
  for (auto& e : v) e = {g(rng), g(rng)};
  return v;
}

inline double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

inline double l2(std::span<const cplx> v) {
  double s = 0.0;
  for (const auto& e : v) s += std::norm(e);
  return std::sqrt(s);
}

// Signed residue of i mod n in (-n/2, n/2], computed independently.
inline std::int64_t centered(std::int64_t i, std::int64_t n) {
  std::int64_t r = ((i % n) + n) % n;
  return r > n / 2 ? r - n : r;
}

}  // namespace fsq::testing
