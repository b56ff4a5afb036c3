#include "fsq/core_dft.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace fsq {

std::uint64_t next_power_of_two(double x) {
  if (!(x >= 1.0)) return 1;
  if (x >= 0x1p63) return std::uint64_t{1} << 63;
  return std::bit_ceil(static_cast<std::uint64_t>(std::ceil(x)));
}

cplx unit_root(std::uint64_t m, std::uint64_t n) {
  const double angle = -2.0 * std::numbers::pi * static_cast<double>(m % n) / static_cast<double>(n);
  return {std::cos(angle), std::sin(angle)};
}

// ---------------------------------------------------------------------------
// Signal

Signal::Signal(std::vector<cplx> values)
    : values_(std::move(values)),
      seen_(std::make_unique<std::atomic<std::uint8_t>[]>(values_.size())),
      reads_(std::make_unique<std::atomic<std::size_t>>(0)) {
  if (!is_power_of_two(values_.size())) {
    throw InvalidArgument("Signal length must be a power of two, got " +
                          std::to_string(values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) seen_[i].store(0, std::memory_order_relaxed);
}

cplx Signal::at(Index i) const {
  if (i >= values_.size()) throw InvalidArgument("Signal index out of range");
  if (seen_[i].exchange(1, std::memory_order_relaxed) == 0) {
    reads_->fetch_add(1, std::memory_order_relaxed);
  }
  return values_[i];
}

void Signal::reset_reads() noexcept {
  for (std::size_t i = 0; i < values_.size(); ++i) seen_[i].store(0, std::memory_order_relaxed);
  reads_->store(0, std::memory_order_relaxed);
}

// ---------------------------------------------------------------------------
// SparseSpectrum

cplx SparseSpectrum::get(Index i) const {
  const auto it = entries_.find(i);
  return it == entries_.end() ? cplx{} : it->second;
}

void SparseSpectrum::set(Index i, cplx v) {
  if (i >= n_) throw InvalidArgument("SparseSpectrum index out of range");
  if (v == cplx{}) {
    entries_.erase(i);
  } else {
    entries_[i] = v;
  }
}

std::vector<cplx> SparseSpectrum::to_dense() const {
  std::vector<cplx> out(n_);
  for (const auto& [i, v] : entries_) out[i] = v;
  return out;
}

// ---------------------------------------------------------------------------
// Transforms

namespace {

std::vector<cplx> direct_transform(std::span<const cplx> in, int sign) {
  const std::size_t n = in.size();
  std::vector<cplx> out(n);
  if (n == 0) return out;
  // Twiddle table indexed by (i*j) mod n keeps every angle exact.
  std::vector<cplx> twiddle(n);
  for (std::size_t m = 0; m < n; ++m) {
    const auto w = unit_root(m, n);
    twiddle[m] = sign < 0 ? w : std::conj(w);
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    cplx acc{};
    std::size_t m = 0;
    for (std::size_t j = 0; j < n; ++j) {
      acc += in[j] * twiddle[m];
      m += i;
      if (m >= n) m -= n;
    }
    out[i] = acc * scale;
  }
  return out;
}

}  // namespace

std::vector<cplx> dft_oracle(std::span<const cplx> x) { return direct_transform(x, -1); }

std::vector<cplx> inverse_dft_oracle(std::span<const cplx> xhat) { return direct_transform(xhat, +1); }

void fft_inplace(std::span<cplx> data, int sign) {
  const std::size_t n = data.size();
  if (!is_power_of_two(n)) {
    throw InvalidArgument("fft length must be a power of two, got " + std::to_string(n));
  }
  if (n == 1) return;

  const int log2n = std::countr_zero(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (int b = 0; b < log2n; ++b) r |= ((i >> b) & 1U) << (log2n - 1 - b);
    if (r > i) std::swap(data[i], data[r]);
  }

  // Twiddles computed per stage from the root table to avoid drift from
  // repeated multiplication.
  std::vector<cplx> roots(n / 2);
  for (std::size_t m = 0; m < n / 2; ++m) {
    const auto w = unit_root(m, n);
    roots[m] = sign < 0 ? w : std::conj(w);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len >> 1;
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const cplx u = data[start + j];
        const cplx v = data[start + j + half] * roots[j * stride];
        data[start + j] = u + v;
        data[start + j + half] = u - v;
      }
    }
  }
}

std::vector<cplx> fft(std::span<const cplx> x) {
  std::vector<cplx> out(x.begin(), x.end());
  fft_inplace(out, -1);
  const double scale = 1.0 / std::sqrt(static_cast<double>(out.size()));
  for (auto& v : out) v *= scale;
  return out;
}

std::vector<cplx> ifft(std::span<const cplx> xhat) {
  std::vector<cplx> out(xhat.begin(), xhat.end());
  fft_inplace(out, +1);
  const double scale = 1.0 / std::sqrt(static_cast<double>(out.size()));
  for (auto& v : out) v *= scale;
  return out;
}

// ---------------------------------------------------------------------------
// Norms and sparse approximation

double norm2_squared(std::span<const cplx> x) {
  double acc = 0.0;
  for (const auto& v : x) acc += std::norm(v);
  return acc;
}

double norm1(std::span<const cplx> x) {
  double acc = 0.0;
  for (const auto& v : x) acc += std::abs(v);
  return acc;
}

double err_k(std::span<const cplx> x, std::size_t k) {
  if (k > x.size()) throw InvalidArgument("err_k: k exceeds vector length");
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::norm(x[a]) > std::norm(x[b]);
  });
  double tail = 0.0;
  for (std::size_t r = k; r < order.size(); ++r) tail += std::norm(x[order[r]]);
  return std::sqrt(tail);
}

std::vector<cplx> restrict_to(std::span<const cplx> x, std::span<const Index> support) {
  std::vector<cplx> out(x.size());
  for (const Index i : support) {
    if (i >= x.size()) throw InvalidArgument("restrict_to: index out of range");
    out[i] = x[i];
  }
  return out;
}

}  // namespace fsq
