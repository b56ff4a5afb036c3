#pragma once

#include <atomic>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace fsq {

using cplx = std::complex<double>;
using Index = std::uint64_t;

/// Thrown for any violated precondition on a public entry point.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

constexpr bool is_power_of_two(std::uint64_t n) noexcept {
  return n != 0 && (n & (n - 1)) == 0;
}

/// Smallest power of two >= x (x >= 1).
std::uint64_t next_power_of_two(double x);

/// exp(-2*pi*i*m/n) with m reduced mod n first, so large exponents keep full precision.
cplx unit_root(std::uint64_t m, std::uint64_t n);

/// Time-domain signal behind an access-counting oracle.
///
/// Every read through at() records the index; distinct_reads() is the sample
/// complexity of whatever ran against the signal. Counting is lock-free and
/// safe under concurrent readers.
class Signal {
 public:
  explicit Signal(std::vector<cplx> values);

  Signal(const Signal&) = delete;
  Signal& operator=(const Signal&) = delete;
  Signal(Signal&&) noexcept = default;
  Signal& operator=(Signal&&) noexcept = default;

  std::size_t size() const noexcept { return values_.size(); }

  /// Counted read.
  cplx at(Index i) const;

  std::size_t distinct_reads() const noexcept {
    return reads_->load(std::memory_order_relaxed);
  }
  bool was_read(Index i) const noexcept {
    return seen_[i].load(std::memory_order_relaxed) != 0;
  }
  void reset_reads() noexcept;

  /// Uncounted view for oracles and test code.
  std::span<const cplx> raw() const noexcept { return values_; }

 private:
  std::vector<cplx> values_;
  std::unique_ptr<std::atomic<std::uint8_t>[]> seen_;
  std::unique_ptr<std::atomic<std::size_t>> reads_;
};

/// Sparse frequency-domain vector. Zero coefficients are never stored.
class SparseSpectrum {
 public:
  explicit SparseSpectrum(std::size_t n) : n_(n) {}

  std::size_t dim() const noexcept { return n_; }
  std::size_t nnz() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  cplx get(Index i) const;
  void set(Index i, cplx v);
  void add(Index i, cplx v) { set(i, get(i) + v); }
  bool contains(Index i) const { return entries_.count(i) != 0; }

  const std::map<Index, cplx>& entries() const noexcept { return entries_; }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  std::vector<cplx> to_dense() const;

 private:
  std::size_t n_;
  std::map<Index, cplx> entries_;
};

/// Unitary DFT by direct summation, O(n^2). Ground truth for every test.
std::vector<cplx> dft_oracle(std::span<const cplx> x);
std::vector<cplx> inverse_dft_oracle(std::span<const cplx> xhat);

/// Unitary radix-2 FFT. Throws InvalidArgument unless size is a power of two.
std::vector<cplx> fft(std::span<const cplx> x);
std::vector<cplx> ifft(std::span<const cplx> xhat);

/// In-place unnormalized transform: sign -1 forward, +1 inverse.
void fft_inplace(std::span<cplx> data, int sign);

/// l2 norm of x after removing its k largest-magnitude entries (ties keep the
/// lower index).
double err_k(std::span<const cplx> x, std::size_t k);

/// x with every coordinate outside `support` zeroed.
std::vector<cplx> restrict_to(std::span<const cplx> x, std::span<const Index> support);

double norm2_squared(std::span<const cplx> x);
double norm1(std::span<const cplx> x);

}  // namespace fsq
