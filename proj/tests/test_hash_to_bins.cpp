#include <gtest/gtest.h>

#include <unordered_set>

#include "fsq/hash_to_bins.hpp"
#include "test_support.hpp"

namespace fsq {
namespace {

using testing::random_complex;
using testing::reference_dft;

// Explicit bucket sum: sum_{h(i) = j} (xhat - zhat)_i Ghat'_{-o(i)} exp(-2 pi i sigma a i / n).
std::vector<cplx> explicit_bins(const std::vector<cplx>& xhat, const SparseSpectrum& zhat, const PermutationParams& p,
                                const FilterPair& fp) {
  const std::uint64_t n = xhat.size();
  std::vector<cplx> out(fp.buckets);
  for (Index i = 0; i < n; ++i) {
    const cplx v = xhat[i] - zhat.get(i);
    if (v == cplx{}) continue;
    const double angle = -2.0 * std::numbers::pi * static_cast<double>((p.sigma * p.a % n) * i % n) / n;
    out[hash_bin(p, fp.buckets, i)] += v * eval_ghat(fp, -offset(p, fp.buckets, i)) * std::polar(1.0, angle);
  }
  return out;
}

struct Instance {
  std::vector<cplx> xhat;
  SparseSpectrum zhat{0};
};

Instance sparse_instance(std::mt19937_64& rng, std::uint64_t n, std::size_t k, std::size_t z_entries,
                         double noise = 0.0) {
  Instance in;
  in.xhat.assign(n, cplx{});
  in.zhat = SparseSpectrum(n);
  std::uniform_int_distribution<Index> any(0, n - 1);
  std::uniform_real_distribution<double> phase(0.0, 2 * std::numbers::pi);
  std::unordered_set<Index> used;
  while (used.size() < k) {
    const Index i = any(rng);
    if (used.insert(i).second) in.xhat[i] = std::polar(1.0, phase(rng));
  }
  std::normal_distribution<double> g(0.0, noise);
  if (noise > 0) {
    for (auto& v : in.xhat) v += cplx{g(rng), g(rng)};
  }
  while (in.zhat.nnz() < z_entries) in.zhat.set(any(rng), std::polar(0.7, phase(rng)));
  return in;
}

TEST(HashToBins, ZeroSignalGivesZeroBins) {
  const auto fp = build_filter(256, 16, 1e-3, 0.25);
  Signal x(std::vector<cplx>(256));
  std::mt19937_64 rng(1);
  const auto out = hash_to_bins(x, SparseSpectrum(256), sample_params(rng, 256), fp);
  ASSERT_EQ(out.bins.values.size(), 16u);
  for (const auto& v : out.bins.values) EXPECT_EQ(v, cplx{});
}

TEST(HashToBins, SingleToneLandsInItsBucket) {
  const std::uint64_t n = 1024;
  const double delta = 1e-3;
  const auto fp = build_filter(n, 32, delta, 0.25);
  PermutationParams p;
  p.n = n;
  for (const Index f : {Index{0}, Index{7}, Index{13}, Index{300}, Index{1000}}) {
    std::vector<cplx> xhat(n);
    xhat[f] = 1.0;
    Signal x(reference_dft(xhat, +1));
    const auto out = hash_to_bins(x, SparseSpectrum(n), p, fp);
    const auto h = hash_bin(p, 32, f);
    for (std::size_t j = 0; j < 32; ++j) {
      const double target = j == h ? eval_ghat(fp, -offset(p, 32, f)) : 0.0;
      EXPECT_LE(std::abs(out.bins.values[j] - target), delta) << "f=" << f << " j=" << j;
    }
  }
}

TEST(HashToBins, SubtractingTheExactSpectrumCancels) {
  std::mt19937_64 rng(2);
  const std::uint64_t n = 1024;
  const double delta = 1e-3;
  const auto fp = build_filter(n, 64, delta, 0.25);
  for (int rep = 0; rep < 10; ++rep) {
    auto in = sparse_instance(rng, n, 8, 0);
    for (Index i = 0; i < n; ++i) in.zhat.set(i, in.xhat[i]);
    Signal x(reference_dft(in.xhat, +1));
    const auto out = hash_to_bins(x, in.zhat, sample_params(rng, n), fp);
    double l1 = 0.0;
    for (const auto& v : in.xhat) l1 += std::abs(v);
    for (const auto& v : out.bins.values) EXPECT_LE(std::abs(v), delta * l1);
  }
}

TEST(HashToBins, ContractHoldsPerBinOnRandomInstances) {
  std::mt19937_64 rng(3);
  int instances = 0;
  for (std::uint64_t n : {256u, 1024u}) {
    for (std::uint64_t B : {16u, 32u}) {
      for (double delta : {1e-2, 1e-3}) {
        const auto fp = build_filter(n, B, delta, 0.25);
        for (int rep = 0; rep < 13; ++rep, ++instances) {
          const std::size_t k = 1 + rep % (B / 8);
          const auto in = sparse_instance(rng, n, k, rep % 4, rep % 2 ? 0.01 : 0.0);
          Signal x(reference_dft(in.xhat, +1));
          const auto p = sample_params(rng, n);
          const auto out = hash_to_bins(x, in.zhat, p, fp);
          const auto expected = explicit_bins(in.xhat, in.zhat, p, fp);
          double l1 = 0.0;
          for (const auto& v : in.xhat) l1 += std::abs(v);
          for (std::size_t j = 0; j < B; ++j) {
            ASSERT_LE(std::abs(out.bins.values[j] - expected[j]), delta * l1)
                << "n=" << n << " B=" << B << " j=" << j;
          }
        }
      }
    }
  }
  EXPECT_GE(instances, 100);
}

// Bin j equals sqrt(n) times the reference DFT of G * (P x) at frequency j n / B,
// minus the explicit estimate terms.
TEST(HashToBins, MatchesDenseWindowedSpectrum) {
  std::mt19937_64 rng(4);
  const std::uint64_t n = 512;
  const std::uint64_t B = 16;
  const auto fp = build_filter(n, B, 1e-3, 0.25);
  const auto window = fp.dense_window();
  for (int rep = 0; rep < 5; ++rep) {
    const auto xt = random_complex(rng, n);
    auto in = sparse_instance(rng, n, 0, 3);
    Signal x(xt);
    const auto p = sample_params(rng, n);
    std::vector<cplx> y(n);
    for (Index i = 0; i < n; ++i) {
      const Index src = (p.sigma * ((i + n - p.a) % n)) % n;
      const double angle = -2.0 * std::numbers::pi * static_cast<double>((p.sigma * p.b % n) * i % n) / n;
      y[i] = window[i] * xt[src] * std::polar(1.0, angle);
    }
    const auto yhat = reference_dft(y);
    const std::vector<cplx> zero(n);
    const auto z_terms = explicit_bins(zero, in.zhat, p, fp);
    const auto out = hash_to_bins(x, in.zhat, p, fp);
    for (std::size_t j = 0; j < B; ++j) {
      const cplx expected = std::sqrt(static_cast<double>(n)) * yhat[j * (n / B)] + z_terms[j];
      EXPECT_NEAR(std::abs(out.bins.values[j] - expected), 0.0, 1e-10);
    }
  }
}

TEST(HashToBins, ReadsExactlyTheFilterSupport) {
  std::mt19937_64 rng(5);
  const std::uint64_t n = 4096;
  const auto fp = build_filter(n, 32, 1e-3, 0.25);
  ASSERT_FALSE(fp.full_support);
  Signal x(random_complex(rng, n));
  const auto p = sample_params(rng, n);
  const auto out = hash_to_bins(x, SparseSpectrum(n), p, fp);
  EXPECT_EQ(out.samples_read, fp.support_size());
  EXPECT_EQ(x.distinct_reads(), fp.support_size());
  for (const auto& tap : fp.taps) {
    const Index t = static_cast<Index>(tap.t) & (n - 1);
    EXPECT_TRUE(x.was_read((p.sigma * ((t + n - p.a) % n)) % n));
  }
  const auto again = hash_to_bins(x, SparseSpectrum(n), p, fp);
  EXPECT_EQ(again.samples_read, 0u);
}

TEST(HashToBins, IsLinearInTheSignal) {
  std::mt19937_64 rng(6);
  const std::uint64_t n = 1024;
  const auto fp = build_filter(n, 32, 1e-3, 0.125);
  for (int rep = 0; rep < 10; ++rep) {
    const auto a = random_complex(rng, n);
    const auto b = random_complex(rng, n);
    std::vector<cplx> sum(n);
    for (Index i = 0; i < n; ++i) sum[i] = a[i] + b[i];
    const auto p = sample_params(rng, n);
    const SparseSpectrum empty(n);
    const auto ua = hash_to_bins(Signal(a), empty, p, fp).bins.values;
    const auto ub = hash_to_bins(Signal(b), empty, p, fp).bins.values;
    const auto us = hash_to_bins(Signal(sum), empty, p, fp).bins.values;
    for (std::size_t j = 0; j < ua.size(); ++j) EXPECT_NEAR(std::abs(us[j] - ua[j] - ub[j]), 0.0, 1e-10);
  }
}

TEST(HashToBins, CountsEstimateEntriesWithLargeOffset) {
  const std::uint64_t n = 1024;
  const auto fp = build_filter(n, 32, 1e-3, 0.25);
  PermutationParams p;
  p.n = n;
  SparseSpectrum z(n);
  z.set(32, 1.0);  // offset 0
  z.set(45, 1.0);  // offset 13 >= 12
  z.set(50, 1.0);  // offset -14
  z.set(75, 1.0);  // offset 11
  const auto out = hash_to_bins(Signal(std::vector<cplx>(n)), z, p, fp);
  EXPECT_EQ(out.large_offset_in_estimate, 2u);
}

TEST(HashToBins, RejectsMismatchedSizes) {
  const auto fp = build_filter(256, 16, 1e-3, 0.25);
  PermutationParams p;
  p.n = 256;
  EXPECT_THROW(hash_to_bins(Signal(std::vector<cplx>(512)), SparseSpectrum(512), p, fp), InvalidArgument);
  EXPECT_THROW(hash_to_bins(Signal(std::vector<cplx>(256)), SparseSpectrum(128), p, fp), InvalidArgument);
}

}  // namespace
}  // namespace fsq
