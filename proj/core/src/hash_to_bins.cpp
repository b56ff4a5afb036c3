#include "fsq/hash_to_bins.hpp"

#include <cmath>

namespace fsq {

HashToBinsResult hash_to_bins(const Signal& x, const SparseSpectrum& zhat, const PermutationParams& p,
                              const FilterPair& fp) {
  const std::uint64_t n = x.size();
  if (p.n != n || fp.n != n || zhat.dim() != n) {
    throw InvalidArgument("hash_to_bins: signal, estimate, permutation and filter disagree on n");
  }
  p.validate();
  const std::uint64_t buckets = fp.buckets;
  if (buckets == 0 || n % buckets != 0) throw InvalidArgument("hash_to_bins: B must divide n");

  const std::size_t reads_before = x.distinct_reads();

  // Fold y = G * (P x) modulo B: sampling yhat at stride n/B is aliasing in time.
  std::vector<cplx> folded(buckets);
  const std::uint64_t mask = n - 1;
  for (const auto& tap : fp.taps) {
    const auto t = static_cast<std::uint64_t>(tap.t) & mask;
    folded[t & (buckets - 1)] += tap.value * permute_time(x, p, t);
  }

  // uhat_j = sqrt(n) * yhat_{j n / B} = unnormalized B-point DFT of the fold.
  fft_inplace(folded, -1);

  HashToBinsResult result;
  result.bins.buckets = buckets;
  result.bins.values = std::move(folded);

  // Ghat' vanishes at distance >= n/(2B) from a bucket centre, so each entry of
  // zhat touches exactly one bin.
  const double flat = fp.flat_edge();
  for (const auto& [i, value] : zhat) {
    const std::uint64_t j = hash_bin(p, buckets, i);
    const std::int64_t o = offset(p, buckets, i);
    result.bins.values[j] -= value * eval_ghat(fp, -o) * permutation_phase(p, i);
    if (std::abs(static_cast<double>(o)) >= flat) ++result.large_offset_in_estimate;
  }

  result.samples_read = x.distinct_reads() - reads_before;
  return result;
}

}  // namespace fsq
