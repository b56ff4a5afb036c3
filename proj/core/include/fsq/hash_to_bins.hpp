#pragma once

#include <cstdint>
#include <vector>

#include "fsq/core_dft.hpp"
#include "fsq/filter.hpp"
#include "fsq/permutation.hpp"

namespace fsq {

/// B bucket values uhat_0 .. uhat_{B-1}.
struct BinVector {
  std::uint64_t buckets = 0;
  std::vector<cplx> values;
};

struct HashToBinsResult {
  BinVector bins;
  /// Entries of zhat whose offset lands outside the flat region (zeta).
  std::size_t large_offset_in_estimate = 0;
  /// Distinct samples of x read by this call.
  std::size_t samples_read = 0;
};

/// Buckets the permuted, windowed signal into B bins and removes the current
/// estimate zhat:
///
///   uhat_j = sum_{h(i) = j} (xhat - zhat)_i * Ghat'_{-o(i)} * exp(-2 pi i sigma a i / n)
///            +- delta * ||xhat||_1
///
/// The phase convention matches DFT(P x)_{pi(i)} = xhat_i exp(-2 pi i sigma a i / n),
/// so multiplying bucket h(t) by exp(+2 pi i sigma a t / n) recovers xhat_t.
///
/// Reads x only at the |supp(G)| positions sigma (t - a), t in supp(G).
/// Runs in O(|supp(G)| + B log B + ||zhat||_0).
HashToBinsResult hash_to_bins(const Signal& x, const SparseSpectrum& zhat, const PermutationParams& p,
                              const FilterPair& fp);

}  // namespace fsq
