#pragma once

#include <cstdint>
#include <random>

#include "fsq/core_dft.hpp"

namespace fsq {

/// Parameters of the spectrum permutation
///   (P x)_i = x_{sigma (i - a)} * exp(-2 pi i sigma b i / n).
///
/// Its spectrum satisfies DFT(P x)_{pi(f)} = xhat_f * exp(-2 pi i sigma a f / n)
/// with pi(f) = sigma (f - b) mod n.
struct PermutationParams {
  std::uint64_t n = 1;
  std::uint64_t sigma = 1;  // odd, hence a unit mod n
  std::uint64_t a = 0;
  std::uint64_t b = 0;

  /// Throws InvalidArgument unless n is a power of two, sigma odd and a, b < n.
  void validate() const;
};

/// Entry i of P x. Reads exactly one sample of x.
cplx permute_time(const Signal& x, const PermutationParams& p, Index i);

/// Frequency map pi(i) = sigma (i - b) mod n.
Index permute_freq(const PermutationParams& p, Index i);

/// exp(-2 pi i sigma a i / n): the phase the permutation puts on frequency i.
cplx permutation_phase(const PermutationParams& p, Index i);

/// Bucket of frequency i: round-half-up(pi(i) B / n) mod B.
std::uint64_t hash_bin(const PermutationParams& p, std::uint64_t buckets, Index i);

/// Signed distance of pi(i) from its bucket centre; |offset| <= n / (2B).
std::int64_t offset(const PermutationParams& p, std::uint64_t buckets, Index i);

/// sigma uniform over odd residues, a and b uniform over [0, n).
PermutationParams sample_params(std::mt19937_64& rng, std::uint64_t n);

/// Signed representative of i mod n in (-n/2, n/2].
std::int64_t signed_residue(std::int64_t i, std::uint64_t n);

}  // namespace fsq
