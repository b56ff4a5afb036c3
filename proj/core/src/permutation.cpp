#include "fsq/permutation.hpp"

#include <string>

namespace fsq {

namespace {

void check_buckets(std::uint64_t n, std::uint64_t buckets) {
  if (buckets == 0 || n % buckets != 0) {
    throw InvalidArgument("bucket count " + std::to_string(buckets) + " must divide n = " +
                          std::to_string(n));
  }
}

}  // namespace

void PermutationParams::validate() const {
  if (!is_power_of_two(n)) throw InvalidArgument("permutation: n must be a power of two");
  if (sigma % 2 == 0 || (n > 1 && sigma >= n)) throw InvalidArgument("permutation: sigma must be odd and < n");
  if (a >= n || b >= n) throw InvalidArgument("permutation: a and b must lie in [0, n)");
}

std::int64_t signed_residue(std::int64_t i, std::uint64_t n) {
  const auto sn = static_cast<std::int64_t>(n);
  std::int64_t r = i % sn;
  if (r < 0) r += sn;
  if (r > sn / 2) r -= sn;
  return r;
}

// n is a power of two, so unsigned wrap-around is already arithmetic mod n and
// masking normalizes negative intermediate values.

Index permute_freq(const PermutationParams& p, Index i) {
  return (p.sigma * (i - p.b)) & (p.n - 1);
}

cplx permutation_phase(const PermutationParams& p, Index i) {
  const std::uint64_t mask = p.n - 1;
  return unit_root((((p.sigma * p.a) & mask) * (i & mask)) & mask, p.n);
}

cplx permute_time(const Signal& x, const PermutationParams& p, Index i) {
  const std::uint64_t mask = p.n - 1;
  const Index src = (p.sigma * (i - p.a)) & mask;
  const std::uint64_t phase = (((p.sigma * p.b) & mask) * (i & mask)) & mask;
  return x.at(src) * unit_root(phase, p.n);
}

std::uint64_t hash_bin(const PermutationParams& p, std::uint64_t buckets, Index i) {
  check_buckets(p.n, buckets);
  const std::uint64_t width = p.n / buckets;
  // floor(pi B / n + 1/2) == floor((pi + width/2) / width); width is a power of
  // two so width/2 is exact for width >= 2, and width == 1 has no ties.
  const std::uint64_t shifted = permute_freq(p, i) + width / 2;
  return (shifted / width) % buckets;
}

std::int64_t offset(const PermutationParams& p, std::uint64_t buckets, Index i) {
  check_buckets(p.n, buckets);
  const std::uint64_t width = p.n / buckets;
  const auto pi = static_cast<std::int64_t>(permute_freq(p, i));
  const std::uint64_t shifted = permute_freq(p, i) + width / 2;
  // Unfolded bucket (before mod B) so the top edge gives a negative offset.
  const auto bucket = static_cast<std::int64_t>(shifted / width);
  return pi - bucket * static_cast<std::int64_t>(width);
}

PermutationParams sample_params(std::mt19937_64& rng, std::uint64_t n) {
  if (!is_power_of_two(n)) throw InvalidArgument("sample_params: n must be a power of two");
  std::uniform_int_distribution<std::uint64_t> uniform(0, n - 1);
  PermutationParams p;
  p.n = n;
  if (n == 1) {
    p.sigma = 1;
  } else {
    std::uniform_int_distribution<std::uint64_t> half(0, n / 2 - 1);
    p.sigma = 2 * half(rng) + 1;
  }
  p.a = uniform(rng);
  p.b = uniform(rng);
  return p;
}

}  // namespace fsq
