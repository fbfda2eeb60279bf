#pragma once

// Exact binomial coefficients and lexicographic k-subset unranking
// (combinatorial number system). Shared by the locating key-subset
// selection and the closed-form probability calculators.

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace spacemac::combin {

// Exact C(n, k); throws if the value would not fit in 64 bits.
inline std::uint64_t binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 acc = 1;
  for (unsigned i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;
    if (acc > static_cast<unsigned __int128>(~std::uint64_t{0}))
      throw std::overflow_error("binomial: exceeds 64 bits");
  }
  return static_cast<std::uint64_t>(acc);
}

// index-th k-subset of {0, ..., n-1} in lexicographic order of the
// sorted tuples: index 0 -> {0,1,...,k-1}, index C(n,k)-1 -> the top.
inline std::vector<std::size_t> unrank_subset(std::uint64_t index, unsigned n,
                                              unsigned k) {
  if (k > n) throw std::invalid_argument("unrank_subset: k > n");
  if (index >= binomial(n, k))
    throw std::invalid_argument("unrank_subset: index out of range");
  std::vector<std::size_t> out;
  out.reserve(k);
  unsigned value = 0;
  for (unsigned slot = 0; slot < k; ++slot) {
    for (;; ++value) {
      std::uint64_t block = binomial(n - 1 - value, k - 1 - slot);
      if (index < block) break;
      index -= block;
    }
    out.push_back(value);
    ++value;
  }
  return out;
}

}  // namespace spacemac::combin
