#pragma once

// Arithmetic and linear algebra over GF(2^8) with the AES reduction
// polynomial x^8 + x^4 + x^3 + x + 1 (0x11B). Addition is XOR; products
// come from a flat 64 KB table built once on first use, so a multiply is
// a single lookup. Also provides the reduced-row-echelon Basis used for
// span membership tests throughout the coding and reporting paths.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace spacemac::gf {

using FieldElement = std::uint8_t;
using FieldVector = std::vector<FieldElement>;

inline constexpr unsigned kReductionPoly = 0x11B;

namespace detail {

// Carry-less shift-and-xor multiply; reference path, used only to fill
// the table (and by tests as the independent oracle).
constexpr std::uint8_t slow_mul(unsigned a, unsigned b) {
  unsigned p = 0;
  while (b != 0) {
    if (b & 1u) p ^= a;
    a <<= 1;
    if (a & 0x100u) a ^= kReductionPoly;
    b >>= 1;
  }
  return static_cast<std::uint8_t>(p);
}

struct Tables {
  std::array<std::uint8_t, 256 * 256> mul{};
  std::array<std::uint8_t, 256> inv{};

  Tables() {
    for (unsigned a = 0; a < 256; ++a)
      for (unsigned b = 0; b < 256; ++b)
        mul[(a << 8) | b] = slow_mul(a, b);
    for (unsigned a = 1; a < 256; ++a)
      for (unsigned b = 1; b < 256; ++b)
        if (mul[(a << 8) | b] == 1) {
          inv[a] = static_cast<std::uint8_t>(b);
          break;
        }
  }
};

inline const Tables& tables() {
  static const Tables t;
  return t;
}

}  // namespace detail

inline FieldElement add(FieldElement a, FieldElement b) {
  return static_cast<FieldElement>(a ^ b);
}

inline FieldElement mul(FieldElement a, FieldElement b) {
  return detail::tables().mul[(static_cast<std::size_t>(a) << 8) | b];
}

inline FieldElement inv(FieldElement a) {
  if (a == 0) throw std::domain_error("gf::inv: no inverse for zero");
  return detail::tables().inv[a];
}

// Product-table row for a fixed left operand: row[b] == mul(a, b).
// Vector kernels run as one lookup + one XOR per symbol through this.
inline const std::uint8_t* mul_row(FieldElement a) {
  return detail::tables().mul.data() + (static_cast<std::size_t>(a) << 8);
}

inline FieldElement dot(std::span<const FieldElement> u,
                        std::span<const FieldElement> v) {
  if (u.size() != v.size())
    throw std::invalid_argument("gf::dot: length mismatch");
  FieldElement acc = 0;
  const auto* tab = detail::tables().mul.data();
  for (std::size_t i = 0; i < u.size(); ++i)
    acc ^= tab[(static_cast<std::size_t>(u[i]) << 8) | v[i]];
  return acc;
}

// dst ^= a * src
inline void axpy(std::span<FieldElement> dst, FieldElement a,
                 std::span<const FieldElement> src) {
  if (dst.size() != src.size())
    throw std::invalid_argument("gf::axpy: length mismatch");
  if (a == 0) return;
  const std::uint8_t* row = mul_row(a);
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= row[src[i]];
}

inline void scale(std::span<FieldElement> v, FieldElement a) {
  const std::uint8_t* row = mul_row(a);
  for (auto& x : v) x = row[x];
}

inline bool is_zero(std::span<const FieldElement> v) {
  for (auto x : v)
    if (x != 0) return false;
  return true;
}

// Reduced row echelon basis of a subspace of GF(256)^len. Rows keep
// strictly increasing pivot columns with pivot value 1 and zeros above
// and below each pivot, so membership is one reduction pass with no
// copies of the basis.
class Basis {
 public:
  explicit Basis(std::size_t length) : len_(length) {}

  std::size_t length() const { return len_; }
  std::size_t dim() const { return rows_.size(); }
  const std::vector<FieldVector>& rows() const { return rows_; }

  // Inserts v into the span. Returns true iff v was innovative (the
  // dimension grew).
  bool insert(std::span<const FieldElement> v) {
    FieldVector r = reduce(v);
    std::size_t pivot = first_nonzero(r);
    if (pivot == len_) return false;
    scale(r, inv(r[pivot]));
    for (std::size_t i = 0; i < rows_.size(); ++i)
      if (rows_[i][pivot] != 0) axpy(rows_[i], rows_[i][pivot], r);
    std::size_t pos = 0;
    while (pos < pivots_.size() && pivots_[pos] < pivot) ++pos;
    rows_.insert(rows_.begin() + static_cast<std::ptrdiff_t>(pos), std::move(r));
    pivots_.insert(pivots_.begin() + static_cast<std::ptrdiff_t>(pos), pivot);
    return true;
  }

  bool contains(std::span<const FieldElement> v) const {
    if (v.size() != len_)
      throw std::invalid_argument("gf::Basis::contains: length mismatch");
    FieldVector r = reduce(v);
    return first_nonzero(r) == len_;
  }

 private:
  FieldVector reduce(std::span<const FieldElement> v) const {
    if (v.size() != len_)
      throw std::invalid_argument("gf::Basis: length mismatch");
    FieldVector r(v.begin(), v.end());
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      FieldElement c = r[pivots_[i]];
      if (c != 0) axpy(r, c, rows_[i]);
    }
    return r;
  }

  std::size_t first_nonzero(const FieldVector& r) const {
    for (std::size_t i = 0; i < r.size(); ++i)
      if (r[i] != 0) return i;
    return len_;
  }

  std::size_t len_;
  std::vector<FieldVector> rows_;
  std::vector<std::size_t> pivots_;
};

}  // namespace spacemac::gf
