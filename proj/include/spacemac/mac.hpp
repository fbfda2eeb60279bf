#pragma once

// The (q, n, m) homomorphic MAC for expanding subspaces over GF(256):
// tag generation, linear tag combining, verification, and the
// query-then-forge game harness used to measure forgery rates.
//
// Wire-normative primitives (these fix the golden test vectors):
//   F(k2, id, j, inst): AES-128 encryption of the block
//       [id: 8 bytes][j: 4 bytes BE, 1-based][inst: 2 bytes BE][0x00 0x00]
//       under k2; the output symbol is the first ciphertext byte.
//   G(k1, len): AES-128 counter-mode keystream of blocks
//       [0x00 x 8][counter: 8 bytes BE starting at 0] under k1,
//       truncated to len bytes.
// Instance i of an l-instance tag uses keystream slice
// [i*(n+m), (i+1)*(n+m)) as its r vector and inst = i in F.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "spacemac/detail/block_cipher.hpp"
#include "spacemac/detail/bytes.hpp"
#include "spacemac/detail/rng.hpp"
#include "spacemac/gf.hpp"

namespace spacemac {

struct MacKey {
  detail::Key16 k1{};  // PRG seed
  detail::Key16 k2{};  // PRF key
  friend bool operator==(const MacKey&, const MacKey&) = default;
};

struct SpaceId {
  std::array<std::uint8_t, 8> bytes{};
  friend bool operator==(const SpaceId&, const SpaceId&) = default;
  friend auto operator<=>(const SpaceId&, const SpaceId&) = default;
};

struct Dims {
  std::size_t n = 1024;  // payload symbols per packet
  std::size_t m = 32;    // generation size
  std::size_t l = 1;     // parallel tag instances

  std::size_t packet_len() const { return n + m; }

  void validate() const {
    if (n < 1 || m < 1 || l < 1)
      throw std::invalid_argument("Dims: n, m, l must all be >= 1");
  }
};

using Tag = gf::FieldVector;  // length l

inline MacKey random_mac_key(Rng& rng) {
  MacKey k;
  for (auto& b : k.k1) b = rng.byte();
  for (auto& b : k.k2) b = rng.byte();
  return k;
}

inline SpaceId random_space_id(Rng& rng) {
  SpaceId id;
  for (auto& b : id.bytes) b = rng.byte();
  return id;
}

// F: one block encryption under k2, first ciphertext byte. j is 1-based.
inline gf::FieldElement prf(const detail::Key16& key, const SpaceId& id,
                            std::size_t j, std::size_t m,
                            std::size_t instance = 0) {
  if (j < 1 || j > m) throw std::out_of_range("prf: j out of [1, m]");
  detail::Aes128 cipher(key);
  detail::Block16 block{};
  std::copy(id.bytes.begin(), id.bytes.end(), block.begin());
  detail::put_be(block.data() + 8, j, 4);
  detail::put_be(block.data() + 12, instance, 2);
  return cipher.encrypt_block(block)[0];
}

// G: counter-mode keystream under seed, first len bytes.
inline gf::FieldVector prg(const detail::Key16& seed, std::size_t len) {
  if (len < 1) throw std::invalid_argument("prg: len must be >= 1");
  detail::Aes128 cipher(seed);
  const std::size_t nblocks = (len + 15) / 16;
  std::vector<std::uint8_t> in(nblocks * 16, 0);
  for (std::size_t c = 0; c < nblocks; ++c)
    detail::put_be(in.data() + c * 16 + 8, c, 8);
  std::vector<std::uint8_t> out(nblocks * 16);
  cipher.encrypt_blocks(in.data(), out.data(), nblocks);
  out.resize(len);
  return out;
}

// Caches the expanded r vectors (per key) and the F rows (per space id)
// so per-packet work is n+2m multiplications per instance, matching the
// one-time-cost treatment of the PRG/PRF calls. Not synchronized: one
// context per logical owner, or external locking; results are identical
// either way.
class MacContext {
 public:
  MacContext(const MacKey& key, Dims dims)
      : dims_(dims), key_(key), cipher2_(key.k2) {
    dims_.validate();
    stream_ = prg(key.k1, dims_.l * dims_.packet_len());
  }

  const Dims& dims() const { return dims_; }
  const MacKey& key() const { return key_; }

  Tag mac(const SpaceId& id, std::span<const gf::FieldElement> y) {
    check_len(y, "mac");
    const auto& fr = frow(id);
    const std::size_t len = dims_.packet_len();
    Tag t(dims_.l);
    for (std::size_t inst = 0; inst < dims_.l; ++inst) {
      std::span<const gf::FieldElement> r(stream_.data() + inst * len, len);
      gf::FieldElement acc = gf::dot(r, y);
      const gf::FieldElement* row = fr.data() + inst * dims_.m;
      for (std::size_t j = 0; j < dims_.m; ++j)
        acc ^= gf::mul(y[dims_.n + j], row[j]);
      t[inst] = acc;
    }
    return t;
  }

  // Cryptographic verdict. Malformed input throws instead of rejecting.
  bool verify(const SpaceId& id, std::span<const gf::FieldElement> y,
              const Tag& t) {
    check_len(y, "verify");
    if (t.size() != dims_.l)
      throw std::invalid_argument("MacContext::verify: tag length mismatch");
    return mac(id, y) == t;
  }

 private:
  void check_len(std::span<const gf::FieldElement> y, const char* who) const {
    if (y.size() != dims_.packet_len())
      throw std::invalid_argument(std::string("MacContext::") + who +
                                  ": vector length mismatch");
  }

  // l x m matrix of F(k2, id, j, inst), batched into one AES call.
  const std::vector<gf::FieldElement>& frow(const SpaceId& id) {
    if (!have_id_ || !(id == cached_id_)) {
      const std::size_t count = dims_.l * dims_.m;
      std::vector<std::uint8_t> in(count * 16, 0);
      std::size_t b = 0;
      for (std::size_t inst = 0; inst < dims_.l; ++inst)
        for (std::size_t j = 1; j <= dims_.m; ++j, ++b) {
          std::uint8_t* blk = in.data() + b * 16;
          std::copy(id.bytes.begin(), id.bytes.end(), blk);
          detail::put_be(blk + 8, j, 4);
          detail::put_be(blk + 12, inst, 2);
        }
      std::vector<std::uint8_t> out(count * 16);
      cipher2_.encrypt_blocks(in.data(), out.data(), count);
      frow_.resize(count);
      for (std::size_t i = 0; i < count; ++i) frow_[i] = out[i * 16];
      cached_id_ = id;
      have_id_ = true;
    }
    return frow_;
  }

  Dims dims_;
  MacKey key_;
  detail::Aes128 cipher2_;
  gf::FieldVector stream_;  // l * (n+m) keystream bytes under k1
  bool have_id_ = false;
  SpaceId cached_id_{};
  std::vector<gf::FieldElement> frow_;
};

// Uncached one-shot forms.
inline Tag mac(const MacKey& key, Dims dims, const SpaceId& id,
               std::span<const gf::FieldElement> y) {
  return MacContext(key, dims).mac(id, y);
}

inline bool verify(const MacKey& key, Dims dims, const SpaceId& id,
                   std::span<const gf::FieldElement> y, const Tag& t) {
  return MacContext(key, dims).verify(id, y, t);
}

// One (vector, tag, coefficient) operand of Combine. The vector is part
// of the algorithm's interface but does not enter the computation.
struct Combinand {
  std::span<const gf::FieldElement> vector;
  std::span<const gf::FieldElement> tag;
  gf::FieldElement coeff = 0;
};

inline Tag combine_tags(std::span<const Tag> tags,
                        std::span<const gf::FieldElement> coeffs) {
  if (tags.empty()) throw std::invalid_argument("combine: empty input");
  if (tags.size() != coeffs.size())
    throw std::invalid_argument("combine: tag/coefficient count mismatch");
  const std::size_t l = tags[0].size();
  Tag out(l, 0);
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i].size() != l)
      throw std::invalid_argument("combine: tag length mismatch");
    gf::axpy(out, coeffs[i], tags[i]);
  }
  return out;
}

inline Tag combine(std::span<const Combinand> items) {
  if (items.empty()) throw std::invalid_argument("combine: empty input");
  const std::size_t l = items[0].tag.size();
  Tag out(l, 0);
  for (const auto& it : items) {
    if (it.tag.size() != l)
      throw std::invalid_argument("combine: tag length mismatch");
    gf::axpy(out, it.coeff, it.tag);
  }
  return out;
}

// ---- Attack game -----------------------------------------------------
//
// The adversary adaptively queries tags for chosen (id, y), then emits a
// single forgery. It wins iff the forged vector has nonzero coefficient
// symbols, verifies, and lies outside the span of the vectors it queried
// under the forged id.

struct Forgery {
  SpaceId id;
  gf::FieldVector y;
  Tag t;
};

class Challenger {
 public:
  Challenger(MacContext& ctx, Dims dims) : ctx_(ctx), dims_(dims) {}

  const Dims& dims() const { return dims_; }

  Tag query(const SpaceId& id, std::span<const gf::FieldElement> y) {
    auto it = spans_.begin();
    for (; it != spans_.end(); ++it)
      if (it->first == id) break;
    if (it == spans_.end()) {
      spans_.emplace_back(id, gf::Basis(dims_.packet_len()));
      it = std::prev(spans_.end());
    }
    it->second.insert(y);
    return ctx_.mac(id, y);
  }

  bool wins(const Forgery& f) {
    if (f.y.size() != dims_.packet_len()) return false;
    std::span<const gf::FieldElement> aug(f.y.data() + dims_.n, dims_.m);
    if (gf::is_zero(aug)) return false;  // condition (i)
    if (!ctx_.verify(f.id, f.y, f.t)) return false;  // condition (ii)
    for (auto& [id, basis] : spans_)
      if (id == f.id && basis.contains(f.y)) return false;  // condition (iii)
    return true;
  }

 private:
  MacContext& ctx_;
  Dims dims_;
  std::vector<std::pair<SpaceId, gf::Basis>> spans_;
};

struct AttackGameResult {
  std::size_t trials = 0;
  std::size_t wins = 0;
  double win_rate() const {
    return trials == 0 ? 0.0 : static_cast<double>(wins) / trials;
  }
};

// adversary: Forgery adversary(Challenger&, Rng&)
template <typename Adversary>
AttackGameResult attack_game(Adversary&& adversary, std::size_t trials,
                             Dims dims, Rng& rng) {
  dims.validate();
  AttackGameResult result;
  result.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    MacContext ctx(random_mac_key(rng), dims);
    Challenger challenger(ctx, dims);
    Forgery forgery = adversary(challenger, rng);
    if (challenger.wins(forgery)) ++result.wins;
  }
  return result;
}

}  // namespace spacemac
