#pragma once

// Cooperative in-network detection: key bootstrap over a topology,
// end-to-end tags embedded in the coded payload, helper/verification
// tags per hop, and the per-node receive/emit protocol.
//
// Wire layout of a hop transmission (normative for framing tests):
//   [helper tag: l bytes][verification tag: l bytes][payload: n+m bytes]
// The end-to-end tag occupies payload bytes [0, l); the payload length n
// already includes those l symbols, so the end-to-end MAC runs over
// vectors of length (n - l) + m.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "spacemac/detail/rng.hpp"
#include "spacemac/gf.hpp"
#include "spacemac/mac.hpp"
#include "spacemac/rlnc.hpp"
#include "spacemac/topology.hpp"

namespace spacemac::detection {

struct DetectionKeyring {
  // k_X-bar for every neighbor X (parents and children) that has a bar
  // key; receivers never send, so no bar key exists for them.
  std::map<NodeId, MacKey> neighbor_keys;
  // The source signs its own verification tags, so it holds its own bar
  // key. Absent everywhere else: k_N-bar stays secret to N.
  std::optional<MacKey> own_key;
  // k*: present iff the node is the source or a receiver.
  std::optional<MacKey> e2e_key;
};

// One fresh bar key per sending node (source + intermediates), one k*.
// Keys survive across generations; tags bind the generation through the
// space id.
inline std::map<NodeId, DetectionKeyring> bootstrap(const Topology& topo,
                                                    Rng& rng) {
  topo.validate();
  std::map<NodeId, MacKey> bar;
  for (const auto& [n, r] : topo.roles)
    if (r != Role::receiver) bar[n] = random_mac_key(rng);
  const MacKey e2e = random_mac_key(rng);

  std::map<NodeId, DetectionKeyring> rings;
  for (const auto& [n, r] : topo.roles) {
    DetectionKeyring ring;
    for (NodeId p : topo.parents(n))
      if (bar.count(p)) ring.neighbor_keys[p] = bar[p];
    for (NodeId c : topo.children(n))
      if (bar.count(c)) ring.neighbor_keys[c] = bar[c];
    ring.neighbor_keys.erase(n);
    if (r == Role::source) ring.own_key = bar[n];
    if (r == Role::source || r == Role::receiver) ring.e2e_key = e2e;
    rings[n] = ring;
  }
  return rings;
}

struct TaggedPacket {
  Tag helper;
  Tag verification;
  gf::FieldVector payload;  // n+m symbols; e2e tag in the first l
};

struct FramingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::vector<std::uint8_t> to_bytes(const TaggedPacket& p) {
  std::vector<std::uint8_t> out;
  out.reserve(p.helper.size() + p.verification.size() + p.payload.size());
  out.insert(out.end(), p.helper.begin(), p.helper.end());
  out.insert(out.end(), p.verification.begin(), p.verification.end());
  out.insert(out.end(), p.payload.begin(), p.payload.end());
  return out;
}

inline TaggedPacket from_bytes(std::span<const std::uint8_t> wire, Dims dims) {
  if (wire.size() != 2 * dims.l + dims.packet_len())
    throw FramingError("tagged packet: wrong wire size");
  TaggedPacket p;
  p.helper.assign(wire.begin(), wire.begin() + static_cast<long>(dims.l));
  p.verification.assign(wire.begin() + static_cast<long>(dims.l),
                        wire.begin() + static_cast<long>(2 * dims.l));
  p.payload.assign(wire.begin() + static_cast<long>(2 * dims.l), wire.end());
  return p;
}

inline Dims e2e_dims(Dims dims) {
  if (dims.n <= dims.l)
    throw std::invalid_argument("e2e framing needs n > l");
  return Dims{dims.n - dims.l, dims.m, dims.l};
}

// Builds the source generation with the end-to-end tag of each packet
// embedded at the front of its payload. user payloads are m vectors of
// length n - l.
inline rlnc::Generation make_source_generation(
    std::vector<gf::FieldVector> user_payloads, const SpaceId& id,
    const MacKey& e2e_key, Dims dims) {
  dims.validate();
  const Dims ed = e2e_dims(dims);
  if (user_payloads.size() != dims.m)
    throw std::invalid_argument("make_source_generation: need m payloads");
  MacContext e2e(e2e_key, ed);
  std::vector<gf::FieldVector> payloads;
  payloads.reserve(dims.m);
  for (std::size_t i = 0; i < dims.m; ++i) {
    if (user_payloads[i].size() != ed.n)
      throw std::invalid_argument(
          "make_source_generation: payload length must be n - l");
    gf::FieldVector inner(ed.packet_len(), 0);
    std::copy(user_payloads[i].begin(), user_payloads[i].end(), inner.begin());
    inner[ed.n + i] = 1;
    Tag t = e2e.mac(id, inner);
    gf::FieldVector payload(dims.n);
    std::copy(t.begin(), t.end(), payload.begin());
    std::copy(user_payloads[i].begin(), user_payloads[i].end(),
              payload.begin() + static_cast<long>(dims.l));
    payloads.push_back(std::move(payload));
  }
  return rlnc::augment(std::move(payloads), id);
}

// The inner (n-l)+m vector whose tag sits at payload[0, l).
inline gf::FieldVector e2e_inner(std::span<const gf::FieldElement> payload,
                                 Dims dims) {
  const Dims ed = e2e_dims(dims);
  gf::FieldVector inner;
  inner.reserve(ed.packet_len());
  inner.insert(inner.end(), payload.begin() + static_cast<long>(dims.l),
               payload.end());
  return inner;
}

enum class Verdict { accept, drop };

// Per-node protocol state: verified store of (payload, helper tag)
// pairs in arrival order plus the expanding received basis. Confined to
// one logical thread per node.
class Node {
 public:
  struct Entry {
    NodeId from;
    gf::FieldVector payload;
    Tag helper;
  };

  struct ReceiveResult {
    Verdict verdict = Verdict::drop;
    bool innovative = false;
  };

  struct ReceiverResult {
    Verdict hop = Verdict::drop;
    Verdict end_to_end = Verdict::drop;
    bool innovative = false;
  };

  Node(NodeId self, Role role, DetectionKeyring ring, Dims dims)
      : self_(self),
        role_(role),
        dims_(dims),
        ring_(std::move(ring)),
        basis_(dims.packet_len()) {
    dims_.validate();
    for (const auto& [nbr, key] : ring_.neighbor_keys)
      contexts_.emplace(nbr, MacContext(key, dims_));
    if (ring_.own_key) own_ctx_.emplace(*ring_.own_key, dims_);
    if (ring_.e2e_key) e2e_ctx_.emplace(*ring_.e2e_key, e2e_dims(dims_));
  }

  NodeId id() const { return self_; }
  Role role() const { return role_; }
  const Dims& dims() const { return dims_; }
  const std::vector<Entry>& entries() const { return entries_; }
  const gf::Basis& received_basis() const { return basis_; }

  void begin_generation(const SpaceId& id) {
    gen_id_ = id;
    entries_.clear();
    basis_ = gf::Basis(dims_.packet_len());
  }

  const SpaceId& generation() const { return gen_id_; }

  // Source only: the m tagged source packets destined for one child.
  std::vector<TaggedPacket> source_emit(const rlnc::Generation& g,
                                        NodeId child) {
    if (role_ != Role::source)
      throw std::logic_error("source_emit: not the source");
    if (!own_ctx_) throw std::logic_error("source_emit: missing own key");
    MacContext& helper_ctx = context_for(child, "source_emit");
    std::vector<TaggedPacket> out;
    out.reserve(g.m);
    for (const auto& pkt : g.packets) {
      TaggedPacket tp;
      tp.payload = pkt;
      tp.helper = helper_ctx.mac(g.id, pkt);
      tp.verification = own_ctx_->mac(g.id, pkt);
      out.push_back(std::move(tp));
    }
    return out;
  }

  // Recode the verified store with the given coefficients and tag the
  // result for `dest`: verification tag by Combine over the received
  // helper tags, fresh helper tag under k_dest-bar.
  TaggedPacket emit(NodeId dest, std::span<const gf::FieldElement> coeffs) {
    if (entries_.empty()) throw std::logic_error("emit: empty buffer");
    if (coeffs.size() != entries_.size())
      throw std::invalid_argument("emit: coefficient count mismatch");
    TaggedPacket tp;
    tp.payload.assign(dims_.packet_len(), 0);
    Tag verification(dims_.l, 0);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      gf::axpy(tp.payload, coeffs[i], entries_[i].payload);
      gf::axpy(verification, coeffs[i], entries_[i].helper);
    }
    tp.verification = std::move(verification);
    tp.helper = context_for(dest, "emit").mac(gen_id_, tp.payload);
    return tp;
  }

  Tag helper_tag_for(NodeId dest, std::span<const gf::FieldElement> payload) {
    return context_for(dest, "helper_tag_for").mac(gen_id_, payload);
  }

  bool verify_from(NodeId from, std::span<const gf::FieldElement> payload,
                   const Tag& tag) {
    return context_for(from, "verify_from").verify(gen_id_, payload, tag);
  }

  // Hop verification; on accept the payload and its helper tag enter
  // the store and the received basis.
  ReceiveResult receive(NodeId from, const TaggedPacket& pkt) {
    check_framing(pkt);
    ReceiveResult r;
    if (!verify_from(from, pkt.payload, pkt.verification)) return r;
    r.verdict = Verdict::accept;
    r.innovative = store(from, pkt);
    return r;
  }

  // Store without hop verification. Used by nodes that deliberately
  // skip the check (passive collusion).
  ReceiveResult accept_unchecked(NodeId from, const TaggedPacket& pkt) {
    check_framing(pkt);
    ReceiveResult r;
    r.verdict = Verdict::accept;
    r.innovative = store(from, pkt);
    return r;
  }

  // Receivers: hop check, then the embedded end-to-end tag under k*.
  ReceiverResult receiver_check(NodeId from, const TaggedPacket& pkt) {
    if (!e2e_ctx_) throw std::logic_error("receiver_check: missing k*");
    ReceiverResult rr;
    ReceiveResult hop = receive(from, pkt);
    rr.hop = hop.verdict;
    rr.innovative = hop.innovative;
    if (rr.hop == Verdict::drop) return rr;
    Tag t(pkt.payload.begin(), pkt.payload.begin() + static_cast<long>(dims_.l));
    gf::FieldVector inner = e2e_inner(pkt.payload, dims_);
    rr.end_to_end = e2e_ctx_->verify(gen_id_, inner, t) ? Verdict::accept
                                                        : Verdict::drop;
    return rr;
  }

  bool verify_end_to_end(std::span<const gf::FieldElement> payload) {
    if (!e2e_ctx_) throw std::logic_error("verify_end_to_end: missing k*");
    Tag t(payload.begin(), payload.begin() + static_cast<long>(dims_.l));
    gf::FieldVector inner = e2e_inner(payload, dims_);
    return e2e_ctx_->verify(gen_id_, inner, t);
  }

 private:
  void check_framing(const TaggedPacket& pkt) const {
    if (pkt.helper.size() != dims_.l || pkt.verification.size() != dims_.l ||
        pkt.payload.size() != dims_.packet_len())
      throw FramingError("tagged packet: bad field sizes");
  }

  bool store(NodeId from, const TaggedPacket& pkt) {
    entries_.push_back(Entry{from, pkt.payload, pkt.helper});
    return basis_.insert(pkt.payload);
  }

  MacContext& context_for(NodeId nbr, const char* who) {
    auto it = contexts_.find(nbr);
    if (it == contexts_.end())
      throw std::logic_error(std::string(who) + ": no key for neighbor " +
                             std::to_string(nbr));
    return it->second;
  }

  NodeId self_;
  Role role_;
  Dims dims_;
  DetectionKeyring ring_;
  SpaceId gen_id_{};
  std::map<NodeId, MacContext> contexts_;
  std::optional<MacContext> own_ctx_;
  std::optional<MacContext> e2e_ctx_;
  std::vector<Entry> entries_;
  gf::Basis basis_;
};

}  // namespace spacemac::detection
