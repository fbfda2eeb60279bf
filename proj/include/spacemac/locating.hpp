#pragma once

// Exact attacker locating: per-edge non-repudiation tag sets (lambda
// tags per packet, delta of them child-verifiable, controller threshold
// theta), subspace reports built by Combine over received tags, and the
// controller's edge classification / blacklist / DoS throttling.
//
// Key derivations (deterministic, reproducible by the parent or child):
//   X_PN[i] = two AES blocks under the parent node key:
//       ['X'][half][child: 4 bytes BE][i: 4 bytes BE, 1-based][pad 0]
//       half 0 -> k1, half 1 -> k2 of the i-th MacKey.
//   Y_PN    = delta-subset of X_PN chosen by the lexicographic-subset
//       index F2 mod C(lambda, delta), where F2 is the first 8 bytes
//       (big-endian) of one AES block under the child node key:
//       ['Y'][0][parent: 4 bytes BE][pad 0].

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spacemac/combin.hpp"
#include "spacemac/detail/block_cipher.hpp"
#include "spacemac/detail/bytes.hpp"
#include "spacemac/detail/rng.hpp"
#include "spacemac/gf.hpp"
#include "spacemac/mac.hpp"
#include "spacemac/rlnc.hpp"
#include "spacemac/topology.hpp"

namespace spacemac::locating {

struct LocatingParams {
  unsigned lambda = 19;  // tags per packet
  unsigned delta = 9;    // child-verifiable subset size
  unsigned theta = 3;    // controller acceptance threshold

  void validate() const {
    if (delta < 1 || delta >= lambda)
      throw std::invalid_argument("LocatingParams: need 1 <= delta < lambda");
    if (theta < 1 || theta > lambda - delta)
      throw std::invalid_argument(
          "LocatingParams: need 1 <= theta <= lambda - delta");
  }
};

using NodeKey = detail::Key16;  // per-node locating master key

inline NodeKey random_node_key(Rng& rng) {
  NodeKey k;
  for (auto& b : k) b = rng.byte();
  return k;
}

struct EdgeKeySets {
  std::vector<MacKey> x_set;           // lambda keys, parent-computable
  std::vector<std::size_t> y_indices;  // delta sorted indices, child-computable

  std::vector<std::size_t> y_complement() const {
    std::vector<std::size_t> out;
    std::set<std::size_t> y(y_indices.begin(), y_indices.end());
    for (std::size_t i = 0; i < x_set.size(); ++i)
      if (!y.count(i)) out.push_back(i);
    return out;
  }
};

inline EdgeKeySets derive_edge_keys(const NodeKey& parent_key,
                                    const NodeKey& child_key, NodeId parent,
                                    NodeId child,
                                    const LocatingParams& params) {
  params.validate();
  EdgeKeySets keys;
  detail::Aes128 f1(parent_key);
  keys.x_set.resize(params.lambda);
  for (unsigned i = 0; i < params.lambda; ++i) {
    detail::Block16 block{};
    block[0] = 'X';
    detail::put_be(block.data() + 2, child, 4);
    detail::put_be(block.data() + 6, i + 1, 4);
    block[1] = 0;
    auto k1 = f1.encrypt_block(block);
    block[1] = 1;
    auto k2 = f1.encrypt_block(block);
    keys.x_set[i] = MacKey{k1, k2};
  }
  detail::Aes128 f2(child_key);
  detail::Block16 block{};
  block[0] = 'Y';
  detail::put_be(block.data() + 2, parent, 4);
  auto ct = f2.encrypt_block(block);
  std::uint64_t raw = detail::get_be(ct.data(), 8);
  std::uint64_t index = raw % combin::binomial(params.lambda, params.delta);
  keys.y_indices =
      combin::unrank_subset(index, params.lambda, params.delta);
  return keys;
}

// Locating tags are single-symbol MAC instances regardless of the
// detection scheme's l.
inline Dims tag_dims(Dims wire) { return Dims{wire.n, wire.m, 1}; }

// Parent side of an edge: lambda tags per outgoing packet.
class EdgeTagger {
 public:
  EdgeTagger(const EdgeKeySets& keys, Dims wire_dims) {
    const Dims d = tag_dims(wire_dims);
    ctxs_.reserve(keys.x_set.size());
    for (const auto& k : keys.x_set) ctxs_.emplace_back(k, d);
  }

  std::vector<Tag> tags(const SpaceId& id,
                        std::span<const gf::FieldElement> packet) {
    std::vector<Tag> out;
    out.reserve(ctxs_.size());
    for (auto& c : ctxs_) out.push_back(c.mac(id, packet));
    return out;
  }

 private:
  std::vector<MacContext> ctxs_;
};

// Child side: verifies its delta-subset; any invalid tag drops the
// packet.
class EdgeVerifier {
 public:
  EdgeVerifier(const EdgeKeySets& keys, Dims wire_dims)
      : indices_(keys.y_indices) {
    const Dims d = tag_dims(wire_dims);
    ctxs_.reserve(indices_.size());
    for (std::size_t i : indices_) ctxs_.emplace_back(keys.x_set[i], d);
  }

  bool accepts(const SpaceId& id, std::span<const gf::FieldElement> packet,
               std::span<const Tag> tags) {
    for (std::size_t k = 0; k < indices_.size(); ++k)
      if (!ctxs_[k].verify(id, packet, tags[indices_[k]])) return false;
    return true;
  }

 private:
  std::vector<std::size_t> indices_;
  std::vector<MacContext> ctxs_;
};

// Controller side: counts valid tags among the lambda - delta it keeps.
class EdgeChecker {
 public:
  EdgeChecker(const EdgeKeySets& keys, Dims wire_dims)
      : indices_(keys.y_complement()) {
    const Dims d = tag_dims(wire_dims);
    ctxs_.reserve(indices_.size());
    for (std::size_t i : indices_) ctxs_.emplace_back(keys.x_set[i], d);
  }

  unsigned valid_count(const SpaceId& id,
                       std::span<const gf::FieldElement> packet,
                       std::span<const Tag> tags) {
    unsigned valid = 0;
    for (std::size_t k = 0; k < indices_.size(); ++k)
      if (ctxs_[k].verify(id, packet, tags[indices_[k]])) ++valid;
    return valid;
  }

 private:
  std::vector<std::size_t> indices_;
  std::vector<MacContext> ctxs_;
};

struct StoredPacket {
  gf::FieldVector packet;
  std::vector<Tag> tags;  // all lambda, as received
};

struct Report {
  NodeId reporter = 0;
  NodeId parent = 0;
  bool empty = false;       // nothing received on this edge
  gf::FieldVector y_r;
  std::vector<Tag> tags;    // lambda combined tags
};

// Random combination of everything stored for one edge; the same alphas
// combine the packet and each of its lambda tag columns.
inline Report make_report(NodeId child, NodeId parent,
                          std::span<const StoredPacket> stored, Rng& rng) {
  Report r;
  r.reporter = child;
  r.parent = parent;
  if (stored.empty()) {
    r.empty = true;
    return r;
  }
  const std::size_t lambda = stored[0].tags.size();
  gf::FieldVector alphas(stored.size());
  for (auto& a : alphas) a = rng.byte();
  r.y_r.assign(stored[0].packet.size(), 0);
  r.tags.assign(lambda, Tag(stored[0].tags[0].size(), 0));
  for (std::size_t i = 0; i < stored.size(); ++i) {
    gf::axpy(r.y_r, alphas[i], stored[i].packet);
    for (std::size_t j = 0; j < lambda; ++j)
      gf::axpy(r.tags[j], alphas[i], stored[i].tags[j]);
  }
  return r;
}

inline std::string report_csv_line(const SpaceId& id, const Report& r,
                                   std::string_view verdict) {
  std::ostringstream os;
  os << detail::to_hex(id.bytes) << ',' << r.reporter << ',' << r.parent
     << ',' << (r.empty ? "-" : detail::to_hex(r.y_r));
  for (const auto& t : r.tags) os << ',' << detail::to_hex(t);
  os << ',' << verdict;
  return os.str();
}

struct Alert {
  SpaceId id;
  NodeId reporter = 0;
};

struct ControllerConfig {
  LocatingParams params;
  unsigned dos_threshold = 3;             // tau
  unsigned dos_cooldown_generations = 10; // throttle window after tau hits
};

struct EdgeVerdict {
  NodeId from = 0;
  NodeId to = 0;
  bool polluted = false;
  std::string reason;  // clean | out-of-source | rejected-report | missing-report | empty
};

struct RoundResult {
  std::vector<NodeId> identified;
  std::vector<EdgeVerdict> edges;
  std::vector<NodeId> missing_reporters;
  unsigned rejected_reports = 0;
  bool any_pollution = false;

  bool edge_polluted(NodeId from, NodeId to) const {
    for (const auto& e : edges)
      if (e.from == from && e.to == to) return e.polluted;
    return false;
  }
};

// Single-writer controller state: current (pruned) topology, per-edge
// checkers, blacklist, DoS counters, and one locating round per
// generation id.
class Controller {
 public:
  Controller(Topology topo, Dims dims, ControllerConfig config,
             std::map<NodeId, NodeKey> node_keys)
      : topo_(std::move(topo)),
        dims_(dims),
        config_(config),
        node_keys_(std::move(node_keys)) {
    config_.params.validate();
    topo_.validate();
  }

  const Topology& topology() const { return topo_; }
  const std::set<NodeId>& blacklist() const { return blacklist_; }
  unsigned dos_counter(NodeId n) const {
    auto it = ctr_.find(n);
    return it == ctr_.end() ? 0 : it->second;
  }

  // Generation bookkeeping for DoS cooldowns.
  void begin_generation() { ++generation_index_; }
  std::uint64_t generation_index() const { return generation_index_; }

  // The alert gate: duplicate ids, blacklisted senders and throttled
  // senders are ignored. A processed alert consumes the id.
  bool should_process(const Alert& alert) {
    if (blacklist_.count(alert.reporter)) return false;
    if (seen_ids_.count(alert.id)) return false;
    auto th = throttled_until_.find(alert.reporter);
    if (th != throttled_until_.end()) {
      if (generation_index_ < th->second) return false;
      throttled_until_.erase(th);  // cooldown over, counter resets
      ctr_[alert.reporter] = 0;
    }
    seen_ids_.insert(alert.id);
    return true;
  }

  // Classifies edges from the collected reports, identifies attackers,
  // grows the blacklist and prunes the topology.
  RoundResult round(const rlnc::Generation& gen,
                    const std::vector<Report>& reports, NodeId alerter) {
    RoundResult result;
    std::map<std::pair<NodeId, NodeId>, const Report*> by_edge;
    for (const auto& r : reports) by_edge[{r.parent, r.reporter}] = &r;

    std::set<NodeId> silent;
    for (const auto& e : topo_.edges) {
      EdgeVerdict v;
      v.from = e.from;
      v.to = e.to;
      auto it = by_edge.find({e.from, e.to});
      if (it == by_edge.end()) {
        // A node that does not report all incoming spaces is malicious;
        // the unvouched edge counts as polluted so the outgoing rule
        // stays well defined.
        v.polluted = true;
        v.reason = "missing-report";
        silent.insert(e.to);
      } else if (it->second->empty) {
        v.polluted = false;
        v.reason = "empty";
      } else {
        const Report& r = *it->second;
        unsigned valid = checker(e.from, e.to).valid_count(gen.id, r.y_r,
                                                           r.tags);
        if (valid < config_.params.theta) {
          v.polluted = true;
          v.reason = "rejected-report";
          ++result.rejected_reports;
        } else if (!rlnc::in_source_space(gen, r.y_r)) {
          v.polluted = true;
          v.reason = "out-of-source";
        } else {
          v.polluted = false;
          v.reason = "clean";
        }
      }
      result.any_pollution |= v.polluted;
      result.edges.push_back(std::move(v));
    }

    std::set<NodeId> accused(silent.begin(), silent.end());
    for (const auto& [node, role] : topo_.roles) {
      bool polluted_in = false, polluted_out = false;
      for (const auto& v : result.edges) {
        if (v.to == node && v.polluted) polluted_in = true;
        if (v.from == node && v.polluted) polluted_out = true;
      }
      if (!polluted_in && polluted_out) accused.insert(node);
    }
    result.identified.assign(accused.begin(), accused.end());
    result.missing_reporters.assign(silent.begin(), silent.end());

    if (!result.any_pollution) note_false_alert(alerter);

    for (NodeId a : result.identified) blacklist_.insert(a);
    if (!result.identified.empty()) {
      topo_.remove_nodes(accused);
      checkers_.clear();  // edge set changed; rebuild lazily
    }
    return result;
  }

 private:
  void note_false_alert(NodeId n) {
    unsigned& c = ctr_[n];
    ++c;
    if (c >= config_.dos_threshold)
      throttled_until_[n] =
          generation_index_ + config_.dos_cooldown_generations;
  }

  EdgeChecker& checker(NodeId from, NodeId to) {
    auto key = std::make_pair(from, to);
    auto it = checkers_.find(key);
    if (it == checkers_.end()) {
      EdgeKeySets keys = derive_edge_keys(node_keys_.at(from),
                                          node_keys_.at(to), from, to,
                                          config_.params);
      it = checkers_.emplace(key, EdgeChecker(keys, dims_)).first;
    }
    return it->second;
  }

  Topology topo_;
  Dims dims_;
  ControllerConfig config_;
  std::map<NodeId, NodeKey> node_keys_;
  std::map<std::pair<NodeId, NodeId>, EdgeChecker> checkers_;
  std::set<NodeId> blacklist_;
  std::set<SpaceId> seen_ids_;
  std::map<NodeId, unsigned> ctr_;
  std::map<NodeId, std::uint64_t> throttled_until_;
  std::uint64_t generation_index_ = 0;
};

}  // namespace spacemac::locating
