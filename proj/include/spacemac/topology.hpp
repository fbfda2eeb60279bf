#pragma once

// Directed acyclic multicast topology shared by the key bootstrap, the
// controller, and the simulator: node roles, delayed edges, and the
// reachability/ordering helpers the protocols need.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace spacemac {

using NodeId = std::uint32_t;

enum class Role { source, intermediate, receiver };

inline const char* role_name(Role r) {
  switch (r) {
    case Role::source: return "source";
    case Role::intermediate: return "intermediate";
    case Role::receiver: return "receiver";
  }
  return "?";
}

struct Edge {
  NodeId from = 0;
  NodeId to = 0;
  double delay_ms = 0.0;
};

struct Topology {
  std::map<NodeId, Role> roles;
  std::vector<Edge> edges;

  bool has_node(NodeId n) const { return roles.count(n) != 0; }

  Role role(NodeId n) const {
    auto it = roles.find(n);
    if (it == roles.end()) throw std::invalid_argument("unknown node");
    return it->second;
  }

  NodeId source() const {
    for (const auto& [n, r] : roles)
      if (r == Role::source) return n;
    throw std::invalid_argument("topology has no source");
  }

  std::vector<NodeId> receivers() const {
    std::vector<NodeId> out;
    for (const auto& [n, r] : roles)
      if (r == Role::receiver) out.push_back(n);
    return out;
  }

  std::vector<NodeId> parents(NodeId n) const {
    std::vector<NodeId> out;
    for (const auto& e : edges)
      if (e.to == n) out.push_back(e.from);
    return out;
  }

  std::vector<NodeId> children(NodeId n) const {
    std::vector<NodeId> out;
    for (const auto& e : edges)
      if (e.from == n) out.push_back(e.to);
    return out;
  }

  // Kahn's algorithm; empty result means a cycle.
  std::vector<NodeId> topological_order() const {
    std::map<NodeId, std::size_t> indeg;
    for (const auto& [n, r] : roles) indeg[n] = 0;
    for (const auto& e : edges) ++indeg[e.to];
    std::vector<NodeId> ready;
    for (const auto& [n, d] : indeg)
      if (d == 0) ready.push_back(n);
    std::vector<NodeId> order;
    while (!ready.empty()) {
      std::sort(ready.begin(), ready.end());
      NodeId n = ready.front();
      ready.erase(ready.begin());
      order.push_back(n);
      for (const auto& e : edges)
        if (e.from == n && --indeg[e.to] == 0) ready.push_back(e.to);
    }
    if (order.size() != roles.size()) order.clear();
    return order;
  }

  bool is_dag() const { return !topological_order().empty() || roles.empty(); }

  // Nodes reachable from `start`, skipping anything in `excluded`.
  std::set<NodeId> reachable_from(NodeId start,
                                  const std::set<NodeId>& excluded = {}) const {
    std::set<NodeId> seen;
    if (excluded.count(start)) return seen;
    std::vector<NodeId> stack{start};
    seen.insert(start);
    while (!stack.empty()) {
      NodeId n = stack.back();
      stack.pop_back();
      for (const auto& e : edges) {
        if (e.from != n || excluded.count(e.to) || seen.count(e.to)) continue;
        seen.insert(e.to);
        stack.push_back(e.to);
      }
    }
    return seen;
  }

  bool reaches_receiver(NodeId start,
                        const std::set<NodeId>& excluded = {}) const {
    auto seen = reachable_from(start, excluded);
    for (NodeId n : seen)
      if (role(n) == Role::receiver) return true;
    return false;
  }

  // Longest cumulative edge delay from the source to each node
  // (store-and-forward bound used for report scheduling).
  std::map<NodeId, double> longest_delay_from_source() const {
    std::map<NodeId, double> dist;
    for (const auto& [n, r] : roles) dist[n] = 0.0;
    for (NodeId n : topological_order())
      for (const auto& e : edges)
        if (e.from == n)
          dist[e.to] = std::max(dist[e.to], dist[n] + e.delay_ms);
    return dist;
  }

  double max_path_delay() const {
    double best = 0.0;
    for (const auto& [n, d] : longest_delay_from_source())
      best = std::max(best, d);
    return best;
  }

  void remove_nodes(const std::set<NodeId>& victims) {
    for (NodeId v : victims) roles.erase(v);
    edges.erase(std::remove_if(edges.begin(), edges.end(),
                               [&](const Edge& e) {
                                 return victims.count(e.from) ||
                                        victims.count(e.to);
                               }),
                edges.end());
  }

  // Single source, acyclic, unique roles, every node on a source ->
  // receiver path. Throws with a description on violation.
  void validate() const {
    std::size_t sources = 0;
    for (const auto& [n, r] : roles) sources += (r == Role::source) ? 1 : 0;
    if (sources != 1)
      throw std::invalid_argument("topology: expected exactly one source");
    if (receivers().empty())
      throw std::invalid_argument("topology: no receivers");
    for (const auto& e : edges)
      if (!has_node(e.from) || !has_node(e.to))
        throw std::invalid_argument("topology: edge references unknown node");
    if (!is_dag()) throw std::invalid_argument("topology: not acyclic");
    auto from_source = reachable_from(source());
    for (const auto& [n, r] : roles) {
      if (!from_source.count(n))
        throw std::invalid_argument("topology: node " + std::to_string(n) +
                                    " unreachable from source");
      if (r != Role::receiver && !reaches_receiver(n))
        throw std::invalid_argument("topology: node " + std::to_string(n) +
                                    " reaches no receiver");
    }
  }
};

}  // namespace spacemac
