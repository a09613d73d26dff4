#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "zoo/errors.hpp"

namespace zoo {

using NodeId = int;

// One function instance inside a service's dependency graph.
struct DepNode {
  NodeId id = 0;
  std::string function_name;
  std::string package_id;
  int arity = 0;

  friend bool operator==(const DepNode& a, const DepNode& b) {
    return a.id == b.id && a.function_name == b.function_name &&
           a.package_id == b.package_id && a.arity == b.arity;
  }
};

// Directed wiring: output of `from` feeds input slot `position` of `to`.
struct Edge {
  NodeId from = 0;
  NodeId to = 0;
  int position = 0;

  friend bool operator==(const Edge& a, const Edge& b) {
    return a.from == b.from && a.to == b.to && a.position == b.position;
  }
};

// An input slot of a node that no producer feeds yet. The order of these
// slots defines the order of the owning service's input parameters.
struct InputSlot {
  NodeId node = 0;
  int position = 0;

  friend bool operator==(const InputSlot& a, const InputSlot& b) {
    return a.node == b.node && a.position == b.position;
  }
};

// Acyclic dependency graph of a service. Mutations preserve the invariants:
// no cycles, each input slot fed by at most one edge. A complete service
// graph additionally has exactly one sink.
class DependencyGraph {
 public:
  NodeId add_node(std::string function_name, std::string package_id,
                  int arity) {
    if (arity < 0) throw GraphError("negative arity");
    NodeId id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back({id, std::move(function_name), std::move(package_id), arity});
    for (int p = 0; p < arity; ++p) open_inputs_.push_back({id, p});
    return id;
  }

  void add_edge(NodeId from, NodeId to, int position) {
    check_node(from);
    check_node(to);
    if (position < 0 || position >= nodes_[to].arity)
      throw GraphError("input position " + std::to_string(position) +
                       " out of range for node " + std::to_string(to));
    for (const auto& e : edges_)
      if (e.to == to && e.position == position)
        throw InputAlreadyFedError(to, position);
    if (from == to || reaches(to, from)) throw CycleError();
    edges_.push_back({from, to, position});
    std::erase_if(open_inputs_, [&](const InputSlot& s) {
      return s.node == to && s.position == position;
    });
  }

  const std::vector<DepNode>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<InputSlot>& open_inputs() const { return open_inputs_; }
  bool empty() const { return nodes_.empty(); }

  std::vector<NodeId> sinks() const {
    std::vector<bool> has_out(nodes_.size(), false);
    for (const auto& e : edges_) has_out[e.from] = true;
    std::vector<NodeId> out;
    for (const auto& n : nodes_)
      if (!has_out[n.id]) out.push_back(n.id);
    return out;
  }

  NodeId sink() const {
    auto s = sinks();
    if (s.size() != 1)
      throw GraphError("expected exactly one sink, found " +
                       std::to_string(s.size()));
    return s.front();
  }

  // Deterministic topological order: among ready nodes, lowest id first.
  std::vector<NodeId> topo_order() const {
    std::vector<int> indegree(nodes_.size(), 0);
    for (const auto& e : edges_) ++indegree[e.to];
    std::set<NodeId> ready;
    for (const auto& n : nodes_)
      if (indegree[n.id] == 0) ready.insert(n.id);
    std::vector<NodeId> order;
    while (!ready.empty()) {
      NodeId id = *ready.begin();
      ready.erase(ready.begin());
      order.push_back(id);
      for (const auto& e : edges_)
        if (e.from == id && --indegree[e.to] == 0) ready.insert(e.to);
    }
    if (order.size() != nodes_.size()) throw CycleError();
    return order;
  }

  // Copies all of `other` into this graph with fresh node ids; open input
  // slots are appended in their original order. Returns old id -> new id.
  std::unordered_map<NodeId, NodeId> absorb(const DependencyGraph& other) {
    std::unordered_map<NodeId, NodeId> remap;
    NodeId offset = static_cast<NodeId>(nodes_.size());
    for (const auto& n : other.nodes_) {
      remap[n.id] = n.id + offset;
      nodes_.push_back({n.id + offset, n.function_name, n.package_id, n.arity});
    }
    for (const auto& e : other.edges_)
      edges_.push_back({remap[e.from], remap[e.to], e.position});
    for (const auto& s : other.open_inputs_)
      open_inputs_.push_back({remap[s.node], s.position});
    return remap;
  }

  nlohmann::json to_json() const {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : nodes_)
      nodes.push_back({{"id", n.id},
                       {"function", n.function_name},
                       {"package", n.package_id},
                       {"arity", n.arity}});
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : edges_)
      edges.push_back({{"from", e.from}, {"to", e.to}, {"position", e.position}});
    nlohmann::json open = nlohmann::json::array();
    for (const auto& s : open_inputs_)
      open.push_back({{"node", s.node}, {"position", s.position}});
    return {{"nodes", nodes}, {"edges", edges}, {"open_inputs", open}};
  }

  static DependencyGraph from_json(const nlohmann::json& j) {
    DependencyGraph g;
    if (!j.is_object() || !j.contains("nodes") || !j.contains("edges"))
      throw GraphError("malformed graph JSON");
    std::unordered_map<NodeId, NodeId> remap;
    for (const auto& n : j.at("nodes")) {
      NodeId id = g.add_node(n.at("function").get<std::string>(),
                             n.at("package").get<std::string>(),
                             n.at("arity").get<int>());
      remap[n.at("id").get<NodeId>()] = id;
    }
    for (const auto& e : j.at("edges"))
      g.add_edge(remap.at(e.at("from").get<NodeId>()),
                 remap.at(e.at("to").get<NodeId>()),
                 e.at("position").get<int>());
    if (j.contains("open_inputs")) {
      // Restore the recorded parameter order; the set must match what the
      // edge structure left unfed.
      std::vector<InputSlot> recorded;
      for (const auto& s : j.at("open_inputs"))
        recorded.push_back(
            {remap.at(s.at("node").get<NodeId>()), s.at("position").get<int>()});
      auto implied = g.open_inputs_;
      auto key = [](const InputSlot& s) {
        return std::pair<NodeId, int>(s.node, s.position);
      };
      auto sorted = [&](std::vector<InputSlot> v) {
        std::sort(v.begin(), v.end(), [&](const auto& a, const auto& b) {
          return key(a) < key(b);
        });
        return v;
      };
      if (sorted(recorded) != sorted(implied))
        throw GraphError("open_inputs do not match edge structure");
      g.open_inputs_ = std::move(recorded);
    }
    return g;
  }

  // Order-invariant structural hash: equal for isomorphic graphs (same node
  // labels wired the same way), independent of node numbering. Open slots
  // hash with their parameter index so input order matters.
  std::uint64_t fingerprint() const {
    std::unordered_map<NodeId, std::uint64_t> memo;
    std::unordered_map<NodeId, std::uint64_t> open_index;
    for (std::size_t i = 0; i < open_inputs_.size(); ++i) {
      const auto& s = open_inputs_[i];
      open_index[pack(s.node, s.position)] = i;
    }
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (NodeId s : sinks()) h = mix(h, node_hash(s, memo, open_index));
    return h;
  }

  friend bool operator==(const DependencyGraph& a, const DependencyGraph& b) {
    return a.nodes_ == b.nodes_ && a.edges_ == b.edges_ &&
           a.open_inputs_ == b.open_inputs_;
  }

 private:
  void check_node(NodeId id) const {
    if (id < 0 || id >= static_cast<NodeId>(nodes_.size()))
      throw GraphError("unknown node id " + std::to_string(id));
  }

  bool reaches(NodeId from, NodeId target) const {
    std::vector<NodeId> stack{from};
    std::vector<bool> seen(nodes_.size(), false);
    while (!stack.empty()) {
      NodeId id = stack.back();
      stack.pop_back();
      if (id == target) return true;
      if (seen[id]) continue;
      seen[id] = true;
      for (const auto& e : edges_)
        if (e.from == id) stack.push_back(e.to);
    }
    return false;
  }

  static std::uint64_t pack(NodeId node, int position) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(node)) << 32) |
           static_cast<std::uint32_t>(position);
  }

  static std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
  }

  static std::uint64_t hash_str(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    return h;
  }

  std::uint64_t node_hash(
      NodeId id, std::unordered_map<NodeId, std::uint64_t>& memo,
      const std::unordered_map<NodeId, std::uint64_t>& open_index) const {
    auto it = memo.find(id);
    if (it != memo.end()) return it->second;
    const DepNode& n = nodes_[id];
    std::uint64_t h = hash_str(n.function_name);
    h = mix(h, hash_str(n.package_id));
    h = mix(h, static_cast<std::uint64_t>(n.arity));
    for (int p = 0; p < n.arity; ++p) {
      bool fed = false;
      for (const auto& e : edges_) {
        if (e.to == id && e.position == p) {
          h = mix(h, mix(static_cast<std::uint64_t>(p),
                         node_hash(e.from, memo, open_index)));
          fed = true;
          break;
        }
      }
      if (!fed) {
        auto oi = open_index.find(pack(id, p));
        std::uint64_t param =
            oi == open_index.end() ? ~0ull : oi->second;
        h = mix(h, mix(static_cast<std::uint64_t>(p), 0xa5a5a5a5ull ^ param));
      }
    }
    memo[id] = h;
    return h;
  }

  std::vector<DepNode> nodes_;
  std::vector<Edge> edges_;
  std::vector<InputSlot> open_inputs_;
};

}  // namespace zoo
