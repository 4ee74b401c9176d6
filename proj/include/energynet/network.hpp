#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "energynet/errors.hpp"
#include "energynet/vertex_id.hpp"

namespace energynet {

struct Violation {
  enum class Kind { Asymmetry, SelfLoop, NonpositiveWeight, Disconnection };
  Kind kind;
  VertexId a;
  std::optional<VertexId> b;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }

  std::string summary() const {
    std::string out;
    for (const auto& v : violations) {
      out += v.detail;
      out += '\n';
    }
    return out;
  }
};

// A finite resistance network: vertices, a symmetric positive conductance
// table, and a distinguished origin vertex. Immutable once built; share
// freely across threads. Use NetworkBuilder to construct.
class Network {
 public:
  struct Neighbor {
    std::size_t index;
    double weight;
  };

  std::size_t vertex_count() const { return vertices_.size(); }
  const std::vector<VertexId>& vertices() const { return vertices_; }
  const VertexId& vertex_at(std::size_t i) const { return vertices_.at(i); }

  std::optional<std::size_t> index_of(const VertexId& id) const {
    auto it = std::lower_bound(vertices_.begin(), vertices_.end(), id);
    if (it == vertices_.end() || *it != id) return std::nullopt;
    return static_cast<std::size_t>(it - vertices_.begin());
  }

  const VertexId& origin() const { return origin_; }
  std::size_t origin_index() const { return origin_index_; }

  Network with_origin(VertexId o) const {
    Network copy = *this;
    auto idx = copy.index_of(o);
    if (!idx) throw std::invalid_argument("with_origin: unknown vertex " + to_string(o));
    copy.origin_ = std::move(o);
    copy.origin_index_ = *idx;
    return copy;
  }

  // Conductance c_xy as stored in row x (0 when no edge).
  double conductance(std::size_t x, std::size_t y) const {
    for (const auto& nb : adjacency_.at(x))
      if (nb.index == y) return nb.weight;
    return 0.0;
  }

  const std::vector<Neighbor>& neighbors(std::size_t x) const { return adjacency_.at(x); }

  // Net conductance c(x), the sum of incident edge weights.
  double degree(std::size_t x) const { return degrees_.at(x); }

  double degree(const VertexId& id) const {
    auto idx = index_of(id);
    if (!idx) throw std::invalid_argument("degree: unknown vertex " + to_string(id));
    return degrees_[*idx];
  }

  // Directed entry table keyed by (row, col) index pairs. Valid networks
  // store every edge in both orientations with equal weights; validate()
  // reports any discrepancy.
  const std::map<std::pair<std::size_t, std::size_t>, double>& directed_entries() const {
    return entries_;
  }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& [key, w] : entries_) {
      (void)w;
      if (key.first < key.second) ++n;
    }
    return n;
  }

 private:
  friend class NetworkBuilder;
  Network() = default;

  std::vector<VertexId> vertices_;  // sorted
  VertexId origin_;
  std::size_t origin_index_ = 0;
  std::map<std::pair<std::size_t, std::size_t>, double> entries_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<double> degrees_;
};

class NetworkBuilder {
 public:
  NetworkBuilder& add_vertex(VertexId id) {
    ids_.insert(std::move(id));
    return *this;
  }

  // Inserts the edge in both orientations.
  NetworkBuilder& add_edge(const VertexId& a, const VertexId& b, double weight) {
    ids_.insert(a);
    ids_.insert(b);
    raw_[{a, b}] = weight;
    raw_[{b, a}] = weight;
    return *this;
  }

  // Stores a single orientation only. Exists so tests can break symmetry
  // on purpose; validate() flags the result.
  NetworkBuilder& set_directed(const VertexId& a, const VertexId& b, double weight) {
    ids_.insert(a);
    ids_.insert(b);
    raw_[{a, b}] = weight;
    return *this;
  }

  NetworkBuilder& origin(VertexId id) {
    ids_.insert(id);
    origin_ = std::move(id);
    return *this;
  }

  Network build() const {
    if (ids_.empty()) throw ValidationError("network has no vertices");
    Network net;
    net.vertices_.assign(ids_.begin(), ids_.end());
    net.origin_ = origin_.value_or(net.vertices_.front());
    auto oidx = net.index_of(net.origin_);
    if (!oidx) throw ValidationError("origin is not a vertex: " + to_string(net.origin_));
    net.origin_index_ = *oidx;

    const std::size_t n = net.vertices_.size();
    net.adjacency_.assign(n, {});
    for (const auto& [key, w] : raw_) {
      std::size_t a = *net.index_of(key.first);
      std::size_t b = *net.index_of(key.second);
      net.entries_[{a, b}] = w;
      if (a != b) net.adjacency_[a].push_back({b, w});
    }
    net.degrees_.assign(n, 0.0);
    for (std::size_t x = 0; x < n; ++x) {
      std::sort(net.adjacency_[x].begin(), net.adjacency_[x].end(),
                [](const Network::Neighbor& p, const Network::Neighbor& q) {
                  return p.index < q.index;
                });
      double c = 0.0;
      for (const auto& nb : net.adjacency_[x]) c += nb.weight;
      net.degrees_[x] = c;
    }
    return net;
  }

 private:
  std::set<VertexId> ids_;
  std::optional<VertexId> origin_;
  std::map<std::pair<VertexId, VertexId>, double> raw_;
};

// Checks the network invariants: symmetry of the conductance table, no
// self-loops, strict positivity, and connectedness from the origin. Returns
// a report instead of throwing so callers can show every problem at once.
inline ValidationReport validate(const Network& net) {
  ValidationReport report;
  const auto& entries = net.directed_entries();

  for (const auto& [key, w] : entries) {
    const auto& [a, b] = key;
    const VertexId& va = net.vertex_at(a);
    const VertexId& vb = net.vertex_at(b);
    if (a == b) {
      report.violations.push_back({Violation::Kind::SelfLoop, va, va,
                                   "self-loop at vertex " + to_string(va)});
      continue;
    }
    if (!(w > 0.0) || !std::isfinite(w)) {
      if (a < b || entries.find({b, a}) == entries.end())
        report.violations.push_back(
            {Violation::Kind::NonpositiveWeight, va, vb,
             "nonpositive weight " + std::to_string(w) + " on edge (" + to_string(va) +
                 "," + to_string(vb) + ")"});
    }
    if (a < b) {
      auto rev = entries.find({b, a});
      if (rev == entries.end() || rev->second != w) {
        double back = rev == entries.end() ? 0.0 : rev->second;
        report.violations.push_back(
            {Violation::Kind::Asymmetry, va, vb,
             "asymmetric conductance on (" + to_string(va) + "," + to_string(vb) +
                 "): " + std::to_string(w) + " vs " + std::to_string(back)});
      }
    } else if (entries.find({b, a}) == entries.end()) {
      report.violations.push_back(
          {Violation::Kind::Asymmetry, vb, va,
           "asymmetric conductance on (" + to_string(vb) + "," + to_string(va) +
               "): 0.000000 vs " + std::to_string(w)});
    }
  }

  // Reachability from the origin; either stored orientation counts here so
  // that asymmetric tables still get a meaningful answer.
  const std::size_t n = net.vertex_count();
  std::vector<char> seen(n, 0);
  std::queue<std::size_t> frontier;
  frontier.push(net.origin_index());
  seen[net.origin_index()] = 1;
  while (!frontier.empty()) {
    std::size_t x = frontier.front();
    frontier.pop();
    for (const auto& nb : net.neighbors(x)) {
      if (nb.weight > 0.0 && !seen[nb.index]) {
        seen[nb.index] = 1;
        frontier.push(nb.index);
      }
    }
    for (const auto& [key, w] : entries) {
      if (key.second == x && w > 0.0 && !seen[key.first]) {
        seen[key.first] = 1;
        frontier.push(key.first);
      }
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (!seen[x])
      report.violations.push_back({Violation::Kind::Disconnection, net.vertex_at(x),
                                   std::nullopt,
                                   "vertex " + to_string(net.vertex_at(x)) +
                                       " unreachable from origin " +
                                       to_string(net.origin())});
  }
  return report;
}

inline double degree(const Network& net, const VertexId& id) { return net.degree(id); }

// Geometric integers: vertices -n..n, edge (k-1,k) with weight
// c^max(|k|,|k-1|), origin 0. c = 1 gives the unweighted path.
inline Network make_geometric_integers(double c, int n) {
  if (!(c >= 1.0)) throw std::invalid_argument("make_geometric_integers: requires c >= 1");
  if (n < 1) throw std::invalid_argument("make_geometric_integers: requires n >= 1");
  NetworkBuilder builder;
  for (int k = -n + 1; k <= n; ++k) {
    int power = std::max(std::abs(k), std::abs(k - 1));
    builder.add_edge(VertexId{std::int64_t{k - 1}}, VertexId{std::int64_t{k}},
                     std::pow(c, power));
  }
  builder.origin(VertexId{std::int64_t{0}});
  return builder.build();
}

// Full binary tree of the given depth with root "" of degree 2. Vertices are
// binary address strings, so |x| is the address length and the meet of an
// edge is its shallower endpoint. An edge from depth k to depth k+1 weighs
// c^(k+1).
inline Network make_geometric_tree(double c, int depth) {
  if (!(c >= 1.0)) throw std::invalid_argument("make_geometric_tree: requires c >= 1");
  if (depth < 1) throw std::invalid_argument("make_geometric_tree: requires depth >= 1");
  NetworkBuilder builder;
  std::vector<std::string> level{""};
  for (int k = 0; k < depth; ++k) {
    double weight = std::pow(c, k + 1);
    std::vector<std::string> next;
    next.reserve(level.size() * 2);
    for (const auto& parent : level) {
      for (char bit : {'0', '1'}) {
        std::string child = parent + bit;
        builder.add_edge(VertexId{parent}, VertexId{child}, weight);
        next.push_back(std::move(child));
      }
    }
    level = std::move(next);
  }
  builder.origin(VertexId{std::string{}});
  return builder.build();
}

}  // namespace energynet
