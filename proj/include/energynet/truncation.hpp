#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "energynet/errors.hpp"
#include "energynet/network.hpp"

namespace energynet {

enum class BoundaryMode { Free, Wired };

// Real-valued function on the interior vertices of a truncation, stored
// densely over the interior index.
using VertexFunction = Eigen::VectorXd;

// A finite window onto a (conceptually infinite) network: the ball of a
// given radius around a center vertex. Free mode keeps the induced
// subnetwork; Wired mode grounds the next sphere, clamping its values to 0
// in every solve. Immutable; owns a copy of the base network.
class Truncation {
 public:
  struct Neighbor {
    Eigen::Index j;
    double weight;
  };

  Truncation(Network base, const VertexId& center, int radius, BoundaryMode mode)
      : base_(std::move(base)), mode_(mode) {
    auto cidx = base_.index_of(center);
    if (!cidx) throw std::invalid_argument("truncate: unknown center " + to_string(center));
    if (radius < 0) throw std::invalid_argument("truncate: negative radius");

    const std::size_t n = base_.vertex_count();
    std::vector<int> dist(n, -1);
    std::queue<std::size_t> frontier;
    dist[*cidx] = 0;
    frontier.push(*cidx);
    while (!frontier.empty()) {
      std::size_t x = frontier.front();
      frontier.pop();
      for (const auto& nb : base_.neighbors(x)) {
        if (nb.weight > 0.0 && dist[nb.index] < 0) {
          dist[nb.index] = dist[x] + 1;
          frontier.push(nb.index);
        }
      }
    }
    for (std::size_t x = 0; x < n; ++x) {
      if (dist[x] < 0) continue;
      if (dist[x] <= radius)
        interior_.push_back(x);
      else if (mode_ == BoundaryMode::Wired && dist[x] == radius + 1)
        boundary_.push_back(x);
    }
    // interior_ is sorted already (base indices ascend), giving a stable
    // total order on the interior.
    interior_index_.assign(n, -1);
    for (std::size_t i = 0; i < interior_.size(); ++i)
      interior_index_[interior_[i]] = static_cast<Eigen::Index>(i);

    std::vector<char> is_boundary(n, 0);
    for (std::size_t b : boundary_) is_boundary[b] = 1;

    const auto m = static_cast<Eigen::Index>(interior_.size());
    adjacency_.assign(m, {});
    grounded_.assign(m, 0.0);
    degree_.assign(m, 0.0);
    deep_.assign(m, 1);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (const auto& nb : base_.neighbors(interior_[i])) {
        Eigen::Index j = interior_index_[nb.index];
        if (j >= 0) {
          adjacency_[i].push_back({j, nb.weight});
          degree_[i] += nb.weight;
        } else {
          deep_[i] = 0;
          if (mode_ == BoundaryMode::Wired && is_boundary[nb.index]) {
            grounded_[i] += nb.weight;
            degree_[i] += nb.weight;
          }
        }
      }
    }
  }

  const Network& base() const { return base_; }
  BoundaryMode mode() const { return mode_; }

  Eigen::Index size() const { return static_cast<Eigen::Index>(interior_.size()); }
  const std::vector<std::size_t>& interior() const { return interior_; }
  const std::vector<std::size_t>& boundary() const { return boundary_; }

  const VertexId& vertex_at(Eigen::Index i) const {
    return base_.vertex_at(interior_.at(static_cast<std::size_t>(i)));
  }

  std::optional<Eigen::Index> index_of(const VertexId& id) const {
    auto base_idx = base_.index_of(id);
    if (!base_idx) return std::nullopt;
    Eigen::Index i = interior_index_[*base_idx];
    if (i < 0) return std::nullopt;
    return i;
  }

  Eigen::Index require_index(const VertexId& id) const {
    auto i = index_of(id);
    if (!i) throw std::invalid_argument("vertex not in truncation interior: " + to_string(id));
    return *i;
  }

  Eigen::Index origin_index() const { return require_index(base_.origin()); }

  const std::vector<Neighbor>& neighbors(Eigen::Index i) const {
    return adjacency_.at(static_cast<std::size_t>(i));
  }

  // Total conductance from interior vertex i into the grounded boundary
  // (always 0 in Free mode).
  double grounded_weight(Eigen::Index i) const {
    return grounded_.at(static_cast<std::size_t>(i));
  }

  // c(x) as seen by this truncation: interior edges plus, in Wired mode,
  // edges into the grounded boundary.
  double degree(Eigen::Index i) const { return degree_.at(static_cast<std::size_t>(i)); }

  // Deep interior: every base-network neighbor is itself interior. The
  // Laplacian of the truncation agrees with the full network there.
  bool deep_interior(Eigen::Index i) const { return deep_.at(static_cast<std::size_t>(i)) != 0; }

  std::vector<Eigen::Index> deep_interior_indices() const {
    std::vector<Eigen::Index> out;
    for (Eigen::Index i = 0; i < size(); ++i)
      if (deep_[static_cast<std::size_t>(i)]) out.push_back(i);
    return out;
  }

 private:
  Network base_;
  BoundaryMode mode_;
  std::vector<std::size_t> interior_;   // base indices, ascending
  std::vector<std::size_t> boundary_;   // base indices (Wired only)
  std::vector<Eigen::Index> interior_index_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<double> grounded_;
  std::vector<double> degree_;
  std::vector<char> deep_;
};

inline Truncation truncate(const Network& net, const VertexId& center, int radius,
                           BoundaryMode mode) {
  return Truncation(net, center, radius, mode);
}

inline VertexFunction delta(const Truncation& trunc, Eigen::Index x) {
  if (x < 0 || x >= trunc.size()) throw std::invalid_argument("delta: index out of range");
  VertexFunction f = VertexFunction::Zero(trunc.size());
  f[x] = 1.0;
  return f;
}

inline VertexFunction constant_function(const Truncation& trunc, double value) {
  return VertexFunction::Constant(trunc.size(), value);
}

// Representative with f(anchor) = 0; this is the convention for elements of
// the energy space, where functions are only defined up to a constant.
inline VertexFunction anchored(const Truncation& trunc, VertexFunction f,
                               std::optional<Eigen::Index> anchor = std::nullopt) {
  Eigen::Index a = anchor.value_or(trunc.origin_index());
  f.array() -= f[a];
  return f;
}

inline double value_at(const Truncation& trunc, const VertexFunction& f, const VertexId& id) {
  return f[trunc.require_index(id)];
}

}  // namespace energynet
