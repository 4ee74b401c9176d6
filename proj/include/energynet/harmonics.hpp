#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "energynet/errors.hpp"
#include "energynet/operators.hpp"
#include "energynet/truncation.hpp"

namespace energynet {

inline double geometric_harmonic_value(double c, std::int64_t n) {
  if (n == 0) return 0.0;
  double magnitude = 1.0 - std::pow(c, -static_cast<double>(std::llabs(n)));
  return n > 0 ? magnitude : -magnitude;
}

// h(n) = sgn(n) (1 - c^-|n|) on a geometric-integers truncation. Harmonic at
// every vertex whose two neighbors are both present; for c <= 1 the space of
// finite-energy harmonic functions is trivial and the request is rejected.
inline VertexFunction geometric_harmonic(const Truncation& trunc, double c) {
  if (!(c > 1.0))
    throw std::invalid_argument(
        "geometric_harmonic: requires c > 1 (for c = 1 the only finite-energy harmonic "
        "function is 0)");
  VertexFunction h(trunc.size());
  for (Eigen::Index i = 0; i < trunc.size(); ++i) {
    const VertexId& id = trunc.vertex_at(i);
    if (!is_integer(id))
      throw std::invalid_argument("geometric_harmonic: expects integer vertex ids");
    h[i] = geometric_harmonic_value(c, std::get<std::int64_t>(id));
  }
  return h;
}

// A pair of vertex-disjoint rays descending from a common base vertex of a
// binary-address tree; plus[0] == minus[0] == base.
struct RayPair {
  std::vector<VertexId> plus;
  std::vector<VertexId> minus;

  const VertexId& base() const {
    if (plus.empty()) throw std::invalid_argument("RayPair: empty ray");
    return plus.front();
  }
};

inline RayPair default_rays(const VertexId& base, std::size_t length) {
  if (!std::holds_alternative<std::string>(base))
    throw std::invalid_argument("default_rays: tree vertices are address strings");
  RayPair rays;
  std::string p = std::get<std::string>(base);
  std::string m = p;
  rays.plus.push_back(VertexId{p});
  rays.minus.push_back(VertexId{m});
  for (std::size_t n = 0; n < length; ++n) {
    p += '0';
    m += '1';
    rays.plus.push_back(VertexId{p});
    rays.minus.push_back(VertexId{m});
  }
  return rays;
}

namespace detail {

inline void validate_rays(const Truncation& trunc, const RayPair& rays) {
  if (rays.plus.empty() || rays.minus.empty())
    throw std::invalid_argument("invalid rays: both rays must contain the base vertex");
  if (rays.plus.front() != rays.minus.front())
    throw std::invalid_argument("invalid rays: rays must share their base vertex");
  const auto* base_addr = std::get_if<std::string>(&rays.plus.front());
  if (!base_addr) throw std::invalid_argument("invalid rays: tree vertices are address strings");
  const std::size_t base_depth = base_addr->size();

  auto check_ray = [&](const std::vector<VertexId>& ray, const char* name) {
    for (std::size_t n = 0; n < ray.size(); ++n) {
      const auto* addr = std::get_if<std::string>(&ray[n]);
      if (!addr) throw std::invalid_argument("invalid rays: tree vertices are address strings");
      if (addr->size() != base_depth + n)
        throw std::invalid_argument(std::string("invalid rays: ") + name + "[" +
                                    std::to_string(n) + "] is not at depth |base|+" +
                                    std::to_string(n));
      Eigen::Index i = trunc.require_index(ray[n]);
      if (n > 0) {
        Eigen::Index prev = trunc.require_index(ray[n - 1]);
        bool adjacent = false;
        for (const auto& nb : trunc.neighbors(prev)) adjacent |= (nb.j == i);
        if (!adjacent)
          throw std::invalid_argument(std::string("invalid rays: ") + name + " is not a path");
      }
    }
  };
  check_ray(rays.plus, "plus");
  check_ray(rays.minus, "minus");
  for (std::size_t n = 1; n < std::min(rays.plus.size(), rays.minus.size()); ++n)
    if (rays.plus[n] == rays.minus[n])
      throw std::invalid_argument("invalid rays: rays meet away from the base");

  // Rays must run out to the rim, otherwise the construction cannot be
  // harmonic at the last ray vertex.
  if (trunc.deep_interior(trunc.require_index(rays.plus.back())) ||
      trunc.deep_interior(trunc.require_index(rays.minus.back())))
    throw std::invalid_argument("invalid rays: rays end inside the deep interior");
}

// Distance-ordered assignment of every interior vertex to its nearest ray
// vertex (unique in a tree).
inline std::vector<Eigen::Index> nearest_ray_vertex(const Truncation& trunc,
                                                    const std::vector<Eigen::Index>& ray) {
  std::vector<Eigen::Index> nearest(static_cast<std::size_t>(trunc.size()), -1);
  std::queue<Eigen::Index> frontier;
  for (Eigen::Index r : ray) {
    nearest[static_cast<std::size_t>(r)] = r;
    frontier.push(r);
  }
  while (!frontier.empty()) {
    Eigen::Index x = frontier.front();
    frontier.pop();
    for (const auto& nb : trunc.neighbors(x)) {
      if (nearest[static_cast<std::size_t>(nb.j)] < 0) {
        nearest[static_cast<std::size_t>(nb.j)] = nearest[static_cast<std::size_t>(x)];
        frontier.push(nb.j);
      }
    }
  }
  return nearest;
}

struct RayIndices {
  std::vector<Eigen::Index> order;   // all ray vertices
  std::vector<double> ray_value;     // value at order[k]
};

}  // namespace detail

// Harmonic function from a ray pair: 1 - c^-n along the plus ray, c^-n - 1
// along the minus ray, locally constant elsewhere (every off-ray vertex
// copies its nearest ray vertex).
inline VertexFunction tree_harmonic(const Truncation& trunc, const RayPair& rays, double c) {
  if (!(c > 1.0)) throw std::invalid_argument("tree_harmonic: requires c > 1");
  detail::validate_rays(trunc, rays);

  std::vector<Eigen::Index> ray_indices;
  std::vector<double> ray_values;
  for (std::size_t n = 0; n < rays.plus.size(); ++n) {
    ray_indices.push_back(trunc.require_index(rays.plus[n]));
    ray_values.push_back(1.0 - std::pow(c, -static_cast<double>(n)));
  }
  for (std::size_t n = 1; n < rays.minus.size(); ++n) {
    ray_indices.push_back(trunc.require_index(rays.minus[n]));
    ray_values.push_back(std::pow(c, -static_cast<double>(n)) - 1.0);
  }

  auto nearest = detail::nearest_ray_vertex(trunc, ray_indices);
  std::vector<double> value_of_ray(static_cast<std::size_t>(trunc.size()), 0.0);
  for (std::size_t k = 0; k < ray_indices.size(); ++k)
    value_of_ray[static_cast<std::size_t>(ray_indices[k])] = ray_values[k];

  VertexFunction h(trunc.size());
  for (Eigen::Index i = 0; i < trunc.size(); ++i) {
    Eigen::Index r = nearest[static_cast<std::size_t>(i)];
    if (r < 0)
      throw std::invalid_argument("tree_harmonic: interior vertex unreachable from the rays");
    h[i] = value_of_ray[static_cast<std::size_t>(r)];
  }
  return h;
}

struct RoydenParts {
  VertexFunction fin;
  VertexFunction harm;
};

// Splits u into its energy-orthogonal projection onto span{delta_x : x deep
// interior} and the complementary part. The coefficients solve the Gram
// system G a = b with G the Laplacian restricted to the deep interior and
// b(x) = <delta_x, u>_E = Lap u(x).
inline RoydenParts royden_decompose(const Truncation& trunc, const VertexFunction& u) {
  if (u.size() != trunc.size())
    throw std::invalid_argument("royden_decompose: dimension mismatch");
  std::vector<Eigen::Index> basis = trunc.deep_interior_indices();
  // A full free network makes {delta_x} linearly dependent mod constants;
  // dropping the origin restores a basis of the same span.
  if (trunc.mode() == BoundaryMode::Free &&
      static_cast<Eigen::Index>(basis.size()) == trunc.size()) {
    Eigen::Index o = trunc.origin_index();
    basis.erase(std::remove(basis.begin(), basis.end(), o), basis.end());
  }
  if (basis.empty()) return {VertexFunction::Zero(trunc.size()), u};

  const auto m = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd lap = assemble_laplacian(trunc).dense();
  Eigen::MatrixXd gram(m, m);
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index s = 0; s < m; ++s) gram(r, s) = lap(basis[r], basis[s]);

  VertexFunction lap_u = laplacian_apply(trunc, u);
  Eigen::VectorXd b(m);
  for (Eigen::Index r = 0; r < m; ++r) b[r] = lap_u[basis[r]];

  Eigen::LDLT<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success)
    throw NumericalError("royden_decompose: singular Gram matrix");
  Eigen::VectorXd a = solver.solve(b);

  VertexFunction fin = VertexFunction::Zero(trunc.size());
  for (Eigen::Index r = 0; r < m; ++r) fin[basis[r]] += a[r];
  return {fin, u - fin};
}

namespace detail {

struct DefectSequence {
  std::vector<double> values;      // f(0..n_max)
  std::vector<double> increments;  // increments[k] = f(k) - f(k-1), k >= 1
};

// Defect recurrence on the geometric integers with edge weights
// s * c^max(|n|,|n-1|): Lap f = -f determines f from f(0) = 0 and f(1).
// Rearranged to propagate the increment d(n+1) = d(n)/c + f(n)/(s c^(n+1)),
// whose terms never cancel for f(1) of one sign: the increments stay
// accurate in relative terms even when they fall far below |f|, which is
// what the energy sums need (they multiply d(n)^2 by c^n).
inline DefectSequence defect_recurrence(double c, int n_max, double f1, double scale) {
  DefectSequence seq;
  seq.values.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  seq.increments.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  if (n_max >= 1) {
    seq.values[1] = f1;
    seq.increments[1] = f1;
  }
  for (int n = 1; n < n_max; ++n) {
    auto k = static_cast<std::size_t>(n);
    double d = seq.increments[k] / c + seq.values[k] / (scale * std::pow(c, n + 1));
    seq.increments[k + 1] = d;
    seq.values[k + 1] = seq.values[k] + d;
  }
  return seq;
}

}  // namespace detail

// Defect vector on the geometric integers: f(0) = 0, f(1) = f1, the rest
// determined by Lap f = -f. Negative indices carry the odd mirror
// f(-n) = -f(n), which satisfies the same equation by symmetry of the
// weights. partial_energies[k-1] is the energy of f restricted to [-k, k].
struct DefectVector {
  double c = 2.0;
  int n_max = 0;
  std::vector<double> values;            // index n + n_max
  std::vector<double> partial_energies;  // k = 1..n_max

  double value(std::int64_t n) const {
    if (std::llabs(n) > n_max) throw std::invalid_argument("DefectVector: index out of range");
    return values[static_cast<std::size_t>(n + n_max)];
  }

  double tail_after(int k) const {
    if (k < 1 || k > n_max) throw std::invalid_argument("DefectVector: bad tail index");
    return partial_energies.back() - partial_energies[static_cast<std::size_t>(k) - 1];
  }
};

inline DefectVector defect_vector_Z(double c, int n_max, double f1 = 1.0) {
  if (!(c >= 1.0)) throw std::invalid_argument("defect_vector_Z: requires c >= 1");
  if (n_max < 2) throw std::invalid_argument("defect_vector_Z: requires n_max >= 2");
  if (f1 == 0.0) throw std::invalid_argument("defect_vector_Z: f(1) must be nonzero");

  DefectVector out;
  out.c = c;
  out.n_max = n_max;
  detail::DefectSequence positive = detail::defect_recurrence(c, n_max, f1, 1.0);
  out.values.assign(2 * static_cast<std::size_t>(n_max) + 1, 0.0);
  for (int n = 0; n <= n_max; ++n) {
    out.values[static_cast<std::size_t>(n_max + n)] = positive.values[static_cast<std::size_t>(n)];
    out.values[static_cast<std::size_t>(n_max - n)] =
        -positive.values[static_cast<std::size_t>(n)];
  }

  // Edges (k-1, k) and (-k, -k+1) both weigh c^k and carry increments of
  // equal magnitude by the odd mirror.
  out.partial_energies.reserve(static_cast<std::size_t>(n_max));
  double acc = 0.0;
  for (int k = 1; k <= n_max; ++k) {
    double d = positive.increments[static_cast<std::size_t>(k)];
    acc += 2.0 * std::pow(c, k) * d * d;
    out.partial_energies.push_back(acc);
  }
  return out;
}

// Restriction of the defect vector to a geometric-integers truncation.
inline VertexFunction restrict_to(const Truncation& trunc, const DefectVector& defect) {
  VertexFunction f(trunc.size());
  for (Eigen::Index i = 0; i < trunc.size(); ++i) {
    const VertexId& id = trunc.vertex_at(i);
    if (!is_integer(id)) throw std::invalid_argument("restrict_to: expects integer vertex ids");
    f[i] = defect.value(std::get<std::int64_t>(id));
  }
  return f;
}

struct DefectScan {
  double max_residual = 0.0;        // |(Pf)(x) - (1 + 1/c(x)) f(x)| over all interior
  double max_residual_deep = 0.0;   // same, deep interior only
  std::vector<Eigen::Index> positive_local_maxima;
  bool contradiction = false;
  std::optional<Eigen::Index> contradiction_vertex;
  std::string note;
};

// Pointwise test of the transition-operator identity satisfied by solutions
// of Lap f = -f, plus the mechanism that rules such solutions out of C_0: a
// positive local maximum x1 where the identity holds forces the absurd
// inequality 0 >= (1/c(x1)) f(x1).
inline DefectScan c0_defect_scan(const Truncation& trunc, const VertexFunction& f,
                                 double tol = 1e-10) {
  if (f.size() != trunc.size()) throw std::invalid_argument("c0_defect_scan: dimension mismatch");
  if (f.lpNorm<Eigen::Infinity>() == 0.0)
    throw std::invalid_argument("c0_defect_scan: f must be nonzero");

  DefectScan scan;
  for (Eigen::Index x = 0; x < trunc.size(); ++x) {
    double c = trunc.degree(x);
    if (c <= 0.0) continue;
    double pf = 0.0;
    bool local_max = f[x] > 0.0;
    for (const auto& nb : trunc.neighbors(x)) {
      pf += nb.weight / c * f[nb.j];
      local_max &= f[x] >= f[nb.j];
    }
    double residual = std::abs(pf - (1.0 + 1.0 / c) * f[x]);
    scan.max_residual = std::max(scan.max_residual, residual);
    if (trunc.deep_interior(x)) scan.max_residual_deep = std::max(scan.max_residual_deep, residual);
    if (local_max) {
      scan.positive_local_maxima.push_back(x);
      double scale = std::max({std::abs(f[x]), std::abs(pf), 1e-300});
      if (residual <= tol * scale && !scan.contradiction) {
        scan.contradiction = true;
        scan.contradiction_vertex = x;
        scan.note = "identity holds at positive local maximum " + to_string(trunc.vertex_at(x)) +
                    ", forcing 0 >= (1/c(x))f(x) > 0";
      }
    }
  }
  return scan;
}

struct TreeDefect {
  VertexFunction f;
  std::vector<char> on_ray;  // per interior index
};

// Defect vector along an embedded copy of the integers in the tree, with the
// locally constant off-ray extension. Along the rays the recurrence is run
// against the actual edge weights (they carry an extra factor c^|base|), so
// Lap f = -f holds at every deep ray vertex; at off-ray vertices the
// extension is constant, Lap f vanishes, and the defect equation picks up a
// residual of |f| there. Those junction residuals are reported by scans, not
// asserted away.
inline TreeDefect tree_defect_vector(const Truncation& trunc, const RayPair& rays, double c,
                                     double f1 = 1.0) {
  if (!(c > 1.0)) throw std::invalid_argument("tree_defect_vector: requires c > 1");
  if (f1 == 0.0) throw std::invalid_argument("tree_defect_vector: f(1) must be nonzero");
  detail::validate_rays(trunc, rays);
  const std::size_t base_depth = std::get<std::string>(rays.plus.front()).size();
  const auto steps = static_cast<int>(
      std::max(rays.plus.size(), rays.minus.size()) > 0
          ? std::max(rays.plus.size(), rays.minus.size()) - 1
          : 0);
  detail::DefectSequence fz = detail::defect_recurrence(
      c, std::max(steps, 1), f1, std::pow(c, static_cast<double>(base_depth)));

  std::vector<Eigen::Index> ray_indices;
  std::vector<double> ray_values;
  for (std::size_t n = 0; n < rays.plus.size(); ++n) {
    ray_indices.push_back(trunc.require_index(rays.plus[n]));
    ray_values.push_back(fz.values[n]);
  }
  for (std::size_t n = 1; n < rays.minus.size(); ++n) {
    ray_indices.push_back(trunc.require_index(rays.minus[n]));
    ray_values.push_back(-fz.values[n]);
  }

  auto nearest = detail::nearest_ray_vertex(trunc, ray_indices);
  std::vector<double> value_of_ray(static_cast<std::size_t>(trunc.size()), 0.0);
  TreeDefect out;
  out.on_ray.assign(static_cast<std::size_t>(trunc.size()), 0);
  for (std::size_t k = 0; k < ray_indices.size(); ++k) {
    value_of_ray[static_cast<std::size_t>(ray_indices[k])] = ray_values[k];
    out.on_ray[static_cast<std::size_t>(ray_indices[k])] = 1;
  }
  out.f.resize(trunc.size());
  for (Eigen::Index i = 0; i < trunc.size(); ++i) {
    Eigen::Index r = nearest[static_cast<std::size_t>(i)];
    if (r < 0)
      throw std::invalid_argument("tree_defect_vector: interior vertex unreachable from rays");
    out.f[i] = value_of_ray[static_cast<std::size_t>(r)];
  }
  return out;
}

}  // namespace energynet
