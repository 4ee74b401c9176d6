#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "energynet/errors.hpp"
#include "energynet/operators.hpp"
#include "energynet/truncation.hpp"

namespace energynet {

namespace detail {

// Backward-stability check on a linear solve; catches singular or otherwise
// broken factorizations without penalizing well-conditioned large weights.
inline void check_solve_residual(const Truncation& trunc, const VertexFunction& v,
                                 const VertexFunction& rhs, const char* what) {
  VertexFunction r = laplacian_apply(trunc, v) - rhs;
  double max_degree = 0.0;
  for (Eigen::Index i = 0; i < trunc.size(); ++i)
    max_degree = std::max(max_degree, trunc.degree(i));
  double scale = 2.0 * max_degree * v.lpNorm<Eigen::Infinity>() + rhs.lpNorm<Eigen::Infinity>();
  double bound = 1e-12 * static_cast<double>(std::max<Eigen::Index>(trunc.size(), 1)) *
                 std::max(scale, 1e-300);
  if (!(r.lpNorm<Eigen::Infinity>() <= bound))
    throw NumericalError(std::string(what) + ": solve residual " +
                         std::to_string(r.lpNorm<Eigen::Infinity>()) + " exceeds bound " +
                         std::to_string(bound));
}

// Shared direct solver for dipole/monopole systems. Free mode grounds the
// origin row and column (pinning v(o) = 0 makes the system nonsingular);
// Wired mode factors the full Dirichlet Laplacian, which is already
// positive definite.
class LaplacianSolver {
 public:
  explicit LaplacianSolver(const Truncation& trunc)
      : trunc_(&trunc), pivot_(trunc.mode() == BoundaryMode::Free) {
    SymmetricOperator lap = assemble_laplacian(trunc);
    if (pivot_) {
      const Eigen::Index n = trunc.size();
      const Eigen::Index o = trunc.origin_index();
      keep_.reserve(static_cast<std::size_t>(n > 0 ? n - 1 : 0));
      for (Eigen::Index i = 0; i < n; ++i)
        if (i != o) keep_.push_back(i);
      Eigen::SparseMatrix<double> sub(n - 1, n - 1);
      std::vector<Eigen::Triplet<double>> triplets;
      std::vector<Eigen::Index> pos(static_cast<std::size_t>(n), -1);
      for (std::size_t k = 0; k < keep_.size(); ++k) pos[keep_[k]] = static_cast<Eigen::Index>(k);
      for (int col = 0; col < lap.matrix.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(lap.matrix, col); it; ++it) {
          Eigen::Index r = pos[it.row()];
          Eigen::Index c = pos[it.col()];
          if (r >= 0 && c >= 0) triplets.emplace_back(r, c, it.value());
        }
      sub.setFromTriplets(triplets.begin(), triplets.end());
      factor_.compute(sub);
    } else {
      factor_.compute(lap.matrix);
    }
    if (factor_.info() != Eigen::Success)
      throw NumericalError("LaplacianSolver: factorization failed (singular system)");
  }

  // Solves Lap v = rhs. Free mode requires sum(rhs) orthogonal to constants
  // and returns the representative with v(origin) = 0.
  VertexFunction solve(const VertexFunction& rhs, const char* what) const {
    const Truncation& trunc = *trunc_;
    VertexFunction v;
    if (pivot_) {
      Eigen::VectorXd sub_rhs(static_cast<Eigen::Index>(keep_.size()));
      for (std::size_t k = 0; k < keep_.size(); ++k) sub_rhs[static_cast<Eigen::Index>(k)] = rhs[keep_[k]];
      Eigen::VectorXd sol = factor_.solve(sub_rhs);
      v = VertexFunction::Zero(trunc.size());
      for (std::size_t k = 0; k < keep_.size(); ++k) v[keep_[k]] = sol[static_cast<Eigen::Index>(k)];
    } else {
      v = factor_.solve(rhs);
    }
    check_solve_residual(trunc, v, rhs, what);
    return v;
  }

 private:
  const Truncation* trunc_;
  bool pivot_;
  std::vector<Eigen::Index> keep_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor_;
};

}  // namespace detail

// Dipole v_x: Lap v = delta_x - delta_o. On Free truncations the solution is
// the anchored representative with v(o) = 0; on Wired truncations the system
// is nonsingular and the solution is left as computed (re-anchoring would
// break the dipole equation against the grounded boundary).
inline VertexFunction solve_dipole(const Truncation& trunc, Eigen::Index x) {
  if (x < 0 || x >= trunc.size()) throw std::invalid_argument("solve_dipole: x not interior");
  const Eigen::Index o = trunc.origin_index();
  if (x == o) return VertexFunction::Zero(trunc.size());
  detail::LaplacianSolver solver(trunc);
  VertexFunction rhs = VertexFunction::Zero(trunc.size());
  rhs[x] = 1.0;
  rhs[o] -= 1.0;
  return solver.solve(rhs, "solve_dipole");
}

// Monopole w_x: Lap w = delta_x. Solvable only against a grounded boundary;
// on a Free truncation the right-hand side is not orthogonal to constants,
// which mirrors the fact that monopoles need a transient network.
inline VertexFunction solve_monopole(const Truncation& trunc, Eigen::Index x) {
  if (trunc.mode() != BoundaryMode::Wired)
    throw std::invalid_argument(
        "solve_monopole: requires a Wired truncation (Lap w = delta_x has no solution on a "
        "finite free network; monopoles exist only via grounded exhaustion)");
  if (x < 0 || x >= trunc.size()) throw std::invalid_argument("solve_monopole: x not interior");
  detail::LaplacianSolver solver(trunc);
  return solver.solve(delta(trunc, x), "solve_monopole");
}

// The energy kernel {v_x} of a truncation, one factorization for the whole
// family. member(o) is the zero function.
class KernelFamily {
 public:
  static KernelFamily build(const Truncation& trunc) {
    KernelFamily family;
    const Eigen::Index n = trunc.size();
    const Eigen::Index o = trunc.origin_index();
    family.origin_ = o;
    family.columns_ = Eigen::MatrixXd::Zero(n, n);
    if (n == 1) return family;
    detail::LaplacianSolver solver(trunc);
    VertexFunction rhs = VertexFunction::Zero(n);
    for (Eigen::Index x = 0; x < n; ++x) {
      if (x == o) continue;
      rhs.setZero();
      rhs[x] = 1.0;
      rhs[o] -= 1.0;
      family.columns_.col(x) = solver.solve(rhs, "KernelFamily");
    }
    return family;
  }

  Eigen::Index size() const { return columns_.cols(); }
  Eigen::Index origin_index() const { return origin_; }
  VertexFunction member(Eigen::Index x) const { return columns_.col(x); }
  const Eigen::MatrixXd& members() const { return columns_; }

 private:
  Eigen::MatrixXd columns_;
  Eigen::Index origin_ = 0;
};

// Monopole family {w_x} on a Wired truncation; columns of the inverse
// Dirichlet Laplacian.
class MonopoleFamily {
 public:
  static MonopoleFamily build(const Truncation& trunc) {
    if (trunc.mode() != BoundaryMode::Wired)
      throw std::invalid_argument("MonopoleFamily: requires a Wired truncation");
    MonopoleFamily family;
    const Eigen::Index n = trunc.size();
    family.columns_.resize(n, n);
    detail::LaplacianSolver solver(trunc);
    for (Eigen::Index x = 0; x < n; ++x)
      family.columns_.col(x) = solver.solve(delta(trunc, x), "MonopoleFamily");
    return family;
  }

  Eigen::Index size() const { return columns_.cols(); }
  VertexFunction member(Eigen::Index x) const { return columns_.col(x); }
  const Eigen::MatrixXd& members() const { return columns_; }

 private:
  Eigen::MatrixXd columns_;
};

// |<v_x, u>_E - (u(x) - u(o))|: how far the kernel member is from actually
// reproducing point evaluations.
inline double reproducing_residual(const Truncation& trunc, const VertexFunction& v_x,
                                   Eigen::Index x, const VertexFunction& u) {
  double lhs = energy(trunc, v_x, u);
  double rhs = u[x] - u[trunc.origin_index()];
  return std::abs(lhs - rhs);
}

// Reconstruction c(x) v_x - sum_y c_xy v_y. Equals delta_x up to an additive
// constant whenever every neighbor of x is interior.
inline VertexFunction delta_from_kernel(const Truncation& trunc, Eigen::Index x,
                                        const KernelFamily& kernel) {
  if (x < 0 || x >= trunc.size()) throw std::invalid_argument("delta_from_kernel: x not interior");
  if (!trunc.deep_interior(x))
    throw std::invalid_argument("delta_from_kernel: vertex " + to_string(trunc.vertex_at(x)) +
                                " has a neighbor outside the interior");
  VertexFunction out = trunc.degree(x) * kernel.member(x);
  for (const auto& nb : trunc.neighbors(x)) out -= nb.weight * kernel.member(nb.j);
  return out;
}

struct ParsevalCheck {
  double lhs;
  double rhs;
};

// Frame identity: summing c_xy |<v_x - v_y, u>_E|^2 over edges recovers the
// energy of u. On Wired truncations the grounded stubs contribute
// c_xb |<w_x, u>_E|^2, so the monopole family is required there.
inline ParsevalCheck parseval_check(const Truncation& trunc, const KernelFamily& kernel,
                                    const VertexFunction& u,
                                    const MonopoleFamily* monopoles = nullptr) {
  if (u.size() != trunc.size()) throw std::invalid_argument("parseval_check: dimension mismatch");
  if (trunc.mode() == BoundaryMode::Wired && monopoles == nullptr)
    throw std::invalid_argument("parseval_check: Wired truncation needs the monopole family");
  double lhs = 0.0;
  for (Eigen::Index x = 0; x < trunc.size(); ++x) {
    for (const auto& nb : trunc.neighbors(x)) {
      if (nb.j <= x) continue;
      VertexFunction frame = kernel.member(x) - kernel.member(nb.j);
      double coeff = energy(trunc, frame, u);
      lhs += nb.weight * coeff * coeff;
    }
    double g = trunc.grounded_weight(x);
    if (g != 0.0) {
      double coeff = energy(trunc, monopoles->member(x), u);
      lhs += g * coeff * coeff;
    }
  }
  return {lhs, energy(trunc, u, u)};
}

}  // namespace energynet
