#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "energynet/errors.hpp"
#include "energynet/truncation.hpp"

namespace energynet {

// Sparse symmetric real matrix over a truncation's interior index.
struct SymmetricOperator {
  Eigen::SparseMatrix<double> matrix;

  Eigen::Index dim() const { return matrix.rows(); }

  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix); }

  VertexFunction apply(const VertexFunction& u) const {
    if (u.size() != matrix.cols())
      throw std::invalid_argument("SymmetricOperator::apply: dimension mismatch");
    return matrix * u;
  }
};

// (Lap u)(x) = sum_y c_xy (u(x) - u(y)) over the truncation's edges. In
// Wired mode, neighbors beyond the interior read as 0, which adds
// grounded_weight(x) * u(x).
inline VertexFunction laplacian_apply(const Truncation& trunc, const VertexFunction& u) {
  if (u.size() != trunc.size())
    throw std::invalid_argument("laplacian_apply: function not defined on interior");
  VertexFunction out(trunc.size());
  for (Eigen::Index x = 0; x < trunc.size(); ++x) {
    double acc = 0.0;
    for (const auto& nb : trunc.neighbors(x)) acc += nb.weight * (u[x] - u[nb.j]);
    acc += trunc.grounded_weight(x) * u[x];
    out[x] = acc;
  }
  return out;
}

// Matrix form of the same operator: diagonal c(x) (including grounded edges
// in Wired mode), off-diagonal -c_xy. Applying it to a point mass matches
// laplacian_apply exactly because both walk the same adjacency lists.
inline SymmetricOperator assemble_laplacian(const Truncation& trunc) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(trunc.size()) * 4);
  for (Eigen::Index x = 0; x < trunc.size(); ++x) {
    double diag = 0.0;
    for (const auto& nb : trunc.neighbors(x)) {
      diag += nb.weight;
      triplets.emplace_back(x, nb.j, -nb.weight);
    }
    diag += trunc.grounded_weight(x);
    triplets.emplace_back(x, x, diag);
  }
  SymmetricOperator op;
  op.matrix.resize(trunc.size(), trunc.size());
  op.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return op;
}

// Dirichlet energy form E(u, v) = 1/2 sum c_xy (u(x)-u(y))(v(x)-v(y)).
// Wired mode treats exterior values as 0, so each grounded edge contributes
// c_xb u(x) v(x); the result equals <u, L_wired v> in exact arithmetic.
inline double energy(const Truncation& trunc, const VertexFunction& u,
                     const VertexFunction& v) {
  if (u.size() != trunc.size() || v.size() != trunc.size())
    throw std::invalid_argument("energy: function not defined on interior");
  double acc = 0.0;
  for (Eigen::Index x = 0; x < trunc.size(); ++x) {
    for (const auto& nb : trunc.neighbors(x)) {
      if (nb.j <= x) continue;  // each interior edge once
      acc += nb.weight * (u[x] - u[nb.j]) * (v[x] - v[nb.j]);
    }
    double g = trunc.grounded_weight(x);
    if (g != 0.0) acc += g * u[x] * v[x];
  }
  return acc;
}

inline double energy(const Truncation& trunc, const VertexFunction& u) {
  return energy(trunc, u, u);
}

inline double ell2_inner(const VertexFunction& u, const VertexFunction& v) {
  if (u.size() != v.size()) throw std::invalid_argument("ell2_inner: dimension mismatch");
  return u.dot(v);
}

// Random-walk transition matrix p(x,y) = c_xy / c(x). Rows are stochastic in
// Free mode and substochastic in Wired mode (mass leaks to the grounded
// boundary).
inline Eigen::SparseMatrix<double> assemble_transition(const Truncation& trunc) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (Eigen::Index x = 0; x < trunc.size(); ++x) {
    double c = trunc.degree(x);
    if (c <= 0.0)
      throw NumericalError("assemble_transition: isolated vertex " +
                           to_string(trunc.vertex_at(x)));
    for (const auto& nb : trunc.neighbors(x)) triplets.emplace_back(x, nb.j, nb.weight / c);
  }
  Eigen::SparseMatrix<double> p(trunc.size(), trunc.size());
  p.setFromTriplets(triplets.begin(), triplets.end());
  return p;
}

// Finite atomic spectral measure: weight |<e_i, xi>|^2 at each eigenvalue of
// a self-adjoint operator, for an orthonormal eigenbasis of the relevant
// inner product. Atoms are kept sorted by eigenvalue.
struct SpectralMeasure {
  struct Atom {
    double lambda;
    double weight;
  };
  std::vector<Atom> atoms;

  double total_mass() const {
    double m = 0.0;
    for (const auto& a : atoms) m += a.weight;
    return m;
  }

  double moment(int k) const {
    double m = 0.0;
    for (const auto& a : atoms) m += std::pow(a.lambda, k) * a.weight;
    return m;
  }

  // Merges atoms whose eigenvalues lie within lambda_tol of each other;
  // weights inside a (numerically) degenerate eigenspace are basis-dependent,
  // the merged mass is not.
  SpectralMeasure coalesced(double lambda_tol) const {
    SpectralMeasure out;
    for (const auto& a : atoms) {
      if (!out.atoms.empty() && a.lambda - out.atoms.back().lambda <= lambda_tol) {
        double w = out.atoms.back().weight;
        double l = out.atoms.back().lambda;
        out.atoms.back().lambda = (l * w + a.lambda * a.weight) / std::max(w + a.weight, 1e-300);
        out.atoms.back().weight = w + a.weight;
      } else {
        out.atoms.push_back(a);
      }
    }
    return out;
  }
};

inline SpectralMeasure spectral_measure(const SymmetricOperator& op, const VertexFunction& xi) {
  if (xi.size() != op.dim()) throw std::invalid_argument("spectral_measure: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.dense());
  if (solver.info() != Eigen::Success)
    throw NumericalError("spectral_measure: eigensolver failed");
  SpectralMeasure mu;
  mu.atoms.reserve(static_cast<std::size_t>(op.dim()));
  for (Eigen::Index i = 0; i < op.dim(); ++i) {
    double a = solver.eigenvectors().col(i).dot(xi);
    mu.atoms.push_back({solver.eigenvalues()[i], a * a});
  }
  return mu;
}

// Spectral measure of an operator that is self-adjoint with respect to a
// Gram inner product <a, b> = a' G b. `op` and `coeffs` are expressed in the
// basis whose Gram matrix is `gram`. Reduction is by Cholesky: with
// G = A A', the map a -> A' a is an isometry onto standard coordinates and
// the transported operator A' op A^-T is symmetric.
inline SpectralMeasure spectral_measure_gram(const Eigen::MatrixXd& op,
                                             const Eigen::MatrixXd& gram,
                                             const Eigen::VectorXd& coeffs,
                                             double max_condition = 1e12) {
  const Eigen::Index n = gram.rows();
  if (op.rows() != n || op.cols() != n || coeffs.size() != n)
    throw std::invalid_argument("spectral_measure_gram: dimension mismatch");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram_eigen(gram, Eigen::EigenvaluesOnly);
  if (gram_eigen.info() != Eigen::Success)
    throw NumericalError("spectral_measure_gram: Gram eigensolve failed");
  double gmin = gram_eigen.eigenvalues().minCoeff();
  double gmax = gram_eigen.eigenvalues().maxCoeff();
  if (!(gmin > 0.0) || gmax / gmin > max_condition)
    throw NumericalError("spectral_measure_gram: Gram matrix condition " +
                         std::to_string(gmax / std::max(gmin, 1e-300)) + " exceeds limit");

  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success)
    throw NumericalError("spectral_measure_gram: Gram Cholesky failed");
  Eigen::MatrixXd a = llt.matrixL();

  // b = A' op A^-T, symmetrized against assembly noise.
  Eigen::MatrixXd tmp = a.triangularView<Eigen::Lower>().solve(op.transpose());
  Eigen::MatrixXd b = a.transpose() * tmp.transpose();
  b = 0.5 * (b + b.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b);
  if (solver.info() != Eigen::Success)
    throw NumericalError("spectral_measure_gram: eigensolver failed");

  Eigen::VectorXd y = a.transpose() * coeffs;
  SpectralMeasure mu;
  mu.atoms.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    double w = solver.eigenvectors().col(i).dot(y);
    mu.atoms.push_back({solver.eigenvalues()[i], w * w});
  }
  return mu;
}

inline double spectral_norm(const SymmetricOperator& op) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.dense(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("spectral_norm: eigensolver failed");
  return std::max(std::abs(solver.eigenvalues().minCoeff()),
                  std::abs(solver.eigenvalues().maxCoeff()));
}

}  // namespace energynet
