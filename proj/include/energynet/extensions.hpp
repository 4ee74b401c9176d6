#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "energynet/errors.hpp"
#include "energynet/kernels.hpp"
#include "energynet/operators.hpp"
#include "energynet/truncation.hpp"

namespace energynet {

// The inclusion of ell^2 coordinates into the energy space is the identity
// on values; all of the content lives in the change of inner product.
inline VertexFunction apply_J(const Truncation& trunc, const VertexFunction& xi) {
  if (xi.size() != trunc.size()) throw std::invalid_argument("apply_J: dimension mismatch");
  return xi;
}

// Its adjoint sends an energy-space element to the ell^2 vector of inner
// products against point masses, which is just the Laplacian pointwise.
inline VertexFunction apply_Jstar(const Truncation& trunc, const VertexFunction& u) {
  return laplacian_apply(trunc, u);
}

// Gram matrix <J delta_x, J delta_y>_E computed through the energy form.
// This is the "other route" to the Laplacian matrix: the two must agree
// entrywise up to rounding, which is exactly what jstarj_check measures.
inline Eigen::MatrixXd jstarj_gram(const Truncation& trunc) {
  const Eigen::Index n = trunc.size();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index x = 0; x < n; ++x) {
    VertexFunction dx = delta(trunc, x);
    for (Eigen::Index y = x; y < n; ++y) {
      double value = energy(trunc, dx, delta(trunc, y));
      gram(x, y) = value;
      gram(y, x) = value;
    }
  }
  return gram;
}

// Max entrywise deviation between the form-assembled Gram of point masses
// and the adjacency-assembled Laplacian.
inline double jstarj_check(const Truncation& trunc) {
  Eigen::MatrixXd gram = jstarj_gram(trunc);
  Eigen::MatrixXd lap = assemble_laplacian(trunc).dense();
  return (gram - lap).cwiseAbs().maxCoeff();
}

// Q(x,y) = <J delta_x, J delta_y>_E assembled through the reproducing
// identity <delta_x, u>_E = Lap u(x), i.e. by applying the Laplacian to each
// point mass. Shares its arithmetic with assemble_laplacian, so the two are
// equal entry for entry.
inline SymmetricOperator q_kernel(const Truncation& trunc) {
  const Eigen::Index n = trunc.size();
  std::vector<Eigen::Triplet<double>> triplets;
  for (Eigen::Index y = 0; y < n; ++y) {
    VertexFunction column = laplacian_apply(trunc, delta(trunc, y));
    triplets.emplace_back(y, y, column[y]);
    for (const auto& nb : trunc.neighbors(y)) triplets.emplace_back(nb.j, y, column[nb.j]);
  }
  SymmetricOperator q;
  q.matrix.resize(n, n);
  q.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return q;
}

// RKHS norm of xi under the kernel Q: |xi|^2 = sum xi(x) xi(y) Q(x,y).
inline double rkhs_norm(const Truncation& trunc, const VertexFunction& xi) {
  if (xi.size() != trunc.size()) throw std::invalid_argument("rkhs_norm: dimension mismatch");
  SymmetricOperator q = q_kernel(trunc);
  double value = xi.dot(q.matrix * xi);
  double scale = 0.0;
  for (Eigen::Index i = 0; i < trunc.size(); ++i) scale = std::max(scale, 2.0 * trunc.degree(i));
  double floor = -1e-10 * std::max(scale * xi.squaredNorm(), 1e-300);
  if (value < floor)
    throw NumericalError("rkhs_norm: negative form value " + std::to_string(value) +
                         " signals an assembly bug");
  return std::sqrt(std::max(value, 0.0));
}

// The operator J J* represented over the energy-kernel basis {v_x : x != o}
// of a Free truncation: column x holds the v-basis coefficients of
// delta_x - delta_o, and gram is the energy Gram of the basis.
struct KreinOperator {
  std::vector<Eigen::Index> basis;  // interior indices, origin omitted
  Eigen::MatrixXd op;
  Eigen::MatrixXd gram;
  double gram_condition = 0.0;
};

inline KreinOperator krein_matrix(const Truncation& trunc, const KernelFamily& kernel,
                                  double max_condition = 1e12) {
  if (trunc.mode() != BoundaryMode::Free)
    throw std::invalid_argument(
        "krein_matrix: the energy kernel spans the energy space only on Free truncations; "
        "use krein_spectrum / krein_spectral_measures for Wired ones");
  const Eigen::Index n = trunc.size();
  const Eigen::Index o = trunc.origin_index();
  KreinOperator out;
  out.basis.reserve(static_cast<std::size_t>(n > 0 ? n - 1 : 0));
  for (Eigen::Index i = 0; i < n; ++i)
    if (i != o) out.basis.push_back(i);
  const auto m = static_cast<Eigen::Index>(out.basis.size());

  Eigen::MatrixXd lap = assemble_laplacian(trunc).dense();
  out.op.resize(m, m);
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index s = 0; s < m; ++s)
      out.op(r, s) = lap(out.basis[r], out.basis[s]) - lap(out.basis[r], o);

  out.gram.resize(m, m);
  for (Eigen::Index r = 0; r < m; ++r) {
    VertexFunction vr = kernel.member(out.basis[r]);
    for (Eigen::Index s = r; s < m; ++s) {
      double value = energy(trunc, vr, kernel.member(out.basis[s]));
      out.gram(r, s) = value;
      out.gram(s, r) = value;
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram_eigen(out.gram, Eigen::EigenvaluesOnly);
  if (gram_eigen.info() != Eigen::Success)
    throw NumericalError("krein_matrix: Gram eigensolve failed");
  double gmin = gram_eigen.eigenvalues().minCoeff();
  double gmax = gram_eigen.eigenvalues().maxCoeff();
  out.gram_condition = gmax / std::max(gmin, 1e-300);
  if (!(gmin > 0.0) || out.gram_condition > max_condition)
    throw NumericalError("krein_matrix: kernel Gram condition " +
                         std::to_string(out.gram_condition) + " exceeds limit");
  return out;
}

// Pointwise action of J J* on an energy-space element; on the kernel this
// sends v_x to delta_x - delta_o (as a class, so compare after anchoring).
inline VertexFunction krein_apply(const Truncation& trunc, const VertexFunction& u) {
  return apply_J(trunc, apply_Jstar(trunc, u));
}

namespace detail {

inline Eigen::VectorXd symmetric_pencil_eigenvalues(const Eigen::MatrixXd& op,
                                                    const Eigen::MatrixXd& gram,
                                                    const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success)
    throw NumericalError(std::string(what) + ": Gram Cholesky failed");
  Eigen::MatrixXd a = llt.matrixL();
  Eigen::MatrixXd tmp = a.triangularView<Eigen::Lower>().solve(op.transpose());
  Eigen::MatrixXd b = a.transpose() * tmp.transpose();
  b = 0.5 * (b + b.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalError(std::string(what) + ": eigensolver failed");
  return solver.eigenvalues();
}

}  // namespace detail

// Spectrum of J J* in the geometry of the energy inner product. Wired
// truncations use coordinates directly (the Gram of point masses is the
// Dirichlet Laplacian itself); Free ones go through the energy kernel basis.
inline std::vector<double> krein_spectrum(const Truncation& trunc) {
  Eigen::VectorXd values;
  if (trunc.mode() == BoundaryMode::Wired) {
    Eigen::MatrixXd lap = assemble_laplacian(trunc).dense();
    values = detail::symmetric_pencil_eigenvalues(lap, lap, "krein_spectrum");
  } else {
    KernelFamily kernel = KernelFamily::build(trunc);
    KreinOperator krein = krein_matrix(trunc, kernel);
    values = detail::symmetric_pencil_eigenvalues(krein.op, krein.gram, "krein_spectrum");
  }
  std::vector<double> out(values.data(), values.data() + values.size());
  std::sort(out.begin(), out.end());
  return out;
}

struct SpectrumComparison {
  std::vector<double> krein;
  std::vector<double> ell2_nonzero;
  std::vector<double> ell2_dropped;  // null modes on the ell^2 side (constants, Free mode)
  double max_abs_deviation = 0.0;
  double scale = 0.0;  // largest eigenvalue in play; deviations are read against it
};

// Nonzero spectra of J*J (the ell^2 Laplacian) and J J* (its energy-space
// counterpart) must coincide as multisets.
inline SpectrumComparison spectrum_compare(const Truncation& trunc, double null_tol = 1e-12) {
  SpectrumComparison cmp;
  cmp.krein = krein_spectrum(trunc);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(assemble_laplacian(trunc).dense(),
                                                        Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalError("spectrum_compare: eigensolver failed");
  double lambda_max = std::max(std::abs(solver.eigenvalues().minCoeff()),
                               std::abs(solver.eigenvalues().maxCoeff()));
  cmp.scale = lambda_max;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    double lambda = solver.eigenvalues()[i];
    if (std::abs(lambda) <= null_tol * std::max(lambda_max, 1.0))
      cmp.ell2_dropped.push_back(lambda);
    else
      cmp.ell2_nonzero.push_back(lambda);
  }
  std::sort(cmp.ell2_nonzero.begin(), cmp.ell2_nonzero.end());

  if (cmp.krein.size() != cmp.ell2_nonzero.size()) {
    cmp.max_abs_deviation = std::numeric_limits<double>::infinity();
    return cmp;
  }
  for (std::size_t i = 0; i < cmp.krein.size(); ++i)
    cmp.max_abs_deviation =
        std::max(cmp.max_abs_deviation, std::abs(cmp.krein[i] - cmp.ell2_nonzero[i]));
  return cmp;
}

// Friedrichs map: point masses go to monopoles instead of staying put.
inline VertexFunction friedrichs_map(const Truncation& trunc, const MonopoleFamily& monopoles,
                                     const VertexFunction& xi) {
  if (xi.size() != trunc.size() || monopoles.size() != trunc.size())
    throw std::invalid_argument("friedrichs_map: dimension mismatch");
  return monopoles.members() * xi;
}

// Spectral measure of the (wired) energy Laplacian at Phi(xi), in the energy
// geometry. Together with the plain ell^2 measure of xi this realizes the
// Radon-Nikodym comparison of the Friedrichs picture: lambda d mu_F = d mu_2.
inline SpectralMeasure friedrichs_measure(const Truncation& trunc,
                                          const MonopoleFamily& monopoles,
                                          const VertexFunction& xi) {
  if (trunc.mode() != BoundaryMode::Wired)
    throw std::invalid_argument("friedrichs_measure: requires a Wired truncation");
  Eigen::MatrixXd lap = assemble_laplacian(trunc).dense();
  return spectral_measure_gram(lap, lap, friedrichs_map(trunc, monopoles, xi));
}

struct MeasurePair {
  SpectralMeasure krein;
  SpectralMeasure ell2;
  double dropped_mass = 0.0;  // |xi|^2 carried by null modes excluded from U
  double max_lambda_deviation = 0.0;
  double max_weight_deviation = 0.0;
};

// Builds the isometry U from the polar decomposition J = U (J*J)^(1/2) and
// returns the spectral measures of J J* at U xi and of the ell^2 Laplacian
// at xi. Eigenvalues below null_tol (relative) are excluded from U's domain;
// on Free truncations that is exactly the constants' null mode.
inline MeasurePair krein_spectral_measures(const Truncation& trunc, const VertexFunction& xi,
                                           double null_tol = 1e-12) {
  if (xi.size() != trunc.size())
    throw std::invalid_argument("krein_spectral_measures: dimension mismatch");
  Eigen::MatrixXd lap = assemble_laplacian(trunc).dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
  if (solver.info() != Eigen::Success)
    throw NumericalError("krein_spectral_measures: eigensolver failed");
  const Eigen::VectorXd& lambda = solver.eigenvalues();
  double lambda_max = std::max(std::abs(lambda.minCoeff()), std::abs(lambda.maxCoeff()));
  double cutoff = null_tol * std::max(lambda_max, 1.0);

  MeasurePair pair;
  VertexFunction u_xi = VertexFunction::Zero(trunc.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    double a = solver.eigenvectors().col(i).dot(xi);
    if (lambda[i] <= cutoff) {
      pair.dropped_mass += a * a;
      continue;
    }
    pair.ell2.atoms.push_back({lambda[i], a * a});
    u_xi += (a / std::sqrt(lambda[i])) * solver.eigenvectors().col(i);
  }

  if (trunc.mode() == BoundaryMode::Wired) {
    pair.krein = spectral_measure_gram(lap, lap, u_xi);
  } else {
    KernelFamily kernel = KernelFamily::build(trunc);
    KreinOperator krein = krein_matrix(trunc, kernel);
    // v-basis coefficients of u_xi: a_z = (Lap u_xi)(z) for z != o.
    VertexFunction lap_u = laplacian_apply(trunc, u_xi);
    Eigen::VectorXd coeffs(static_cast<Eigen::Index>(krein.basis.size()));
    for (std::size_t r = 0; r < krein.basis.size(); ++r)
      coeffs[static_cast<Eigen::Index>(r)] = lap_u[krein.basis[r]];
    pair.krein = spectral_measure_gram(krein.op, krein.gram, coeffs);
  }

  double atom_tol = 1e-9 * std::max(lambda_max, 1.0);
  SpectralMeasure kr = pair.krein.coalesced(atom_tol);
  SpectralMeasure l2 = pair.ell2.coalesced(atom_tol);
  // The Krein side may carry rounding-level mass at eigenvalues the ell^2
  // side dropped; ignore atoms with negligible weight on either side.
  double mass_floor = 1e-12 * std::max(xi.squaredNorm(), 1e-300);
  auto strip = [&](SpectralMeasure& mu) {
    std::erase_if(mu.atoms, [&](const SpectralMeasure::Atom& a) { return a.weight < mass_floor; });
  };
  strip(kr);
  strip(l2);
  if (kr.atoms.size() != l2.atoms.size()) {
    pair.max_lambda_deviation = std::numeric_limits<double>::infinity();
    pair.max_weight_deviation = std::numeric_limits<double>::infinity();
    return pair;
  }
  for (std::size_t i = 0; i < kr.atoms.size(); ++i) {
    pair.max_lambda_deviation =
        std::max(pair.max_lambda_deviation, std::abs(kr.atoms[i].lambda - l2.atoms[i].lambda));
    pair.max_weight_deviation =
        std::max(pair.max_weight_deviation, std::abs(kr.atoms[i].weight - l2.atoms[i].weight));
  }
  return pair;
}

struct NormTriple {
  double lap_norm = 0.0;    // |Lap| on ell^2, from the assembled matrix
  double j_norm_sq = 0.0;   // |J|^2, largest eigenvalue of the form Gram
  double krein_norm = 0.0;  // |J J*| in the energy geometry
};

// The three operator norms that the unbounded-containment picture ties
// together; they must agree on every truncation.
inline NormTriple norm_equivalence_check(const Truncation& trunc) {
  NormTriple out;
  out.lap_norm = spectral_norm(assemble_laplacian(trunc));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram_solver(jstarj_gram(trunc),
                                                             Eigen::EigenvaluesOnly);
  if (gram_solver.info() != Eigen::Success)
    throw NumericalError("norm_equivalence_check: Gram eigensolve failed");
  out.j_norm_sq = gram_solver.eigenvalues().maxCoeff();

  std::vector<double> krein = krein_spectrum(trunc);
  out.krein_norm = krein.empty() ? 0.0 : *std::max_element(krein.begin(), krein.end());
  return out;
}

}  // namespace energynet
