#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <cmath>
#include <vector>

#include "energynet/errors.hpp"
#include "energynet/operators.hpp"
#include "energynet/truncation.hpp"

namespace energynet {

// Green operator G f = (id - P)^(-1) (1/c) f, with P the transition operator
// and 1/c the diagonal scaling by reciprocal vertex conductance. Only the
// grounded chain makes id - P invertible: in Free mode P is stochastic and
// constants are in its fixed space.
inline VertexFunction green_apply(const Truncation& trunc, const VertexFunction& f) {
  if (f.size() != trunc.size()) throw std::invalid_argument("green_apply: dimension mismatch");
  if (trunc.mode() != BoundaryMode::Wired)
    throw NumericalError("green_apply: (id - P) is singular without grounding; use a Wired truncation");

  Eigen::SparseMatrix<double> system = -assemble_transition(trunc);
  for (Eigen::Index i = 0; i < trunc.size(); ++i) system.coeffRef(i, i) += 1.0;
  system.makeCompressed();

  VertexFunction rhs(trunc.size());
  for (Eigen::Index i = 0; i < trunc.size(); ++i) rhs[i] = f[i] / trunc.degree(i);

  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
  solver.compute(system);
  if (solver.info() != Eigen::Success)
    throw NumericalError("green_apply: factorization of (id - P) failed");
  VertexFunction g = solver.solve(rhs);
  if (solver.info() != Eigen::Success) throw NumericalError("green_apply: solve failed");
  return g;
}

struct GreenDefectReport {
  double defect_residual_deep = 0.0;    // max |(Lap + id) f| over the deep interior
  double harmonic_residual_deep = 0.0;  // max |Lap (f + G f)| over the deep interior
  double identity_residual = 0.0;       // max |Lap(f + Gf) - (Lap f + f)| over all interior
  std::vector<double> power_deviation;  // |P^n f - (f + G f)|_2 for n = 0, 1, ...
};

// The correspondence between defect vectors and harmonic functions: if
// Lap f = -f then h = f + G f is harmonic. The first line of that argument,
// Lap(f + G f) = Lap f + f, is an identity for every f and is reported
// separately. The power iterates P^n f are also reported: on a wired
// truncation the grounded boundary absorbs the walk, so P^n f drains to 0
// and the deviation from f + G f climbs toward |f + G f| instead of
// vanishing as it would along an exhaustion of the full network.
inline GreenDefectReport green_defect_check(const Truncation& trunc, const VertexFunction& f,
                                            int power_steps = 0) {
  if (f.size() != trunc.size())
    throw std::invalid_argument("green_defect_check: dimension mismatch");
  if (f.lpNorm<Eigen::Infinity>() == 0.0)
    throw std::invalid_argument("green_defect_check: f must be nonzero");

  GreenDefectReport report;
  VertexFunction g = green_apply(trunc, f);
  VertexFunction h = f + g;
  VertexFunction lap_f = laplacian_apply(trunc, f);
  VertexFunction lap_h = laplacian_apply(trunc, h);

  for (Eigen::Index x = 0; x < trunc.size(); ++x) {
    report.identity_residual =
        std::max(report.identity_residual, std::abs(lap_h[x] - (lap_f[x] + f[x])));
    if (!trunc.deep_interior(x)) continue;
    report.defect_residual_deep = std::max(report.defect_residual_deep, std::abs(lap_f[x] + f[x]));
    report.harmonic_residual_deep = std::max(report.harmonic_residual_deep, std::abs(lap_h[x]));
  }

  if (power_steps > 0) {
    Eigen::SparseMatrix<double> p = assemble_transition(trunc);
    VertexFunction iterate = f;
    report.power_deviation.push_back((iterate - h).norm());
    for (int n = 0; n < power_steps; ++n) {
      iterate = p * iterate;
      report.power_deviation.push_back((iterate - h).norm());
    }
  }
  return report;
}

}  // namespace energynet
