// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Every tolerance is pinned here, in code.

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "energynet/energynet.hpp"
#include "support/test_networks.hpp"

using namespace energynet;
using testnets::vid;

namespace {

int failures = 0;

void record(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str());
  if (!pass) ++failures;
}

void run(int id, const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
  try {
    auto [pass, detail] = fn();
    record(id, name, pass, detail);
  } catch (const std::exception& e) {
    record(id, name, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// The three benchmark truncations shared by criteria 3, 4 and 13.
std::vector<std::pair<std::string, Truncation>> benchmark_truncations() {
  std::vector<std::pair<std::string, Truncation>> out;
  out.emplace_back("unit path n=50", testnets::whole_free(testnets::unit_path(50)));
  out.emplace_back("zgeom c=2 r=10 wired",
                   truncate(make_geometric_integers(2.0, 11), vid(0), 10, BoundaryMode::Wired));
  out.emplace_back("random n=20 seed=42",
                   testnets::whole_free(testnets::random_connected_network(20, 42)));
  return out;
}

}  // namespace

int main() {
  run(1, "geometric harmonic energy equals 2(c-1)", [] {
    double worst = 0.0;
    for (double c : {2.0, 3.0}) {
      Network net = make_geometric_integers(c, 30);
      Truncation trunc = truncate(net, vid(0), 30, BoundaryMode::Free);
      double value = energy(trunc, geometric_harmonic(trunc, c));
      worst = std::max(worst, std::abs(value - 2.0 * (c - 1.0)));
    }
    return std::make_pair(worst <= 1e-6, "max |E(h) - 2(c-1)| = " + fmt(worst) + " <= 1e-6");
  });

  run(2, "monopole Laplacians are Kronecker deltas", [] {
    Truncation trunc = truncate(make_geometric_integers(2.0, 9), vid(0), 8, BoundaryMode::Wired);
    MonopoleFamily family = MonopoleFamily::build(trunc);
    double worst = 0.0;
    for (Eigen::Index x = 0; x < trunc.size(); ++x) {
      VertexFunction lap = laplacian_apply(trunc, family.member(x));
      for (Eigen::Index y = 0; y < trunc.size(); ++y)
        worst = std::max(worst, std::abs(lap[y] - (x == y ? 1.0 : 0.0)));
    }
    return std::make_pair(worst <= 1e-8, "max |Lap w_x(y) - d_xy| = " + fmt(worst) + " <= 1e-8");
  });

  run(3, "J*J equals the assembled Laplacian entrywise", [] {
    bool pass = true;
    std::string detail;
    for (const auto& [name, trunc] : benchmark_truncations()) {
      double deviation = jstarj_check(trunc);
      double bound = 1e-12 * spectral_norm(assemble_laplacian(trunc));
      pass &= deviation <= bound;
      detail += name + ": " + fmt(deviation) + " <= " + fmt(bound) + "; ";
    }
    return std::make_pair(pass, detail);
  });

  run(4, "Krein and ell2 spectra agree as multisets", [] {
    bool pass = true;
    std::string detail;
    for (const auto& [name, trunc] : benchmark_truncations()) {
      SpectrumComparison cmp = spectrum_compare(trunc);
      bool ok = cmp.krein.size() == cmp.ell2_nonzero.size() &&
                cmp.max_abs_deviation <= 1e-8 * cmp.scale;
      pass &= ok;
      detail += name + ": " + fmt(cmp.max_abs_deviation) + " <= " + fmt(1e-8 * cmp.scale) + "; ";
    }
    return std::make_pair(pass, detail);
  });

  run(5, "spectral measures of the Krein operator match ell2", [] {
    Truncation trunc = truncate(make_geometric_integers(2.0, 9), vid(0), 8, BoundaryMode::Wired);
    double worst = 0.0;
    for (std::int64_t n : {1, 0, 3}) {
      MeasurePair pair = krein_spectral_measures(trunc, delta(trunc, trunc.require_index(vid(n))));
      worst = std::max({worst, pair.max_lambda_deviation, pair.max_weight_deviation});
    }
    return std::make_pair(worst <= 1e-8, "max atom deviation = " + fmt(worst) + " <= 1e-8");
  });

  run(6, "Friedrichs first moment recovers the ell2 norm", [] {
    Truncation trunc = truncate(make_geometric_integers(2.0, 9), vid(0), 8, BoundaryMode::Wired);
    MonopoleFamily monopoles = MonopoleFamily::build(trunc);
    Rng rng(42);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      VertexFunction xi = rng.vector(trunc.size());
      VertexFunction phi = friedrichs_map(trunc, monopoles, xi);
      double moment = energy(trunc, phi, laplacian_apply(trunc, phi));
      worst = std::max(worst,
                       std::abs(moment - xi.squaredNorm()) / std::max(1.0, xi.squaredNorm()));
    }
    return std::make_pair(worst <= 1e-8,
                          "max relative moment error = " + fmt(worst) + " <= 1e-8");
  });

  run(7, "Parseval frame identity", [] {
    Rng rng(42);
    double worst = 0.0;
    for (double c : {1.0, 2.0}) {
      Truncation trunc =
          truncate(make_geometric_integers(c, 9), vid(0), 8, BoundaryMode::Free);
      KernelFamily kernel = KernelFamily::build(trunc);
      for (int trial = 0; trial < 100; ++trial) {
        VertexFunction u = rng.vector(trunc.size());
        ParsevalCheck check = parseval_check(trunc, kernel, u);
        worst = std::max(worst, std::abs(check.lhs - check.rhs) / std::max(check.rhs, 1e-300));
      }
    }
    return std::make_pair(worst <= 1e-9, "max relative defect = " + fmt(worst) + " <= 1e-9");
  });

  run(8, "reproducing property of the energy kernel", [] {
    Rng rng(42);
    double worst = 0.0;
    for (double c : {1.0, 2.0}) {
      Truncation trunc =
          truncate(make_geometric_integers(c, 9), vid(0), 8, BoundaryMode::Free);
      KernelFamily kernel = KernelFamily::build(trunc);
      std::vector<Eigen::Index> poles = {trunc.require_index(vid(1)),
                                         trunc.require_index(vid(-4)),
                                         trunc.require_index(vid(7))};
      for (int trial = 0; trial < 100; ++trial) {
        VertexFunction u = rng.vector(trunc.size());
        for (Eigen::Index x : poles)
          worst = std::max(worst, reproducing_residual(trunc, kernel.member(x), x, u));
      }
    }
    return std::make_pair(worst <= 1e-8, "max residual = " + fmt(worst) + " <= 1e-8");
  });

  run(9, "point masses reconstructed from the kernel", [] {
    Truncation trunc = truncate(make_geometric_integers(2.0, 9), vid(0), 8, BoundaryMode::Free);
    KernelFamily kernel = KernelFamily::build(trunc);
    double worst = 0.0;
    for (std::int64_t n : {-7, -5, -3, -1, 0, 1, 2, 4, 5, 7}) {
      Eigen::Index x = trunc.require_index(vid(n));
      VertexFunction rebuilt = anchored(trunc, delta_from_kernel(trunc, x, kernel));
      VertexFunction expected = anchored(trunc, delta(trunc, x));
      worst = std::max(worst, (rebuilt - expected).lpNorm<Eigen::Infinity>());
    }
    return std::make_pair(worst <= 1e-9, "max sup deviation = " + fmt(worst) + " <= 1e-9");
  });

  run(10, "defect dichotomy on the geometric integers", [] {
    DefectVector transient = defect_vector_Z(2.0, 200);
    DefectVector recurrent = defect_vector_Z(1.0, 200);

    Truncation trunc =
        truncate(make_geometric_integers(2.0, 200), vid(0), 199, BoundaryMode::Free);
    VertexFunction f = restrict_to(trunc, transient);
    VertexFunction lap = laplacian_apply(trunc, f);
    double max_f = f.lpNorm<Eigen::Infinity>();
    double worst_rel = 0.0;
    for (Eigen::Index i = 0; i < trunc.size(); ++i) {
      if (!trunc.deep_interior(i)) continue;
      double scale = trunc.degree(i) * max_f + std::abs(f[i]);
      worst_rel = std::max(worst_rel, std::abs(lap[i] + f[i]) / scale);
    }
    double tail = transient.tail_after(40);
    double blowup = recurrent.partial_energies.back() / transient.partial_energies.back();
    bool pass = worst_rel <= 1e-10 && tail < 1e-6 && blowup > 10.0;
    return std::make_pair(pass, "defect residual " + fmt(worst_rel) +
                                    " <= 1e-10, tail(40) = " + fmt(tail) +
                                    " < 1e-6, c=1 blowup x" + fmt(blowup) + " > 10");
  });

  run(11, "unit path spectrum lies in [0, 4]", [] {
    Truncation trunc = testnets::whole_free(make_geometric_integers(1.0, 200));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(assemble_laplacian(trunc).dense(),
                                                       Eigen::EigenvaluesOnly);
    double lo = eig.eigenvalues().minCoeff();
    double hi = eig.eigenvalues().maxCoeff();
    bool pass = lo >= -1e-9 && hi <= 4.0 + 1e-9 && hi >= 3.99;
    return std::make_pair(pass, "spectrum in [" + fmt(lo) + ", " + fmt(hi) + "]");
  });

  run(12, "Green operator turns defect vectors into harmonic functions", [] {
    Truncation trunc = truncate(make_geometric_integers(2.0, 41), vid(0), 40, BoundaryMode::Wired);
    double deep_degree = 0.0;
    double full_degree = 0.0;
    for (Eigen::Index i = 0; i < trunc.size(); ++i) {
      full_degree = std::max(full_degree, trunc.degree(i));
      if (trunc.deep_interior(i)) deep_degree = std::max(deep_degree, trunc.degree(i));
    }

    DefectVector defect = defect_vector_Z(2.0, 45);
    VertexFunction f = restrict_to(trunc, defect);
    GreenDefectReport report = green_defect_check(trunc, f);
    double harmonic_scale = deep_degree * f.lpNorm<Eigen::Infinity>();
    bool harmonic_ok = report.harmonic_residual_deep <= 1e-8 * harmonic_scale;

    Rng rng(42);
    double worst_identity = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      VertexFunction g = rng.vector(trunc.size());
      GreenDefectReport r = green_defect_check(trunc, g);
      worst_identity = std::max(
          worst_identity, r.identity_residual / (full_degree * g.lpNorm<Eigen::Infinity>()));
    }
    bool identity_ok = worst_identity <= 1e-10;
    return std::make_pair(harmonic_ok && identity_ok,
                          "max |Lap(f+Gf)| = " + fmt(report.harmonic_residual_deep) +
                              " <= " + fmt(1e-8 * harmonic_scale) + ", identity rel " +
                              fmt(worst_identity) + " <= 1e-10");
  });

  run(13, "norm equivalence |L| = |J|^2 = |JJ*|", [] {
    bool pass = true;
    std::string detail;
    for (const auto& [name, trunc] : benchmark_truncations()) {
      NormTriple norms = norm_equivalence_check(trunc);
      double spread = std::max(std::abs(norms.j_norm_sq - norms.lap_norm),
                               std::abs(norms.krein_norm - norms.lap_norm));
      bool ok = spread <= 1e-8 * norms.lap_norm;
      pass &= ok;
      detail += name + ": spread " + fmt(spread / norms.lap_norm) + "; ";
    }
    return std::make_pair(pass, detail + "<= 1e-8 relative");
  });

  if (failures == 0)
    std::printf("all 13 criteria passed\n");
  else
    std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
