#include <catch2/catch.hpp>

#include <cmath>

#include "energynet/energynet.hpp"
#include "support/test_networks.hpp"

using namespace energynet;
using testnets::vid;

TEST_CASE("closed-form harmonic values on the geometric integers") {
  Truncation trunc = testnets::whole_free(make_geometric_integers(2.0, 4));
  VertexFunction h = geometric_harmonic(trunc, 2.0);
  CHECK(h[trunc.require_index(vid(0))] == 0.0);
  CHECK(h[trunc.require_index(vid(1))] == 0.5);
  CHECK(h[trunc.require_index(vid(2))] == 0.75);
  CHECK(h[trunc.require_index(vid(-1))] == -0.5);
  CHECK_THROWS_AS(geometric_harmonic(trunc, 1.0), std::invalid_argument);
}

TEST_CASE("harmonicity of the closed forms in the deep interior") {
  for (double c : {1.5, 2.0, 3.0}) {
    Truncation trunc = truncate(make_geometric_integers(c, 14), vid(0), 12, BoundaryMode::Free);
    VertexFunction h = geometric_harmonic(trunc, c);
    VertexFunction lap = laplacian_apply(trunc, h);
    double max_h = h.lpNorm<Eigen::Infinity>();
    for (Eigen::Index i = 0; i < trunc.size(); ++i) {
      if (!trunc.deep_interior(i)) continue;
      CHECK(std::abs(lap[i]) <= 1e-12 * trunc.degree(i) * max_h);
    }
  }
}

TEST_CASE("partial energies of the harmonic function follow the geometric series") {
  // On the radius-k ball the energy is exactly 2(c-1)(1 - c^-k), so the tail
  // against the limit 2(c-1) is 2(c-1) c^-k.
  for (double c : {2.0, 3.0}) {
    for (int radius : {5, 10, 20}) {
      Network net = make_geometric_integers(c, radius);
      Truncation trunc = testnets::whole_free(net);
      double value = energy(trunc, geometric_harmonic(trunc, c));
      double expected = 2.0 * (c - 1.0) * (1.0 - std::pow(c, -radius));
      CHECK(value == Approx(expected).epsilon(1e-12));
      CHECK(std::abs(value - 2.0 * (c - 1.0)) <=
            2.0 * (c - 1.0) * std::pow(c, -radius) + 1e-12);
    }
  }
}

TEST_CASE("tree harmonic function from a ray pair") {
  Network net = make_geometric_tree(2.0, 8);
  Truncation trunc = truncate(net, vid(""), 6, BoundaryMode::Free);
  RayPair rays = default_rays(vid(""), 6);
  VertexFunction h = tree_harmonic(trunc, rays, 2.0);

  SECTION("base value is zero") { CHECK(h[trunc.require_index(vid(""))] == 0.0); }
  SECTION("ray values follow the closed form") {
    CHECK(h[trunc.require_index(vid("0"))] == 0.5);
    CHECK(h[trunc.require_index(vid("00"))] == 0.75);
    CHECK(h[trunc.require_index(vid("1"))] == -0.5);
  }
  SECTION("locally constant off the rays") {
    CHECK(h[trunc.require_index(vid("01"))] == h[trunc.require_index(vid("0"))]);
    CHECK(h[trunc.require_index(vid("010"))] == h[trunc.require_index(vid("0"))]);
  }
  SECTION("harmonic at every deep interior vertex") {
    VertexFunction lap = laplacian_apply(trunc, h);
    for (Eigen::Index i = 0; i < trunc.size(); ++i) {
      if (!trunc.deep_interior(i)) continue;
      CHECK(std::abs(lap[i]) <= 1e-12 * trunc.degree(i));
    }
  }
  SECTION("energy matches the geometric-integers harmonic") {
    Truncation zline = testnets::whole_free(make_geometric_integers(2.0, 6));
    double h_energy = energy(zline, geometric_harmonic(zline, 2.0));
    CHECK(energy(trunc, h) == Approx(h_energy).epsilon(1e-12));
  }
}

TEST_CASE("tree harmonic based away from the root") {
  Network net = make_geometric_tree(2.0, 9);
  Truncation trunc = truncate(net, vid(""), 7, BoundaryMode::Free);
  RayPair rays = default_rays(vid("10"), 5);
  VertexFunction h = tree_harmonic(trunc, rays, 2.0);
  CHECK(h[trunc.require_index(vid("10"))] == 0.0);
  CHECK(h[trunc.require_index(vid("100"))] == 0.5);
  CHECK(h[trunc.require_index(vid("101"))] == -0.5);
  VertexFunction lap = laplacian_apply(trunc, h);
  for (Eigen::Index i = 0; i < trunc.size(); ++i) {
    if (!trunc.deep_interior(i)) continue;
    CHECK(std::abs(lap[i]) <= 1e-12 * trunc.degree(i));
  }
}

TEST_CASE("invalid ray pairs are rejected") {
  Network net = make_geometric_tree(2.0, 7);
  Truncation trunc = truncate(net, vid(""), 5, BoundaryMode::Free);
  SECTION("rays that meet off base") {
    RayPair rays;
    rays.plus = {vid(""), vid("0"), vid("00")};
    rays.minus = {vid(""), vid("0"), vid("01")};  // shares "0" with plus
    CHECK_THROWS_AS(tree_harmonic(trunc, rays, 2.0), std::invalid_argument);
  }
  SECTION("rays that skip a level") {
    RayPair rays;
    rays.plus = {vid(""), vid("00")};
    rays.minus = {vid(""), vid("1")};
    CHECK_THROWS_AS(tree_harmonic(trunc, rays, 2.0), std::invalid_argument);
  }
  SECTION("rays that stop short of the rim") {
    RayPair rays = default_rays(vid(""), 2);
    CHECK_THROWS_AS(tree_harmonic(trunc, rays, 2.0), std::invalid_argument);
  }
}

TEST_CASE("Royden decomposition") {
  Network net = make_geometric_integers(2.0, 8);
  Truncation trunc = truncate(net, vid(0), 6, BoundaryMode::Free);

  SECTION("a deep point mass is entirely in the finitely-supported part") {
    VertexFunction u = delta(trunc, trunc.require_index(vid(2)));
    RoydenParts parts = royden_decompose(trunc, u);
    CHECK(energy(trunc, parts.harm) <= 1e-18);
  }
  SECTION("the closed-form harmonic function has no finite part") {
    for (int radius : {4, 6}) {
      Truncation t = truncate(net, vid(0), radius, BoundaryMode::Free);
      VertexFunction h = geometric_harmonic(t, 2.0);
      RoydenParts parts = royden_decompose(t, h);
      CHECK(energy(t, parts.fin) <= 1e-12 * energy(t, h));
    }
  }
  SECTION("Pythagoras and orthogonality for random functions") {
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
      VertexFunction u = rng.vector(trunc.size());
      RoydenParts parts = royden_decompose(trunc, u);
      double total = energy(trunc, u);
      double split = energy(trunc, parts.fin) + energy(trunc, parts.harm);
      CHECK(split == Approx(total).epsilon(1e-9));
      CHECK(std::abs(energy(trunc, parts.fin, parts.harm)) <= 1e-9 * std::max(total, 1.0));
    }
  }
  SECTION("the complement is harmonic across the deep interior") {
    Rng rng(18);
    VertexFunction u = rng.vector(trunc.size());
    RoydenParts parts = royden_decompose(trunc, u);
    VertexFunction lap = laplacian_apply(trunc, parts.harm);
    for (Eigen::Index i = 0; i < trunc.size(); ++i) {
      if (!trunc.deep_interior(i)) continue;
      CHECK(std::abs(lap[i]) <= 1e-9 * trunc.degree(i));
    }
  }
  SECTION("whole-graph free truncation still decomposes") {
    Truncation whole = testnets::whole_free(make_geometric_integers(2.0, 3));
    Rng rng(19);
    VertexFunction u = rng.vector(whole.size());
    RoydenParts parts = royden_decompose(whole, u);
    // Everything is finitely supported here, so the harmonic part is a
    // constant: zero energy.
    CHECK(energy(whole, parts.harm) <= 1e-12 * std::max(1.0, energy(whole, u)));
  }
}

TEST_CASE("defect recurrence on the geometric integers") {
  DefectVector defect = defect_vector_Z(2.0, 50);

  SECTION("first step by hand: f(2) = 7/4") {
    CHECK(defect.value(0) == 0.0);
    CHECK(defect.value(1) == 1.0);
    CHECK(defect.value(2) == Approx(1.75).epsilon(1e-15));
  }
  SECTION("odd mirror") {
    for (int n = 1; n <= 50; n += 7) CHECK(defect.value(-n) == -defect.value(n));
  }
  SECTION("(Lap + id) f vanishes on the truncation interior") {
    Truncation trunc =
        truncate(make_geometric_integers(2.0, 40), vid(0), 38, BoundaryMode::Free);
    VertexFunction f = restrict_to(trunc, defect);
    VertexFunction lap = laplacian_apply(trunc, f);
    double max_f = f.lpNorm<Eigen::Infinity>();
    for (Eigen::Index i = 0; i < trunc.size(); ++i) {
      if (!trunc.deep_interior(i)) continue;
      CHECK(std::abs(lap[i] + f[i]) <= 1e-10 * (trunc.degree(i) * max_f + std::abs(f[i])));
    }
  }
  SECTION("partial energies are Cauchy for c = 2") {
    DefectVector long_defect = defect_vector_Z(2.0, 200);
    CHECK(long_defect.tail_after(40) < 1e-6);
    for (std::size_t k = 1; k < long_defect.partial_energies.size(); ++k)
      CHECK(long_defect.partial_energies[k] >= long_defect.partial_energies[k - 1]);
  }
  SECTION("partial energies blow up for c = 1") {
    DefectVector recurrent = defect_vector_Z(1.0, 200);
    DefectVector transient = defect_vector_Z(2.0, 200);
    CHECK(recurrent.partial_energies.back() >
          10.0 * transient.partial_energies.back());
  }
  SECTION("preconditions") {
    CHECK_THROWS_AS(defect_vector_Z(2.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(defect_vector_Z(2.0, 10, 0.0), std::invalid_argument);
  }
}

TEST_CASE("defect identity scan") {
  Network net = make_geometric_integers(2.0, 20);
  Truncation trunc = truncate(net, vid(0), 18, BoundaryMode::Free);
  DefectVector defect = defect_vector_Z(2.0, 25);
  VertexFunction f = restrict_to(trunc, defect);

  SECTION("the recurrence vector satisfies the transition identity deep inside") {
    DefectScan scan = c0_defect_scan(trunc, f);
    CHECK(scan.max_residual_deep <= 1e-10 * f.lpNorm<Eigen::Infinity>());
    CHECK_FALSE(scan.contradiction);
    // Monotone on n > 0, so the only positive local maximum is the rim
    // vertex, where the identity fails: consistent with f not vanishing at
    // infinity.
    for (Eigen::Index x : scan.positive_local_maxima)
      CHECK_FALSE(trunc.deep_interior(x));
  }
  SECTION("a point mass is no defect vector") {
    VertexFunction spike = delta(trunc, trunc.require_index(vid(3)));
    DefectScan scan = c0_defect_scan(trunc, spike);
    CHECK(scan.max_residual_deep > 0.5);
    CHECK_FALSE(scan.contradiction);
  }
  SECTION("zero functions are rejected") {
    CHECK_THROWS_AS(c0_defect_scan(trunc, VertexFunction::Zero(trunc.size())),
                    std::invalid_argument);
  }
  SECTION("the contradiction mechanism fires when the identity is forced") {
    // Single grounded vertex: f = (1) is trivially a positive local max;
    // with a tolerance loose enough to accept the identity there, the scan
    // must flag the impossible inequality.
    NetworkBuilder builder;
    builder.add_edge(vid(0), vid(1), 3.0).origin(vid(0));
    Truncation tiny = truncate(builder.build(), vid(0), 0, BoundaryMode::Wired);
    VertexFunction one = constant_function(tiny, 1.0);
    CHECK_FALSE(c0_defect_scan(tiny, one, 1e-10).contradiction);
    DefectScan loose = c0_defect_scan(tiny, one, 2.0);
    CHECK(loose.contradiction);
    CHECK(loose.contradiction_vertex == 0);
  }
}

TEST_CASE("tree defect vector from an embedded line") {
  Network net = make_geometric_tree(2.0, 9);
  Truncation trunc = truncate(net, vid(""), 7, BoundaryMode::Free);

  SECTION("root-based rays satisfy the defect equation on the rays") {
    RayPair rays = default_rays(vid(""), 7);
    TreeDefect defect = tree_defect_vector(trunc, rays, 2.0);
    VertexFunction lap = laplacian_apply(trunc, defect.f);
    double max_f = defect.f.lpNorm<Eigen::Infinity>();
    for (Eigen::Index i = 0; i < trunc.size(); ++i) {
      if (!trunc.deep_interior(i) || !defect.on_ray[static_cast<std::size_t>(i)]) continue;
      CHECK(std::abs(lap[i] + defect.f[i]) <=
            1e-10 * (trunc.degree(i) * max_f + std::abs(defect.f[i])));
    }
  }
  SECTION("junction vertices carry residual |f| by construction") {
    RayPair rays = default_rays(vid(""), 7);
    TreeDefect defect = tree_defect_vector(trunc, rays, 2.0);
    VertexFunction lap = laplacian_apply(trunc, defect.f);
    Eigen::Index junction = trunc.require_index(vid("01"));  // child of ray vertex "0"
    REQUIRE_FALSE(defect.on_ray[static_cast<std::size_t>(junction)]);
    CHECK(lap[junction] == Approx(0.0).margin(1e-12));
    CHECK(std::abs(lap[junction] + defect.f[junction]) ==
          Approx(std::abs(defect.f[junction])).epsilon(1e-12));
  }
  SECTION("deeper bases rescale the recurrence to keep the on-ray equation") {
    RayPair rays = default_rays(vid("10"), 5);
    TreeDefect defect = tree_defect_vector(trunc, rays, 2.0);
    VertexFunction lap = laplacian_apply(trunc, defect.f);
    double max_f = defect.f.lpNorm<Eigen::Infinity>();
    for (Eigen::Index i = 0; i < trunc.size(); ++i) {
      if (!trunc.deep_interior(i) || !defect.on_ray[static_cast<std::size_t>(i)]) continue;
      CHECK(std::abs(lap[i] + defect.f[i]) <=
            1e-10 * (trunc.degree(i) * max_f + std::abs(defect.f[i])));
    }
  }
}
