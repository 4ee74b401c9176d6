#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "energynet/errors.hpp"
#include "energynet/green.hpp"
#include "energynet/harmonics.hpp"
#include "energynet/kernels.hpp"
#include "energynet/network.hpp"
#include "energynet/operators.hpp"
#include "energynet/truncation.hpp"

namespace energynet {

struct SweepRow {
  int radius;
  double value;
  double residual;
};

namespace detail {

inline unsigned sweep_thread_cap() {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ENERGYNET_THREADS")) {
    long requested = std::strtol(env, nullptr, 10);
    if (requested >= 1) cap = std::min<unsigned>(cap, static_cast<unsigned>(requested));
  }
  return cap;
}

// Runs job(radius) for each radius in [r_min, r_max], in parallel batches;
// results come back ordered by radius.
inline std::vector<double> sweep_values(int r_min, int r_max,
                                        const std::function<double(int)>& job) {
  if (r_max < r_min) return {};
  const auto count = static_cast<std::size_t>(r_max - r_min + 1);
  std::vector<double> values(count, 0.0);
  std::vector<std::exception_ptr> errors(count);
  const unsigned cap = sweep_thread_cap();
  std::size_t next = 0;
  while (next < count) {
    std::size_t batch = std::min<std::size_t>(cap, count - next);
    std::vector<std::thread> workers;
    workers.reserve(batch);
    for (std::size_t k = 0; k < batch; ++k) {
      std::size_t slot = next + k;
      workers.emplace_back([&, slot] {
        try {
          values[slot] = job(r_min + static_cast<int>(slot));
        } catch (...) {
          errors[slot] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    next += batch;
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return values;
}

}  // namespace detail

// Energy of the closed-form harmonic function on growing Free truncations;
// residual against the limit 2(c - 1).
inline std::vector<SweepRow> sweep_h_energy(double c, int r_min, int r_max) {
  if (!(c > 1.0)) throw std::invalid_argument("sweep h-energy: requires c > 1");
  auto values = detail::sweep_values(r_min, r_max, [c](int radius) {
    Network net = make_geometric_integers(c, radius);
    Truncation trunc = truncate(net, VertexId{std::int64_t{0}}, radius, BoundaryMode::Free);
    VertexFunction h = geometric_harmonic(trunc, c);
    return energy(trunc, h, h);
  });
  std::vector<SweepRow> rows;
  double limit = 2.0 * (c - 1.0);
  for (std::size_t i = 0; i < values.size(); ++i)
    rows.push_back({r_min + static_cast<int>(i), values[i], std::abs(values[i] - limit)});
  return rows;
}

// Monopole value w_o(o) on growing Wired truncations. Converges from below
// on transient networks (c > 1) and diverges on recurrent ones (c = 1); the
// residual column holds the increment from the previous radius.
inline std::vector<SweepRow> sweep_monopole(double c, int r_min, int r_max) {
  auto values = detail::sweep_values(r_min, r_max, [c](int radius) {
    Network net = make_geometric_integers(c, radius + 1);
    Truncation trunc = truncate(net, VertexId{std::int64_t{0}}, radius, BoundaryMode::Wired);
    Eigen::Index o = trunc.origin_index();
    return solve_monopole(trunc, o)[o];
  });
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < values.size(); ++i) {
    double prev = i == 0 ? 0.0 : values[i - 1];
    rows.push_back({r_min + static_cast<int>(i), values[i], std::abs(values[i] - prev)});
  }
  return rows;
}

// Energy of G(delta_o) on growing Wired truncations, reported as a trend
// (no convergence claim is made for the Green operator on the energy space).
inline std::vector<SweepRow> sweep_green_energy(double c, int r_min, int r_max) {
  auto values = detail::sweep_values(r_min, r_max, [c](int radius) {
    Network net = make_geometric_integers(c, radius + 1);
    Truncation trunc = truncate(net, VertexId{std::int64_t{0}}, radius, BoundaryMode::Wired);
    VertexFunction g = green_apply(trunc, delta(trunc, trunc.origin_index()));
    return energy(trunc, g, g);
  });
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < values.size(); ++i) {
    double prev = i == 0 ? 0.0 : values[i - 1];
    rows.push_back({r_min + static_cast<int>(i), values[i], std::abs(values[i] - prev)});
  }
  return rows;
}

inline std::vector<SweepRow> run_sweep(const std::string& quantity, double c, int r_min,
                                       int r_max) {
  if (quantity == "h-energy") return sweep_h_energy(c, r_min, r_max);
  if (quantity == "monopole") return sweep_monopole(c, r_min, r_max);
  if (quantity == "green-energy") return sweep_green_energy(c, r_min, r_max);
  throw ValidationError("unknown sweep quantity: " + quantity +
                        " (expected h-energy, monopole, or green-energy)");
}

}  // namespace energynet
