#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gapflow/measure.hpp"

namespace gapflow {

enum class Engine { jump_chain, time_change };

struct PathBundle {
  std::vector<double> samples_X1;
  std::vector<double> samples_A1;  // time-change engine only
  std::uint64_t seed = 0;
  Engine engine = Engine::jump_chain;
  std::size_t n_paths = 0;
  double step = 0.0;       // time-change engine only
  double bandwidth = 0.0;  // time-change engine only
  std::size_t budget_retries = 0;  // paths that hit the time cap and were redrawn
};

struct SimulateOptions {
  double time_cap_factor = 1e3;  // Brownian time cap = factor * (grid diameter)^2
  int retry_limit = 3;
  int threads = 0;  // 0: GAPFLOW_THREADS or hardware concurrency
};

// Exact CTMC simulation of the birth-death chain: exponential holding times,
// gambler's-ruin jump probabilities d-/(d- + d+) up.
PathBundle simulate_jump(const SpeedMeasure& nu, double x0, double t, std::size_t n_paths,
                         std::uint64_t seed, const SimulateOptions& opts = {});

// Independent oracle: Euler walk of B, local time at each atom estimated by
// occupation of (y - eps, y + eps) over 2*eps, clock Gamma = sum b_i * L_i.
// Infinite atoms are hard stopping barriers (with a Brownian-bridge crossing
// test per step); the sample is B at the time Gamma first exceeds t, snapped
// to the nearest support atom with ties toward x0.
PathBundle simulate_timechange(const SpeedMeasure& nu, double x0, double t, std::size_t n_paths,
                               double step, double bandwidth, std::uint64_t seed,
                               const SimulateOptions& opts = {});

// Sample mean and standard error of A_1 over the bundle.
std::pair<double, double> estimate_EA1(const PathBundle& bundle);

// Empirical probabilities of a bundle over a reference grid (samples are
// matched to the nearest grid point).
std::vector<double> empirical_law(const PathBundle& bundle, const std::vector<double>& grid);

}  // namespace gapflow
