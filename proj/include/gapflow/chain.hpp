#pragma once

#include <vector>

#include "gapflow/measure.hpp"

namespace gapflow {

// Birth-death realization of the gap diffusion on a finite atomic speed
// measure. Interior state i with finite mass b and gaps d- = y_i - y_{i-1},
// d+ = y_{i+1} - y_i jumps at rates 1/(2 b d+) up and 1/(2 b d-) down, so
// rate_up * d+ = rate_down * d- and the chain is a martingale. Infinite-mass
// states and endpoint states absorb.
struct GapChain {
  std::vector<double> grid;       // positions, strictly increasing
  std::vector<double> rates_up;   // per state; 0 for absorbing
  std::vector<double> rates_down;
  std::vector<bool> absorbing;
  std::vector<double> initial;    // distribution over states, sums to 1
};

struct LawAtTime {
  std::vector<double> grid;
  std::vector<double> probabilities;
  double time = 0.0;
  double truncation_error_bound = 0.0;

  double mean() const;
};

struct ChainOptions {
  double rate_budget = 1e8;       // max exit rate * t before RateOverflow
  double max_step_mean = 1e6;     // per-solve Poisson mean; larger t is bisected
  int max_bisections = 40;
  double mass_floor_rel = 1e-12;  // masses below this times the local gap scale drop
};

GapChain build_chain(const SpeedMeasure& nu, double x0, const ChainOptions& opts = {});

// Transient distribution exp(tQ)*initial by uniformization with adaptive
// Poisson truncation. The truncated tail weight is folded back onto the last
// computed power, so probabilities sum to 1 and the mean is preserved to
// rounding; the reported bound covers the distance to the exact law.
LawAtTime law_at(const GapChain& chain, double t, double tol, const ChainOptions& opts = {});

// The forward map: interior masses b (values in [0, inf]) on a fixed grid
// y_0 < ... < y_{n+1} with infinite endpoint masses. Zero entries remove the
// grid point; the returned law covers the full grid (removed points get 0).
LawAtTime forward_G(const std::vector<double>& interior_masses, const std::vector<double>& grid,
                    double x0, double t, double tol, const ChainOptions& opts = {});

}  // namespace gapflow
