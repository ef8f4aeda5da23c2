#pragma once

#include <optional>
#include <vector>

#include "gapflow/invert.hpp"
#include "gapflow/measure.hpp"

namespace gapflow {

// A general law with finite mean, given either explicitly or as a quantile
// table (u, quantile) on (0,1) with monotone linear interpolation. The table
// is extended constantly below its first and above its last knot.
struct SampledLaw {
  std::optional<TargetLaw> explicit_law;
  std::vector<std::pair<double, double>> quantile_table;
  double declared_mean = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> declared_variance;
};

SampledLaw sampled_from_law(TargetLaw law);
SampledLaw sampled_from_quantiles(std::vector<std::pair<double, double>> table,
                                  std::optional<double> mean = std::nullopt,
                                  std::optional<double> variance = std::nullopt);

// Truncate at +-n, floor to the 1/n grid, then shift so the mean is exactly
// the declared mean.
TargetLaw discretize(const SampledLaw& mu, int n);

struct ApproxResult {
  TargetLaw discretized;
  CalibrationResult calibration;
  double w1_to_discretized = 0.0;  // W1 between the forward law of the fit and mu_n
};

ApproxResult approx_invert(const SampledLaw& mu, double x0, int n, double tol,
                           const InvertOptions& opts = {});

// Wasserstein-1 distance between finite-support laws.
double wasserstein1(const TargetLaw& a, const TargetLaw& b);

// W1 between a finite-support law and a quantile-table law, evaluated by
// quantile matching on a fine uniform grid.
double wasserstein1_quantiles(const TargetLaw& a, const SampledLaw& b,
                              std::size_t grid = 200000);

double law_variance(const TargetLaw& law);

}  // namespace gapflow
