#pragma once

#include <vector>

#include "gapflow/chain.hpp"
#include "gapflow/measure.hpp"

namespace gapflow {

struct CalibrationResult {
  SpeedMeasure measure;        // endpoints carry infinite mass
  double residual = 0.0;       // inf-norm of G(b) - p over the target support
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;   // residual per iteration
};

struct InvertOptions {
  double tol = 1e-9;
  int max_iter = 200;
  double fd_h_rel = 1e-5;       // central-difference step in log-mass coordinates
  int homotopy_max_segments = 64;
  double forward_tol = 1e-12;   // tolerance passed to the forward solver
  ChainOptions chain;
};

// Finds interior masses b with ||G(b) - p||_inf <= tol for a finite-support
// target law with mean x0. Points with p_i = 0 are stripped before solving
// and omitted from the returned measure. Does not claim uniqueness.
CalibrationResult invert_discrete(const TargetLaw& target, double x0, double tol,
                                  int max_iter = 200, const InvertOptions& opts = {});

// J[k][i] = d p_k / d log(b_i), central differences. Row-major, size
// (n+2) x n for n interior masses.
std::vector<std::vector<double>> jacobian_fd(const std::vector<double>& interior_masses,
                                             const std::vector<double>& grid, double x0,
                                             double h_rel, double t = 1.0,
                                             double forward_tol = 1e-12);

// Damped Gauss-Newton in log-mass coordinates with a homotopy fallback.
CalibrationResult solve_newton(const TargetLaw& target, double x0, const InvertOptions& opts);

}  // namespace gapflow
