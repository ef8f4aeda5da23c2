#pragma once

#include <vector>

#include "gapflow/invert.hpp"
#include "gapflow/measure.hpp"

namespace gapflow {

// Zero-rate call prices on a strike grid starting at 0; the spot is c(0).
struct CallCurve {
  std::vector<double> strikes;  // 0 = K_0 < K_1 < ... < K_m
  std::vector<double> prices;   // nonincreasing, discretely convex, >= intrinsic
  double maturity = 1.0;

  double spot() const { return prices.front(); }
};

// Validates the arbitrage constraints (monotone, convex within 1e-12,
// >= intrinsic value, K_0 = 0) and returns the curve.
CallCurve make_call_curve(std::vector<double> strikes, std::vector<double> prices,
                          double maturity);

// Implied law of X_T from the discrete second derivative of the curve: kink
// masses at interior strikes, a point mass 1 + c'(0) at zero, and — when
// c(K_m) > 0 — a single tail atom placed so total mass is 1 and the mean is
// the spot.
TargetLaw implied_law(const CallCurve& curve);

// Exact call prices under a finite-support law: sum of (y - K)+ weights.
std::vector<double> reprice(const TargetLaw& law, const std::vector<double>& strikes);

struct CallCalibration {
  SpeedMeasure measure;           // finite masses scaled to the curve maturity
  CalibrationResult calibration;  // the underlying horizon-1 solve
  std::vector<double> repriced;   // model prices on the input strikes
  double reprice_error = 0.0;     // max abs error against the input prices
};

// Implied law -> invert at horizon 1 -> scale finite masses by T (scaling the
// measure by c replays the clock: the time-t law under c*nu is the law at t/c
// under nu).
CallCalibration calibrate_calls(const CallCurve& curve, double tol,
                                const InvertOptions& opts = {});

}  // namespace gapflow
