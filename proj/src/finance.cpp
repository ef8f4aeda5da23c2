#include "gapflow/finance.hpp"

#include <algorithm>
#include <cmath>

#include "gapflow/chain.hpp"
#include "gapflow/errors.hpp"

namespace gapflow {

CallCurve make_call_curve(std::vector<double> strikes, std::vector<double> prices,
                          double maturity) {
  if (strikes.size() != prices.size() || strikes.size() < 2) {
    throw Error(ErrorCode::Validation, "curve needs matching strike/price vectors, >= 2 points");
  }
  if (!(maturity > 0.0)) throw Error(ErrorCode::Validation, "maturity must be positive");
  if (strikes.front() != 0.0) throw Error(ErrorCode::Validation, "strike grid must start at 0");
  const double x0 = prices.front();
  if (!(x0 > 0.0) || !std::isfinite(x0)) {
    throw Error(ErrorCode::Validation, "spot c(0) must be positive and finite");
  }
  for (std::size_t j = 0; j < strikes.size(); ++j) {
    if (std::isnan(strikes[j]) || std::isnan(prices[j]) || prices[j] < 0.0) {
      throw Error(ErrorCode::Validation, "strikes and prices must be finite, prices >= 0");
    }
    if (j > 0 && strikes[j] <= strikes[j - 1]) {
      throw Error(ErrorCode::Validation, "strikes must be strictly increasing");
    }
    if (j > 0 && prices[j] > prices[j - 1]) {
      throw Error(ErrorCode::ConvexityViolation, "prices must be nonincreasing in strike");
    }
    if (prices[j] < std::max(x0 - strikes[j], 0.0) - 1e-12) {
      throw Error(ErrorCode::ConvexityViolation, "price below intrinsic value");
    }
  }
  for (std::size_t j = 1; j + 1 < strikes.size(); ++j) {
    const double s_left = (prices[j] - prices[j - 1]) / (strikes[j] - strikes[j - 1]);
    const double s_right = (prices[j + 1] - prices[j]) / (strikes[j + 1] - strikes[j]);
    if (s_right - s_left < -1e-12) {
      throw Error(ErrorCode::ConvexityViolation, "second divided difference is negative");
    }
  }
  CallCurve curve;
  curve.strikes = std::move(strikes);
  curve.prices = std::move(prices);
  curve.maturity = maturity;
  return curve;
}

TargetLaw implied_law(const CallCurve& curve) {
  const std::size_t m = curve.strikes.size() - 1;
  const double x0 = curve.spot();
  std::vector<double> slope(m);  // right slope on [K_j, K_{j+1})
  for (std::size_t j = 0; j < m; ++j) {
    slope[j] = (curve.prices[j + 1] - curve.prices[j]) / (curve.strikes[j + 1] - curve.strikes[j]);
  }

  std::vector<WeightedPoint> points;
  const double eps = 1.0 + slope[0];  // point mass at zero
  if (eps < -1e-12) throw Error(ErrorCode::ConvexityViolation, "slope at zero is below -1");
  if (eps > 1e-14) points.push_back({0.0, eps});
  for (std::size_t j = 1; j < m; ++j) {
    const double mass = slope[j] - slope[j - 1];
    if (mass > 1e-14) points.push_back({curve.strikes[j], mass});
  }
  const double c_last = curve.prices[m];
  if (c_last > 0.0) {
    // The curve has not reached zero; extend the last slope linearly to zero
    // so total mass is 1 and the mean stays at the spot.
    const double q = -slope[m - 1];
    if (!(q > 0.0)) {
      throw Error(ErrorCode::NegativeTailMass, "flat tail with positive price has no finite law");
    }
    points.push_back({curve.strikes[m] + c_last / q, q});
  } else {
    const double mass = -slope[m - 1];
    if (mass > 1e-14) points.push_back({curve.strikes[m], mass});
  }

  TargetLaw law = make_target_law(std::move(points));
  if (std::fabs(law.mean - x0) > 1e-10) {
    throw Error(ErrorCode::Validation, "implied law mean deviates from the spot");
  }
  return law;
}

std::vector<double> reprice(const TargetLaw& law, const std::vector<double>& strikes) {
  std::vector<double> prices;
  prices.reserve(strikes.size());
  for (double k : strikes) {
    long double acc = 0.0L;
    for (const WeightedPoint& w : law.points) {
      if (w.position > k) {
        acc += static_cast<long double>(w.position - k) * w.probability;
      }
    }
    prices.push_back(static_cast<double>(acc));
  }
  return prices;
}

CallCalibration calibrate_calls(const CallCurve& curve, double tol, const InvertOptions& opts) {
  const TargetLaw law = implied_law(curve);
  const double x0 = curve.spot();

  CallCalibration out;
  out.calibration = invert_discrete(law, x0, tol, opts.max_iter, opts);

  RawMeasure scaled;
  scaled.atoms = out.calibration.measure.atoms;
  for (Atom& a : scaled.atoms) {
    if (!a.infinite()) a.mass *= curve.maturity;
  }
  out.measure = validate_measure(scaled);

  GapChain chain = build_chain(out.measure, x0, opts.chain);
  LawAtTime lt = law_at(chain, curve.maturity, opts.forward_tol, opts.chain);
  std::vector<WeightedPoint> pts;
  for (std::size_t i = 0; i < lt.grid.size(); ++i) {
    if (lt.probabilities[i] > 0.0) pts.push_back({lt.grid[i], lt.probabilities[i]});
  }
  double total = 0.0;
  for (auto& w : pts) total += w.probability;
  for (auto& w : pts) w.probability /= total;
  out.repriced = reprice(make_target_law(std::move(pts)), curve.strikes);
  out.reprice_error = 0.0;
  for (std::size_t j = 0; j < curve.strikes.size(); ++j) {
    out.reprice_error = std::max(out.reprice_error,
                                 std::fabs(out.repriced[j] - curve.prices[j]));
  }
  return out;
}

}  // namespace gapflow
