#include "gapflow/measure.hpp"

#include <algorithm>
#include <cmath>

#include "gapflow/errors.hpp"

namespace gapflow {

SpeedMeasure validate_measure(const RawMeasure& raw) {
  for (const Atom& a : raw.atoms) {
    if (std::isnan(a.position) || std::isinf(a.position)) {
      throw Error(ErrorCode::NanPosition, "atom position must be finite");
    }
    if (std::isnan(a.mass)) throw Error(ErrorCode::NegativeMass, "atom mass is NaN");
    if (a.mass < 0.0) throw Error(ErrorCode::NegativeMass, "atom mass is negative");
  }
  std::vector<Atom> atoms = raw.atoms;
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.position < b.position; });
  std::vector<Atom> merged;
  for (const Atom& a : atoms) {
    if (!merged.empty() && merged.back().position == a.position) {
      merged.back().mass += a.mass;  // inf + finite = inf
    } else {
      merged.push_back(a);
    }
  }
  std::erase_if(merged, [](const Atom& a) { return a.mass == 0.0; });
  return SpeedMeasure{std::move(merged), raw.left_tail_diverges, raw.right_tail_diverges};
}

TargetLaw make_target_law(std::vector<WeightedPoint> points) {
  long double total = 0.0L;
  long double mean = 0.0L;
  double prev = -kInf;
  for (const WeightedPoint& p : points) {
    if (std::isnan(p.position) || std::isinf(p.position)) {
      throw Error(ErrorCode::NanPosition, "law point must be finite");
    }
    if (!(p.position > prev)) {
      throw Error(ErrorCode::Validation, "law points must be strictly increasing");
    }
    prev = p.position;
    if (std::isnan(p.probability) || p.probability < 0.0 || p.probability > 1.0) {
      throw Error(ErrorCode::Validation, "probabilities must lie in [0,1]");
    }
    total += static_cast<long double>(p.probability);
    mean += static_cast<long double>(p.probability) * static_cast<long double>(p.position);
  }
  if (points.empty()) throw Error(ErrorCode::EmptySupport, "law has no points");
  if (std::fabs(static_cast<double>(total) - 1.0) > 1e-12) {
    throw Error(ErrorCode::Validation, "probabilities must sum to 1 within 1e-12");
  }
  TargetLaw law;
  law.points = std::move(points);
  law.mean = static_cast<double>(mean);
  return law;
}

SupportClassification classify_support(const SpeedMeasure& nu, double x0) {
  SupportClassification cls{-kInf, kInf, -kInf, kInf, false, false};
  for (const Atom& a : nu.atoms) {
    if (a.position <= x0 && a.position > cls.xs_minus) cls.xs_minus = a.position;
    if (a.position >= x0 && a.position < cls.xs_plus) cls.xs_plus = a.position;
    if (a.infinite()) {
      if (a.position <= x0 && a.position > cls.xinf_minus) cls.xinf_minus = a.position;
      if (a.position >= x0 && a.position < cls.xinf_plus) cls.xinf_plus = a.position;
    }
    if (a.position == x0) {
      cls.x0_in_supp = true;
      if (a.infinite()) cls.x0_in_suppinf = true;
    }
  }
  return cls;
}

TargetLaw initial_split(const SupportClassification& cls, double x0) {
  const bool left = cls.xs_minus > -kInf;
  const bool right = cls.xs_plus < kInf;
  if (!left && !right) throw Error(ErrorCode::EmptySupport, "speed measure has empty support");

  if (cls.x0_in_supp) return make_target_law({{x0, 1.0}});
  if (!left) return make_target_law({{cls.xs_plus, 1.0}});
  if (!right) return make_target_law({{cls.xs_minus, 1.0}});

  // Two-point law on {xs_-, xs_+} with mean exactly x0.
  const double gap = cls.xs_plus - cls.xs_minus;
  const double w_lo = (cls.xs_plus - x0) / gap;
  const double w_hi = (x0 - cls.xs_minus) / gap;
  return make_target_law({{cls.xs_minus, w_lo}, {cls.xs_plus, w_hi}});
}

}  // namespace gapflow
