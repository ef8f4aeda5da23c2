#pragma once

#include <limits>
#include <utility>
#include <vector>

namespace gapflow {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Atom {
  double position;
  double mass;  // strictly positive; kInf marks an absorbing point mass

  bool infinite() const { return mass == kInf; }
};

// Atomic speed measure plus two user declarations summarizing a non-atomic
// part: whether the (1+|x|)-weighted tail integral diverges on each side.
// A divergent tail also implies the support is unbounded on that side.
struct SpeedMeasure {
  std::vector<Atom> atoms;  // sorted strictly increasing by position
  bool left_tail_diverges = false;
  bool right_tail_diverges = false;

  bool purely_atomic() const { return !left_tail_diverges && !right_tail_diverges; }
};

struct WeightedPoint {
  double position;
  double probability;
};

struct TargetLaw {
  std::vector<WeightedPoint> points;  // sorted strictly increasing by position
  double mean = 0.0;                  // derived; long-double accumulation
};

struct SupportClassification {
  double xs_minus;    // nearest support point <= x0, -inf if none
  double xs_plus;     // nearest support point >= x0, +inf if none
  double xinf_minus;  // nearest infinity-set point <= x0
  double xinf_plus;   // nearest infinity-set point >= x0
  bool x0_in_supp;
  bool x0_in_suppinf;
};

// Raw input before validation.
struct RawMeasure {
  std::vector<Atom> atoms;  // any order, duplicates allowed
  bool left_tail_diverges = false;
  bool right_tail_diverges = false;
};

// Sorts, merges duplicate positions (infinite summand wins), drops zero
// masses. Throws on NaN positions and NaN/negative masses.
SpeedMeasure validate_measure(const RawMeasure& raw);

// Builds a TargetLaw from (position, probability) pairs: validates ordering,
// nonnegativity and total mass 1 (1e-12), computes the mean.
TargetLaw make_target_law(std::vector<WeightedPoint> points);

SupportClassification classify_support(const SpeedMeasure& nu, double x0);

// Law of X at time 0: a one- or two-point law determined by the nearest
// support points around the start.
TargetLaw initial_split(const SupportClassification& cls, double x0);

}  // namespace gapflow
