#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gapflow/measure.hpp"

namespace gapflow {

// Whether the (1+|x|)-weighted tail integral of a continuous measure part is
// finite or infinite on one side of the start point. When no override is
// given, a set tail-divergence flag on the measure counts as infinite.
enum class TailMoment { finite, infinite };

struct MartingaleVerdict {
  bool local_martingale = false;
  bool true_martingale = false;
  std::vector<std::string> reasons;  // satisfied/violated clauses
};

// Local-martingale test: the support is the single point x0, or on each side
// of x0 there is either an infinity-set point or support all the way out.
// A set tail flag implies the support is unbounded on that side.
std::pair<bool, std::vector<std::string>> classify_local(const SpeedMeasure& nu, double x0);

// Full verdict: a true martingale needs supp = {x0}, or x0 in the infinity
// set, or infinite (1+|x|)-tail integrals on both sides. For atomic parts the
// integrals are exact; for continuous parts the flags (or the overrides, when
// supplied) are authoritative. Supplying an override for only one side is an
// error: declarations must cover both tails.
MartingaleVerdict classify_true(const SpeedMeasure& nu, double x0,
                                std::optional<TailMoment> left_tail = std::nullopt,
                                std::optional<TailMoment> right_tail = std::nullopt);

}  // namespace gapflow
