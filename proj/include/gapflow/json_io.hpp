#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gapflow/chain.hpp"
#include "gapflow/finance.hpp"
#include "gapflow/invert.hpp"
#include "gapflow/martingale.hpp"
#include "gapflow/measure.hpp"
#include "gapflow/simulate.hpp"

// JSON / CSV codecs for the CLI. Measures use an "inf" string token for
// infinite masses so absorption stays exact through a round trip.

namespace gapflow::io {

std::string measure_to_json(const SpeedMeasure& nu);
SpeedMeasure measure_from_json(const std::string& text);

std::string law_to_json(const TargetLaw& law);
TargetLaw law_from_json(const std::string& text);

std::string law_at_time_to_json(const LawAtTime& law);
std::string calibration_to_json(const CalibrationResult& result);
std::string verdict_to_json(const MartingaleVerdict& verdict);

// Summary of a Monte Carlo run: histogram over the measure's support plus
// sample means; A_1 statistics when the engine provides them.
std::string bundle_to_json(const PathBundle& bundle, const std::vector<double>& grid,
                           bool include_meta);

std::string calibration_report_to_json(const CallCalibration& result, const CallCurve& curve);

// CSV with two numeric columns; an optional header line is skipped.
std::vector<std::pair<double, double>> read_csv_pairs(const std::string& path);

std::string read_file(const std::string& path);

}  // namespace gapflow::io
