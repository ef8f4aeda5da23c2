#include "gapflow/json_io.hpp"

#include <algorithm>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gapflow/errors.hpp"
#include "gapflow/kernels.hpp"

namespace gapflow::io {

using nlohmann::json;

namespace {

json atom_mass_to_json(double mass) {
  if (mass == kInf) return json("inf");
  return json(mass);
}

double atom_mass_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kInf;
    throw Error(ErrorCode::Parse, "unrecognized mass token");
  }
  if (!j.is_number()) throw Error(ErrorCode::Parse, "mass must be a number or \"inf\"");
  return j.get<double>();
}

json measure_json(const SpeedMeasure& nu) {
  json atoms = json::array();
  for (const Atom& a : nu.atoms) {
    atoms.push_back(json::array({a.position, atom_mass_to_json(a.mass)}));
  }
  return json{{"atoms", atoms},
              {"left_tail_diverges", nu.left_tail_diverges},
              {"right_tail_diverges", nu.right_tail_diverges}};
}

json parse_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::Parse, "malformed JSON");
  return j;
}

}  // namespace

std::string measure_to_json(const SpeedMeasure& nu) { return measure_json(nu).dump(); }

SpeedMeasure measure_from_json(const std::string& text) {
  json j = parse_text(text);
  if (!j.is_object() || !j.contains("atoms") || !j["atoms"].is_array()) {
    throw Error(ErrorCode::Parse, "measure JSON needs an \"atoms\" array");
  }
  RawMeasure raw;
  for (const json& entry : j["atoms"]) {
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number()) {
      throw Error(ErrorCode::Parse, "each atom must be a [position, mass] pair");
    }
    raw.atoms.push_back({entry[0].get<double>(), atom_mass_from_json(entry[1])});
  }
  raw.left_tail_diverges = j.value("left_tail_diverges", false);
  raw.right_tail_diverges = j.value("right_tail_diverges", false);
  return validate_measure(raw);
}

std::string law_to_json(const TargetLaw& law) {
  json points = json::array();
  for (const WeightedPoint& w : law.points) {
    points.push_back(json::array({w.position, w.probability}));
  }
  return json{{"points", points}, {"mean", law.mean}}.dump();
}

TargetLaw law_from_json(const std::string& text) {
  json j = parse_text(text);
  if (!j.is_object() || !j.contains("points") || !j["points"].is_array()) {
    throw Error(ErrorCode::Parse, "law JSON needs a \"points\" array");
  }
  std::vector<WeightedPoint> points;
  for (const json& entry : j["points"]) {
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
        !entry[1].is_number()) {
      throw Error(ErrorCode::Parse, "each point must be a [position, probability] pair");
    }
    points.push_back({entry[0].get<double>(), entry[1].get<double>()});
  }
  return make_target_law(std::move(points));
}

std::string law_at_time_to_json(const LawAtTime& law) {
  return json{{"grid", law.grid},
              {"probabilities", law.probabilities},
              {"time", law.time},
              {"truncation_error_bound", law.truncation_error_bound},
              {"mean", law.mean()}}
      .dump();
}

std::string calibration_to_json(const CalibrationResult& result) {
  return json{{"measure", measure_json(result.measure)},
              {"residual", result.residual},
              {"iterations", result.iterations},
              {"converged", result.converged},
              {"trace", result.trace}}
      .dump();
}

std::string verdict_to_json(const MartingaleVerdict& verdict) {
  return json{{"local_martingale", verdict.local_martingale},
              {"true_martingale", verdict.true_martingale},
              {"reasons", verdict.reasons}}
      .dump();
}

std::string bundle_to_json(const PathBundle& bundle, const std::vector<double>& grid,
                           bool include_meta) {
  const std::size_t n = bundle.samples_X1.size();
  const double mean =
      n == 0 ? 0.0
             : kernels::pairwise_sum(bundle.samples_X1.data(), n) / static_cast<double>(n);
  json j{{"engine", bundle.engine == Engine::jump_chain ? "jump_chain" : "time_change"},
         {"seed", bundle.seed},
         {"n_paths", bundle.n_paths},
         {"histogram", json{{"grid", grid}, {"probabilities", empirical_law(bundle, grid)}}},
         {"mean_X1", mean}};
  if (bundle.engine == Engine::time_change) {
    auto [ea1, se] = estimate_EA1(bundle);
    j["step"] = bundle.step;
    j["bandwidth"] = bundle.bandwidth;
    j["EA1"] = json{{"mean", ea1}, {"standard_error", se}};
    j["budget_retries"] = bundle.budget_retries;
  }
  if (include_meta) {
    j["meta"] = json{{"timestamp", static_cast<long long>(std::time(nullptr))}};
  }
  return j.dump();
}

std::string calibration_report_to_json(const CallCalibration& result, const CallCurve& curve) {
  return json{{"measure", measure_json(result.measure)},
              {"maturity", curve.maturity},
              {"strikes", curve.strikes},
              {"market_prices", curve.prices},
              {"model_prices", result.repriced},
              {"reprice_error", result.reprice_error},
              {"calibration",
               json{{"residual", result.calibration.residual},
                    {"iterations", result.calibration.iterations},
                    {"converged", result.calibration.converged}}}}
      .dump();
}

std::vector<std::pair<double, double>> read_csv_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Parse, "cannot open " + path);
  std::vector<std::pair<double, double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double a, b;
    if (ls >> a >> b) {
      rows.push_back({a, b});
    } else if (first) {
      // header line
    } else {
      throw Error(ErrorCode::Parse, "malformed CSV row: " + line);
    }
    first = false;
  }
  if (rows.empty()) throw Error(ErrorCode::Parse, "CSV has no data rows");
  return rows;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Parse, "cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace gapflow::io
