#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gapflow/approx.hpp"
#include "gapflow/chain.hpp"
#include "gapflow/errors.hpp"
#include "gapflow/finance.hpp"
#include "gapflow/invert.hpp"
#include "gapflow/json_io.hpp"
#include "gapflow/kernels.hpp"
#include "gapflow/martingale.hpp"
#include "gapflow/measure.hpp"
#include "gapflow/simulate.hpp"

namespace {

constexpr const char* kVersion = "gapflow 1.0.0 (rate convention 1/(2*b*gap))";

void emit(const std::string& text, const std::string& output_path) {
  if (output_path.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream out(output_path, std::ios::binary);
    if (!out) throw gapflow::Error(gapflow::ErrorCode::Validation, "cannot write " + output_path);
    out << text << "\n";
  }
}

std::optional<gapflow::TailMoment> parse_tail(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (s == "finite") return gapflow::TailMoment::finite;
  if (s == "infinite") return gapflow::TailMoment::infinite;
  throw gapflow::Error(gapflow::ErrorCode::Validation, "tail must be finite or infinite");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gap diffusion toolkit: forward solves, calibration, simulation"};
  app.set_version_flag("--version", kVersion);

  std::string output_path;
  bool no_meta = false;
  app.add_option("-o,--output", output_path, "write JSON here instead of stdout");
  app.add_flag("--no-meta", no_meta, "omit timestamps for byte-stable output");

  double x0 = 0.0, t = 1.0, tol = 1e-9, step = 1e-5, bandwidth = 0.02, maturity = 1.0;
  int max_iter = 200, n_cells = 20;
  std::size_t paths = 100000;
  std::uint64_t seed = 42;
  std::string measure_path, target_path, law_csv, curve_csv, engine = "jump";
  std::string left_tail_s, right_tail_s;

  auto* forward = app.add_subcommand("forward", "law of X_t under a speed measure");
  forward->add_option("--measure", measure_path, "measure JSON file")->required();
  forward->add_option("--x0", x0, "start point")->required();
  forward->add_option("--t", t, "time horizon");
  forward->add_option("--tol", tol, "truncation tolerance");

  auto* invert = app.add_subcommand("invert", "measure matching a finite-support law at time 1");
  invert->add_option("--target", target_path, "target law JSON file")->required();
  invert->add_option("--x0", x0, "start point")->required();
  invert->add_option("--tol", tol, "residual tolerance");
  invert->add_option("--max-iter", max_iter, "iteration budget");

  auto* approx = app.add_subcommand("approx", "discretize a quantile-table law and invert");
  approx->add_option("--law", law_csv, "CSV of u,quantile rows")->required();
  approx->add_option("--x0", x0, "start point (= law mean)")->required();
  approx->add_option("--n", n_cells, "discretization level")->required();
  approx->add_option("--tol", tol, "residual tolerance");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo sampling of X_t");
  simulate->add_option("--measure", measure_path, "measure JSON file")->required();
  simulate->add_option("--x0", x0, "start point")->required();
  simulate->add_option("--t", t, "time horizon");
  simulate->add_option("--engine", engine, "jump | timechange");
  simulate->add_option("--paths", paths, "number of paths");
  simulate->add_option("--seed", seed, "RNG seed");
  simulate->add_option("--step", step, "Euler step (timechange)");
  simulate->add_option("--bandwidth", bandwidth, "local-time bandwidth (timechange)");

  auto* classify = app.add_subcommand("classify", "martingale classification");
  classify->add_option("--measure", measure_path, "measure JSON file")->required();
  classify->add_option("--x0", x0, "start point")->required();
  classify->add_option("--left-tail", left_tail_s, "finite | infinite");
  classify->add_option("--right-tail", right_tail_s, "finite | infinite");

  auto* calls = app.add_subcommand("calibrate-calls", "fit a measure to call prices");
  calls->add_option("--curve", curve_csv, "CSV of strike,price rows")->required();
  calls->add_option("--T", maturity, "maturity");
  calls->add_option("--tol", tol, "residual tolerance");

  app.require_subcommand(1);
  for (CLI::App* sub : {forward, invert, approx, simulate, classify, calls}) {
    sub->fallthrough();
  }
  CLI11_PARSE(app, argc, argv);

  try {
    if (*forward) {
      auto nu = gapflow::io::measure_from_json(gapflow::io::read_file(measure_path));
      auto chain = gapflow::build_chain(nu, x0);
      auto law = gapflow::law_at(chain, t, tol > 1e-3 ? 1e-10 : tol);
      emit(gapflow::io::law_at_time_to_json(law), output_path);
    } else if (*invert) {
      auto target = gapflow::io::law_from_json(gapflow::io::read_file(target_path));
      auto result = gapflow::invert_discrete(target, x0, tol, max_iter);
      emit(gapflow::io::calibration_to_json(result), output_path);
      if (!result.converged) {
        std::cerr << "not converged: residual " << result.residual << "\n";
        return 3;
      }
    } else if (*approx) {
      auto table = gapflow::io::read_csv_pairs(law_csv);
      auto law = gapflow::sampled_from_quantiles(std::move(table));
      auto result = gapflow::approx_invert(law, x0, n_cells, tol);
      nlohmann::json j{
          {"discretized", nlohmann::json::parse(gapflow::io::law_to_json(result.discretized))},
          {"calibration",
           nlohmann::json::parse(gapflow::io::calibration_to_json(result.calibration))},
          {"w1_to_discretized", result.w1_to_discretized}};
      emit(j.dump(), output_path);
      if (!result.calibration.converged) {
        std::cerr << "not converged: residual " << result.calibration.residual << "\n";
        return 3;
      }
    } else if (*simulate) {
      auto nu = gapflow::io::measure_from_json(gapflow::io::read_file(measure_path));
      gapflow::PathBundle bundle;
      if (engine == "jump") {
        bundle = gapflow::simulate_jump(nu, x0, t, paths, seed);
      } else if (engine == "timechange") {
        bundle = gapflow::simulate_timechange(nu, x0, t, paths, step, bandwidth, seed);
      } else {
        throw gapflow::Error(gapflow::ErrorCode::Validation, "engine must be jump or timechange");
      }
      std::vector<double> grid;
      for (const auto& a : nu.atoms) grid.push_back(a.position);
      emit(gapflow::io::bundle_to_json(bundle, grid, !no_meta), output_path);
    } else if (*classify) {
      auto nu = gapflow::io::measure_from_json(gapflow::io::read_file(measure_path));
      auto verdict =
          gapflow::classify_true(nu, x0, parse_tail(left_tail_s), parse_tail(right_tail_s));
      emit(gapflow::io::verdict_to_json(verdict), output_path);
    } else if (*calls) {
      auto rows = gapflow::io::read_csv_pairs(curve_csv);
      std::vector<double> strikes, prices;
      for (auto [k, c] : rows) {
        strikes.push_back(k);
        prices.push_back(c);
      }
      auto curve = gapflow::make_call_curve(std::move(strikes), std::move(prices), maturity);
      auto result = gapflow::calibrate_calls(curve, tol);
      emit(gapflow::io::calibration_report_to_json(result, curve), output_path);
      if (!result.calibration.converged) {
        std::cerr << "not converged: residual " << result.calibration.residual << "\n";
        return 3;
      }
    }
  } catch (const gapflow::Error& e) {
    std::cerr << gapflow::error_code_name(e.code()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
