#include <doctest.h>

#include <cmath>
#include <random>

#include "gapflow/chain.hpp"
#include "gapflow/errors.hpp"
#include "gapflow/finance.hpp"

using namespace gapflow;

namespace {

// Piecewise-linear convex curve from a law: exact prices on a strike grid.
CallCurve curve_from_law(const TargetLaw& law, std::vector<double> strikes, double maturity) {
  auto prices = reprice(law, strikes);
  return make_call_curve(std::move(strikes), std::move(prices), maturity);
}

}  // namespace

TEST_CASE("curve validation rejects arbitrage") {
  CHECK_THROWS_AS(make_call_curve({0.0, 1.0}, {1.0, 1.1}, 1.0), Error);       // increasing
  CHECK_THROWS_AS(make_call_curve({0.5, 1.0}, {1.0, 0.5}, 1.0), Error);       // K0 != 0
  CHECK_THROWS_AS(make_call_curve({0.0, 1.0, 2.0}, {2.0, 0.5, 0.4}, 1.0), Error);  // concave kink
  CHECK_THROWS_AS(make_call_curve({0.0, 1.0}, {1.0, 0.5}, -1.0), Error);      // bad maturity
}

TEST_CASE("intrinsic curve implies the deterministic spot") {
  const double x0 = 1.0;
  std::vector<double> strikes{0.0, 0.5, 1.0, 1.5, 2.0};
  std::vector<double> prices;
  for (double k : strikes) prices.push_back(std::max(x0 - k, 0.0));
  TargetLaw law = implied_law(make_call_curve(strikes, prices, 1.0));
  REQUIRE(law.points.size() == 1);
  CHECK(law.points[0].position == doctest::Approx(x0).epsilon(1e-14));
}

TEST_CASE("linear-to-zero curve gives the two-point law") {
  const double x0 = 1.0;
  std::vector<double> strikes{0.0, 0.5, 1.0, 1.5, 2.0};
  std::vector<double> prices;
  for (double k : strikes) prices.push_back(x0 * (1.0 - k / (2.0 * x0)));
  TargetLaw law = implied_law(make_call_curve(strikes, prices, 1.0));
  REQUIRE(law.points.size() == 2);
  CHECK(law.points[0].position == 0.0);
  CHECK(law.points[0].probability == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(law.points[1].position == doctest::Approx(2.0 * x0).epsilon(1e-12));
  CHECK(law.mean == doctest::Approx(x0).epsilon(1e-12));
}

TEST_CASE("positive price at the last strike grows a tail atom") {
  // truncate the linear-to-zero curve before it reaches zero
  const double x0 = 1.0;
  std::vector<double> strikes{0.0, 0.5, 1.0};
  std::vector<double> prices{1.0, 0.75, 0.5};
  TargetLaw law = implied_law(make_call_curve(strikes, prices, 1.0));
  REQUIRE(law.points.size() == 2);
  CHECK(law.points[1].position == doctest::Approx(2.0).epsilon(1e-12));  // K* = 1 + 0.5/0.5
  CHECK(law.mean == doctest::Approx(x0).epsilon(1e-12));
}

TEST_CASE("reprice of a point mass is the intrinsic value") {
  TargetLaw law = make_target_law({{1.0, 1.0}});
  auto prices = reprice(law, {0.0, 0.5, 1.0, 2.0});
  CHECK(prices[0] == doctest::Approx(1.0));
  CHECK(prices[1] == doctest::Approx(0.5));
  CHECK(prices[2] == 0.0);
  CHECK(prices[3] == 0.0);
}

TEST_CASE("implied_law then reprice is the identity on random convex curves") {
  std::mt19937_64 gen(71);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int rep = 0; rep < 30; ++rep) {
    // random law on [0, 4] with a strike grid through the support
    const int k = 2 + static_cast<int>(gen() % 5);
    std::vector<double> pos{0.0};
    for (int i = 0; i < k; ++i) pos.push_back(pos.back() + 0.2 + unif(gen));
    std::vector<double> w(pos.size());
    double total = 0.0;
    for (auto& v : w) {
      v = 0.05 + unif(gen);
      total += v;
    }
    std::vector<WeightedPoint> pts;
    for (std::size_t i = 0; i < pos.size(); ++i) pts.push_back({pos[i], w[i] / total});
    TargetLaw law = make_target_law(pts);

    std::vector<double> strikes{0.0};
    for (std::size_t i = 1; i < pos.size(); ++i) strikes.push_back(pos[i]);
    CallCurve curve = curve_from_law(law, strikes, 1.0);
    TargetLaw implied = implied_law(curve);
    auto back = reprice(implied, strikes);
    for (std::size_t j = 0; j < strikes.size(); ++j) {
      CHECK(back[j] == doctest::Approx(curve.prices[j]).epsilon(1e-10));
    }
  }
}

TEST_CASE("two-point curve calibrates to the endpoint measure") {
  const double x0 = 1.0;
  std::vector<double> strikes{0.0, 0.5, 1.0, 1.5, 2.0};
  std::vector<double> prices;
  for (double k : strikes) prices.push_back(x0 * (1.0 - k / (2.0 * x0)));
  CallCalibration cal = calibrate_calls(make_call_curve(strikes, prices, 1.0), 1e-9);
  CHECK(cal.calibration.converged);
  REQUIRE(cal.measure.atoms.size() == 2);
  CHECK(cal.measure.atoms[0].infinite());
  CHECK(cal.measure.atoms[1].infinite());
  CHECK(cal.reprice_error < 1e-9);
}

TEST_CASE("synthetic curve from a known diffusion round-trips") {
  // forward law of a known measure -> price curve -> calibrate -> reprice
  const double x0 = 2.0;
  SpeedMeasure nu =
      validate_measure({{{0.5, kInf}, {1.5, 1.1}, {2.0, 0.8}, {2.5, 1.4}, {4.0, kInf}}, false, false});
  GapChain chain = build_chain(nu, x0);
  LawAtTime lt = law_at(chain, 1.0, 1e-13);
  std::vector<WeightedPoint> pts;
  for (std::size_t i = 0; i < lt.grid.size(); ++i) {
    if (lt.probabilities[i] > 0.0) pts.push_back({lt.grid[i], lt.probabilities[i]});
  }
  double total = 0.0;
  for (auto& w : pts) total += w.probability;
  for (auto& w : pts) w.probability /= total;
  TargetLaw law = make_target_law(pts);

  std::vector<double> strikes{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
  CallCurve curve = curve_from_law(law, strikes, 1.0);
  CallCalibration cal = calibrate_calls(curve, 1e-9);
  CHECK(cal.calibration.converged);
  CHECK(cal.reprice_error < 1e-6 * x0);
}

TEST_CASE("maturity scaling replays the clock") {
  const double x0 = 1.0;
  std::vector<double> strikes{0.0, 0.5, 1.0, 1.5, 2.0, 2.5};
  TargetLaw law = make_target_law(
      {{0.25, 0.2}, {0.75, 0.3}, {1.0, 0.2}, {1.5, 0.2}, {2.25, 0.1}});
  CHECK(law.mean == doctest::Approx(x0).epsilon(1e-12));
  auto prices = reprice(law, strikes);

  const double T = 2.5;
  CallCalibration scaled = calibrate_calls(make_call_curve(strikes, prices, T), 1e-9);
  CallCalibration unit = calibrate_calls(make_call_curve(strikes, prices, 1.0), 1e-9);
  CHECK(scaled.calibration.converged);
  REQUIRE(scaled.measure.atoms.size() == unit.measure.atoms.size());
  for (std::size_t i = 0; i < scaled.measure.atoms.size(); ++i) {
    const Atom& a = scaled.measure.atoms[i];
    const Atom& b = unit.measure.atoms[i];
    CHECK(a.position == b.position);
    if (!a.infinite()) CHECK(a.mass == doctest::Approx(b.mass * T).epsilon(1e-12));
  }
  // the T-horizon law of the scaled measure equals the 1-horizon law of the
  // unscaled one
  GapChain cs = build_chain(scaled.measure, x0);
  GapChain cu = build_chain(unit.measure, x0);
  LawAtTime ls = law_at(cs, T, 1e-12);
  LawAtTime lu = law_at(cu, 1.0, 1e-12);
  for (std::size_t i = 0; i < ls.probabilities.size(); ++i) {
    CHECK(ls.probabilities[i] == doctest::Approx(lu.probabilities[i]).epsilon(1e-10));
  }
}
