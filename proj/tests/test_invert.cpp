#include <doctest.h>

#include <cmath>
#include <random>

#include "gapflow/chain.hpp"
#include "gapflow/errors.hpp"
#include "gapflow/invert.hpp"
#include "oracles.hpp"

using namespace gapflow;

TEST_CASE("three-point target recovers b = 1/ln 2") {
  TargetLaw target = make_target_law({{-1.0, 0.25}, {0.0, 0.5}, {1.0, 0.25}});
  CalibrationResult res = invert_discrete(target, 0.0, 1e-10, 200);
  CHECK(res.converged);
  CHECK(res.residual <= 1e-10);
  REQUIRE(res.measure.atoms.size() == 3);
  CHECK(res.measure.atoms[0].infinite());
  CHECK(res.measure.atoms[2].infinite());
  CHECK(res.measure.atoms[1].mass == doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-8));
}

TEST_CASE("degenerate targets bypass the solver") {
  TargetLaw single = make_target_law({{0.5, 1.0}});
  CalibrationResult res = invert_discrete(single, 0.5, 1e-9, 200);
  CHECK(res.converged);
  REQUIRE(res.measure.atoms.size() == 1);
  CHECK(res.measure.atoms[0].position == 0.5);
  CHECK(res.measure.atoms[0].infinite());

  TargetLaw pair = make_target_law({{-1.0, 0.75}, {3.0, 0.25}});
  res = invert_discrete(pair, 0.0, 1e-9, 200);
  CHECK(res.converged);
  REQUIRE(res.measure.atoms.size() == 2);
  CHECK(res.measure.atoms[0].infinite());
  CHECK(res.measure.atoms[1].infinite());
}

TEST_CASE("zero-probability points are stripped from the measure") {
  TargetLaw target = make_target_law({{-1.0, 0.25}, {-0.5, 0.0}, {0.0, 0.5}, {1.0, 0.25}});
  CalibrationResult res = invert_discrete(target, 0.0, 1e-9, 200);
  CHECK(res.converged);
  for (const Atom& a : res.measure.atoms) CHECK(a.position != -0.5);
}

TEST_CASE("mean mismatch is rejected") {
  TargetLaw target = make_target_law({{-1.0, 0.5}, {1.0, 0.5}});
  CHECK_THROWS_AS(invert_discrete(target, 0.3, 1e-9, 200), Error);
}

TEST_CASE("jacobian matches the analytic derivative on the symmetric fixture") {
  // p_center = exp(-1/b), so d p_center / d log b = (1/b) exp(-1/b).
  const double b = 1.0 / std::log(2.0);
  std::vector<double> grid{-1.0, 0.0, 1.0};
  auto jac = jacobian_fd({b}, grid, 0.0, 1e-5, 1.0, 1e-13);
  const double expected = std::log(2.0) * 0.5;
  CHECK(jac[1][0] == doctest::Approx(expected).epsilon(1e-6));

  // probability conservation: columns sum to zero
  double colsum = jac[0][0] + jac[1][0] + jac[2][0];
  CHECK(std::fabs(colsum) < 1e-8);
}

TEST_CASE("jacobian columns sum to zero on random instances") {
  std::mt19937_64 gen(31);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 1 + static_cast<int>(gen() % 5);
    auto grid = oracles::random_grid(gen, n);
    auto b = oracles::random_masses(gen, static_cast<std::size_t>(n), 0.1, 10.0);
    auto jac = jacobian_fd(b, grid, 0.0, 1e-5, 1.0, 1e-13);
    for (std::size_t col = 0; col < b.size(); ++col) {
      double s = 0.0;
      for (std::size_t row = 0; row < grid.size(); ++row) s += jac[row][col];
      CHECK(std::fabs(s) < 1e-8);
    }
  }
}

TEST_CASE("central differences converge at second order") {
  const double b = 0.9;
  std::vector<double> grid{-1.0, 0.0, 1.0};
  const double exact = (1.0 / b) * std::exp(-1.0 / b);
  const double err1 =
      std::fabs(jacobian_fd({b}, grid, 0.0, 1e-3, 1.0, 1e-13)[1][0] - exact);
  const double err2 =
      std::fabs(jacobian_fd({b}, grid, 0.0, 2e-3, 1.0, 1e-13)[1][0] - exact);
  CHECK(err2 > 2.5 * err1);  // ~4x for O(h^2)
  CHECK(err2 < 6.0 * err1);
}

TEST_CASE("jacobian validates inputs") {
  std::vector<double> grid{-1.0, 0.0, 1.0};
  CHECK_THROWS_AS(jacobian_fd({1.0}, grid, 0.0, 0.5, 1.0, 1e-13), Error);
  CHECK_THROWS_AS(jacobian_fd({kInf}, grid, 0.0, 1e-5, 1.0, 1e-13), Error);
}

TEST_CASE("round trip: invert the image of random masses") {
  std::mt19937_64 gen(37);
  for (int rep = 0; rep < 12; ++rep) {
    const int n = 1 + static_cast<int>(gen() % 9);
    auto grid = oracles::random_grid(gen, n);
    auto b = oracles::random_masses(gen, static_cast<std::size_t>(n));
    LawAtTime law = forward_G(b, grid, 0.0, 1.0, 1e-13);
    std::vector<WeightedPoint> pts;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      pts.push_back({grid[i], law.probabilities[i]});
    }
    double total = 0.0;
    for (auto& w : pts) total += w.probability;
    for (auto& w : pts) w.probability /= total;
    TargetLaw target = make_target_law(pts);

    CalibrationResult res = invert_discrete(target, target.mean, 1e-9, 200, {});
    CHECK(res.converged);
    CHECK(res.residual <= 1e-8);
  }
}

TEST_CASE("random interior targets are reachable") {
  std::mt19937_64 gen(41);
  for (int rep = 0; rep < 8; ++rep) {
    TargetLaw target = oracles::random_law(gen, 3 + static_cast<int>(gen() % 5), 0.0);
    CalibrationResult res = invert_discrete(target, target.mean, 1e-9, 200, {});
    CHECK(res.converged);
    CHECK(res.residual <= 1e-9);
    // the forward law of the fitted measure has the right mean
    std::vector<double> grid;
    std::vector<double> b;
    for (const Atom& a : res.measure.atoms) grid.push_back(a.position);
    for (std::size_t i = 1; i + 1 < res.measure.atoms.size(); ++i) {
      b.push_back(res.measure.atoms[i].mass);
    }
    LawAtTime law = forward_G(b, grid, target.mean, 1.0, 1e-12);
    CHECK(std::fabs(law.mean() - target.mean) < 1e-9);
  }
}
