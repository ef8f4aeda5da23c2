#include <doctest.h>

#include <cmath>
#include <random>

#include "gapflow/chain.hpp"
#include "gapflow/errors.hpp"
#include "oracles.hpp"

using namespace gapflow;

namespace {

const double kLn2 = std::log(2.0);

SpeedMeasure three_atom(double b) {
  return validate_measure({{{-1.0, kInf}, {0.0, b}, {1.0, kInf}}, false, false});
}

}  // namespace

TEST_CASE("build_chain rates and absorption") {
  GapChain chain = build_chain(three_atom(2.0), 0.0);
  REQUIRE(chain.grid.size() == 3);
  CHECK(chain.absorbing[0]);
  CHECK(chain.absorbing[2]);
  CHECK(!chain.absorbing[1]);
  CHECK(chain.rates_up[1] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(chain.rates_down[1] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(chain.initial[1] == 1.0);

  // martingale balance on a lopsided grid
  SpeedMeasure m = validate_measure({{{-2.0, kInf}, {0.0, 0.7}, {0.5, kInf}}, false, false});
  chain = build_chain(m, 0.0);
  const double up = chain.rates_up[1] * (chain.grid[2] - chain.grid[1]);
  const double down = chain.rates_down[1] * (chain.grid[1] - chain.grid[0]);
  CHECK(up == doctest::Approx(down).epsilon(1e-14));
}

TEST_CASE("build_chain errors") {
  CHECK_THROWS_AS(build_chain(SpeedMeasure{{}, false, false}, 0.0), Error);
  CHECK_THROWS_AS(build_chain(SpeedMeasure{{{0.0, 1.0}}, true, false}, 0.0), Error);
  SpeedMeasure m = validate_measure({{{-1.0, kInf}, {1.0, kInf}}, false, false});
  CHECK_THROWS_AS(build_chain(m, 2.0), Error);
}

TEST_CASE("single absorbing atom is a frozen state") {
  SpeedMeasure m = validate_measure({{{0.5, kInf}}, false, false});
  GapChain chain = build_chain(m, 0.5);
  LawAtTime law = law_at(chain, 1.0, 1e-10);
  REQUIRE(law.grid.size() == 1);
  CHECK(law.probabilities[0] == 1.0);
}

TEST_CASE("three-atom chain has the closed-form law at time 1") {
  // Center holding time is Exp(1/b): p_center = exp(-1/b) = 1/2 at b = 1/ln 2.
  GapChain chain = build_chain(three_atom(1.0 / kLn2), 0.0);
  LawAtTime law = law_at(chain, 1.0, 1e-12);
  CHECK(law.probabilities[0] == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(law.probabilities[1] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(law.probabilities[2] == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("t = 0 returns the initial vector") {
  GapChain chain = build_chain(three_atom(3.0), 0.25);
  LawAtTime law = law_at(chain, 0.0, 1e-10);
  CHECK(law.probabilities[1] == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(law.probabilities[2] == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("uniformization matches a dense matrix exponential") {
  std::mt19937_64 gen(19);
  for (int rep = 0; rep < 25; ++rep) {
    const int n = 1 + static_cast<int>(gen() % 8);
    auto grid = oracles::random_grid(gen, n);
    auto b = oracles::random_masses(gen, static_cast<std::size_t>(n), 0.05, 20.0);
    RawMeasure raw;
    raw.atoms.push_back({grid.front(), kInf});
    for (int i = 0; i < n; ++i) raw.atoms.push_back({grid[static_cast<std::size_t>(i) + 1], b[static_cast<std::size_t>(i)]});
    raw.atoms.push_back({grid.back(), kInf});
    GapChain chain = build_chain(validate_measure(raw), 0.0);
    LawAtTime law = law_at(chain, 1.0, 1e-12);
    auto dense = oracles::dense_law(chain, 1.0);
    for (std::size_t i = 0; i < dense.size(); ++i) {
      CHECK(law.probabilities[i] == doctest::Approx(dense[i]).epsilon(5e-9));
    }
  }
}

TEST_CASE("mean and probability conservation on random fixtures") {
  std::mt19937_64 gen(23);
  for (int rep = 0; rep < 40; ++rep) {
    const int n = 1 + static_cast<int>(gen() % 8);
    auto grid = oracles::random_grid(gen, n);
    auto b = oracles::random_masses(gen, static_cast<std::size_t>(n));
    const double tol = 1e-10;
    LawAtTime law = forward_G(b, grid, 0.0, 1.0, tol);
    double total = 0.0;
    for (double p : law.probabilities) {
      CHECK(p >= 0.0);
      total += p;
    }
    CHECK(std::fabs(total - 1.0) <= law.truncation_error_bound + 1e-12);
    CHECK(std::fabs(law.mean() - 0.0) <= tol + 1e-12);
  }
}

TEST_CASE("forward_G removes zero masses and keeps the full grid") {
  std::vector<double> grid{-1.0, -0.5, 0.5, 1.0};
  LawAtTime law = forward_G({0.0, 2.0}, grid, 0.0, 1.0, 1e-10);
  REQUIRE(law.grid.size() == 4);
  CHECK(law.probabilities[1] == 0.0);
  double total = 0.0;
  for (double p : law.probabilities) total += p;
  CHECK(std::fabs(total - 1.0) <= law.truncation_error_bound + 1e-12);
}

TEST_CASE("interior infinite masses confine the law") {
  std::vector<double> grid{-3.0, -1.0, 1.0, 3.0};
  LawAtTime law = forward_G({kInf, kInf}, grid, 0.0, 1.0, 1e-10);
  CHECK(law.probabilities[0] == 0.0);
  CHECK(law.probabilities[3] == 0.0);
  CHECK(law.probabilities[1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("continuity in the masses") {
  std::vector<double> grid{-1.0, -0.2, 0.4, 1.3};
  std::vector<double> b{0.8, 1.7};
  LawAtTime base = forward_G(b, grid, 0.0, 1.0, 1e-12);
  double prev_diff = 1.0;
  for (double delta : {1e-2, 1e-3, 1e-4}) {
    auto bp = b;
    bp[0] *= 1.0 + delta;
    LawAtTime pert = forward_G(bp, grid, 0.0, 1.0, 1e-12);
    double diff = 0.0;
    for (std::size_t i = 0; i < base.probabilities.size(); ++i) {
      diff = std::max(diff, std::fabs(pert.probabilities[i] - base.probabilities[i]));
    }
    CHECK(diff < prev_diff);
    prev_diff = diff;
  }
  CHECK(prev_diff < 1e-4);
}

TEST_CASE("scaling covariance: c * masses equals horizon t / c") {
  std::vector<double> grid{-1.0, -0.3, 0.2, 1.1};
  std::vector<double> b{0.6, 2.2};

  // power-of-two scale: bit-identical
  std::vector<double> b2{1.2, 4.4};
  LawAtTime lhs = forward_G(b2, grid, 0.0, 1.0, 1e-12);
  LawAtTime rhs = forward_G(b, grid, 0.0, 0.5, 1e-12);
  for (std::size_t i = 0; i < lhs.probabilities.size(); ++i) {
    CHECK(lhs.probabilities[i] == rhs.probabilities[i]);
  }

  // generic scale: equal to rounding
  const double c = 1.37;
  std::vector<double> bc{b[0] * c, b[1] * c};
  lhs = forward_G(bc, grid, 0.0, 1.0, 1e-12);
  rhs = forward_G(b, grid, 0.0, 1.0 / c, 1e-12);
  for (std::size_t i = 0; i < lhs.probabilities.size(); ++i) {
    CHECK(lhs.probabilities[i] == doctest::Approx(rhs.probabilities[i]).epsilon(1e-11));
  }
}

TEST_CASE("large Poisson means are bisected, huge ones rejected") {
  SpeedMeasure stiff = three_atom(1e-5);
  GapChain chain = build_chain(stiff, 0.0);
  // exit rate 1e5; t = 50 puts the one-shot Poisson mean at 5e6 > 1e6
  LawAtTime law = law_at(chain, 50.0, 1e-10);
  double total = 0.0;
  for (double p : law.probabilities) total += p;
  CHECK(std::fabs(total - 1.0) <= law.truncation_error_bound + 1e-12);
  CHECK(law.probabilities[1] < 1e-12);  // long since absorbed
  CHECK(law.probabilities[0] == doctest::Approx(0.5).epsilon(1e-7));

  CHECK_THROWS_AS(law_at(chain, 1e4, 1e-10), Error);  // mean 1e9 > budget
}

TEST_CASE("coarse Lebesgue surrogate approximates the Gaussian") {
  const double h = 0.2;
  RawMeasure raw;
  for (double y = -5.0; y <= 5.0 + 1e-9; y += h) raw.atoms.push_back({y, h});
  GapChain chain = build_chain(validate_measure(raw), 0.0);
  LawAtTime law = law_at(chain, 1.0, 1e-10);
  // Kolmogorov distance to N(0,1) with cells centred at the atoms
  double cdf = 0.0, kolm = 0.0;
  for (std::size_t i = 0; i < law.grid.size(); ++i) {
    cdf += law.probabilities[i];
    const double z = law.grid[i] + 0.5 * h;
    const double phi = 0.5 * std::erfc(-z / std::sqrt(2.0));
    kolm = std::max(kolm, std::fabs(cdf - phi));
  }
  CHECK(kolm < 0.05);
}
