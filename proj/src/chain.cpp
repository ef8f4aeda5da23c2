#include "gapflow/chain.hpp"

#include <algorithm>
#include <cmath>

#include "gapflow/errors.hpp"
#include "gapflow/kernels.hpp"

namespace gapflow {

double LawAtTime::mean() const {
  long double m = 0.0L;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    m += static_cast<long double>(grid[i]) * static_cast<long double>(probabilities[i]);
  }
  return static_cast<double>(m);
}

GapChain build_chain(const SpeedMeasure& nu, double x0, const ChainOptions& opts) {
  if (!nu.purely_atomic()) {
    throw Error(ErrorCode::NonAtomicMeasure, "chain construction needs a purely atomic measure");
  }
  if (nu.atoms.empty()) throw Error(ErrorCode::EmptyMeasure, "speed measure has no atoms");

  // Stiffness guard: interior atoms with vanishing mass relative to the local
  // gap scale are removed (a vanishing perturbation of the law).
  std::vector<Atom> atoms;
  atoms.reserve(nu.atoms.size());
  const std::size_t m = nu.atoms.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Atom& a = nu.atoms[i];
    if (!a.infinite() && i > 0 && i + 1 < m) {
      const double gap_scale =
          0.5 * (nu.atoms[i + 1].position - nu.atoms[i - 1].position);
      if (a.mass < opts.mass_floor_rel * gap_scale) continue;
    }
    atoms.push_back(a);
  }

  const std::size_t n = atoms.size();
  const bool both_ends_absorb = atoms.front().infinite() && atoms.back().infinite();
  if (both_ends_absorb && (x0 < atoms.front().position || x0 > atoms.back().position)) {
    throw Error(ErrorCode::StartOutsideHull, "start point outside the absorbing hull");
  }

  GapChain chain;
  chain.grid.resize(n);
  chain.rates_up.assign(n, 0.0);
  chain.rates_down.assign(n, 0.0);
  chain.absorbing.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    chain.grid[i] = atoms[i].position;
    if (atoms[i].infinite() || i == 0 || i + 1 == n) {
      chain.absorbing[i] = true;
    } else {
      const double d_minus = atoms[i].position - atoms[i - 1].position;
      const double d_plus = atoms[i + 1].position - atoms[i].position;
      chain.rates_up[i] = 1.0 / (2.0 * atoms[i].mass * d_plus);
      chain.rates_down[i] = 1.0 / (2.0 * atoms[i].mass * d_minus);
    }
  }

  SpeedMeasure trimmed{atoms, false, false};
  TargetLaw split = initial_split(classify_support(trimmed, x0), x0);
  chain.initial.assign(n, 0.0);
  for (const WeightedPoint& p : split.points) {
    auto it = std::lower_bound(chain.grid.begin(), chain.grid.end(), p.position);
    chain.initial[static_cast<std::size_t>(it - chain.grid.begin())] = p.probability;
  }
  return chain;
}

namespace {

// One uniformization pass for Poisson mean lam_t = Lambda * t.
// p is updated in place; returns the truncation bound.
double uniformize(const GapChain& chain, double lambda, double lam_t, double tol,
                  std::vector<double>& p) {
  const std::size_t n = chain.grid.size();

  // Kernel coefficients for the distribution update:
  // p'[i] = diag[i] p[i] + lower[i] p[i-1] + upper[i] p[i+1]
  // where lower[i] = P(i-1 -> i), upper[i] = P(i+1 -> i).
  std::vector<double> diag(n), lower(n, 0.0), upper(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    diag[i] = 1.0 - (chain.rates_up[i] + chain.rates_down[i]) / lambda;
    if (i > 0) lower[i] = chain.rates_up[i - 1] / lambda;
    if (i + 1 < n) upper[i] = chain.rates_down[i + 1] / lambda;
  }

  std::vector<double> acc(n, 0.0), next(n);
  const double log_lam_t = std::log(lam_t);
  long double cum = 0.0L;
  std::size_t k = 0;
  while (true) {
    double w;
    if (lam_t < 600.0) {
      // direct recursion is exact enough and cheap here
      w = std::exp(-lam_t);
      for (std::size_t j = 1; j <= k; ++j) w *= lam_t / static_cast<double>(j);
    } else {
      const double lw = -lam_t + static_cast<double>(k) * log_lam_t -
                        std::lgamma(static_cast<double>(k) + 1.0);
      w = std::exp(lw);
    }
    cum += w;
    if (w > 0.0) kernels::axpy(n, w, p.data(), acc.data());
    const bool tail_small = 1.0 - static_cast<double>(cum) < tol;
    // Past the Poisson bulk the weights decay superexponentially; once they
    // underflow nothing more can accumulate, whatever tol asks for.
    const bool exhausted = w < 1e-300;
    if ((tail_small || exhausted) && static_cast<double>(k) >= lam_t) break;
    kernels::tridiag_apply(n, diag.data(), lower.data(), upper.data(), p.data(), next.data());
    p.swap(next);
    ++k;
  }
  double tail = 1.0 - static_cast<double>(cum);
  if (tail < 0.0) tail = 0.0;
  // Fold the missing Poisson mass onto the last computed power: conserves
  // total probability and the chain mean exactly.
  kernels::axpy(n, tail, p.data(), acc.data());
  p = acc;
  return tail;
}

}  // namespace

LawAtTime law_at(const GapChain& chain, double t, double tol, const ChainOptions& opts) {
  if (!(tol > 0.0) || tol > 1e-3) {
    throw Error(ErrorCode::Validation, "law_at tolerance must lie in (0, 1e-3]");
  }
  if (t < 0.0) throw Error(ErrorCode::Validation, "time must be nonnegative");

  LawAtTime law;
  law.grid = chain.grid;
  law.time = t;
  law.probabilities = chain.initial;

  double lambda = 0.0;
  for (std::size_t i = 0; i < chain.grid.size(); ++i) {
    lambda = std::max(lambda, chain.rates_up[i] + chain.rates_down[i]);
  }
  if (t == 0.0 || lambda == 0.0) return law;

  if (lambda * t > opts.rate_budget) {
    throw Error(ErrorCode::RateOverflow, "max exit rate times horizon exceeds the budget");
  }
  int levels = 0;
  double step_t = t;
  while (lambda * step_t > opts.max_step_mean && levels < opts.max_bisections) {
    step_t *= 0.5;
    ++levels;
  }
  const std::size_t pieces = static_cast<std::size_t>(1) << levels;
  const double piece_tol = tol / static_cast<double>(pieces);
  double bound = 0.0;
  for (std::size_t piece = 0; piece < pieces; ++piece) {
    bound += uniformize(chain, lambda, lambda * step_t, piece_tol, law.probabilities);
  }
  law.truncation_error_bound = bound;
  return law;
}

LawAtTime forward_G(const std::vector<double>& interior_masses, const std::vector<double>& grid,
                    double x0, double t, double tol, const ChainOptions& opts) {
  const std::size_t n = interior_masses.size();
  if (grid.size() != n + 2) {
    throw Error(ErrorCode::Validation, "grid must have two more points than interior masses");
  }
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (!(grid[i] < grid[i + 1])) {
      throw Error(ErrorCode::Validation, "grid must be strictly increasing");
    }
  }
  if (!(x0 > grid.front() && x0 < grid.back())) {
    throw Error(ErrorCode::StartOutsideHull, "start point must lie strictly inside the grid");
  }

  RawMeasure raw;
  raw.atoms.push_back({grid.front(), kInf});
  for (std::size_t i = 0; i < n; ++i) {
    const double b = interior_masses[i];
    if (std::isnan(b)) throw Error(ErrorCode::NegativeMass, "interior mass is NaN");
    if (b < 0.0) throw Error(ErrorCode::NegativeMass, "interior mass is negative");
    if (b > 0.0) raw.atoms.push_back({grid[i + 1], b});
  }
  raw.atoms.push_back({grid.back(), kInf});

  GapChain chain = build_chain(validate_measure(raw), x0, opts);
  LawAtTime sub = law_at(chain, t, tol, opts);

  LawAtTime law;
  law.grid = grid;
  law.time = t;
  law.truncation_error_bound = sub.truncation_error_bound;
  law.probabilities.assign(grid.size(), 0.0);
  std::size_t j = 0;
  for (std::size_t i = 0; i < grid.size() && j < sub.grid.size(); ++i) {
    if (grid[i] == sub.grid[j]) {
      law.probabilities[i] = sub.probabilities[j];
      ++j;
    }
  }
  return law;
}

}  // namespace gapflow
