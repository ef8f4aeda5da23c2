#include "gapflow/approx.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gapflow/errors.hpp"

namespace gapflow {

SampledLaw sampled_from_law(TargetLaw law) {
  SampledLaw s;
  s.declared_mean = law.mean;
  s.declared_variance = law_variance(law);
  s.explicit_law = std::move(law);
  return s;
}

SampledLaw sampled_from_quantiles(std::vector<std::pair<double, double>> table,
                                  std::optional<double> mean, std::optional<double> variance) {
  if (table.size() < 2) throw Error(ErrorCode::Validation, "quantile table needs >= 2 knots");
  for (std::size_t i = 0; i < table.size(); ++i) {
    auto [u, q] = table[i];
    if (!(u > 0.0 && u < 1.0) || std::isnan(q)) {
      throw Error(ErrorCode::Validation, "quantile knots must have u in (0,1) and finite q");
    }
    if (i > 0 && (u <= table[i - 1].first || q < table[i - 1].second)) {
      throw Error(ErrorCode::Validation, "quantile table must be increasing in u, nondecreasing in q");
    }
  }
  SampledLaw s;
  s.quantile_table = std::move(table);
  if (mean) {
    s.declared_mean = *mean;
  } else {
    // exact integral of the piecewise-linear interpolant with constant tails
    long double acc = 0.0L;
    const auto& t = s.quantile_table;
    acc += static_cast<long double>(t.front().second) * t.front().first;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
      acc += 0.5L * (static_cast<long double>(t[i].second) + t[i + 1].second) *
             (t[i + 1].first - t[i].first);
    }
    acc += static_cast<long double>(t.back().second) * (1.0 - t.back().first);
    s.declared_mean = static_cast<double>(acc);
  }
  if (std::isnan(s.declared_mean)) throw Error(ErrorCode::UnknownMean, "mean is not available");
  s.declared_variance = variance;
  return s;
}

namespace {

using CellMasses = std::map<long long, long double>;

void add_linear_piece(CellMasses& cells, int n, double ua, double ub, double qa, double qb) {
  // Mass Leb{u in [ua,ub]} pushed through u -> floor(n*clamp(Q(u),-n,n))/n
  // for the linear segment Q over [ua, ub] from qa to qb (qa <= qb).
  if (ub <= ua) return;
  const double bound = static_cast<double>(n);
  auto u_at = [&](double q) {
    if (qb == qa) return ua;
    return ua + (q - qa) / (qb - qa) * (ub - ua);
  };
  // flats produced by clamping
  if (qa < -bound) {
    const double u_enter = std::min(ub, u_at(-bound));
    cells[-static_cast<long long>(n) * n] += u_enter - ua;
    ua = u_enter;
    qa = -bound;
    if (ua >= ub) return;
  }
  if (qb > bound) {
    const double u_exit = std::max(ua, u_at(bound));
    cells[static_cast<long long>(n) * n] += ub - u_exit;
    ub = u_exit;
    qb = bound;
    if (ua >= ub) return;
  }
  if (qa == qb) {
    cells[static_cast<long long>(std::floor(bound * qa))] += ub - ua;
    return;
  }
  const long long k_lo = static_cast<long long>(std::floor(bound * qa));
  const long long k_hi = static_cast<long long>(std::floor(bound * qb));
  for (long long k = k_lo; k <= k_hi; ++k) {
    const double q_from = std::max(qa, static_cast<double>(k) / n);
    const double q_to = std::min(qb, static_cast<double>(k + 1) / n);
    if (q_to <= q_from) continue;
    const double u_from = (q_from <= qa) ? ua : u_at(q_from);
    const double u_to = (q_to >= qb) ? ub : u_at(q_to);
    if (u_to > u_from) cells[k] += u_to - u_from;
  }
}

}  // namespace

TargetLaw discretize(const SampledLaw& mu, int n) {
  if (n < 1) throw Error(ErrorCode::Validation, "n must be >= 1");
  if (std::isnan(mu.declared_mean)) throw Error(ErrorCode::UnknownMean, "law mean is unknown");

  CellMasses cells;
  if (mu.explicit_law) {
    for (const WeightedPoint& w : mu.explicit_law->points) {
      const double clamped = std::clamp(w.position, -static_cast<double>(n),
                                        static_cast<double>(n));
      cells[static_cast<long long>(std::floor(static_cast<double>(n) * clamped))] +=
          w.probability;
    }
  } else {
    const auto& t = mu.quantile_table;
    add_linear_piece(cells, n, 0.0, t.front().first, t.front().second, t.front().second);
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
      add_linear_piece(cells, n, t[i].first, t[i + 1].first, t[i].second, t[i + 1].second);
    }
    add_linear_piece(cells, n, t.back().first, 1.0, t.back().second, t.back().second);
  }

  long double total = 0.0L;
  for (const auto& [k, m] : cells) total += m;
  long double mean_pp = 0.0L;  // mean of the floored, truncated law
  for (const auto& [k, m] : cells) {
    mean_pp += (static_cast<long double>(k) / n) * (m / total);
  }
  const double shift = static_cast<double>(
      static_cast<long double>(mu.declared_mean) - mean_pp);

  std::vector<WeightedPoint> points;
  points.reserve(cells.size());
  for (const auto& [k, m] : cells) {
    const double p = static_cast<double>(m / total);
    if (p <= 0.0) continue;
    points.push_back({static_cast<double>(k) / n + shift, p});
  }
  return make_target_law(std::move(points));
}

ApproxResult approx_invert(const SampledLaw& mu, double x0, int n, double tol,
                           const InvertOptions& opts) {
  if (std::fabs(mu.declared_mean - x0) > 1e-9) {
    throw Error(ErrorCode::MeanMismatch, "declared mean must equal the start point");
  }
  ApproxResult res;
  res.discretized = discretize(mu, n);
  res.calibration = invert_discrete(res.discretized, x0, tol, opts.max_iter, opts);

  GapChain chain = build_chain(res.calibration.measure, x0, opts.chain);
  LawAtTime law = law_at(chain, 1.0, opts.forward_tol, opts.chain);
  std::vector<WeightedPoint> pts;
  for (std::size_t i = 0; i < law.grid.size(); ++i) {
    if (law.probabilities[i] > 0.0) pts.push_back({law.grid[i], law.probabilities[i]});
  }
  // forward probabilities can be off 1 by the truncation bound; renormalize
  double s = 0.0;
  for (auto& w : pts) s += w.probability;
  for (auto& w : pts) w.probability /= s;
  res.w1_to_discretized = wasserstein1(make_target_law(std::move(pts)), res.discretized);
  return res;
}

double wasserstein1(const TargetLaw& a, const TargetLaw& b) {
  // integral of |F_a - F_b|
  std::vector<double> xs;
  for (const auto& w : a.points) xs.push_back(w.position);
  for (const auto& w : b.points) xs.push_back(w.position);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  double w1 = 0.0;
  double fa = 0.0, fb = 0.0;
  std::size_t ia = 0, ib = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) w1 += std::fabs(fa - fb) * (xs[i] - xs[i - 1]);
    while (ia < a.points.size() && a.points[ia].position == xs[i]) fa += a.points[ia++].probability;
    while (ib < b.points.size() && b.points[ib].position == xs[i]) fb += b.points[ib++].probability;
  }
  return w1;
}

double wasserstein1_quantiles(const TargetLaw& a, const SampledLaw& b, std::size_t grid) {
  // quantile representation: W1 = int_0^1 |Qa(u) - Qb(u)| du, midpoint rule
  const auto& t = b.quantile_table;
  if (t.empty()) {
    if (!b.explicit_law) throw Error(ErrorCode::Validation, "no quantile data");
    return wasserstein1(a, *b.explicit_law);
  }
  auto qb = [&](double u) {
    if (u <= t.front().first) return t.front().second;
    if (u >= t.back().first) return t.back().second;
    auto it = std::lower_bound(t.begin(), t.end(), u,
                               [](const auto& knot, double val) { return knot.first < val; });
    const auto [u1, q1] = *it;
    const auto [u0, q0] = *(it - 1);
    return q0 + (q1 - q0) * (u - u0) / (u1 - u0);
  };
  long double acc = 0.0L;
  std::size_t ia = 0;
  double fa = a.points[0].probability;
  for (std::size_t i = 0; i < grid; ++i) {
    const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(grid);
    while (fa < u && ia + 1 < a.points.size()) fa += a.points[++ia].probability;
    acc += std::fabs(a.points[ia].position - qb(u));
  }
  return static_cast<double>(acc / grid);
}

double law_variance(const TargetLaw& law) {
  long double v = 0.0L;
  for (const auto& w : law.points) {
    const long double d = static_cast<long double>(w.position) - law.mean;
    v += static_cast<long double>(w.probability) * d * d;
  }
  return static_cast<double>(v);
}

}  // namespace gapflow
