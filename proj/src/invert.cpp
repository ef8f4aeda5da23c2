#include "gapflow/invert.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "gapflow/errors.hpp"

namespace gapflow {

namespace {

constexpr double kLogMassClamp = 35.0;

std::vector<double> target_probs(const TargetLaw& law) {
  std::vector<double> p;
  p.reserve(law.points.size());
  for (const WeightedPoint& w : law.points) p.push_back(w.probability);
  return p;
}

struct ForwardProblem {
  std::vector<double> grid;  // stripped support, endpoints absorb
  double x0;
  double t = 1.0;
  double forward_tol;
  ChainOptions chain;

  std::vector<double> law_of(const std::vector<double>& z) const {
    std::vector<double> b(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) b[i] = std::exp(z[i]);
    return forward_G(b, grid, x0, t, forward_tol, chain).probabilities;
  }
};

double inf_norm_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

double norm2_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

struct NewtonState {
  std::vector<double> z;
  std::vector<double> best_z;
  double best_rinf = kInf;
  int iterations = 0;
  std::vector<double> trace;
};

// Damped Gauss-Newton toward a fixed target vector. Returns true when the
// inf-norm residual drops below tol within the iteration budget.
bool newton_to(const ForwardProblem& prob, const std::vector<double>& p, double tol,
               int max_iter, double h_rel, NewtonState& st) {
  const std::size_t k = st.z.size();
  std::vector<double> g = prob.law_of(st.z);
  double rinf = inf_norm_diff(g, p);
  double r2 = norm2_diff(g, p);
  while (st.iterations < max_iter) {
    if (rinf < st.best_rinf) {
      st.best_rinf = rinf;
      st.best_z = st.z;
    }
    if (rinf <= tol) return true;
    ++st.iterations;
    st.trace.push_back(rinf);

    std::vector<double> b(k);
    for (std::size_t i = 0; i < k; ++i) b[i] = std::exp(st.z[i]);
    std::vector<std::vector<double>> jac;
    try {
      jac = jacobian_fd(b, prob.grid, prob.x0, h_rel, prob.t, prob.forward_tol);
    } catch (const Error&) {
      return false;  // iterate too extreme to differentiate; let homotopy take over
    }

    Eigen::MatrixXd J(jac.size(), k);
    Eigen::VectorXd r(jac.size());
    for (std::size_t row = 0; row < jac.size(); ++row) {
      r(static_cast<Eigen::Index>(row)) = g[row] - p[row];
      for (std::size_t col = 0; col < k; ++col) {
        J(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = jac[row][col];
      }
    }
    Eigen::VectorXd delta = J.colPivHouseholderQr().solve(-r);
    double dmax = delta.lpNorm<Eigen::Infinity>();
    if (!std::isfinite(dmax) || dmax == 0.0) return false;
    if (dmax > 4.0) delta *= 4.0 / dmax;

    bool accepted = false;
    for (double alpha = 1.0; alpha >= 1e-6; alpha *= 0.5) {
      std::vector<double> zc(k);
      for (std::size_t i = 0; i < k; ++i) {
        zc[i] = std::clamp(st.z[i] + alpha * delta(static_cast<Eigen::Index>(i)),
                           -kLogMassClamp, kLogMassClamp);
      }
      std::vector<double> gc;
      try {
        gc = prob.law_of(zc);
      } catch (const Error&) {
        continue;  // step left the solvable region, backtrack
      }
      const double r2c = norm2_diff(gc, p);
      if (r2c < r2 * (1.0 - 1e-4 * alpha) || r2c < tol * 1e-2) {
        st.z = std::move(zc);
        g = std::move(gc);
        r2 = r2c;
        rinf = inf_norm_diff(g, p);
        accepted = true;
        break;
      }
    }
    if (!accepted) return false;  // stagnation; caller may switch to homotopy
  }
  if (rinf < st.best_rinf) {
    st.best_rinf = rinf;
    st.best_z = st.z;
  }
  return rinf <= tol;
}

}  // namespace

std::vector<std::vector<double>> jacobian_fd(const std::vector<double>& interior_masses,
                                             const std::vector<double>& grid, double x0,
                                             double h_rel, double t, double forward_tol) {
  if (!(h_rel > 0.0) || h_rel > 1e-2) {
    throw Error(ErrorCode::Validation, "h_rel must lie in (0, 1e-2]");
  }
  const std::size_t k = interior_masses.size();
  for (double b : interior_masses) {
    if (!(b > 0.0) || b == kInf) {
      throw Error(ErrorCode::Validation, "jacobian needs finite positive masses");
    }
  }
  std::vector<std::vector<double>> jac(grid.size(), std::vector<double>(k, 0.0));
  std::vector<double> b = interior_masses;
  for (std::size_t i = 0; i < k; ++i) {
    const double saved = b[i];
    b[i] = saved * std::exp(h_rel);
    auto plus = forward_G(b, grid, x0, t, forward_tol).probabilities;
    b[i] = saved * std::exp(-h_rel);
    auto minus = forward_G(b, grid, x0, t, forward_tol).probabilities;
    b[i] = saved;
    for (std::size_t row = 0; row < grid.size(); ++row) {
      jac[row][i] = (plus[row] - minus[row]) / (2.0 * h_rel);
    }
  }
  return jac;
}

CalibrationResult solve_newton(const TargetLaw& target, double x0, const InvertOptions& opts) {
  const std::size_t m = target.points.size();
  ForwardProblem prob;
  prob.grid.reserve(m);
  for (const WeightedPoint& w : target.points) prob.grid.push_back(w.position);
  prob.x0 = x0;
  prob.forward_tol = opts.forward_tol;
  prob.chain = opts.chain;
  const std::vector<double> p = target_probs(target);
  const std::size_t k = m - 2;

  // Warm start: match each state's holding budget to its target mass.
  NewtonState st;
  st.z.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double d_minus = prob.grid[i + 1] - prob.grid[i];
    const double d_plus = prob.grid[i + 2] - prob.grid[i + 1];
    // Floor the start at exit rate <= 2: much smaller masses decay the state
    // to ~0 probability, where the finite-difference Jacobian is pure noise
    // and the line search cannot move.
    const double floor_b = 0.25 * (1.0 / d_minus + 1.0 / d_plus);
    const double b0 = std::max(p[i + 1] * 0.5 * (d_minus + d_plus), floor_b);
    st.z[i] = std::clamp(std::log(b0), -kLogMassClamp, kLogMassClamp);
  }
  st.best_z = st.z;

  bool ok = newton_to(prob, p, opts.tol, opts.max_iter, opts.fd_h_rel, st);

  if (!ok && st.iterations < opts.max_iter) {
    // Homotopy: walk the target from the currently reachable law to p,
    // starting from the best iterate seen so far.
    st.z = st.best_z;
    std::vector<double> p_from = prob.law_of(st.z);
    double s = 0.0, ds = 0.25;
    int segments = 0;
    while (s < 1.0 && segments < opts.homotopy_max_segments &&
           st.iterations < opts.max_iter) {
      const double s_next = std::min(1.0, s + ds);
      std::vector<double> p_mid(m);
      for (std::size_t i = 0; i < m; ++i) {
        p_mid[i] = (1.0 - s_next) * p_from[i] + s_next * p[i];
      }
      const double seg_tol = (s_next >= 1.0) ? opts.tol : std::max(opts.tol, 1e-7);
      NewtonState seg = st;
      seg.best_rinf = kInf;
      const bool seg_ok =
          newton_to(prob, p_mid, seg_tol, opts.max_iter, opts.fd_h_rel, seg);
      ++segments;
      st.iterations = seg.iterations;
      st.trace = seg.trace;
      if (seg_ok) {
        st.z = seg.z;
        s = s_next;
        ds = std::min(0.5, ds * 2.0);
      } else {
        ds *= 0.5;
        if (ds < 1.0 / 1024.0) break;
      }
    }
    std::vector<double> g = prob.law_of(st.z);
    const double rinf = inf_norm_diff(g, p);
    if (rinf < st.best_rinf) {
      st.best_rinf = rinf;
      st.best_z = st.z;
    }
    ok = st.best_rinf <= opts.tol;
  }

  CalibrationResult result;
  RawMeasure raw;
  raw.atoms.push_back({prob.grid.front(), kInf});
  for (std::size_t i = 0; i < k; ++i) {
    raw.atoms.push_back({prob.grid[i + 1], std::exp(st.best_z[i])});
  }
  raw.atoms.push_back({prob.grid.back(), kInf});
  result.measure = validate_measure(raw);
  result.residual = st.best_rinf == kInf ? inf_norm_diff(prob.law_of(st.best_z), p)
                                         : st.best_rinf;
  result.iterations = st.iterations;
  result.converged = ok;
  result.trace = std::move(st.trace);
  return result;
}

CalibrationResult invert_discrete(const TargetLaw& target, double x0, double tol, int max_iter,
                                  const InvertOptions& opts_in) {
  InvertOptions opts = opts_in;
  opts.tol = tol;
  opts.max_iter = max_iter;
  if (!(tol > 0.0)) throw Error(ErrorCode::Validation, "tolerance must be positive");
  if (target.points.empty()) throw Error(ErrorCode::EmptySupport, "target law has no points");
  if (std::fabs(target.mean - x0) > 1e-9) {
    throw Error(ErrorCode::MeanMismatch, "target mean must equal the start point within 1e-9");
  }
  opts.forward_tol = std::min(opts.forward_tol, tol * 1e-3);
  if (opts.forward_tol <= 0.0) opts.forward_tol = 1e-15;

  // Points with zero probability never carry mass; strip them up front.
  std::vector<WeightedPoint> support;
  for (const WeightedPoint& w : target.points) {
    if (w.probability > 0.0) support.push_back(w);
  }
  if (support.empty()) throw Error(ErrorCode::EmptySupport, "target law has no mass");

  CalibrationResult result;
  if (support.size() == 1) {
    // Mean constraint forces the single point to the start.
    result.measure = validate_measure({{{support.front().position, kInf}}, false, false});
    result.converged = true;
    result.residual = 0.0;
    return result;
  }
  if (support.size() == 2) {
    // The unique two-point law with mean x0 is realized by the initial split.
    RawMeasure raw{{{support.front().position, kInf}, {support.back().position, kInf}},
                   false,
                   false};
    result.measure = validate_measure(raw);
    std::vector<double> grid{support.front().position, support.back().position};
    auto law = forward_G({}, grid, x0, 1.0, opts.forward_tol, opts.chain).probabilities;
    result.residual = std::max(std::fabs(law[0] - support[0].probability),
                               std::fabs(law[1] - support[1].probability));
    result.converged = result.residual <= tol;
    return result;
  }

  TargetLaw stripped = make_target_law(support);
  return solve_newton(stripped, x0, opts);
}

}  // namespace gapflow
