#include "gapflow/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

#include "gapflow/chain.hpp"
#include "gapflow/errors.hpp"
#include "gapflow/kernels.hpp"
#include "gapflow/rng.hpp"

namespace gapflow {

namespace {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GAPFLOW_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(path_index) for every path. Work is split by contiguous blocks, but
// the per-path RNG streams make the result independent of the split.
template <typename Fn>
void for_each_path(std::size_t n_paths, int threads, Fn fn) {
  if (threads <= 1 || n_paths < 2) {
    for (std::size_t i = 0; i < n_paths; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, n_paths);
  std::vector<std::thread> pool;
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t lo = n_paths * w / workers;
      const std::size_t hi = n_paths * (w + 1) / workers;
      try {
        for (std::size_t i = lo; i < hi && !failed.load(std::memory_order_relaxed); ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::size_t sample_index(const std::vector<double>& probs, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u <= acc) return i;
  }
  return probs.size() - 1;
}

double snap_to_support(const std::vector<Atom>& atoms, double x, double x0) {
  auto it = std::lower_bound(atoms.begin(), atoms.end(), x,
                             [](const Atom& a, double v) { return a.position < v; });
  if (it == atoms.end()) return atoms.back().position;
  if (it == atoms.begin()) return atoms.front().position;
  const double hi = it->position;
  const double lo = (it - 1)->position;
  const double d_hi = hi - x;
  const double d_lo = x - lo;
  if (d_lo < d_hi) return lo;
  if (d_hi < d_lo) return hi;
  return std::fabs(lo - x0) <= std::fabs(hi - x0) ? lo : hi;  // tie toward x0
}

void require_atomic_nonempty(const SpeedMeasure& nu) {
  if (!nu.purely_atomic()) {
    throw Error(ErrorCode::NonAtomicMeasure, "simulation needs a purely atomic measure");
  }
  if (nu.atoms.empty()) throw Error(ErrorCode::EmptyMeasure, "measure has no atoms");
}

}  // namespace

PathBundle simulate_jump(const SpeedMeasure& nu, double x0, double t, std::size_t n_paths,
                         std::uint64_t seed, const SimulateOptions& opts) {
  require_atomic_nonempty(nu);
  if (n_paths < 1) throw Error(ErrorCode::Validation, "n_paths must be >= 1");
  const GapChain chain = build_chain(nu, x0);

  PathBundle out;
  out.seed = seed;
  out.engine = Engine::jump_chain;
  out.n_paths = n_paths;
  out.samples_X1.resize(n_paths);

  for_each_path(n_paths, resolve_threads(opts.threads), [&](std::size_t path) {
    Rng rng(seed, path);
    std::size_t state = sample_index(chain.initial, rng.uniform());
    double remaining = t;
    while (!chain.absorbing[state] && remaining > 0.0) {
      const double exit_rate = chain.rates_up[state] + chain.rates_down[state];
      const double hold = rng.exponential(exit_rate);
      if (hold >= remaining) break;
      remaining -= hold;
      const double p_up = chain.rates_up[state] / exit_rate;
      if (rng.uniform() <= p_up) {
        ++state;
      } else {
        --state;
      }
    }
    out.samples_X1[path] = chain.grid[state];
  });
  return out;
}

PathBundle simulate_timechange(const SpeedMeasure& nu, double x0, double t, std::size_t n_paths,
                               double step, double bandwidth, std::uint64_t seed,
                               const SimulateOptions& opts) {
  require_atomic_nonempty(nu);
  if (n_paths < 1) throw Error(ErrorCode::Validation, "n_paths must be >= 1");
  if (!(step > 0.0) || !(bandwidth > 0.0)) {
    throw Error(ErrorCode::Validation, "step and bandwidth must be positive");
  }

  const SupportClassification cls = classify_support(nu, x0);
  const double barrier_lo = cls.xinf_minus;  // -inf when absent
  const double barrier_hi = cls.xinf_plus;
  const std::vector<Atom>& atoms = nu.atoms;
  const double diam = atoms.back().position - atoms.front().position;
  const double time_cap = opts.time_cap_factor * std::max(diam * diam, 1.0);
  const double sqrt_step = std::sqrt(step);
  const double eps = bandwidth;

  PathBundle out;
  out.seed = seed;
  out.engine = Engine::time_change;
  out.n_paths = n_paths;
  out.step = step;
  out.bandwidth = bandwidth;
  out.samples_X1.resize(n_paths);
  out.samples_A1.resize(n_paths);

  if (cls.x0_in_suppinf) {
    // The clock is already infinite at the start: X freezes at x0.
    std::fill(out.samples_X1.begin(), out.samples_X1.end(), x0);
    std::fill(out.samples_A1.begin(), out.samples_A1.end(), 0.0);
    return out;
  }

  // Gamma rate at position x: sum of b_i/(2 eps) over finite atoms within eps.
  auto gamma_rate = [&](double x) {
    auto lo = std::lower_bound(atoms.begin(), atoms.end(), x - eps,
                               [](const Atom& a, double v) { return a.position <= v; });
    double rate = 0.0;
    for (auto it = lo; it != atoms.end() && it->position < x + eps; ++it) {
      if (!it->infinite()) rate += it->mass;
    }
    return rate / (2.0 * eps);
  };

  std::atomic<std::size_t> retries{0};
  const int stride = opts.retry_limit + 1;

  for_each_path(n_paths, resolve_threads(opts.threads), [&](std::size_t path) {
    for (int attempt = 0;; ++attempt) {
      Rng rng(seed, path * static_cast<std::uint64_t>(stride) + attempt);
      double b = x0;
      double gamma = 0.0;
      double u = 0.0;
      bool done = false;
      while (u < time_cap) {
        const double b_next = b + sqrt_step * rng.normal();
        // Hard barriers at the nearest infinite atoms: crossing freezes the
        // path there (the clock jumps to infinity). A Brownian-bridge test
        // catches excursions between grid times.
        // Crossing probability exp(-2 d0 d1 / step) is negligible beyond a
        // few sqrt(step) of the barrier; skip the test (and its RNG draw)
        // out there so the inner loop stays cheap.
        if (barrier_lo > -kInf) {
          const double d0 = b - barrier_lo, d1 = b_next - barrier_lo;
          if (d1 <= 0.0 || d0 <= 0.0 ||
              (d0 * d1 < 14.0 * step &&
               rng.uniform() <= std::exp(-2.0 * d0 * d1 / step))) {
            out.samples_X1[path] = barrier_lo;
            out.samples_A1[path] = u + step;
            done = true;
            break;
          }
        }
        if (barrier_hi < kInf) {
          const double d0 = barrier_hi - b, d1 = barrier_hi - b_next;
          if (d1 <= 0.0 || d0 <= 0.0 ||
              (d0 * d1 < 14.0 * step &&
               rng.uniform() <= std::exp(-2.0 * d0 * d1 / step))) {
            out.samples_X1[path] = barrier_hi;
            out.samples_A1[path] = u + step;
            done = true;
            break;
          }
        }
        const double dgamma = gamma_rate(b) * step;
        if (gamma + dgamma > t) {
          const double frac = dgamma > 0.0 ? (t - gamma) / dgamma : 1.0;
          const double x_raw = b + frac * (b_next - b);
          out.samples_X1[path] = snap_to_support(atoms, x_raw, x0);
          out.samples_A1[path] = u + frac * step;
          done = true;
          break;
        }
        gamma += dgamma;
        b = b_next;
        u += step;
      }
      if (done) return;
      retries.fetch_add(1, std::memory_order_relaxed);
      if (attempt >= opts.retry_limit) {
        throw Error(ErrorCode::BudgetExceeded, "path exceeded the Brownian time cap");
      }
    }
  });
  out.budget_retries = retries.load();
  return out;
}

std::pair<double, double> estimate_EA1(const PathBundle& bundle) {
  if (bundle.engine != Engine::time_change) {
    throw Error(ErrorCode::WrongEngine, "E A_1 needs the time-change engine");
  }
  const std::size_t n = bundle.samples_A1.size();
  if (n == 0) return {0.0, 0.0};
  const double mean = kernels::pairwise_sum(bundle.samples_A1.data(), n) / static_cast<double>(n);
  if (n == 1) return {mean, 0.0};
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = bundle.samples_A1[i] - mean;
    sq[i] = d * d;
  }
  const double var = kernels::pairwise_sum(sq.data(), n) / static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

std::vector<double> empirical_law(const PathBundle& bundle, const std::vector<double>& grid) {
  std::vector<double> probs(grid.size(), 0.0);
  if (bundle.samples_X1.empty() || grid.empty()) return probs;
  const double w = 1.0 / static_cast<double>(bundle.samples_X1.size());
  for (double x : bundle.samples_X1) {
    auto it = std::lower_bound(grid.begin(), grid.end(), x);
    std::size_t idx;
    if (it == grid.end()) {
      idx = grid.size() - 1;
    } else if (it == grid.begin()) {
      idx = 0;
    } else {
      const std::size_t hi = static_cast<std::size_t>(it - grid.begin());
      idx = (x - grid[hi - 1] <= grid[hi] - x) ? hi - 1 : hi;
    }
    probs[idx] += w;
  }
  return probs;
}

}  // namespace gapflow
