#include "gapflow/kernels.hpp"

#include <cstdlib>

namespace gapflow::kernels {

namespace {

struct Dispatch {
  TridiagApplyFn tridiag;
  AxpyFn axpy;
  std::string backend;

  Dispatch() {
    bool use_avx2 = avx2::available();
    // GAPFLOW_SIMD=scalar forces the reference path.
    if (const char* env = std::getenv("GAPFLOW_SIMD")) {
      if (std::string(env) == "scalar") use_avx2 = false;
    }
    if (use_avx2) {
      tridiag = &avx2::tridiag_apply;
      axpy = &avx2::axpy;
      backend = "avx2";
    } else {
      tridiag = &scalar::tridiag_apply;
      axpy = &scalar::axpy;
      backend = "scalar";
    }
  }
};

const Dispatch& dispatch() {
  static const Dispatch d;
  return d;
}

}  // namespace

void tridiag_apply(std::size_t n, const double* diag, const double* lower, const double* upper,
                   const double* in, double* out) {
  dispatch().tridiag(n, diag, lower, upper, in, out);
}

void axpy(std::size_t n, double a, const double* x, double* y) {
  dispatch().axpy(n, a, x, y);
}

const std::string& active_backend() { return dispatch().backend; }

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

}  // namespace gapflow::kernels
