#include "gapflow/kernels.hpp"

namespace gapflow::kernels::scalar {

void tridiag_apply(std::size_t n, const double* diag, const double* lower, const double* upper,
                   const double* in, double* out) {
  if (n == 0) return;
  if (n == 1) {
    out[0] = diag[0] * in[0];
    return;
  }
  out[0] = diag[0] * in[0] + upper[0] * in[1];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    out[i] = (diag[i] * in[i] + lower[i] * in[i - 1]) + upper[i] * in[i + 1];
  }
  out[n - 1] = diag[n - 1] * in[n - 1] + lower[n - 1] * in[n - 2];
}

void axpy(std::size_t n, double a, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

}  // namespace gapflow::kernels::scalar
