#include "gapflow/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define GAPFLOW_X86 1
#include <cpuid.h>
#include <immintrin.h>
#endif

namespace gapflow::kernels::avx2 {

bool available() {
#ifdef GAPFLOW_X86
  unsigned int eax, ebx, ecx, edx;
  if (__get_cpuid_count(7, 0, &eax, &ebx, &ecx, &edx)) {
    return (ebx & (1u << 5)) != 0;  // AVX2
  }
#endif
  return false;
}

#ifdef GAPFLOW_X86

void tridiag_apply(std::size_t n, const double* diag, const double* lower, const double* upper,
                   const double* in, double* out) {
  if (n < 6) {
    scalar::tridiag_apply(n, diag, lower, upper, in, out);
    return;
  }
  out[0] = diag[0] * in[0] + upper[0] * in[1];
  std::size_t i = 1;
  // No FMA: the add/mul sequence must match the scalar reference exactly.
  for (; i + 4 < n; i += 4) {
    __m256d d = _mm256_loadu_pd(diag + i);
    __m256d l = _mm256_loadu_pd(lower + i);
    __m256d u = _mm256_loadu_pd(upper + i);
    __m256d c = _mm256_loadu_pd(in + i);
    __m256d p = _mm256_loadu_pd(in + i - 1);
    __m256d q = _mm256_loadu_pd(in + i + 1);
    __m256d acc = _mm256_add_pd(_mm256_mul_pd(d, c), _mm256_mul_pd(l, p));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(u, q));
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i + 1 < n; ++i) {
    out[i] = (diag[i] * in[i] + lower[i] * in[i - 1]) + upper[i] * in[i + 1];
  }
  out[n - 1] = diag[n - 1] * in[n - 1] + lower[n - 1] * in[n - 2];
}

void axpy(std::size_t n, double a, const double* x, double* y) {
  __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d xv = _mm256_loadu_pd(x + i);
    __m256d yv = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(yv, _mm256_mul_pd(av, xv)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

#else

void tridiag_apply(std::size_t n, const double* diag, const double* lower, const double* upper,
                   const double* in, double* out) {
  scalar::tridiag_apply(n, diag, lower, upper, in, out);
}

void axpy(std::size_t n, double a, const double* x, double* y) {
  scalar::axpy(n, a, x, y);
}

#endif

}  // namespace gapflow::kernels::avx2
