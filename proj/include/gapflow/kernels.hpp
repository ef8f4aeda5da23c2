#pragma once

#include <cstddef>
#include <string>

// Data-parallel primitives behind the transient chain solver. Each kernel has
// a scalar reference implementation and (on x86-64) an AVX2 variant selected
// at runtime. The variants are required to produce bit-identical results: the
// per-element operation order is fixed and FP contraction is disabled in both
// translation units.

namespace gapflow::kernels {

// out[i] = diag[i]*in[i] + lower[i]*in[i-1] + upper[i]*in[i+1]
// lower[0] and upper[n-1] must be 0.
using TridiagApplyFn = void (*)(std::size_t n, const double* diag, const double* lower,
                                const double* upper, const double* in, double* out);

// y[i] += a * x[i]
using AxpyFn = void (*)(std::size_t n, double a, const double* x, double* y);

namespace scalar {
void tridiag_apply(std::size_t n, const double* diag, const double* lower, const double* upper,
                   const double* in, double* out);
void axpy(std::size_t n, double a, const double* x, double* y);
}  // namespace scalar

namespace avx2 {
bool available();
void tridiag_apply(std::size_t n, const double* diag, const double* lower, const double* upper,
                   const double* in, double* out);
void axpy(std::size_t n, double a, const double* x, double* y);
}  // namespace avx2

// Dispatched entry points.
void tridiag_apply(std::size_t n, const double* diag, const double* lower, const double* upper,
                   const double* in, double* out);
void axpy(std::size_t n, double a, const double* x, double* y);

// "scalar" or "avx2"; resolved once on first use.
const std::string& active_backend();

// Order-independent sum (pairwise), used when aggregating across paths.
double pairwise_sum(const double* x, std::size_t n);

}  // namespace gapflow::kernels
