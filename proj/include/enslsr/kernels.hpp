#pragma once

#include <cstddef>
#include <string>

// Distance/dot kernels used by the clustering and nearest-neighbour loops.
// A scalar reference implementation and SIMD variants (AVX2 on x86-64, NEON
// on aarch64) are provided; the active variant is selected once at runtime.
// All variants accumulate in four interleaved lanes and combine them as
// (l0 + l2) + (l1 + l3), so scalar and SIMD results are bit-identical.

namespace enslsr::kernels {

double dot(const double* a, const double* b, std::size_t n);
double sq_l2(const double* a, const double* b, std::size_t n);
double l2(const double* a, const double* b, std::size_t n);

// Index of the row of `pts` (row-major, n_pts x d) closest to `q` in
// Euclidean distance. Ties go to the lowest index.
std::size_t argmin_sq_l2(const double* q, const double* pts, std::size_t n_pts,
                         std::size_t d);

// Reference implementations, exposed for equivalence tests.
double dot_scalar(const double* a, const double* b, std::size_t n);
double sq_l2_scalar(const double* a, const double* b, std::size_t n);

// AVX2 variants; only callable when has_avx2() is true.
bool has_avx2();
double dot_avx2(const double* a, const double* b, std::size_t n);
double sq_l2_avx2(const double* a, const double* b, std::size_t n);

// Name of the variant behind dot()/sq_l2(): "scalar", "avx2" or "neon".
std::string active_backend();

}  // namespace enslsr::kernels
