#include "ballpark/kernels.hpp"

#ifdef BALLPARK_BUILD_AVX2
#include <immintrin.h>
#endif

namespace ballpark::kernels::avx2 {

#ifdef BALLPARK_BUILD_AVX2

bool compiled() { return true; }

namespace {
inline double hsum256(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}
}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum256(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sq_norm(const double* a, std::size_t n) { return dot(a, a, n); }

double sum(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double s = hsum256(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= alpha;
}

double sparse_dot(const std::uint32_t* idx, const double* val, std::size_t nnz,
                  const double* dense) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= nnz; i += 4) {
    __m128i vi = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + i));
    __m256d g = _mm256_i32gather_pd(dense, vi, 8);
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(val + i), g, acc);
  }
  double s = hsum256(acc);
  for (; i < nnz; ++i) s += val[i] * dense[idx[i]];
  return s;
}

#else  // BALLPARK_BUILD_AVX2 not defined (non-x86 or old compiler)

bool compiled() { return false; }
double dot(const double* a, const double* b, std::size_t n) { return scalar::dot(a, b, n); }
double sq_norm(const double* a, std::size_t n) { return scalar::sq_norm(a, n); }
double sum(const double* a, std::size_t n) { return scalar::sum(a, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) { scalar::axpy(alpha, x, y, n); }
void scale(double alpha, double* x, std::size_t n) { scalar::scale(alpha, x, n); }
double sparse_dot(const std::uint32_t* idx, const double* val, std::size_t nnz,
                  const double* dense) {
  return scalar::sparse_dot(idx, val, nnz, dense);
}

#endif

}  // namespace ballpark::kernels::avx2
