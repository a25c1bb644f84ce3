#include "ballpark/kernels.hpp"

namespace ballpark::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sq_norm(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
  return s;
}

double sum(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

double sparse_dot(const std::uint32_t* idx, const double* val, std::size_t nnz,
                  const double* dense) {
  double s = 0.0;
  for (std::size_t i = 0; i < nnz; ++i) s += val[i] * dense[idx[i]];
  return s;
}

}  // namespace ballpark::kernels::scalar
