#pragma once

#include <cstddef>
#include <cstdint>

// Dense/sparse arithmetic kernels used by the solvers. Scalar reference
// implementations are always built; an AVX2+FMA variant is selected at
// runtime on CPUs that support it. The two backends are equivalence-tested
// against each other (results may differ by floating-point reassociation
// only). Set BALLPARK_KERNELS=scalar to pin the reference backend.
namespace ballpark::kernels {

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double sq_norm(const double* a, std::size_t n);
double sum(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
// dot of a sparse vector (idx/val, nnz entries) with a dense vector
double sparse_dot(const std::uint32_t* idx, const double* val, std::size_t nnz,
                  const double* dense);
}  // namespace scalar

namespace avx2 {
bool compiled();  // true when this TU was built with AVX2 support
double dot(const double* a, const double* b, std::size_t n);
double sq_norm(const double* a, std::size_t n);
double sum(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
double sparse_dot(const std::uint32_t* idx, const double* val, std::size_t nnz,
                  const double* dense);
}  // namespace avx2

// Dispatched entry points; bound once on first use.
extern double (*dot)(const double*, const double*, std::size_t);
extern double (*sq_norm)(const double*, std::size_t);
extern double (*sum)(const double*, std::size_t);
extern void (*axpy)(double, const double*, double*, std::size_t);
extern void (*scale)(double, double*, std::size_t);
extern double (*sparse_dot)(const std::uint32_t*, const double*, std::size_t,
                            const double*);

bool avx2_supported();             // cpuid check (and compiled in)
const char* active_backend();      // "avx2" | "scalar"
void force_backend(const char* s); // "avx2" | "scalar"; throws if unavailable

}  // namespace ballpark::kernels
