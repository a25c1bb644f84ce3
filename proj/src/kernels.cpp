#include "ballpark/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace ballpark::kernels {

double (*dot)(const double*, const double*, std::size_t) = nullptr;
double (*sq_norm)(const double*, std::size_t) = nullptr;
double (*sum)(const double*, std::size_t) = nullptr;
void (*axpy)(double, const double*, double*, std::size_t) = nullptr;
void (*scale)(double, double*, std::size_t) = nullptr;
double (*sparse_dot)(const std::uint32_t*, const double*, std::size_t,
                     const double*) = nullptr;

namespace {

const char* g_backend = "scalar";

void bind_scalar() {
  dot = &scalar::dot;
  sq_norm = &scalar::sq_norm;
  sum = &scalar::sum;
  axpy = &scalar::axpy;
  scale = &scalar::scale;
  sparse_dot = &scalar::sparse_dot;
  g_backend = "scalar";
}

void bind_avx2() {
  dot = &avx2::dot;
  sq_norm = &avx2::sq_norm;
  sum = &avx2::sum;
  axpy = &avx2::axpy;
  scale = &avx2::scale;
  sparse_dot = &avx2::sparse_dot;
  g_backend = "avx2";
}

struct Init {
  Init() {
    const char* env = std::getenv("BALLPARK_KERNELS");
    if (env && std::strcmp(env, "scalar") == 0) {
      bind_scalar();
    } else if (avx2_supported()) {
      bind_avx2();
    } else {
      bind_scalar();
    }
  }
};
const Init g_init;

}  // namespace

bool avx2_supported() {
#if defined(__x86_64__) || defined(_M_X64)
  return avx2::compiled() && __builtin_cpu_supports("avx2") &&
         __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const char* active_backend() { return g_backend; }

void force_backend(const char* s) {
  if (std::strcmp(s, "scalar") == 0) {
    bind_scalar();
  } else if (std::strcmp(s, "avx2") == 0) {
    if (!avx2_supported()) throw std::runtime_error("avx2 backend unavailable");
    bind_avx2();
  } else {
    throw std::runtime_error(std::string("unknown kernel backend: ") + s);
  }
}

}  // namespace ballpark::kernels
