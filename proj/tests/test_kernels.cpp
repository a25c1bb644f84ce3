#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "ballpark/kernels.hpp"
#include "ballpark/rng.hpp"

using namespace ballpark;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-scale, scale);
  return v;
}

}  // namespace

TEST_CASE("scalar dot/axpy basics") {
  std::vector<double> a{1.0, 2.0, 3.0};
  std::vector<double> b{4.0, -5.0, 6.0};
  CHECK(kernels::scalar::dot(a.data(), b.data(), 3) == doctest::Approx(12.0));
  CHECK(kernels::scalar::sq_norm(a.data(), 3) == doctest::Approx(14.0));
  CHECK(kernels::scalar::sum(b.data(), 3) == doctest::Approx(5.0));
  kernels::scalar::axpy(2.0, a.data(), b.data(), 3);
  CHECK(b[0] == doctest::Approx(6.0));
  CHECK(b[1] == doctest::Approx(-1.0));
  CHECK(b[2] == doctest::Approx(12.0));
}

TEST_CASE("sparse_dot gathers the right entries") {
  std::vector<std::uint32_t> idx{1, 4, 7};
  std::vector<double> val{2.0, 3.0, -1.0};
  std::vector<double> dense{0.0, 10.0, 0.0, 0.0, 1.0, 0.0, 0.0, 5.0};
  CHECK(kernels::scalar::sparse_dot(idx.data(), val.data(), 3, dense.data()) ==
        doctest::Approx(20.0 + 3.0 - 5.0));
}

TEST_CASE("avx2 backend matches scalar within reassociation tolerance") {
  if (!kernels::avx2_supported()) {
    MESSAGE("avx2 unavailable; skipping equivalence checks");
    return;
  }
  Rng rng(42);
  for (std::size_t n : {0ul, 1ul, 3ul, 4ul, 7ul, 8ul, 31ul, 257ul, 1024ul}) {
    auto a = random_vec(rng, n, 3.0);
    auto b = random_vec(rng, n, 2.0);
    double tol = 1e-13 * (1.0 + static_cast<double>(n));

    CHECK(kernels::avx2::dot(a.data(), b.data(), n) ==
          doctest::Approx(kernels::scalar::dot(a.data(), b.data(), n)).epsilon(tol));
    CHECK(kernels::avx2::sum(a.data(), n) ==
          doctest::Approx(kernels::scalar::sum(a.data(), n)).epsilon(tol));
    CHECK(kernels::avx2::sq_norm(a.data(), n) ==
          doctest::Approx(kernels::scalar::sq_norm(a.data(), n)).epsilon(tol));

    auto y1 = b, y2 = b;
    kernels::scalar::axpy(0.7, a.data(), y1.data(), n);
    kernels::avx2::axpy(0.7, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-14));

    auto s1 = a, s2 = a;
    kernels::scalar::scale(-1.3, s1.data(), n);
    kernels::avx2::scale(-1.3, s2.data(), n);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(s1[i] == doctest::Approx(s2[i]).epsilon(1e-14));
  }

  // sparse gather against a wide dense vector
  for (std::size_t nnz : {0ul, 1ul, 5ul, 64ul, 201ul}) {
    std::vector<std::uint32_t> idx(nnz);
    std::vector<double> val = random_vec(rng, nnz, 2.0);
    std::vector<double> dense = random_vec(rng, 4096, 1.0);
    std::uint32_t cur = 0;
    for (std::size_t i = 0; i < nnz; ++i) {
      cur += 1 + static_cast<std::uint32_t>(rng.next_below(17));
      idx[i] = cur;
    }
    double tol = 1e-13 * (1.0 + static_cast<double>(nnz));
    CHECK(kernels::avx2::sparse_dot(idx.data(), val.data(), nnz, dense.data()) ==
          doctest::Approx(kernels::scalar::sparse_dot(idx.data(), val.data(), nnz,
                                                      dense.data()))
              .epsilon(tol));
  }
}

TEST_CASE("dispatch honors force_backend") {
  const char* before = kernels::active_backend();
  kernels::force_backend("scalar");
  CHECK(std::string(kernels::active_backend()) == "scalar");
  std::vector<double> a{1.0, 2.0}, b{3.0, 4.0};
  CHECK(kernels::dot(a.data(), b.data(), 2) == doctest::Approx(11.0));
  if (kernels::avx2_supported()) {
    kernels::force_backend("avx2");
    CHECK(std::string(kernels::active_backend()) == "avx2");
    CHECK(kernels::dot(a.data(), b.data(), 2) == doctest::Approx(11.0));
  }
  kernels::force_backend(before);
}
