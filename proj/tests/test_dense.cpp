#include <doctest.h>

#include <omp.h>
#include <random>

#include "specmd/dense.hpp"

using namespace specmd;

namespace {

ZMat random_matrix(std::size_t n, unsigned seed, double diag_boost = 0.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ZMat a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = cplx(dist(rng), dist(rng));
  for (std::size_t i = 0; i < n; ++i) a(i, i) += diag_boost;
  return a;
}

ZVec random_vector(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ZVec x(n);
  for (auto& v : x) v = cplx(dist(rng), dist(rng));
  return x;
}

double max_abs_diff(const ZVec& a, const ZVec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("matvec matches the serial reference bitwise") {
  const std::size_t n = 257;
  const ZMat a = random_matrix(n, 7);
  const ZVec x = random_vector(n, 11);
  ZVec y1(n), y2(n);
  kernels::matvec(a, x, y1);
  kernels::serial::matvec(a, x, y2);
  for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == y2[i]);
}

TEST_CASE("matvec is independent of the thread count") {
  const std::size_t n = 301;
  const ZMat a = random_matrix(n, 3);
  const ZVec x = random_vector(n, 5);
  ZVec y1(n), y2(n);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  kernels::matvec(a, x, y1);
  omp_set_num_threads(saved > 1 ? saved : 2);
  kernels::matvec(a, x, y2);
  omp_set_num_threads(saved);
  for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == y2[i]);
}

TEST_CASE("lu solve recovers a constructed solution") {
  for (std::size_t n : {1u, 2u, 17u, 150u, 331u}) {
    const ZMat a = random_matrix(n, 23 + static_cast<unsigned>(n), 4.0);
    const ZVec xtrue = random_vector(n, 41 + static_cast<unsigned>(n));
    ZVec b(n);
    kernels::serial::matvec(a, xtrue, b);
    const kernels::Lu f = kernels::lu_factor(a);
    kernels::lu_solve_in_place(f, b);
    CHECK(max_abs_diff(b, xtrue) < 1e-11);
  }
}

TEST_CASE("omp and serial lu agree") {
  const std::size_t n = 220;
  const ZMat a = random_matrix(n, 2, 3.0);
  const ZVec rhs = random_vector(n, 9);

  const kernels::Lu f1 = kernels::lu_factor(a);
  const kernels::Lu f2 = kernels::serial::lu_factor(a);
  for (std::size_t i = 0; i < n; ++i) CHECK(f1.piv[i] == f2.piv[i]);

  ZVec b1 = rhs, b2 = rhs;
  kernels::lu_solve_in_place(f1, b1);
  kernels::serial::lu_solve_in_place(f2, b2);
  CHECK(max_abs_diff(b1, b2) < 1e-12);
}

TEST_CASE("lu rejects a singular matrix") {
  ZMat a(3, 3, cplx(0.0, 0.0));
  a(0, 1) = 1.0;
  a(1, 2) = 1.0;  // column 0 identically zero
  CHECK_THROWS_AS(kernels::lu_factor(a), SingularMatrix);
}

TEST_CASE("real matmul is exact on small integer matrices") {
  DMat a(2, 2), b(2, 2);
  a(0, 0) = 1; a(0, 1) = 2; a(1, 0) = 3; a(1, 1) = 4;
  b(0, 0) = 5; b(0, 1) = 6; b(1, 0) = 7; b(1, 1) = 8;
  const DMat c = matmul(a, b);
  CHECK(c(0, 0) == 19);
  CHECK(c(0, 1) == 22);
  CHECK(c(1, 0) == 43);
  CHECK(c(1, 1) == 50);
}
