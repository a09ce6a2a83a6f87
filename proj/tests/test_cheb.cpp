#include <doctest.h>

#include <cmath>
#include <random>

#include "specmd/cheb.hpp"

using namespace specmd;

namespace {

ZVec to_z(const std::vector<double>& v) {
  ZVec z(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) z[i] = v[i];
  return z;
}

double max_abs(const ZVec& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("collocation points: exact values and ordering") {
  CHECK_THROWS_AS(collocation_points(0), std::invalid_argument);

  const ChebGrid g2 = collocation_points(2);
  CHECK(g2.points[0] == 1.0);
  CHECK(g2.points[1] == 0.0);
  CHECK(g2.points[2] == -1.0);

  const ChebGrid g4 = collocation_points(4);
  const double s = std::sqrt(2.0) / 2.0;
  CHECK(g4.points[0] == 1.0);
  CHECK(g4.points[1] == doctest::Approx(s).epsilon(1e-15));
  CHECK(g4.points[2] == 0.0);
  CHECK(g4.points[3] == doctest::Approx(-s).epsilon(1e-15));
  CHECK(g4.points[4] == -1.0);

  const ChebGrid g = collocation_points(120);
  CHECK(g.points.size() == 121);
  CHECK(g.points.front() == 1.0);
  CHECK(g.points.back() == -1.0);
  for (std::size_t j = 1; j < g.points.size(); ++j) CHECK(g.points[j] < g.points[j - 1]);
  for (int j = 0; j <= 120; ++j)
    CHECK(g.points[j] == doctest::Approx(std::cos(j * M_PI / 120.0)).epsilon(1e-14));
}

TEST_CASE("diff matrix: N=1 closed form and constant annihilation") {
  const DiffMatrix d1 = diff_matrix(1);
  CHECK(d1.entries(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(d1.entries(0, 1) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(d1.entries(1, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(d1.entries(1, 1) == doctest::Approx(-0.5).epsilon(1e-15));

  for (int n : {4, 17, 60, 120}) {
    const DiffMatrix d = diff_matrix(n);
    // entries grow like N^2, so re-summing a constructed-to-cancel row
    // carries O(N^2 eps) rounding
    const double tol = 1e-13 * std::max(1.0, n * n / 400.0);
    for (int i = 0; i <= n; ++i) {
      double rowsum = 0.0;
      for (int j = 0; j <= n; ++j) rowsum += d.entries(i, j);
      CHECK(std::abs(rowsum) < tol);
    }
  }
}

TEST_CASE("diff matrix: polynomial exactness") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int n : {3, 8, 24, 60, 121}) {
    const ChebGrid g = collocation_points(n);
    const DiffMatrix d = diff_matrix(n);
    std::vector<double> coeff(n + 1);
    for (auto& c : coeff) c = dist(rng);
    ZVec f(n + 1), fp(n + 1);
    for (int j = 0; j <= n; ++j) {
      double v = 0.0, dv = 0.0, p = 1.0;
      for (int k = 0; k <= n; ++k) {
        v += coeff[k] * p;
        if (k < n) dv += coeff[k + 1] * (k + 1) * p;
        p *= g.points[j];
      }
      f[j] = v;
      fp[j] = dv;
    }
    ZVec df(n + 1);
    kernels::matvec_real(d.entries, f, df);
    const double tol = 1e-10 * std::max(1.0, (n / 60.0) * (n / 60.0));
    for (int j = 0; j <= n; ++j) CHECK(std::abs(df[j] - fp[j]) < tol);
  }

  // D^2 applied to l^3 equals 6 l
  for (int n : {3, 5, 12}) {
    const ChebGrid g = collocation_points(n);
    const DiffMatrix d = diff_matrix(n);
    const DMat d2 = matmul(d.entries, d.entries);
    ZVec f(n + 1), out(n + 1);
    for (int j = 0; j <= n; ++j) f[j] = g.points[j] * g.points[j] * g.points[j];
    kernels::matvec_real(d2, f, out);
    for (int j = 0; j <= n; ++j)
      CHECK(std::abs(out[j] - 6.0 * g.points[j]) < 1e-11);
  }
}

TEST_CASE("transforms: basis pick-out, constants, round trip") {
  const int n = 5;
  const ChebTransform tf(n);
  const ChebGrid g = collocation_points(n);

  ZVec t3(n + 1);
  for (int j = 0; j <= n; ++j) t3[j] = std::cos(3.0 * std::acos(std::min(1.0, std::max(-1.0, g.points[j]))));
  const ZVec a = tf.to_coefficients(t3);
  for (int k = 0; k <= n; ++k)
    CHECK(std::abs(a[k] - (k == 3 ? 1.0 : 0.0)) < 1e-14);

  ZVec c(n + 1, cplx(2.5, -1.0));
  const ZVec ac = tf.to_coefficients(c);
  CHECK(std::abs(ac[0] - cplx(2.5, -1.0)) < 1e-14);
  for (int k = 1; k <= n; ++k) CHECK(std::abs(ac[k]) < 1e-14);

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const int m = 40;
  const ChebTransform tf2(m);
  ZVec f(m + 1);
  for (auto& v : f) v = cplx(dist(rng), dist(rng));
  const ZVec back = tf2.from_coefficients(tf2.to_coefficients(f));
  for (int j = 0; j <= m; ++j) CHECK(std::abs(back[j] - f[j]) < 1e-13);
}

TEST_CASE("transforms: exp coefficients match the Bessel expansion") {
  const int n = 20;
  const ChebTransform tf(n);
  const ChebGrid g = collocation_points(n);
  ZVec f(n + 1);
  for (int j = 0; j <= n; ++j) f[j] = std::exp(g.points[j]);
  const ZVec a = tf.to_coefficients(f);
  // exp(l) = I_0(1) + 2 sum_k I_k(1) T_k(l)
  for (int k = 0; k <= n; ++k) {
    const double exact = (k == 0 ? 1.0 : 2.0) * std::cyl_bessel_i(k, 1.0);
    CHECK(std::abs(a[k] - exact) < 1e-14);
  }
  CHECK(std::abs(a[n]) < 1e-13);
}

TEST_CASE("spectral decay of an analytic function") {
  const int n = 60;
  const ChebTransform tf(n);
  const ChebGrid g = collocation_points(n);
  ZVec f(n + 1);
  for (int j = 0; j <= n; ++j) f[j] = 1.0 / (2.0 + g.points[j]);
  const ZVec a = tf.to_coefficients(f);
  CHECK(std::abs(a[n]) / max_abs(a) < 1e-10);
}

TEST_CASE("clenshaw-curtis: exactness and classic values") {
  const auto w2 = clenshaw_curtis_weights(2);
  CHECK(w2[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(w2[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(w2[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  const ChebGrid g2 = collocation_points(2);
  ZVec sq(3);
  for (int j = 0; j <= 2; ++j) sq[j] = g2.points[j] * g2.points[j];
  CHECK(std::abs(clenshaw_curtis(sq, w2) - 2.0 / 3.0) < 1e-14);

  for (int n : {2, 9, 20, 64}) {
    const auto w = clenshaw_curtis_weights(n);
    double sum = 0.0;
    for (double v : w) {
      CHECK(v > 0.0);
      sum += v;
    }
    CHECK(std::abs(sum - 2.0) < 1e-13);

    ZVec ones(n + 1, cplx(1.0, 0.0));
    CHECK(std::abs(clenshaw_curtis(ones, w) - 2.0) < 1e-13);
  }

  const int n = 20;
  const ChebGrid g = collocation_points(n);
  const auto w = clenshaw_curtis_weights(n);
  ZVec f(n + 1);
  for (int j = 0; j <= n; ++j) f[j] = std::exp(g.points[j]);
  const double exact = std::exp(1.0) - std::exp(-1.0);
  CHECK(std::abs(clenshaw_curtis(f, w) - exact) < 1e-13);
}

TEST_CASE("quadrature-derivative duality") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const int n = 16;
  const ChebGrid g = collocation_points(n);
  const DiffMatrix d = diff_matrix(n);
  const auto w = clenshaw_curtis_weights(n);
  std::vector<double> coeff(n);  // degree <= n-1
  for (auto& c : coeff) c = dist(rng);
  ZVec f(n + 1);
  for (int j = 0; j <= n; ++j) {
    double v = 0.0, p = 1.0;
    for (int k = 0; k < n; ++k) {
      v += coeff[k] * p;
      p *= g.points[j];
    }
    f[j] = v;
  }
  ZVec df(n + 1);
  kernels::matvec_real(d.entries, f, df);
  CHECK(std::abs(clenshaw_curtis(df, w) - (f[0] - f[n])) < 1e-12);
}

TEST_CASE("divide by factor: pinned examples") {
  // f = l + 1, divide by (l + 1)
  ZVec a = to_z({1.0, 1.0, 0.0, 0.0, 0.0, 0.0});
  double residue = -1.0;
  ZVec b = divide_by_factor(a, +1, &residue);
  CHECK(residue < 1e-15);
  CHECK(std::abs(b[0] - 1.0) < 1e-14);
  for (std::size_t k = 1; k < b.size(); ++k) CHECK(std::abs(b[k]) < 1e-14);

  // f = (l - 1) T_1 = T_2/2 - T_1 + T_0/2, divide by (l - 1)
  a = to_z({0.5, -1.0, 0.5, 0.0});
  b = divide_by_factor(a, -1, &residue);
  CHECK(residue < 1e-15);
  CHECK(std::abs(b[0]) < 1e-14);
  CHECK(std::abs(b[1] - 1.0) < 1e-14);
  CHECK(std::abs(b[2]) < 1e-14);
}

TEST_CASE("divide by factor inverts multiplication") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int sign : {+1, -1}) {
    const int n = 24;
    ZVec b(n + 1);
    for (auto& v : b) v = cplx(dist(rng), dist(rng));
    const ZVec a = multiply_by_factor(b, sign);
    const ZVec b2 = divide_by_factor(a, sign);
    REQUIRE(b2.size() == b.size() + 1);
    for (int k = 0; k <= n; ++k) CHECK(std::abs(b2[k] - b[k]) < 1e-12);
    CHECK(std::abs(b2[n + 1]) < 1e-12);
  }
}

TEST_CASE("divide by factor subtracts the boundary residue") {
  // f = 1 is not divisible by (l + 1); the residue is the value at l = -1
  ZVec a = to_z({1.0, 0.0, 0.0});
  double residue = 0.0;
  const ZVec b = divide_by_factor(a, +1, &residue);
  CHECK(residue == doctest::Approx(1.0));
  for (const auto& v : b) CHECK(std::abs(v) < 1e-14);
}
