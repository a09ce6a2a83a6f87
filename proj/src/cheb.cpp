#include "specmd/cheb.hpp"

#include <cmath>
#include <stdexcept>

namespace specmd {

namespace {

void check_order(int n) {
  if (n < 1) throw std::invalid_argument("chebyshev order must be >= 1");
}

double endpoint_weight(int j, int n) { return (j == 0 || j == n) ? 2.0 : 1.0; }

// cos(pi * j * m / n) with exact integer argument reduction
double cos_pi_frac(long jm, int n) {
  const long r = jm % (2L * n);
  return std::cos(M_PI * static_cast<double>(r) / static_cast<double>(n));
}

}  // namespace

ChebGrid collocation_points(int n_order) {
  check_order(n_order);
  std::vector<double> p(n_order + 1);
  // sin form of cos(j pi / N): symmetric around 0, endpoints exactly +-1
  for (int j = 0; j <= n_order; ++j)
    p[j] = std::sin(M_PI * (n_order - 2.0 * j) / (2.0 * n_order));
  return ChebGrid{n_order, std::move(p)};
}

DiffMatrix diff_matrix(int n_order) {
  check_order(n_order);
  const int n = n_order;
  DMat d(n + 1, n + 1, 0.0);
  for (int i = 0; i <= n; ++i) {
    double rowsum = 0.0;
    for (int j = 0; j <= n; ++j) {
      if (i == j) continue;
      // l_i - l_j = 2 sin((i+j)pi/2N) sin((j-i)pi/2N)
      const double diff = 2.0 * std::sin(M_PI * (i + j) / (2.0 * n)) *
                          std::sin(M_PI * (j - i) / (2.0 * n));
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      const double v = sign * endpoint_weight(i, n) / (endpoint_weight(j, n) * diff);
      d(i, j) = v;
      rowsum += v;
    }
    d(i, i) = -rowsum;
  }
  return DiffMatrix{n, std::move(d)};
}

ChebTransform::ChebTransform(int n_order) : n_(n_order), fwd_(0, 0), bwd_(0, 0) {
  check_order(n_order);
  const int n = n_;
  fwd_ = DMat(n + 1, n + 1);
  bwd_ = DMat(n + 1, n + 1);
  for (int m = 0; m <= n; ++m) {
    const double pm = 1.0 / endpoint_weight(m, n);
    for (int j = 0; j <= n; ++j) {
      const double c = cos_pi_frac(static_cast<long>(m) * j, n);
      bwd_(j, m) = c;
      fwd_(m, j) = (2.0 / n) * pm * (1.0 / endpoint_weight(j, n)) * c;
    }
  }
}

void ChebTransform::to_coefficients(std::span<const cplx> values, std::span<cplx> coeffs) const {
  kernels::matvec_real(fwd_, values, coeffs);
}

void ChebTransform::from_coefficients(std::span<const cplx> coeffs, std::span<cplx> values) const {
  kernels::matvec_real(bwd_, coeffs, values);
}

ZVec ChebTransform::to_coefficients(std::span<const cplx> values) const {
  ZVec out(values.size());
  to_coefficients(values, out);
  return out;
}

ZVec ChebTransform::from_coefficients(std::span<const cplx> coeffs) const {
  ZVec out(coeffs.size());
  from_coefficients(coeffs, out);
  return out;
}

std::vector<double> clenshaw_curtis_weights(int n_order) {
  check_order(n_order);
  const int n = n_order;
  std::vector<double> w(n + 1, 0.0);
  for (int j = 0; j <= n; ++j) {
    double acc = 0.0;
    for (int m = 0; m <= n; m += 2) {
      const double moment = 2.0 / (1.0 - static_cast<double>(m) * m);
      const double fm = (2.0 / n) / (endpoint_weight(m, n) * endpoint_weight(j, n));
      acc += moment * fm * cos_pi_frac(static_cast<long>(m) * j, n);
    }
    w[j] = acc;
  }
  return w;
}

cplx clenshaw_curtis(std::span<const cplx> values, std::span<const double> weights) {
  if (values.size() != weights.size())
    throw std::invalid_argument("clenshaw_curtis: length mismatch");
  cplx acc(0.0, 0.0);
  for (std::size_t j = 0; j < values.size(); ++j) acc += weights[j] * values[j];
  return acc;
}

ZVec divide_by_factor(std::span<const cplx> a, int sign, double* residue) {
  if (a.empty()) throw std::invalid_argument("divide_by_factor: empty input");
  if (sign != 1 && sign != -1) throw std::invalid_argument("divide_by_factor: sign must be +-1");
  const int n = static_cast<int>(a.size()) - 1;
  const double s = static_cast<double>(sign);
  // boundary value at l = -sign: T_n(-sign) = (-sign)^n
  cplx bound(0.0, 0.0);
  double flip = 1.0;
  for (int k = 0; k <= n; ++k) {
    bound += flip * a[k];
    flip *= -s;
  }
  if (residue) *residue = std::abs(bound);
  ZVec at(a.begin(), a.end());
  at[0] -= bound;

  ZVec b(n + 1, cplx(0.0, 0.0));
  if (n == 0) return b;
  // a_n = b_{n-1}/2 + s b_n + b_{n+1}/2 solved downward with b_N = 0
  b[n] = cplx(0.0, 0.0);
  if (n >= 2) {
    b[n - 1] = 2.0 * at[n];
    for (int k = n - 1; k >= 2; --k) b[k - 1] = 2.0 * (at[k] - s * b[k]) - b[k + 1];
    b[0] = at[1] - s * b[1] - 0.5 * b[2];
  } else {
    b[0] = at[1];  // a_1 = b_0 when N = 1
  }
  return b;
}

ZVec differentiate_coefficients(std::span<const cplx> a) {
  if (a.empty()) throw std::invalid_argument("differentiate_coefficients: empty input");
  const int n = static_cast<int>(a.size()) - 1;
  ZVec b(n + 1, cplx(0.0, 0.0));
  if (n == 0) return b;
  b[n - 1] = 2.0 * static_cast<double>(n) * a[n];
  for (int k = n - 1; k >= 1; --k)
    b[k - 1] = (k + 1 <= n ? b[k + 1] : cplx(0.0, 0.0)) + 2.0 * static_cast<double>(k) * a[k];
  b[0] *= 0.5;
  return b;
}

ZVec multiply_by_factor(std::span<const cplx> b, int sign) {
  if (b.empty()) throw std::invalid_argument("multiply_by_factor: empty input");
  const int n = static_cast<int>(b.size()) - 1;
  const double s = static_cast<double>(sign);
  ZVec a(n + 2, cplx(0.0, 0.0));
  auto get = [&](int k) { return (k >= 0 && k <= n) ? b[k] : cplx(0.0, 0.0); };
  a[0] = s * get(0) + 0.5 * get(1);
  a[1] = get(0) + s * get(1) + 0.5 * get(2);
  for (int k = 2; k <= n + 1; ++k) a[k] = 0.5 * get(k - 1) + s * get(k) + 0.5 * get(k + 1);
  return a;
}

}  // namespace specmd
