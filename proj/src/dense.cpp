#include "specmd/dense.hpp"

#include <algorithm>
#include <cmath>

namespace specmd {

DMat matmul(const DMat& a, const DMat& b) {
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  DMat c(n, m, 0.0);
#pragma omp parallel for schedule(static) if (n > 63)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    double* ci = c.row(i);
    const double* ai = a.row(i);
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = ai[p];
      const double* bp = b.row(p);
      for (std::size_t j = 0; j < m; ++j) ci[j] += aip * bp[j];
    }
  }
  return c;
}

ZMat to_complex(const DMat& a) {
  ZMat c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j);
  return c;
}

namespace kernels {

namespace {

inline void row_dot(const cplx* arow, const cplx* x, std::size_t m, cplx& out) {
  const double* a = reinterpret_cast<const double*>(arow);
  const double* v = reinterpret_cast<const double*>(x);
  double re = 0.0, im = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double ar = a[2 * j], ai = a[2 * j + 1];
    const double xr = v[2 * j], xi = v[2 * j + 1];
    re += ar * xr - ai * xi;
    im += ar * xi + ai * xr;
  }
  out = cplx(re, im);
}

// b[lo:hi) -= A[lo:hi, js:je) * x[js:je)
inline void block_update(const ZMat& a, std::size_t js, std::size_t je, std::size_t lo,
                         std::size_t hi, cplx* b, bool parallel) {
#pragma omp parallel for schedule(static) if (parallel)
  for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(lo); i < static_cast<std::ptrdiff_t>(hi);
       ++i) {
    const double* arow = reinterpret_cast<const double*>(a.row(i));
    const double* v = reinterpret_cast<const double*>(b);
    double re = 0.0, im = 0.0;
    for (std::size_t j = js; j < je; ++j) {
      const double ar = arow[2 * j], ai = arow[2 * j + 1];
      const double xr = v[2 * j], xi = v[2 * j + 1];
      re += ar * xr - ai * xi;
      im += ar * xi + ai * xr;
    }
    b[i] -= cplx(re, im);
  }
}

Lu lu_factor_impl(ZMat a, bool parallel) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("lu_factor: matrix not square");
  std::vector<int> piv(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::norm(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::norm(a(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    piv[k] = static_cast<int>(p);
    if (p != k) std::swap_ranges(a.row(k), a.row(k) + n, a.row(p));
    const cplx pivot = a(k, k);
    if (pivot == cplx(0.0, 0.0)) throw SingularMatrix("lu_factor: exact zero pivot");
    const cplx inv = 1.0 / pivot;
    for (std::size_t i = k + 1; i < n; ++i) a(i, k) *= inv;
#pragma omp parallel for schedule(static) if (parallel && n - k > 96)
    for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(k) + 1;
         i < static_cast<std::ptrdiff_t>(n); ++i) {
      const cplx lik = a(i, k);
      if (lik == cplx(0.0, 0.0)) continue;
      const double lr = lik.real(), li = lik.imag();
      double* ri = reinterpret_cast<double*>(a.row(i));
      const double* rk = reinterpret_cast<const double*>(a.row(k));
      for (std::size_t j = k + 1; j < n; ++j) {
        const double ur = rk[2 * j], ui = rk[2 * j + 1];
        ri[2 * j] -= lr * ur - li * ui;
        ri[2 * j + 1] -= lr * ui + li * ur;
      }
    }
  }
  return Lu{std::move(a), std::move(piv)};
}

constexpr std::size_t kBlock = 48;

}  // namespace

void matvec(const ZMat& a, std::span<const cplx> x, std::span<cplx> y) {
  const std::size_t n = a.rows(), m = a.cols();
#pragma omp parallel for schedule(static) if (n > 63)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
    row_dot(a.row(i), x.data(), m, y[i]);
}

void matvec_real(const DMat& a, std::span<const cplx> x, std::span<cplx> y) {
  const std::size_t n = a.rows(), m = a.cols();
#pragma omp parallel for schedule(static) if (n > 63)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const double* arow = a.row(i);
    const double* v = reinterpret_cast<const double*>(x.data());
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      re += arow[j] * v[2 * j];
      im += arow[j] * v[2 * j + 1];
    }
    y[i] = cplx(re, im);
  }
}

Lu lu_factor(ZMat a) { return lu_factor_impl(std::move(a), true); }

void lu_solve_in_place(const Lu& f, std::span<cplx> b) {
  const std::size_t n = f.a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t p = static_cast<std::size_t>(f.piv[k]);
    if (p != k) std::swap(b[k], b[p]);
  }
  // forward substitution with L (unit diagonal), block column sweeps
  for (std::size_t s = 0; s < n; s += kBlock) {
    const std::size_t e = std::min(s + kBlock, n);
    for (std::size_t i = s + 1; i < e; ++i) {
      cplx acc;
      row_dot(f.a.row(i) + s, b.data() + s, i - s, acc);
      b[i] -= acc;
    }
    if (e < n) block_update(f.a, s, e, e, n, b.data(), n - e > 160);
  }
  // backward substitution with U
  std::size_t s = n;
  while (s > 0) {
    const std::size_t lo = s > kBlock ? s - kBlock : 0;
    for (std::size_t ii = s; ii > lo; --ii) {
      const std::size_t i = ii - 1;
      cplx acc;
      row_dot(f.a.row(i) + i + 1, b.data() + i + 1, s - i - 1, acc);
      b[i] = (b[i] - acc) / f.a(i, i);
    }
    if (lo > 0) block_update(f.a, lo, s, 0, lo, b.data(), lo > 160);
    s = lo;
  }
}

namespace serial {

void matvec(const ZMat& a, std::span<const cplx> x, std::span<cplx> y) {
  const std::size_t n = a.rows(), m = a.cols();
  for (std::size_t i = 0; i < n; ++i) row_dot(a.row(i), x.data(), m, y[i]);
}

Lu lu_factor(ZMat a) { return lu_factor_impl(std::move(a), false); }

void lu_solve_in_place(const Lu& f, std::span<cplx> b) {
  const std::size_t n = f.a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t p = static_cast<std::size_t>(f.piv[k]);
    if (p != k) std::swap(b[k], b[p]);
  }
  for (std::size_t i = 1; i < n; ++i) {
    cplx acc;
    row_dot(f.a.row(i), b.data(), i, acc);
    b[i] -= acc;
  }
  for (std::size_t ii = n; ii > 0; --ii) {
    const std::size_t i = ii - 1;
    cplx acc;
    row_dot(f.a.row(i) + i + 1, b.data() + i + 1, n - i - 1, acc);
    b[i] = (b[i] - acc) / f.a(i, i);
  }
}

}  // namespace serial
}  // namespace kernels
}  // namespace specmd
