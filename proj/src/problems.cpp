#include "specmd/problems.hpp"

#include <cmath>
#include <map>
#include <memory>

namespace specmd {

cplx eval_gaussian(double x, double t) {
  if (std::isinf(x)) return cplx(0.0, 0.0);
  const cplx den(1.0, 4.0 * t);
  const cplx num(-x * x, 8.0 * x - 64.0 * t);
  return std::sqrt(1.0 / den) * std::exp(num / den);
}

cplx eval_soliton(double x, double t, double a, double c) {
  if (std::isinf(x)) return cplx(0.0, 0.0);
  const double sa = std::sqrt(a);
  const double sech = 1.0 / std::cosh(sa * (x - c * t));
  if (sech == 0.0) return cplx(0.0, 0.0);
  const double phase = 0.5 * c * x + (a - 0.25 * c * c) * t;
  return sa * sech * std::exp(cplx(0.0, phase));
}

cplx eval_peregrine(double x, double t) {
  const cplx rot = std::exp(cplx(0.0, 2.0 * t));
  if (std::isinf(x)) return rot;
  const cplx num(4.0, 16.0 * t);
  const double den = 1.0 + 4.0 * x * x + 16.0 * t * t;
  return (1.0 - num / den) * rot;
}

ExactSolution gaussian_solution() { return {[](double x, double t) { return eval_gaussian(x, t); }}; }

ExactSolution soliton_solution(double a, double c) {
  if (!(a > 0.0)) throw std::invalid_argument("soliton: a > 0 required");
  return {[a, c](double x, double t) { return eval_soliton(x, t, a, c); }};
}

ExactSolution peregrine_solution() {
  return {[](double x, double t) { return eval_peregrine(x, t); }};
}

ExactSolution galilei_boost(ExactSolution base, double c) {
  if (!std::isfinite(c)) throw std::invalid_argument("galilei_boost: finite speed required");
  auto inner = base.eval;
  return {[inner, c](double x, double t) -> cplx {
    if (std::isinf(x)) {
      const cplx v = inner(x, t);
      return v == cplx(0.0, 0.0) ? v : cplx(std::nan(""), std::nan(""));
    }
    return inner(x - c * t, t) * std::exp(cplx(0.0, 0.5 * c * x - 0.25 * c * c * t));
  }};
}

CompositeField sample_solution(const Decomposition& dec, const ExactSolution& sol, double t) {
  CompositeField f = zero_field(dec);
  for (int d = 0; d < dec.domain_count(); ++d) {
    auto xs = dec.physical(d);
    auto vals = f.domain(d);
    for (std::size_t j = 0; j < xs.size(); ++j) vals[j] = sol(xs[j], t);
  }
  return f;
}

CompositeField perturbed_peregrine_initial(const Decomposition& dec, double amplitude) {
  CompositeField f = sample_solution(dec, peregrine_solution(), 0.0);
  for (int d = 0; d < dec.domain_count(); ++d) {
    auto xs = dec.physical(d);
    auto vals = f.domain(d);
    for (std::size_t j = 0; j < xs.size(); ++j)
      if (!std::isinf(xs[j])) vals[j] += amplitude * std::exp(-xs[j] * xs[j]);
  }
  return f;
}

namespace {

// error fields are noise at the coefficient-tail level, so the whole-line
// measure is applied node-wise rather than by coefficient division
double windowed_norm2(const CompositeField& u, ErrorWindow w) {
  return w == ErrorWindow::WholeLine ? whole_line_l2_nodewise(u) : window_l2(u);
}

}  // namespace

double error_delta(const CompositeField& u, const CompositeField& u_exact, ErrorWindow window) {
  CompositeField diff = u;
  for (std::size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= u_exact.values[i];
  const double den = windowed_norm2(u_exact, window);
  if (!(den > 1e-280)) throw VanishingDenominator("error_delta: exact solution norm vanishes");
  const double num = windowed_norm2(diff, window);
  return std::sqrt(num / den);
}

double error_delta_inf(const CompositeField& u, const CompositeField& u_exact) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    num = std::max(num, std::abs(u.values[i] - u_exact.values[i]));
    den = std::max(den, std::abs(u_exact.values[i]));
  }
  if (!(den > 0.0)) throw VanishingDenominator("error_delta_inf: exact solution vanishes");
  return num / den;
}

double window_max_error(const CompositeField& u, const CompositeField& u_exact) {
  const Decomposition& dec = *u.decomp;
  double num = 0.0;
  for (int d = 0; d < dec.domain_count(); ++d) {
    if (dec.map(d).kind != DomainMap::Kind::FiniteLinear) continue;
    auto a = u.domain(d);
    auto b = u_exact.domain(d);
    for (std::size_t j = 0; j < a.size(); ++j) num = std::max(num, std::abs(a[j] - b[j]));
  }
  return num;
}

namespace {

// E is a near-cancellation of domain-sized integrals, so the whole chain
// (transform, coefficient derivative, measure division, quadrature) runs in
// extended precision; in plain double the derivative recurrence amplifies
// transform rounding by O(N^2), which is visible against the 1e-12 scale of
// the exact-solution check.
using ldouble = long double;
using lcplx = std::complex<ldouble>;

struct LdTransform {
  int n;
  std::vector<ldouble> cosines;  // (N+1)^2 table of cos(pi j k / N)
  std::vector<ldouble> weights;  // Clenshaw-Curtis

  explicit LdTransform(int n_order) : n(n_order) {
    const ldouble pi = acosl(-1.0L);
    cosines.resize(static_cast<std::size_t>(n + 1) * (n + 1));
    for (int k = 0; k <= n; ++k)
      for (int j = 0; j <= n; ++j) {
        const long r = (static_cast<long>(k) * j) % (2L * n);
        cosines[static_cast<std::size_t>(k) * (n + 1) + j] =
            cosl(pi * static_cast<ldouble>(r) / static_cast<ldouble>(n));
      }
    weights.assign(n + 1, 0.0L);
    for (int j = 0; j <= n; ++j) {
      ldouble acc = 0.0L;
      for (int m = 0; m <= n; m += 2) {
        const ldouble moment = 2.0L / (1.0L - static_cast<ldouble>(m) * m);
        const ldouble pm = (m == 0 || m == n) ? 0.5L : 1.0L;
        const ldouble pj = (j == 0 || j == n) ? 0.5L : 1.0L;
        acc += moment * (2.0L / n) * pm * pj * cos_at(m, j);
      }
      weights[j] = acc;
    }
  }

  ldouble cos_at(int k, int j) const {
    return cosines[static_cast<std::size_t>(k) * (n + 1) + j];
  }

  std::vector<lcplx> to_coefficients(std::span<const cplx> f) const {
    std::vector<lcplx> a(n + 1);
    for (int k = 0; k <= n; ++k) {
      const ldouble pk = (k == 0 || k == n) ? 0.5L : 1.0L;
      lcplx acc(0.0L, 0.0L);
      for (int j = 0; j <= n; ++j) {
        const ldouble pj = (j == 0 || j == n) ? 0.5L : 1.0L;
        acc += pj * cos_at(k, j) * lcplx(f[j].real(), f[j].imag());
      }
      a[k] = (2.0L / n) * pk * acc;
    }
    return a;
  }

  std::vector<lcplx> from_coefficients(const std::vector<lcplx>& a) const {
    std::vector<lcplx> f(n + 1);
    for (int j = 0; j <= n; ++j) {
      lcplx acc(0.0L, 0.0L);
      for (int k = 0; k <= n; ++k) acc += cos_at(k, j) * a[k];
      f[j] = acc;
    }
    return f;
  }

  std::vector<ldouble> to_coefficients_real(const std::vector<ldouble>& f) const {
    std::vector<ldouble> a(n + 1);
    for (int k = 0; k <= n; ++k) {
      const ldouble pk = (k == 0 || k == n) ? 0.5L : 1.0L;
      ldouble acc = 0.0L;
      for (int j = 0; j <= n; ++j) {
        const ldouble pj = (j == 0 || j == n) ? 0.5L : 1.0L;
        acc += pj * cos_at(k, j) * f[j];
      }
      a[k] = (2.0L / n) * pk * acc;
    }
    return a;
  }
};

const LdTransform& ld_transform(int n) {
  static std::map<int, std::unique_ptr<LdTransform>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<LdTransform>(n)).first;
  return *it->second;
}

std::vector<lcplx> ld_differentiate(const std::vector<lcplx>& a) {
  const int n = static_cast<int>(a.size()) - 1;
  std::vector<lcplx> b(n + 1, lcplx(0.0L, 0.0L));
  if (n == 0) return b;
  b[n - 1] = 2.0L * static_cast<ldouble>(n) * a[n];
  for (int k = n - 1; k >= 1; --k)
    b[k - 1] = b[k + 1] + 2.0L * static_cast<ldouble>(k) * a[k];
  b[0] *= 0.5L;
  return b;
}

std::vector<ldouble> ld_divide(const std::vector<ldouble>& a, int sign, ldouble* residue) {
  const int n = static_cast<int>(a.size()) - 1;
  const ldouble s = sign;
  ldouble bound = 0.0L, flip = 1.0L;
  for (int k = 0; k <= n; ++k) {
    bound += flip * a[k];
    flip *= -s;
  }
  if (residue) *residue = std::max(*residue, fabsl(bound));
  std::vector<ldouble> at(a);
  at[0] -= bound;
  std::vector<ldouble> b(n + 1, 0.0L);
  if (n == 0) return b;
  if (n >= 2) {
    b[n - 1] = 2.0L * at[n];
    for (int k = n - 1; k >= 2; --k) b[k - 1] = 2.0L * (at[k] - s * b[k]) - b[k + 1];
    b[0] = at[1] - s * b[1] - 0.5L * b[2];
  } else {
    b[0] = at[1];
  }
  return b;
}

}  // namespace

double energy_functional(const CompositeField& u) {
  const Decomposition& dec = *u.decomp;
  ldouble total = 0.0L;
  ldouble scale = 0.0L;
  ldouble residue = 0.0L;
  for (int d = 0; d < dec.domain_count(); ++d) {
    const int n = dec.order(d);
    const LdTransform& tf = ld_transform(n);
    const std::vector<lcplx> dcoef = ld_differentiate(tf.to_coefficients(u.domain(d)));
    const std::vector<lcplx> du = tf.from_coefficients(dcoef);
    auto grid = dec.grid(d);
    auto ud = u.domain(d);
    std::vector<ldouble> g(n + 1);
    auto two_sum = [](double a, double b, double& err) {
      const double s = a + b;
      const double bb = s - a;
      err = (a - (s - bb)) + (b - bb);
      return s;
    };
    for (int j = 0; j <= n; ++j) {
      const ldouble jac = map_dl_dx(dec.map(d), grid[j]);
      const lcplx ux = jac * du[j];
      const ldouble ux2 = ux.real() * ux.real() + ux.imag() * ux.imag();
      // |u|^2 - 1 via error-free transformations: near a unimodular
      // background the plain expression loses the digits that the
      // singular measure then amplifies
      const double re = ud[j].real(), im = ud[j].imag();
      const double p = re * re, ep = std::fma(re, re, -p);
      const double q = im * im, eq = std::fma(im, im, -q);
      double e1 = 0.0, e2 = 0.0;
      const double s1 = two_sum(p, q, e1);
      const double s2 = two_sum(s1, -1.0, e2);
      const ldouble m1 = static_cast<ldouble>(s2) + e2 + e1 + ep + eq;
      g[j] = ux2 - m1 * (m1 + 1.0L);
      scale = std::max(scale, fabsl(g[j]));
    }
    const DomainMap& map = dec.map(d);
    if (map.kind == DomainMap::Kind::FiniteLinear || map.kind == DomainMap::Kind::Layer) {
      const ldouble half = (static_cast<ldouble>(map.x_max()) - map.x_min()) / 2.0L;
      ldouble acc = 0.0L;
      for (int j = 0; j <= n; ++j) acc += tf.weights[j] * g[j];
      total += half * acc;
    } else {
      const bool left = map.kind == DomainMap::Kind::CompactifiedLeft;
      const int sign = left ? -1 : 1;
      const ldouble c = left ? -2.0L * static_cast<ldouble>(map.a)
                             : 2.0L * static_cast<ldouble>(map.a);
      const std::vector<ldouble> coeffs = tf.to_coefficients_real(g);
      const std::vector<ldouble> b1 = ld_divide(coeffs, sign, &residue);
      const std::vector<ldouble> b2 = ld_divide(b1, sign, nullptr);
      // back to values: real cosine synthesis
      ldouble acc = 0.0L;
      for (int j = 0; j <= n; ++j) {
        ldouble v = 0.0L;
        for (int k = 0; k <= n; ++k) v += tf.cos_at(k, j) * b2[k];
        acc += tf.weights[j] * v;
      }
      total += c * acc;
    }
  }
  if (residue > 1e-6L * std::max(scale, static_cast<ldouble>(1e-300)))
    throw NonDecayingField("energy_functional: integrand does not decay at infinity");
  return 0.5 * static_cast<double>(total);
}

}  // namespace specmd
