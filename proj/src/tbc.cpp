#include "specmd/tbc.hpp"

#include <array>
#include <cmath>

namespace specmd {

namespace {

// 4x4 complex solve with partial pivoting, row-major
struct Solve4 {
  std::array<cplx, 16> a;
  std::array<int, 4> piv;

  void factor() {
    for (int k = 0; k < 4; ++k) {
      int p = k;
      double best = std::norm(a[4 * k + k]);
      for (int i = k + 1; i < 4; ++i) {
        const double v = std::norm(a[4 * i + k]);
        if (v > best) {
          best = v;
          p = i;
        }
      }
      piv[k] = p;
      if (p != k)
        for (int j = 0; j < 4; ++j) std::swap(a[4 * k + j], a[4 * p + j]);
      if (a[4 * k + k] == cplx(0.0, 0.0))
        throw SingularMatrix("tbc aux: singular 4x4 system");
      const cplx inv = 1.0 / a[4 * k + k];
      for (int i = k + 1; i < 4; ++i) {
        a[4 * i + k] *= inv;
        const cplx lik = a[4 * i + k];
        for (int j = k + 1; j < 4; ++j) a[4 * i + j] -= lik * a[4 * k + j];
      }
    }
  }

  void solve(std::array<cplx, 4>& b) const {
    for (int k = 0; k < 4; ++k)
      if (piv[k] != k) std::swap(b[k], b[piv[k]]);
    for (int i = 1; i < 4; ++i)
      for (int j = 0; j < i; ++j) b[i] -= a[4 * i + j] * b[j];
    for (int i = 3; i >= 0; --i) {
      for (int j = i + 1; j < 4; ++j) b[i] -= a[4 * i + j] * b[j];
      b[i] /= a[4 * i + i];
    }
  }
};

}  // namespace

BetaCoefficients beta_sequence(int n_steps) {
  if (n_steps < 0) throw std::invalid_argument("beta_sequence: n >= 0 required");
  std::vector<double> b(n_steps + 2);
  b[0] = 1.0;
  if (n_steps + 2 > 1) b[1] = -1.0;
  for (int k = 0; k + 2 < static_cast<int>(b.size()); ++k)
    b[k + 2] = b[k] * (1.0 - 1.0 / (k + 1));
  return BetaCoefficients{std::move(b)};
}

std::vector<double> dtn_convolution_weights(int n_steps) {
  if (n_steps < 0) throw std::invalid_argument("dtn_convolution_weights: n >= 0 required");
  std::vector<double> w(n_steps + 2);
  w[0] = 1.0;
  if (w.size() > 1) w[1] = -1.0;
  for (int k = 0; k + 2 < static_cast<int>(w.size()); ++k) {
    const double m = static_cast<double>(k / 2);
    w[k + 2] = w[k] * (2.0 * m + 1.0) / (2.0 * m + 2.0);
  }
  return w;
}

TbcCore::TbcCore(const Decomposition& dec, double h, long n_steps) : dec_(&dec), h_(h) {
  if (dec.domain_count() != 1 || dec.map(0).kind != DomainMap::Kind::FiniteLinear)
    throw std::invalid_argument("tbc: a single finite domain is required");
  if (!(h > 0.0)) throw std::invalid_argument("tbc: positive time step required");
  const int n = dec.order(0);
  f_ = -std::exp(cplx(0.0, -M_PI / 4.0)) * std::sqrt(2.0 / h);
  weights_ = dtn_convolution_weights(static_cast<int>(n_steps));

  const ZMat& block = dec.spatial_block(0);
  ZMat m(n + 1, n + 1);
  const cplx coeff(0.0, -0.5 * h);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) m(i, j) = coeff * block(i, j);
  for (int i = 0; i <= n; ++i) m(i, i) += 1.0;
  for (int j = 0; j <= n; ++j) {
    m(0, j) = (j == 0) ? 1.0 : 0.0;
    m(n, j) = (j == n) ? 1.0 : 0.0;
  }
  lu_ = kernels::lu_factor(std::move(m));

  const double jac = map_dl_dx(dec.map(0), 0.0);
  const DMat& d = dec.diff(0);
  dx0_.resize(n + 1);
  dxN_.resize(n + 1);
  for (int j = 0; j <= n; ++j) {
    dx0_[j] = jac * d(0, j);
    dxN_[j] = jac * d(n, j);
  }

  scratch_.resize(n + 1);
  wl.assign(n + 1, cplx(0.0, 0.0));
  wr.assign(n + 1, cplx(0.0, 0.0));
  wl[0] = 1.0;
  wr[n] = 1.0;
  kernels::lu_solve_in_place(lu_, wl);
  kernels::lu_solve_in_place(lu_, wr);
  gamma_rr = neumann_right(wr);
  gamma_rl = neumann_right(wl);
  gamma_lr = neumann_left(wr);
  gamma_ll = neumann_left(wl);
}

void TbcCore::interior_solve(ZVec& rhs) const {
  rhs[0] = cplx(0.0, 0.0);
  rhs[rhs.size() - 1] = cplx(0.0, 0.0);
  kernels::lu_solve_in_place(lu_, rhs);
}

void TbcCore::cn_rhs(std::span<const cplx> u, std::span<const double> vdiag, ZVec& out) const {
  const ZMat& block = dec_->spatial_block(0);
  out.resize(u.size());
  kernels::matvec(block, u, out);
  const cplx ih2(0.0, 0.5 * h_);
  if (vdiag.empty()) {
    for (std::size_t j = 0; j < u.size(); ++j) out[j] = u[j] + ih2 * out[j];
  } else {
    for (std::size_t j = 0; j < u.size(); ++j) out[j] = u[j] + ih2 * (out[j] + vdiag[j] * u[j]);
  }
}

cplx TbcCore::neumann_right(std::span<const cplx> u) const {
  cplx acc(0.0, 0.0);
  for (std::size_t j = 0; j < u.size(); ++j) acc += dxN_[j] * u[j];
  return acc;
}

cplx TbcCore::neumann_left(std::span<const cplx> u) const {
  cplx acc(0.0, 0.0);
  for (std::size_t j = 0; j < u.size(); ++j) acc += dx0_[j] * u[j];
  return acc;
}

TbcLinearStepper::TbcLinearStepper(const Decomposition& dec, double h, long n_steps)
    : core_(dec, h, n_steps) {}

void TbcLinearStepper::initialize(const CompositeField& u0) {
  g0l_.assign(1, u0.values.front());
  g0r_.assign(1, u0.values.back());
  level_ = 0;
}

void TbcLinearStepper::step(CompositeField& u, StepStats* stats) {
  if (g0l_.empty()) throw std::logic_error("tbc stepper not initialized");
  const auto w = core_.weights();
  const cplx f = core_.f_const();
  const long n1 = level_ + 1;

  // history parts of the convolutions (the k = 0 term is the unknown)
  cplx vr(0.0, 0.0), vl(0.0, 0.0);
  for (long k = 1; k <= n1; ++k) {
    vr += w[k] * g0r_[n1 - k];
    vl += w[k] * g0l_[n1 - k];
  }
  vr *= f;
  vl *= f;

  ZVec rhs;
  core_.cn_rhs(u.values, {}, rhs);
  core_.interior_solve(rhs);
  const cplx ur = core_.neumann_right(rhs);
  const cplx ul = core_.neumann_left(rhs);

  const cplx A11 = core_.gamma_rr - f * w[0];
  const cplx A12 = core_.gamma_rl;
  const cplx A21 = core_.gamma_lr;
  const cplx A22 = core_.gamma_ll + f * w[0];
  const cplx det = A11 * A22 - A12 * A21;
  if (std::abs(det) < 1e-300) throw StepFailure(level_, 0, 0.0);
  const cplx b1 = vr - ur;
  const cplx b2 = -vl - ul;
  const cplx g0r = (b1 * A22 - A12 * b2) / det;
  const cplx g0l = (A11 * b2 - A21 * b1) / det;

  for (std::size_t j = 0; j < u.values.size(); ++j)
    u.values[j] = rhs[j] + g0r * core_.wr[j] + g0l * core_.wl[j];

  g0r_.push_back(g0r);
  g0l_.push_back(g0l);
  ++level_;
  if (stats) *stats = {1, 0.0};
}

TbcNlsBoundary::TbcNlsBoundary(int rho, double h, DerivMode mode)
    : rho_(rho), h_(h), mode_(mode) {
  if (rho != 1 && rho != -1) throw std::invalid_argument("tbc nls: rho must be +-1");
}

void TbcNlsBoundary::initialize(cplx g0_initial, cplx g1_initial) {
  level_ = 0;
  g0_.assign(1, g0_initial);
  g1_.assign(1, g1_initial);
  a_.assign(1, coeff_a(g0_initial, g1_initial));
  // the time-derivative part of b is not available at t = 0; the cubic part
  // alone is consistent for data with (numerically) compact support
  b_.assign(1, cplx(0.0, 0.5) * (cplx(0.0, 1.0) * static_cast<double>(rho_) *
                                 std::norm(g0_initial) * g0_initial));
  l1p_.assign(1, cplx(0.0, 0.5) * g1_initial);
  m1p_.assign(1, g0_initial);
  l2p_.assign(1, cplx(0.0, 0.0));
  m2p_.assign(1, cplx(0.0, 0.0));
}

cplx TbcNlsBoundary::coeff_a(cplx g0, cplx g1) const {
  return cplx(0.0, rho_ * std::imag(g0 * std::conj(g1)));
}

cplx TbcNlsBoundary::coeff_b(cplx g0_next) const {
  const long n = level_;
  cplx dg;
  if (mode_ == DerivMode::Backward || n == 0) {
    dg = (g0_next - g0_[n]) / h_;
  } else {
    dg = (3.0 * g0_next - 4.0 * g0_[n] + g0_[n - 1]) / (2.0 * h_);
  }
  const cplx irho(0.0, static_cast<double>(rho_));
  return cplx(0.0, 0.5) * (dg + irho * std::norm(g0_next) * g0_next);
}

void TbcNlsBoundary::advance_working(cplx g0_next, cplx g1_next) {
  if (level_ < 0) throw std::logic_error("tbc nls boundary not initialized");
  const long n = level_;
  const double h = h_;
  const double rho = rho_;
  const cplx i_(0.0, 1.0);

  a_work_ = coeff_a(g0_next, g1_next);
  b_work_ = coeff_b(g0_next);
  const cplx an = a_[n], bn = b_[n];
  const cplx g0n = g0_[n], g1n = g1_[n];

  l1w_.assign(n + 2, cplx(0.0, 0.0));
  l2w_.assign(n + 2, cplx(0.0, 0.0));
  m1w_.assign(n + 2, cplx(0.0, 0.0));
  m2w_.assign(n + 2, cplx(0.0, 0.0));

  // corner values on the s = t diagonal
  const cplx m2c = m2p_[n] - i_ * h * (a_work_ + an);
  const cplx l2c =
      l2p_[n] + 0.5 * h *
                    (0.5 * rho * (std::norm(g1_next) + std::norm(g1n)) +
                     rho * (std::conj(b_work_) * g0_next + std::conj(bn) * g0n) -
                     (a_work_ * m2c + an * m2p_[n]));
  m2w_[n + 1] = m2c;
  l2w_[n + 1] = l2c;
  l1w_[n + 1] = cplx(0.0, 0.5) * g1_next;
  m1w_[n + 1] = g0_next;
  // m = 0 entries stay zero: L2, M2 by the s = -t condition, M1 and L1 as
  // the constant continuation of the initial corner

  if (n >= 1) {
    Solve4 sys;
    const cplx cg1 = std::conj(g1_next), cg0 = std::conj(g0_next), cb = std::conj(b_work_);
    const cplx h2(0.5 * h, 0.0);
    // rows: L1, L2, M1, M2; columns likewise
    sys.a = {cplx(1.0, 0.0), -h2 * i_ * g1_next, -h2 * a_work_, -h2 * b_work_,
             h2 * i_ * rho * cg1, cplx(1.0, 0.0), -h2 * rho * cb, h2 * a_work_,
             cplx(0.0, 0.0), -h_ * g0_next, cplx(1.0, 0.0), -h2 * i_ * g1_next,
             -h_ * rho * cg0, cplx(0.0, 0.0), h2 * i_ * rho * cg1, cplx(1.0, 0.0)};
    sys.factor();

    const cplx cg1n = std::conj(g1n), cg0n = std::conj(g0n), cbn = std::conj(bn);
#pragma omp parallel for schedule(static) if (n > 511)
    for (long m = 1; m <= n; ++m) {
      std::array<cplx, 4> rhs;
      rhs[0] = l1p_[m] +
               0.5 * h * (i_ * g1n * l2p_[m] + an * m1p_[m] + bn * m2p_[m]);
      rhs[1] = l2p_[m - 1] + 0.5 * h *
                                 (-i_ * rho * cg1n * l1p_[m - 1] + rho * cbn * m1p_[m - 1] -
                                  an * m2p_[m - 1]);
      rhs[2] = m1p_[m] + 0.5 * h * (2.0 * g0n * l2p_[m] + i_ * g1n * m2p_[m]);
      rhs[3] = m2p_[m - 1] + 0.5 * h *
                                 (2.0 * rho * cg0n * l1p_[m - 1] -
                                  i_ * rho * cg1n * m1p_[m - 1]);
      sys.solve(rhs);
      l1w_[m] = rhs[0];
      l2w_[m] = rhs[1];
      m1w_[m] = rhs[2];
      m2w_[m] = rhs[3];
    }
    solve_count_ += n;
    last_level_solves_ = n;
  } else {
    last_level_solves_ = 0;
  }
}

cplx TbcNlsBoundary::m2_corner() const { return m2w_[level_ + 1]; }

cplx TbcNlsBoundary::dtn_history(cplx f_const, std::span<const double> weights) const {
  const long n1 = level_ + 1;
  cplx acc(0.0, 0.0);
  for (long k = 1; k <= n1; ++k) acc += weights[k] * m1w_[n1 - k];
  return f_const * acc;
}

cplx TbcNlsBoundary::dtn(cplx g0_next, cplx f_const, std::span<const double> weights) const {
  return (m2_corner() + f_const * weights[0]) * g0_next + dtn_history(f_const, weights);
}

void TbcNlsBoundary::commit(cplx g0_next, cplx g1_next) {
  l1p_ = l1w_;
  l2p_ = l2w_;
  m1p_ = m1w_;
  m2p_ = m2w_;
  g0_.push_back(g0_next);
  g1_.push_back(g1_next);
  a_.push_back(a_work_);
  b_.push_back(b_work_);
  ++level_;
}

TbcNlsStepper::TbcNlsStepper(const Decomposition& dec, double h, long n_steps, TbcNlsOptions opt)
    : core_(dec, h, n_steps),
      opt_(opt),
      left_(opt.rho, h, opt.deriv_mode),
      right_(opt.rho, h, opt.deriv_mode),
      nonlin_(cubic_nonlinearity(opt.rho)) {}

void TbcNlsStepper::initialize(const CompositeField& u0) {
  // g1 is the outward-oriented trace: +d_x u at x_r, -d_x u at x_l
  right_.initialize(u0.values.back(), core_.neumann_right(u0.values));
  left_.initialize(u0.values.front(), -core_.neumann_left(u0.values));
  level_ = 0;
}

void TbcNlsStepper::step(CompositeField& u, StepStats* stats) {
  const std::size_t n = u.values.size();
  const auto w = core_.weights();
  const cplx f = core_.f_const();

  std::vector<double> vdiag(n);
  nonlin_(u.values, vdiag);
  ZVec rhs0;
  core_.cn_rhs(u.values, vdiag, rhs0);

  // previous level's traces as the initial iterates
  cplx g0r = right_.g0_history().back(), g1r = right_.g1_history().back();
  cplx g0l = left_.g0_history().back(), g1l = left_.g1_history().back();
  ZVec ucur = u.values;
  ZVec unew(n), rhs(n);
  const cplx ih2(0.0, 0.5 * core_.h());

  int iters = 0;
  double change = 0.0;
  while (true) {
    right_.advance_working(g0r, g1r);
    left_.advance_working(g0l, g1l);

    nonlin_(ucur, vdiag);
    for (std::size_t j = 0; j < n; ++j) rhs[j] = rhs0[j] + ih2 * (vdiag[j] * ucur[j]);
    core_.interior_solve(rhs);
    const cplx ur = core_.neumann_right(rhs);
    const cplx ul = core_.neumann_left(rhs);

    const cplx m2r = right_.m2_corner();
    const cplx m2l = left_.m2_corner();
    const cplx convr = right_.dtn_history(f, w);
    const cplx convl = left_.dtn_history(f, w);

    const cplx A11 = core_.gamma_rr - f * w[0] - m2r;
    const cplx A12 = core_.gamma_rl;
    const cplx A21 = core_.gamma_lr;
    const cplx A22 = core_.gamma_ll + f * w[0] + m2l;
    const cplx det = A11 * A22 - A12 * A21;
    if (std::abs(det) < 1e-300) throw StepFailure(level_, iters, change);
    const cplx b1 = convr - ur;
    const cplx b2 = -convl - ul;
    const cplx g0r_new = (b1 * A22 - A12 * b2) / det;
    const cplx g0l_new = (A11 * b2 - A21 * b1) / det;

    for (std::size_t j = 0; j < n; ++j)
      unew[j] = rhs[j] + g0r_new * core_.wr[j] + g0l_new * core_.wl[j];
    const cplx g1r_new = core_.neumann_right(unew);
    const cplx g1l_new = -core_.neumann_left(unew);

    change = 0.0;
    for (std::size_t j = 0; j < n; ++j) change = std::max(change, std::abs(unew[j] - ucur[j]));
    change = std::max({change, std::abs(g1r_new - g1r), std::abs(g1l_new - g1l)});

    ucur = unew;
    g0r = g0r_new;
    g0l = g0l_new;
    g1r = g1r_new;
    g1l = g1l_new;
    ++iters;
    if (change < opt_.fp_tolerance) break;
    if (iters >= opt_.fp_max_iters) throw StepFailure(level_, iters, change);
  }

  right_.commit(g0r, g1r);
  left_.commit(g0l, g1l);
  u.values = ucur;
  ++level_;
  if (stats) *stats = {iters, change};
}

}  // namespace specmd
