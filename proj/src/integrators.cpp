#include "specmd/integrators.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace specmd {

namespace {

double max_abs_diff(const ZVec& a, const ZVec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

StepFailure::StepFailure(long step_, int iterations_, double last_change_)
    : std::runtime_error("fixed-point iteration did not converge at step " +
                         std::to_string(step_) + " (iterations " + std::to_string(iterations_) +
                         ", last change " + std::to_string(last_change_) + ")"),
      step(step_),
      iterations(iterations_),
      last_change(last_change_) {}

NonlinearDiag cubic_nonlinearity(int rho) {
  if (rho != 1 && rho != -1) throw std::invalid_argument("cubic_nonlinearity: rho must be +-1");
  const double f = -2.0 * rho;
  return [f](std::span<const cplx> u, std::span<double> v) {
    for (std::size_t j = 0; j < u.size(); ++j) v[j] = f * std::norm(u[j]);
  };
}

StepWorkspace::StepWorkspace(const CompositeOperator& op, SchemeConfig cfg)
    : op_(&op), cfg_(cfg) {
  if (!(cfg_.h > 0.0)) throw std::invalid_argument("scheme: time step must be positive");
  if (!(cfg_.fp_tolerance > 0.0)) throw std::invalid_argument("scheme: tolerance must be positive");
  const double s3 = std::sqrt(3.0);
  a11 = 0.25;
  a22 = 0.25;
  a12 = 0.25 - s3 / 6.0;
  a21 = 0.25 + s3 / 6.0;
  c1 = 0.5 - s3 / 6.0;
  c2 = 0.5 + s3 / 6.0;
  b1 = 0.5;
  b2 = 0.5;

  const std::size_t n = op.matrix.rows();
  const cplx coeff = cfg_.scheme == Scheme::CN ? cplx(0.0, -0.5 * cfg_.h)
                                               : cplx(0.0, -cfg_.h * a11);
  ZMat m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = coeff * op.matrix(i, j);
  for (std::size_t i = 0; i < n; ++i) m(i, i) += 1.0;
  for (const TauRow& row : op.tau_rows) {
    tau_idx_.push_back(row.row);
    for (std::size_t j = 0; j < n; ++j) m(row.row, j) = cplx(0.0, 0.0);
    for (const auto& [col, v] : row.entries) m(row.row, col) = v;
  }
  lu_ = kernels::lu_factor(std::move(m));

  lun_.resize(n);
  w_.resize(n);
  r1_.resize(n);
  r2_.resize(n);
  knew_.resize(n);
  lk1_.resize(n);
  k1_.resize(n);
  k2_.resize(n);
  lk2_.resize(n);
  vdiag_.resize(n);
}

void StepWorkspace::zero_tau(ZVec& r) const {
  for (int i : tau_idx_) r[i] = cplx(0.0, 0.0);
}

void StepWorkspace::solve(ZVec& r) const { kernels::lu_solve_in_place(lu_, r); }

double StepWorkspace::tau_residual(std::span<const cplx> u) const {
  double m = 0.0;
  for (const TauRow& row : op_->tau_rows) {
    cplx acc = -row.rhs;
    for (const auto& [col, v] : row.entries) acc += v * u[col];
    m = std::max(m, std::abs(acc));
  }
  return m;
}

void StepWorkspace::cn_step(ZVec& u, const NonlinearDiag* nonlinearity, StepStats* stats) {
  const std::size_t n = u.size();
  const double h = cfg_.h;
  const cplx ih2(0.0, 0.5 * h);
  kernels::matvec(op_->matrix, u, lun_);

  // r1_ holds the constant part of the right side
  if (nonlinearity) {
    std::vector<double> v(n);
    (*nonlinearity)(u, v);
    for (std::size_t j = 0; j < n; ++j) r1_[j] = u[j] + ih2 * (lun_[j] + v[j] * u[j]);
  } else {
    for (std::size_t j = 0; j < n; ++j) r1_[j] = u[j] + ih2 * lun_[j];
  }

  if (!nonlinearity) {
    ZVec& r = knew_;
    r = r1_;
    zero_tau(r);
    solve(r);
    u = r;
    if (stats) *stats = {1, 0.0};
    ++current_step_;
    return;
  }

  ZVec uk = u;
  std::vector<double> v(n);
  int iters = 0;
  double change = 0.0;
  while (true) {
    (*nonlinearity)(uk, v);
    for (std::size_t j = 0; j < n; ++j) knew_[j] = r1_[j] + ih2 * (v[j] * uk[j]);
    zero_tau(knew_);
    solve(knew_);
    change = max_abs_diff(knew_, uk);
    uk = knew_;
    ++iters;
    if (change < cfg_.fp_tolerance) break;
    if (iters >= cfg_.fp_max_iters) throw StepFailure(current_step_, iters, change);
  }
  u = uk;
  if (stats) *stats = {iters, change};
  ++current_step_;
}

void StepWorkspace::irk4_step(ZVec& u, const NonlinearDiag* nonlinearity, StepStats* stats) {
  const std::size_t n = u.size();
  const double h = cfg_.h;
  const cplx img(0.0, 1.0);
  const cplx inv_iha11 = 1.0 / cplx(0.0, h * a11);
  const cplx inv_iha22 = 1.0 / cplx(0.0, h * a22);

  kernels::matvec(op_->matrix, u, lun_);

  std::vector<double> v(n);
  if (!have_stages_) {
    // explicit-Euler slope as the cold-start stage guess
    if (nonlinearity) {
      (*nonlinearity)(u, v);
      for (std::size_t j = 0; j < n; ++j) k1_[j] = img * (lun_[j] + v[j] * u[j]);
    } else {
      for (std::size_t j = 0; j < n; ++j) k1_[j] = img * lun_[j];
    }
    k2_ = k1_;
    kernels::matvec(op_->matrix, k2_, lk2_);
  }

  // tolerance measured relative to the stage magnitude: the stages carry
  // the operator scale, so an absolute criterion stalls at the rounding
  // floor of L*u for stiff spectral operators
  double kscale = 1.0;
  for (std::size_t j = 0; j < n; ++j) kscale = std::max(kscale, std::abs(k1_[j]));
  const double tol = cfg_.fp_tolerance * kscale;

  int iters = 0;
  double change = 0.0;
  double prev_change = std::numeric_limits<double>::infinity();
  int stagnant = 0;
  while (true) {
    // stage 1 with stage 2 and the nonlinearity frozen
    if (nonlinearity) {
      for (std::size_t j = 0; j < n; ++j) w_[j] = u[j] + h * (a11 * k1_[j] + a12 * k2_[j]);
      (*nonlinearity)(w_, v);
      for (std::size_t j = 0; j < n; ++j)
        r1_[j] = img * (lun_[j] + h * a12 * lk2_[j] + v[j] * w_[j]);
    } else {
      for (std::size_t j = 0; j < n; ++j) r1_[j] = img * (lun_[j] + h * a12 * lk2_[j]);
    }
    zero_tau(r1_);
    knew_ = r1_;
    solve(knew_);
    for (std::size_t j = 0; j < n; ++j) lk1_[j] = (knew_[j] - r1_[j]) * inv_iha11;
    for (int i : tau_idx_) lk1_[i] = cplx(0.0, 0.0);
    const double ch1 = max_abs_diff(knew_, k1_);
    k1_.swap(knew_);

    // stage 2 with the fresh stage 1
    if (nonlinearity) {
      for (std::size_t j = 0; j < n; ++j) w_[j] = u[j] + h * (a21 * k1_[j] + a22 * k2_[j]);
      (*nonlinearity)(w_, v);
      for (std::size_t j = 0; j < n; ++j)
        r2_[j] = img * (lun_[j] + h * a21 * lk1_[j] + v[j] * w_[j]);
    } else {
      for (std::size_t j = 0; j < n; ++j) r2_[j] = img * (lun_[j] + h * a21 * lk1_[j]);
    }
    zero_tau(r2_);
    knew_ = r2_;
    solve(knew_);
    for (std::size_t j = 0; j < n; ++j) lk2_[j] = (knew_[j] - r2_[j]) * inv_iha22;
    for (int i : tau_idx_) lk2_[i] = cplx(0.0, 0.0);
    const double ch2 = max_abs_diff(knew_, k2_);
    k2_.swap(knew_);

    change = std::max(ch1, ch2);
    ++iters;
    if (change < tol) break;
    // accept at the rounding floor: once the change has dropped well below
    // the stage scale but stops contracting, further sweeps only reshuffle
    // rounding noise
    if (change < 1e-5 * kscale && change > 0.5 * prev_change) {
      if (++stagnant >= 2) break;
    } else {
      stagnant = 0;
    }
    prev_change = change;
    if (iters >= cfg_.fp_max_iters) throw StepFailure(current_step_, iters, change);
  }

  for (std::size_t j = 0; j < n; ++j) u[j] += 0.5 * h * (k1_[j] + k2_[j]);
  have_stages_ = true;
  if (stats) *stats = {iters, change};
  ++current_step_;
}

void StepWorkspace::step(ZVec& u, const NonlinearDiag* nonlinearity, StepStats* stats) {
  if (cfg_.scheme == Scheme::CN)
    cn_step(u, nonlinearity, stats);
  else
    irk4_step(u, nonlinearity, stats);
}

PropagationReport propagate(CompositeField& u, StepWorkspace& ws,
                            const NonlinearDiag* nonlinearity, long stride,
                            const ObserverFn& observer) {
  const SchemeConfig& cfg = ws.config();
  if (stride < 1) stride = 1;
  PropagationReport rep;
  double iter_sum = 0.0;
  if (observer) observer(ObserverContext{0, 0.0, u, StepStats{}});
  for (long s = 1; s <= cfg.n_steps; ++s) {
    StepStats st;
    ws.step(u.values, nonlinearity, &st);
    rep.steps_done = s;
    rep.max_iterations = std::max(rep.max_iterations, st.iterations);
    iter_sum += st.iterations;
    if (observer && (s % stride == 0 || s == cfg.n_steps))
      observer(ObserverContext{s, s * cfg.h, u, st});
  }
  rep.mean_iterations = cfg.n_steps > 0 ? iter_sum / cfg.n_steps : 0.0;
  return rep;
}

}  // namespace specmd
