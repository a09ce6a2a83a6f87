#pragma once

#include "specmd/domain.hpp"
#include "specmd/integrators.hpp"

namespace specmd {

/// Recurrence coefficients beta_0 = 1, beta_1 = -1,
/// beta_{k+2} = beta_k (1 - 1/(k+1)), of length n_steps + 2.
struct BetaCoefficients {
  std::vector<double> beta;
};

BetaCoefficients beta_sequence(int n_steps);

/// Convolution weights of the discrete half-order time derivative
/// (Taylor coefficients of sqrt((1-z)/(1+z))); this is the sequence the
/// steppers convolve with. It shares beta_0 = 1, beta_1 = -1 and the odd
/// entries with beta_sequence, but the even entries are nonzero, and the
/// partial sums decay to zero.
std::vector<double> dtn_convolution_weights(int n_steps);

/// Dirichlet-substituted CN solve on a single finite domain plus the
/// influence decomposition of the boundary Neumann values: the gamma
/// coefficients depend only on the step matrix and are computed once.
class TbcCore {
 public:
  TbcCore(const Decomposition& dec, double h, long n_steps);

  const Decomposition& decomp() const { return *dec_; }
  double h() const { return h_; }
  cplx f_const() const { return f_; }
  std::span<const double> weights() const { return weights_; }

  /// Solves the Dirichlet-substituted CN system for the given interior
  /// right-hand side with zero boundary data (entries 0 and N are zeroed).
  void interior_solve(ZVec& rhs_in_out) const;

  /// (1 + i h/2 L) u plus optional nonlinear part, interior rows only.
  void cn_rhs(std::span<const cplx> u, std::span<const double> vdiag, ZVec& out) const;

  cplx neumann_right(std::span<const cplx> u) const;  // d_x u at x_r
  cplx neumann_left(std::span<const cplx> u) const;   // d_x u at x_l

  cplx gamma_rr, gamma_rl, gamma_lr, gamma_ll;
  ZVec wl, wr;  // influence columns for unit left/right Dirichlet data

 private:
  const Decomposition* dec_;
  double h_;
  cplx f_;
  kernels::Lu lu_;
  std::vector<double> weights_;
  std::vector<double> dx0_, dxN_;  // jacobian-scaled derivative rows
  mutable ZVec scratch_;
};

/// Transparent boundary conditions for the free equation: the half-order
/// derivative convolution of the Dirichlet traces closes the CN step.
class TbcLinearStepper {
 public:
  TbcLinearStepper(const Decomposition& dec, double h, long n_steps);

  void step(CompositeField& u, StepStats* stats = nullptr);

  const std::vector<cplx>& g0l_history() const { return g0l_; }
  const std::vector<cplx>& g0r_history() const { return g0r_; }
  const TbcCore& core() const { return core_; }

  /// Must be called once with the initial field before stepping.
  void initialize(const CompositeField& u0);

 private:
  TbcCore core_;
  std::vector<cplx> g0l_, g0r_;
  long level_ = 0;
};

/// One boundary's auxiliary characteristic system for the cubic NLS
/// transparent boundary condition: triangular arrays L1, L2, M1, M2 on the
/// grid s^n_m = -t_n + 2 h m, advanced level by level with the trapezoidal
/// rule; the interior values of a level come from 4x4 solves sharing one
/// matrix. g1 is the outward trace: +d_x u at x_r, -d_x u at x_l.
class TbcNlsBoundary {
 public:
  enum class DerivMode { Backward, Extrapolated };

  TbcNlsBoundary(int rho, double h, DerivMode mode = DerivMode::Extrapolated);

  void initialize(cplx g0_initial, cplx g1_initial);

  /// Builds the (uncommitted) level n+1 arrays from the current trace
  /// iterates; callable repeatedly within a fixed-point sweep.
  void advance_working(cplx g0_next, cplx g1_next);

  /// Corner value M2(t,t) of the working level.
  cplx m2_corner() const;

  /// History part of the half-derivative convolution over the working M1
  /// diagonal trace (the k >= 1 terms), scaled by F.
  cplx dtn_history(cplx f_const, std::span<const double> weights) const;

  /// Full nonlinear Dirichlet-to-Neumann value for the working level.
  cplx dtn(cplx g0_next, cplx f_const, std::span<const double> weights) const;

  /// Commits the working level and appends the trace histories.
  void commit(cplx g0_next, cplx g1_next);

  long level() const { return level_; }
  long solves_performed() const { return solve_count_; }
  long last_level_solves() const { return last_level_solves_; }
  const std::vector<cplx>& g0_history() const { return g0_; }
  const std::vector<cplx>& g1_history() const { return g1_; }

  // working-level arrays (index m = 0..level+1), exposed for the corner
  // identity checks
  const ZVec& l1_working() const { return l1w_; }
  const ZVec& l2_working() const { return l2w_; }
  const ZVec& m1_working() const { return m1w_; }
  const ZVec& m2_working() const { return m2w_; }

 private:
  cplx coeff_a(cplx g0, cplx g1) const;
  cplx coeff_b(cplx g0_next) const;

  int rho_;
  double h_;
  DerivMode mode_;
  long level_ = -1;
  std::vector<cplx> g0_, g1_, a_, b_;
  ZVec l1p_, l2p_, m1p_, m2p_;  // committed level
  ZVec l1w_, l2w_, m1w_, m2w_;  // working level
  cplx a_work_{0.0, 0.0}, b_work_{0.0, 0.0};
  long solve_count_ = 0;
  long last_level_solves_ = 0;
};

struct TbcNlsOptions {
  int rho = -1;
  double fp_tolerance = 1e-8;
  int fp_max_iters = 200;
  TbcNlsBoundary::DerivMode deriv_mode = TbcNlsBoundary::DerivMode::Extrapolated;
};

/// Cubic NLS on a single finite domain with transparent boundary
/// conditions: the CN relations and the Dirichlet-to-Neumann maps at both
/// boundaries are iterated together; the aux histories are committed only
/// once the step's fixed point has converged.
class TbcNlsStepper {
 public:
  TbcNlsStepper(const Decomposition& dec, double h, long n_steps, TbcNlsOptions opt);

  void initialize(const CompositeField& u0);
  void step(CompositeField& u, StepStats* stats = nullptr);

  const TbcCore& core() const { return core_; }
  const TbcNlsBoundary& left() const { return left_; }
  const TbcNlsBoundary& right() const { return right_; }

 private:
  TbcCore core_;
  TbcNlsOptions opt_;
  TbcNlsBoundary left_, right_;
  NonlinearDiag nonlin_;
  long level_ = 0;
};

}  // namespace specmd
