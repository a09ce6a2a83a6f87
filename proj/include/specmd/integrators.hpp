#pragma once

#include <functional>

#include "specmd/domain.hpp"

namespace specmd {

enum class Scheme { CN, IRK4 };

struct SchemeConfig {
  Scheme scheme = Scheme::CN;
  double h = 0.0;
  long n_steps = 0;
  double fp_tolerance = 1e-8;
  int fp_max_iters = 200;
};

struct StepStats {
  int iterations = 0;
  double last_change = 0.0;
};

struct StepFailure : std::runtime_error {
  StepFailure(long step, int iterations, double last_change);
  long step;
  int iterations;
  double last_change;
};

/// Diagonal of the state-dependent potential V(|u|^2): v_j = V(|u_j|^2).
/// Null pointer means a linear problem.
using NonlinearDiag = std::function<void(std::span<const cplx> u, std::span<double> v)>;

NonlinearDiag cubic_nonlinearity(int rho);

/// Prefactored step matrices for one scheme, time step, and operator. The
/// tau rows of the operator are substituted into the step matrices and the
/// corresponding right-hand side entries are zeroed at every solve.
class StepWorkspace {
 public:
  StepWorkspace(const CompositeOperator& op, SchemeConfig cfg);

  const SchemeConfig& config() const { return cfg_; }
  const CompositeOperator& op() const { return *op_; }

  void cn_step(ZVec& u, const NonlinearDiag* nonlinearity, StepStats* stats);
  void irk4_step(ZVec& u, const NonlinearDiag* nonlinearity, StepStats* stats);
  void step(ZVec& u, const NonlinearDiag* nonlinearity, StepStats* stats);

  /// Max residual of the tau (matching/boundary) rows on a field.
  double tau_residual(std::span<const cplx> u) const;

  // 2-stage Gauss tableau
  double a11, a12, a21, a22, c1, c2, b1, b2;

 private:
  void zero_tau(ZVec& r) const;
  void solve(ZVec& r) const;

  const CompositeOperator* op_;
  SchemeConfig cfg_;
  kernels::Lu lu_;
  std::vector<int> tau_idx_;
  // IRK4 warm start: previous step's stages and cached operator product
  ZVec k1_, k2_, lk2_;
  bool have_stages_ = false;
  long current_step_ = 0;
  // scratch
  ZVec lun_, w_, r1_, r2_, knew_, lk1_, vdiag_;
};

struct ObserverContext {
  long step = 0;
  double t = 0.0;
  const CompositeField& field;
  StepStats stats;
};

using ObserverFn = std::function<void(const ObserverContext&)>;

struct PropagationReport {
  long steps_done = 0;
  int max_iterations = 0;
  double mean_iterations = 0.0;
};

/// Applies n_steps steps of the configured scheme, invoking the observer at
/// step 0, every `stride` steps, and at the final step. Fixed-point failures
/// propagate as StepFailure.
PropagationReport propagate(CompositeField& u, StepWorkspace& ws,
                            const NonlinearDiag* nonlinearity, long stride,
                            const ObserverFn& observer);

}  // namespace specmd
