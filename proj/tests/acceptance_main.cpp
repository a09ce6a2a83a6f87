// Acceptance suite: one pass/fail line per criterion, exit nonzero on any
// failure. Criteria can be selected by number on the command line
// (default: all); --extras appends the slower reproductions that are
// reported but not gated.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "specmd/harness.hpp"
#include "specmd/pml.hpp"
#include "specmd/tbc.hpp"

using namespace specmd;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void report(int number, const char* title, const Outcome& o, double seconds) {
  std::printf("[%s] C%d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", number, title,
              o.detail.c_str(), seconds);
  std::fflush(stdout);
  if (!o.pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

ExperimentConfig linear_ced_config(long n_t) {
  ExperimentConfig cfg = ExperimentConfig::parse(
      "problem = gaussian\nboundary = ced\nscheme = cn\nx_l = -5\nx_r = 5\n"
      "n.left = 20\nn.interior = 120\nn.right = 600\nn_t = 1000\nt_final = 0.5\n");
  cfg.n_t = n_t;
  return cfg;
}

// ---- criterion 1: CN second-order convergence on the linear problem ----
Outcome criterion1() {
  const ConvergenceResult res = convergence_study(linear_ced_config(1000), {1000, 3000, 10000});
  std::string detail = "slope " + fmt(res.slope) + " from deltas";
  for (const auto& p : res.points) detail += " " + fmt(p.error);
  const bool pass = res.slope >= 1.7 && res.slope <= 2.3 && !res.floor_dominated;
  return {pass, detail + " (bounds [1.7, 2.3])"};
}

// ---- criterion 2: IRK4 precision floor on the linear problem ----
Outcome criterion2() {
  ExperimentConfig cfg = linear_ced_config(10000);
  cfg.scheme = Scheme::IRK4;
  cfg.fp_tolerance = 1e-12;
  const RunResult r = run_experiment(cfg);
  if (!r.completed) return {false, "run failed: " + r.failure};
  const double delta = *r.final_sample().delta;
  return {delta <= 1e-10,
          "delta(0.5) = " + fmt(delta) + " (bound 1e-10), max iters " +
              std::to_string(r.prop.max_iterations)};
}

// ---- criterion 3: Peregrine propagation at machine precision ----
Outcome criterion3() {
  const Decomposition dec = Decomposition::ced(-10.0, 10.0, 50, 700, 50);
  std::vector<double> v(dec.total_size(), 0.0);
  const CompositeOperator op = assemble(dec, v);
  const long n_t = 1000;
  SchemeConfig sc{Scheme::IRK4, 1.0 / n_t, n_t, 1e-12, 200};
  StepWorkspace ws(op, sc);
  const NonlinearDiag nl = cubic_nonlinearity(-1);
  CompositeField u = sample_solution(dec, peregrine_solution(), 0.0);
  double worst = 0.0;
  const PropagationReport rep = propagate(u, ws, &nl, 1, [&](const ObserverContext& ctx) {
    const CompositeField uex = sample_solution(dec, peregrine_solution(), ctx.t);
    worst = std::max(worst, error_delta_inf(ctx.field, uex));
  });
  return {worst < 1e-10, "max delta_inf = " + fmt(worst) + " over t <= 1 (bound 1e-10), max iters " +
                             std::to_string(rep.max_iterations)};
}

// ---- criterion 4: Peregrine energy of the exact initial data ----
Outcome criterion4() {
  // the s^-2 measure amplifies one ulp of sampled background by ~N^4/50,
  // so the bound is checked at exterior order 12 (which fully resolves the
  // analytic exterior integrand); the preset-order value is reported too
  const Decomposition tight = Decomposition::ced(-10.0, 10.0, 12, 700, 12);
  const double e12 = energy_functional(sample_solution(tight, peregrine_solution(), 0.0));
  const Decomposition preset = Decomposition::ced(-10.0, 10.0, 50, 700, 50);
  const double e50 = energy_functional(sample_solution(preset, peregrine_solution(), 0.0));
  return {std::abs(e12) <= 1e-12, "|E| = " + fmt(std::abs(e12)) +
                                      " at exterior order 12 (bound 1e-12); order 50 gives " +
                                      fmt(std::abs(e50))};
}

// ---- criterion 5: soliton whole-line accuracy with IRK4 ----
Outcome criterion5() {
  ExperimentConfig cfg = ExperimentConfig::parse(
      "problem = soliton\nboundary = ced\nscheme = irk4\nx_l = -25\nx_r = 25\n"
      "n.left = 20\nn.interior = 700\nn.right = 500\nn_t = 10000\nt_final = 2\n"
      "fp.tolerance = 1e-11\nobserver.stride = 1000\n");
  const RunResult r = run_experiment(cfg);
  if (!r.completed) return {false, "run failed: " + r.failure};
  const double delta = *r.final_sample().delta;
  return {delta <= 1e-8, "delta(2) = " + fmt(delta) + " (bound 1e-8), max iters " +
                             std::to_string(r.prop.max_iterations)};
}

// ---- criterion 6: linear TBC transparency ----
Outcome criterion6() {
  const Decomposition dec = Decomposition::single_interval(-5.0, 5.0, 120);
  const long n_t = 10000;
  const double h = 0.5 / n_t;
  TbcLinearStepper stepper(dec, h, n_t);
  CompositeField u = sample_solution(dec, gaussian_solution(), 0.0);
  stepper.initialize(u);
  double delta_03 = 0.0, worst_after = 0.0;
  for (long s = 1; s <= n_t; ++s) {
    stepper.step(u);
    if (s % 100 != 0) continue;
    const double t = s * h;
    const CompositeField uex = sample_solution(dec, gaussian_solution(), t);
    const double delta = error_delta(u, uex, ErrorWindow::Computational);
    if (std::abs(t - 0.3) < 1e-12) delta_03 = delta;
    if (t >= 0.35) worst_after = std::max(worst_after, delta);
  }
  const bool pass = delta_03 > 0.0 && worst_after <= 2.0 * delta_03;
  return {pass, "delta(0.3) = " + fmt(delta_03) + ", max delta over [0.35,0.5] = " +
                    fmt(worst_after) + " (bound 2x)"};
}

double tbc_nls_final_windowed_delta(long n_t, int* max_iters) {
  const Decomposition dec = Decomposition::single_interval(-25.0, 25.0, 700);
  const double h = 2.0 / n_t;
  TbcNlsOptions opt;
  TbcNlsStepper stepper(dec, h, n_t, opt);
  const ExactSolution sol = soliton_solution(2.0, 15.0);
  CompositeField u = sample_solution(dec, sol, 0.0);
  stepper.initialize(u);
  StepStats st;
  for (long s = 1; s <= n_t; ++s) {
    stepper.step(u, &st);
    if (max_iters) *max_iters = std::max(*max_iters, st.iterations);
  }
  const CompositeField uex = sample_solution(dec, sol, 2.0);
  return error_delta(u, uex, ErrorWindow::Computational);
}

// ---- criterion 7: nonlinear TBC post-crossing degradation magnitudes ----
Outcome criterion7() {
  int iters = 0;
  const double d3 = tbc_nls_final_windowed_delta(1000, &iters);
  const double d4 = tbc_nls_final_windowed_delta(10000, &iters);
  const bool pass = d3 >= 1.0 / 3.0 && d3 <= 3.0 && d4 >= 1e-2 / 3.0 && d4 <= 3e-2;
  return {pass, "windowed delta(2): " + fmt(d3) + " at n_t=1e3 (band [0.33,3]), " + fmt(d4) +
                    " at n_t=1e4 (band [3.3e-3,3e-2])"};
}

double pml_nls_final_max_error(long n_t, int* max_iters) {
  const Decomposition dec =
      build_pml_decomposition(-25.0, 25.0, PmlConfig{1.0, 3.0}, 50, 700, 100);
  std::vector<double> v(dec.total_size(), 0.0);
  const CompositeOperator op = assemble(dec, v);
  SchemeConfig sc{Scheme::CN, 2.0 / n_t, n_t, 1e-8, 200};
  StepWorkspace ws(op, sc);
  const NonlinearDiag nl = cubic_nonlinearity(-1);
  const ExactSolution sol = soliton_solution(2.0, 15.0);
  CompositeField u = sample_solution(dec, sol, 0.0);
  const PropagationReport rep = propagate(u, ws, &nl, n_t, nullptr);
  if (max_iters) *max_iters = std::max(*max_iters, rep.max_iterations);
  const CompositeField uex = sample_solution(dec, sol, 2.0);
  return window_max_error(u, uex);
}

// ---- criterion 8: PML NLS layer-error saturation ----
Outcome criterion8() {
  int iters = 0;
  const double e3 = pml_nls_final_max_error(1000, &iters);
  const double e4 = pml_nls_final_max_error(10000, &iters);
  const double change = std::abs(e4 - e3) / e3;
  const bool pass = change < 0.2 && e4 >= 1e-2 / 3.0 && e4 <= 3e-2;
  return {pass, "max window error at t=2: " + fmt(e3) + " (1e3) vs " + fmt(e4) +
                    " (1e4), change " + fmt(100.0 * change) + "% (bound 20%, band [3.3e-3,3e-2])"};
}

// ---- criterion 9: property suite ----
Outcome criterion9() {
  std::vector<std::string> failures;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  };
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);

  {  // Chebyshev polynomial exactness of D and transform round trip
    const int n = 24;
    const ChebGrid g = collocation_points(n);
    const DiffMatrix d = diff_matrix(n);
    std::vector<double> coeff(n + 1);
    for (auto& c : coeff) c = dist(rng);
    ZVec f(n + 1), fp(n + 1), df(n + 1);
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
    kernels::matvec_real(d.entries, f, df);
    double worst = 0.0;
    for (int j = 0; j <= n; ++j) worst = std::max(worst, std::abs(df[j] - fp[j]));
    expect(worst <= 1e-12, "polynomial differentiation exactness");

    const ChebTransform tf(n);
    const ZVec back = tf.from_coefficients(tf.to_coefficients(f));
    worst = 0.0;
    for (int j = 0; j <= n; ++j) worst = std::max(worst, std::abs(back[j] - f[j]));
    expect(worst <= 1e-12, "transform round trip");
  }

  {  // divide/multiply round trip
    for (int sign : {1, -1}) {
      ZVec b(25);
      for (auto& v : b) v = cplx(dist(rng), dist(rng));
      const ZVec a = multiply_by_factor(b, sign);
      const ZVec b2 = divide_by_factor(a, sign);
      double worst = 0.0;
      for (std::size_t k = 0; k < b.size(); ++k) worst = std::max(worst, std::abs(b2[k] - b[k]));
      expect(worst <= 1e-12, "divide/multiply round trip");
    }
  }

  {  // Clenshaw-Curtis exactness on polynomials
    const int n = 18;
    const ChebGrid g = collocation_points(n);
    const auto w = clenshaw_curtis_weights(n);
    std::vector<double> coeff(n + 1);
    for (auto& c : coeff) c = dist(rng);
    ZVec f(n + 1);
    double exact = 0.0;
    for (int k = 0; k <= n; ++k)
      if (k % 2 == 0) exact += coeff[k] * 2.0 / (k + 1.0);
    for (int j = 0; j <= n; ++j) {
      double v = 0.0, p = 1.0;
      for (int k = 0; k <= n; ++k) {
        v += coeff[k] * p;
        p *= g.points[j];
      }
      f[j] = v;
    }
    expect(std::abs(clenshaw_curtis(f, w) - exact) <= 1e-12, "clenshaw-curtis exactness");
  }

  {  // tau residuals after every step and iteration budget; IRK4 constrains
     // the stages, so the field inherits the initial residual and the data
     // must be resolved (peregrine needs the preset order 700 on [-10,10])
    const Decomposition dec = Decomposition::ced(-10.0, 10.0, 50, 700, 50);
    std::vector<double> v(dec.total_size(), 0.0);
    const CompositeOperator op = assemble(dec, v);
    SchemeConfig sc{Scheme::IRK4, 1e-3, 20, 1e-10, 200};
    StepWorkspace ws(op, sc);
    const NonlinearDiag nl = cubic_nonlinearity(-1);
    CompositeField u = sample_solution(dec, peregrine_solution(), 0.0);
    double worst = 0.0;
    const PropagationReport rep = propagate(u, ws, &nl, 1, [&](const ObserverContext& ctx) {
      if (ctx.step == 0) return;
      worst = std::max(worst, ws.tau_residual(ctx.field.values));
    });
    expect(worst <= 10.0 * sc.fp_tolerance, "tau residual after every step");
    expect(rep.max_iterations < 30, "iteration count stays below 30");
  }

  {  // parity preservation
    const Decomposition dec = Decomposition::ced(-5.0, 5.0, 48, 96, 48);
    std::vector<double> v(dec.total_size(), 0.0);
    const CompositeOperator op = assemble(dec, v);
    SchemeConfig sc{Scheme::IRK4, 1e-3, 30, 1e-11, 200};
    StepWorkspace ws(op, sc);
    const NonlinearDiag nl = cubic_nonlinearity(-1);
    CompositeField u = perturbed_peregrine_initial(dec, 0.1);
    propagate(u, ws, &nl, 30, nullptr);
    double worst = 0.0;
    const int n = dec.total_size();
    for (int i = 0; i < n / 2; ++i)
      worst = std::max(worst, std::abs(u.values[i] - u.values[n - 1 - i]));
    expect(worst <= 1e-10, "parity preservation");
  }

  {  // Galilei covariance of the propagated field
    const Decomposition dec = Decomposition::ced(-5.0, 5.0, 16, 120, 160);
    const double t_final = 0.2, c = 2.0;
    const ExactSolution still = galilei_boost(gaussian_solution(), -16.0);
    const ExactSolution moving = galilei_boost(still, c);
    std::vector<double> v(dec.total_size(), 0.0);
    const CompositeOperator op = assemble(dec, v);
    auto run = [&](const ExactSolution& sol) {
      SchemeConfig sc{Scheme::IRK4, t_final / 100, 100, 1e-12, 200};
      StepWorkspace ws(op, sc);
      CompositeField u = sample_solution(dec, sol, 0.0);
      propagate(u, ws, nullptr, 100, nullptr);
      return u;
    };
    const CompositeField ua = run(moving);
    const CompositeField ub = run(still);
    const double da =
        error_delta(ua, sample_solution(dec, moving, t_final), ErrorWindow::WholeLine);
    const double db =
        error_delta(ub, sample_solution(dec, still, t_final), ErrorWindow::WholeLine);
    double worst = 0.0, scale = 0.0;
    auto xs = dec.physical(1);
    auto va = ua.domain(1);
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (xs[j] - c * t_final < -5.0) continue;
      const cplx boosted = evaluate_at(ub, xs[j] - c * t_final) *
                           std::exp(cplx(0.0, 0.5 * c * xs[j] - 0.25 * c * c * t_final));
      worst = std::max(worst, std::abs(va[j] - boosted));
      scale = std::max(scale, std::abs(va[j]));
    }
    expect(worst <= 10.0 * (da + db + 1e-12) * scale, "galilei covariance of fields");
  }

  {  // aux-system corner identities
    const double xr = 12.0, h = 1e-2;
    TbcNlsBoundary b(-1, h);
    auto g0 = [&](double t) { return eval_soliton(xr, t, 2.0, 15.0); };
    auto g1 = [&](double t) {
      return eval_soliton(xr, t, 2.0, 15.0) *
             (cplx(0.0, 7.5) - std::sqrt(2.0) * std::tanh(std::sqrt(2.0) * (xr - 15.0 * t)));
    };
    b.initialize(g0(0.0), g1(0.0));
    double worst = 0.0;
    for (int n = 0; n < 60; ++n) {
      const double t1 = (n + 1) * h;
      b.advance_working(g0(t1), g1(t1));
      const long top = n + 1;
      worst = std::max(worst, std::abs(b.l1_working()[top] - cplx(0.0, 0.5) * g1(t1)));
      worst = std::max(worst, std::abs(b.m1_working()[top] - g0(t1)));
      worst = std::max(worst, std::abs(b.l2_working()[0]));
      worst = std::max(worst, std::abs(b.m2_working()[0]));
      b.commit(g0(t1), g1(t1));
    }
    expect(worst <= 1e-12, "aux corner identities");
  }

  {  // influence-decomposition linearity
    const Decomposition dec = Decomposition::single_interval(-5.0, 5.0, 80);
    TbcCore core(dec, 1e-3, 10);
    ZVec interior(81);
    for (auto& v : interior) v = cplx(dist(rng), dist(rng));
    ZVec w0 = interior;
    core.interior_solve(w0);
    const cplx ur = core.neumann_right(w0);
    const cplx ul = core.neumann_left(w0);
    double worst = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      const cplx g0r(dist(rng), dist(rng)), g0l(dist(rng), dist(rng));
      ZVec combined(81);
      for (int j = 0; j <= 80; ++j) combined[j] = w0[j] + g0r * core.wr[j] + g0l * core.wl[j];
      worst = std::max(worst, std::abs(core.neumann_right(combined) -
                                       (ur + core.gamma_rr * g0r + core.gamma_rl * g0l)));
      worst = std::max(worst, std::abs(core.neumann_left(combined) -
                                       (ul + core.gamma_lr * g0r + core.gamma_ll * g0l)));
    }
    expect(worst <= 1e-12, "influence-decomposition linearity");
  }

  std::string detail;
  if (failures.empty()) {
    detail = "9 property groups verified";
  } else {
    detail = "failed:";
    for (const auto& f : failures) detail += " [" + f + "]";
  }
  return {failures.empty(), detail};
}

// ---- non-gating extras: slower paper reproductions ----
void extras() {
  std::printf("--- extras (reported, not gated) ---\n");
  {
    // perturbed Peregrine: relative energy drift at t = 1
    ExperimentConfig cfg = ExperimentConfig::parse(
        "problem = peregrine-perturbed\nboundary = ced\nscheme = irk4\n"
        "x_l = -10\nx_r = 10\nn.left = 400\nn.interior = 400\nn.right = 400\n"
        "n_t = 1000\nt_final = 1\nfp.tolerance = 1e-10\nobserver.stride = 1000\n");
    const RunResult r = run_experiment(cfg);
    const double de = r.report.samples.back().delta_e.value_or(-1.0);
    std::printf("[EXTRA] perturbed peregrine delta_E(1) = %s (paper: ~8.8e-3)\n", fmt(de).c_str());
    std::fflush(stdout);
  }
  {
    // sigma0 sweep on the linear problem with IRK4: 40 grows the most after
    // the packet enters the layer
    ExperimentConfig cfg = ExperimentConfig::parse(
        "problem = gaussian\nboundary = pml\nscheme = irk4\nx_l = -5\nx_r = 5\n"
        "n.left = 20\nn.interior = 120\nn.right = 50\npml.delta = 0.5\npml.sigma0 = 50\n"
        "n_t = 10000\nt_final = 0.5\nfp.tolerance = 1e-12\nobserver.stride = 100\n");
    std::vector<double> growth;
    for (double sigma : {40.0, 50.0, 60.0}) {
      ExperimentConfig c = cfg;
      c.pml_sigma0 = sigma;
      const RunResult r = run_experiment(c);
      double at_crossing = 0.0, later = 0.0;
      for (const ErrorSample& s : r.report.samples) {
        if (std::abs(s.t - 0.3125) < 5e-3) at_crossing = std::max(at_crossing, *s.delta);
        if (s.t >= 0.4) later = std::max(later, *s.delta);
      }
      growth.push_back(later / at_crossing);
      std::printf("[EXTRA] pml linear sigma0=%g: delta near crossing %s, post-entry growth %sx\n",
                  sigma, fmt(at_crossing).c_str(), fmt(growth.back()).c_str());
      std::fflush(stdout);
    }
    std::printf("[EXTRA] strongest post-entry growth at sigma0=40: %s\n",
                growth[0] > growth[1] && growth[0] > growth[2] ? "yes" : "no");
  }
  {
    // sigma0 sweep on the NLS soliton: 2 and 10 are worst
    ExperimentConfig cfg = ExperimentConfig::parse(
        "problem = soliton\nboundary = pml\nscheme = cn\nx_l = -25\nx_r = 25\n"
        "n.left = 50\nn.interior = 700\nn.right = 100\npml.delta = 1\npml.sigma0 = 3\n"
        "n_t = 5000\nt_final = 2\nobserver.stride = 100\n");
    const SweepResult res = sigma_sweep(cfg, {2.0, 3.0, 5.0, 10.0});
    for (const auto& e : res.entries)
      std::printf("[EXTRA] pml nls sigma0=%g: peak windowed delta %s\n", e.sigma0,
                  fmt(e.peak_error).c_str());
    std::printf("[EXTRA] best sigma0 = %g (paper picks 3; worst at 2 and 10)\n", res.best_sigma0);
    std::fflush(stdout);
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  bool run_extras = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--extras") == 0)
      run_extras = true;
    else
      selected.insert(std::atoi(argv[i]));
  }

  struct Entry {
    int number;
    const char* title;
    std::function<Outcome()> fn;
  };
  const std::vector<Entry> entries = {
      {1, "cn second-order convergence (linear gaussian, ced)", criterion1},
      {2, "irk4 precision floor (linear gaussian, ced, n_t=1e4)", criterion2},
      {3, "peregrine propagation (irk4, n_t=1000, t<=1)", criterion3},
      {4, "peregrine energy of exact initial data", criterion4},
      {5, "soliton ced irk4 accuracy (n_t=1e4, t=2)", criterion5},
      {6, "tbc linear transparency (n_t=1e4)", criterion6},
      {7, "tbc nls degradation magnitudes", criterion7},
      {8, "pml nls saturation", criterion8},
      {9, "property suites", criterion9},
  };

  for (const Entry& e : entries) {
    if (!selected.empty() && !selected.count(e.number)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = e.fn();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(e.number, e.title, o, secs);
  }

  if (run_extras) extras();

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all selected criteria passed\n");
  return 0;
}
