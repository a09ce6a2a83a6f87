#pragma once

#include <functional>
#include <optional>
#include <string>

#include "specmd/domain.hpp"

namespace specmd {

/// Potential term V in i u_t + u_xx + V u = 0. The cubic case contributes
/// the diagonal -2 rho |u|^2 (focusing for rho = -1); External is a plain
/// function of x baked into the assembled operator.
struct PotentialSpec {
  enum class Kind { Zero, Cubic, External };
  Kind kind = Kind::Zero;
  int rho = -1;
  std::function<double(double)> external;

  static PotentialSpec zero() { return {Kind::Zero, -1, nullptr}; }
  static PotentialSpec cubic(int rho) { return {Kind::Cubic, rho, nullptr}; }
  static PotentialSpec external_potential(std::function<double(double)> v) {
    return {Kind::External, -1, std::move(v)};
  }
};

struct ExactSolution {
  std::function<cplx(double x, double t)> eval;
  cplx operator()(double x, double t) const { return eval(x, t); }
};

cplx eval_gaussian(double x, double t);
cplx eval_soliton(double x, double t, double a, double c);
cplx eval_peregrine(double x, double t);

ExactSolution gaussian_solution();
ExactSolution soliton_solution(double a, double c);
ExactSolution peregrine_solution();

/// Galilei boost u -> u(x - c t, t) exp(i c x / 2 - i c^2 t / 4).
ExactSolution galilei_boost(ExactSolution base, double c);

CompositeField sample_solution(const Decomposition& dec, const ExactSolution& sol, double t);

/// Peregrine initial data plus amplitude * exp(-x^2).
CompositeField perturbed_peregrine_initial(const Decomposition& dec, double amplitude);

enum class ErrorWindow { WholeLine, Computational };

struct VanishingDenominator : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// ||u - u_ex||_2 / ||u_ex||_2 over the window (whole line, or the
/// FiniteLinear domains for PML/TBC layouts).
double error_delta(const CompositeField& u, const CompositeField& u_exact, ErrorWindow window);

/// Max-norm ratio over all grid nodes.
double error_delta_inf(const CompositeField& u, const CompositeField& u_exact);

/// Max absolute nodal difference restricted to the FiniteLinear domains.
double window_max_error(const CompositeField& u, const CompositeField& u_exact);

/// E = 1/2 int { |u_x|^2 - |u|^2 (|u|^2 - 1) } dx, defined for fields that
/// approach a unimodular background (or zero) at infinity. u_x is taken per
/// domain with the jacobian-scaled differentiation matrix; the compactified
/// measure is handled by coefficient-space division.
double energy_functional(const CompositeField& u);

}  // namespace specmd
