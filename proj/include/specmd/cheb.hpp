#pragma once

#include <span>
#include <vector>

#include "specmd/dense.hpp"

namespace specmd {

/// Chebyshev-Lobatto collocation grid on [-1,1]: l_j = cos(j pi / N),
/// strictly decreasing, endpoints exactly +-1.
struct ChebGrid {
  int n_order = 0;
  std::vector<double> points;
};

ChebGrid collocation_points(int n_order);

/// Differentiation matrix of the degree-N Lagrange interpolant on the
/// Chebyshev grid. Diagonal entries use the negative-sum trick, so every
/// row sums to zero exactly.
struct DiffMatrix {
  int n_order = 0;
  DMat entries;
};

DiffMatrix diff_matrix(int n_order);

/// Value <-> Chebyshev coefficient transforms by collocation on the
/// Lobatto grid (dense cosine matrices; exact up to rounding).
class ChebTransform {
 public:
  explicit ChebTransform(int n_order);

  void to_coefficients(std::span<const cplx> values, std::span<cplx> coeffs) const;
  void from_coefficients(std::span<const cplx> coeffs, std::span<cplx> values) const;
  ZVec to_coefficients(std::span<const cplx> values) const;
  ZVec from_coefficients(std::span<const cplx> coeffs) const;

  int n_order() const { return n_; }

 private:
  int n_;
  DMat fwd_;  // values -> coefficients
  DMat bwd_;  // coefficients -> values
};

/// Clenshaw-Curtis weights on the Lobatto grid; all positive, sum 2.
std::vector<double> clenshaw_curtis_weights(int n_order);

cplx clenshaw_curtis(std::span<const cplx> values, std::span<const double> weights);

/// Coefficient-space division by (l + sign): given a with
///   sum a_n T_n(l) - f(-sign) = (l + sign) * sum b_n T_n(l),
/// returns b. The boundary value f(-sign) = sum a_n T_n(-sign) is
/// subtracted first so that every input is admissible; its magnitude is
/// reported through `residue` when non-null. The recursion is solved
/// backward from b_N = 0.
ZVec divide_by_factor(std::span<const cplx> a, int sign, double* residue = nullptr);

/// Exact coefficient-space multiplication by (l + sign); the result is one
/// entry longer than the input.
ZVec multiply_by_factor(std::span<const cplx> b, int sign);

/// Chebyshev coefficients of the derivative (same length, top entry zero).
ZVec differentiate_coefficients(std::span<const cplx> a);

}  // namespace specmd
