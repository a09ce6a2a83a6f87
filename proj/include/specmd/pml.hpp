#pragma once

#include "specmd/domain.hpp"

namespace specmd {

/// Perfectly-matched-layer parameters. The complex rotation R = exp(i pi/4)
/// is fixed.
struct PmlConfig {
  double delta = 0.0;
  double sigma0 = 0.0;

  static cplx rotation() { return std::polar(1.0, M_PI / 4.0); }
};

enum class PmlSide { Left, Right };

/// Quadratic damping profile sigma0 (x - x_l)^2 / sigma0 (x - x_r)^2 inside
/// the corresponding layer; x outside the layer is rejected.
double sigma_profile(double x, const PmlConfig& cfg, PmlSide side, double x_l, double x_r);

/// Matrix of (1/(1+R sigma)) d_x ((1/(1+R sigma)) d_x) on the layer grid.
ZMat deformed_block(const DomainMap& layer, const PmlConfig& cfg, double x_l, double x_r);

/// Three-domain decomposition [x_l - delta, x_l], [x_l, x_r], [x_r, x_r + delta]
/// with the usual C^1 matching rows at x_l, x_r, Dirichlet-zero tau rows at
/// the outer grid ends, and complex-deformed second-derivative blocks in the
/// layers.
Decomposition build_pml_decomposition(double x_l, double x_r, const PmlConfig& cfg, int n_left,
                                      int n_mid, int n_right);

}  // namespace specmd
