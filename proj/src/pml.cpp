#include "specmd/pml.hpp"

#include <cmath>

namespace specmd {

double sigma_profile(double x, const PmlConfig& cfg, PmlSide side, double x_l, double x_r) {
  const double eps = 1e-12 * std::max({std::abs(x_l), std::abs(x_r), cfg.delta, 1.0});
  if (side == PmlSide::Left) {
    if (x < x_l - cfg.delta - eps || x > x_l + eps)
      throw std::invalid_argument("sigma_profile: x outside the left layer");
    return cfg.sigma0 * (x - x_l) * (x - x_l);
  }
  if (x < x_r - eps || x > x_r + cfg.delta + eps)
    throw std::invalid_argument("sigma_profile: x outside the right layer");
  return cfg.sigma0 * (x - x_r) * (x - x_r);
}

ZMat deformed_block(const DomainMap& layer, const PmlConfig& cfg, double x_l, double x_r) {
  if (layer.kind != DomainMap::Kind::Layer)
    throw std::invalid_argument("deformed_block: layer map required");
  const int n = layer.n_order;
  const PmlSide side = layer.b < layer.a ? PmlSide::Left : PmlSide::Right;
  const ChebGrid grid = collocation_points(n);
  const DiffMatrix dm = diff_matrix(n);
  const double jac = map_dl_dx(layer, 0.0);
  const cplx rot = PmlConfig::rotation();

  // D_x scaled by the per-node deformation factor 1/(1 + R sigma)
  ZMat adx(n + 1, n + 1);
  for (int i = 0; i <= n; ++i) {
    const double x = map_to_physical(layer, grid.points[i]);
    const cplx a = 1.0 / (1.0 + rot * sigma_profile(x, cfg, side, x_l, x_r));
    for (int j = 0; j <= n; ++j) adx(i, j) = a * jac * dm.entries(i, j);
  }

  ZMat block(n + 1, n + 1, cplx(0.0, 0.0));
  for (int i = 0; i <= n; ++i)
    for (int k = 0; k <= n; ++k) {
      const cplx v = adx(i, k);
      if (v == cplx(0.0, 0.0)) continue;
      for (int j = 0; j <= n; ++j) block(i, j) += v * adx(k, j);
    }
  return block;
}

Decomposition build_pml_decomposition(double x_l, double x_r, const PmlConfig& cfg, int n_left,
                                      int n_mid, int n_right) {
  if (!(cfg.delta > 0.0)) throw std::invalid_argument("pml: delta > 0 required");
  if (!(cfg.sigma0 >= 0.0)) throw std::invalid_argument("pml: sigma0 >= 0 required");
  std::vector<DomainMap> maps;
  maps.push_back(DomainMap::layer(x_l, x_l - cfg.delta, n_left));
  maps.push_back(DomainMap::finite_linear(x_l, x_r, n_mid));
  maps.push_back(DomainMap::layer(x_r, x_r + cfg.delta, n_right));
  Decomposition dec(std::move(maps));
  dec.set_spatial_block(0, deformed_block(dec.map(0), cfg, x_l, x_r));
  dec.set_spatial_block(2, deformed_block(dec.map(2), cfg, x_l, x_r));
  TauRow left;
  left.row = 0;
  left.entries.push_back({0, cplx(1.0, 0.0)});
  dec.add_boundary_row(std::move(left));
  TauRow right;
  right.row = dec.total_size() - 1;
  right.entries.push_back({dec.total_size() - 1, cplx(1.0, 0.0)});
  dec.add_boundary_row(std::move(right));
  return dec;
}

}  // namespace specmd
