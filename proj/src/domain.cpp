#include "specmd/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace specmd {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDecayTol = 1e-6;
}  // namespace

DomainMap DomainMap::finite_linear(double x_left, double x_right, int n) {
  if (!(x_left < x_right)) throw std::invalid_argument("finite_linear: x_left < x_right required");
  return DomainMap{Kind::FiniteLinear, x_left, x_right, n};
}

DomainMap DomainMap::compactified_left(double x_l, int n) {
  if (!(x_l < 0.0)) throw std::invalid_argument("compactified_left: x_l < 0 required");
  return DomainMap{Kind::CompactifiedLeft, x_l, 0.0, n};
}

DomainMap DomainMap::compactified_right(double x_r, int n) {
  if (!(x_r > 0.0)) throw std::invalid_argument("compactified_right: x_r > 0 required");
  return DomainMap{Kind::CompactifiedRight, x_r, 0.0, n};
}

DomainMap DomainMap::layer(double x_inner, double x_outer, int n) {
  if (x_inner == x_outer) throw std::invalid_argument("layer: zero width");
  return DomainMap{Kind::Layer, x_inner, x_outer, n};
}

double DomainMap::x_min() const {
  switch (kind) {
    case Kind::FiniteLinear: return a;
    case Kind::CompactifiedLeft: return -kInf;
    case Kind::CompactifiedRight: return a;
    case Kind::Layer: return std::min(a, b);
  }
  return 0.0;
}

double DomainMap::x_max() const {
  switch (kind) {
    case Kind::FiniteLinear: return b;
    case Kind::CompactifiedLeft: return a;
    case Kind::CompactifiedRight: return kInf;
    case Kind::Layer: return std::max(a, b);
  }
  return 0.0;
}

double map_to_physical(const DomainMap& map, double l) {
  switch (map.kind) {
    case DomainMap::Kind::FiniteLinear:
      return map.a * (1.0 + l) / 2.0 + map.b * (1.0 - l) / 2.0;
    case DomainMap::Kind::CompactifiedLeft:
      if (l == 1.0) return -kInf;
      return 2.0 * map.a / (1.0 - l);
    case DomainMap::Kind::CompactifiedRight:
      if (l == -1.0) return kInf;
      return 2.0 * map.a / (1.0 + l);
    case DomainMap::Kind::Layer: {
      const double lo = map.x_min(), hi = map.x_max();
      return lo * (1.0 + l) / 2.0 + hi * (1.0 - l) / 2.0;
    }
  }
  return 0.0;
}

double map_dl_dx(const DomainMap& map, double l) {
  switch (map.kind) {
    case DomainMap::Kind::FiniteLinear:
      return 2.0 / (map.a - map.b);
    case DomainMap::Kind::CompactifiedLeft:
      // s = (1-l)/(2 x_l), dl/dx = (1-l)^2/(2 x_l)
      return (1.0 - l) * (1.0 - l) / (2.0 * map.a);
    case DomainMap::Kind::CompactifiedRight:
      return -(1.0 + l) * (1.0 + l) / (2.0 * map.a);
    case DomainMap::Kind::Layer:
      return 2.0 / (map.x_min() - map.x_max());
  }
  return 0.0;
}

ZMat second_derivative_block(const DomainMap& map) {
  const int n = map.n_order;
  const DiffMatrix dm = diff_matrix(n);
  const DMat d2 = matmul(dm.entries, dm.entries);
  const ChebGrid grid = collocation_points(n);

  switch (map.kind) {
    case DomainMap::Kind::FiniteLinear:
    case DomainMap::Kind::Layer: {
      const double jac = map_dl_dx(map, 0.0);
      const double j2 = jac * jac;
      ZMat block(n + 1, n + 1);
      for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) block(i, j) = j2 * d2(i, j);
      return block;
    }
    case DomainMap::Kind::CompactifiedLeft:
    case DomainMap::Kind::CompactifiedRight: {
      const bool left = map.kind == DomainMap::Kind::CompactifiedLeft;
      // s linear in l; dl/ds constant
      const double dl_ds = left ? -2.0 * map.a : 2.0 * map.a;
      ZMat block(n + 1, n + 1);
      for (int i = 0; i <= n; ++i) {
        const double l = grid.points[i];
        const double s = left ? (1.0 - l) / (2.0 * map.a) : (1.0 + l) / (2.0 * map.a);
        const double c2 = s * s * s * s * dl_ds * dl_ds;
        const double c1 = 2.0 * s * s * s * dl_ds;
        for (int j = 0; j <= n; ++j) block(i, j) = c2 * d2(i, j) + c1 * dm.entries(i, j);
      }
      return block;
    }
  }
  return ZMat();
}

Decomposition::Decomposition(std::vector<DomainMap> maps) : maps_(std::move(maps)) {
  if (maps_.empty()) throw std::invalid_argument("decomposition needs at least one domain");
  offsets_.resize(maps_.size());
  int off = 0;
  for (std::size_t d = 0; d < maps_.size(); ++d) {
    offsets_[d] = off;
    off += maps_[d].n_order + 1;
    if (!order_cache_.count(maps_[d].n_order)) {
      auto po = std::make_shared<PerOrder>();
      po->grid = collocation_points(maps_[d].n_order);
      po->d = diff_matrix(maps_[d].n_order);
      po->tf = std::make_unique<ChebTransform>(maps_[d].n_order);
      po->ccw = clenshaw_curtis_weights(maps_[d].n_order);
      order_cache_[maps_[d].n_order] = std::move(po);
    }
  }
  total_size_ = off;

  physical_.resize(maps_.size());
  blocks_.reserve(maps_.size());
  for (std::size_t d = 0; d < maps_.size(); ++d) {
    const auto& g = order_cache_[maps_[d].n_order]->grid.points;
    physical_[d].resize(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) physical_[d][j] = map_to_physical(maps_[d], g[j]);
    blocks_.push_back(second_derivative_block(maps_[d]));
  }
  boundary_rows_ = matching_rows(*this);
}

Decomposition Decomposition::ced(double x_l, double x_r, int n_left, int n_mid, int n_right) {
  std::vector<DomainMap> maps;
  maps.push_back(DomainMap::compactified_left(x_l, n_left));
  maps.push_back(DomainMap::finite_linear(x_l, x_r, n_mid));
  maps.push_back(DomainMap::compactified_right(x_r, n_right));
  return Decomposition(std::move(maps));
}

Decomposition Decomposition::single_interval(double x_l, double x_r, int n) {
  std::vector<DomainMap> maps;
  maps.push_back(DomainMap::finite_linear(x_l, x_r, n));
  return Decomposition(std::move(maps));
}

std::span<const double> Decomposition::grid(int d) const { return per(d).grid.points; }
std::span<const double> Decomposition::physical(int d) const { return physical_[d]; }
const DMat& Decomposition::diff(int d) const { return per(d).d.entries; }
const ChebTransform& Decomposition::transform(int d) const { return *per(d).tf; }
std::span<const double> Decomposition::cc_weights(int d) const { return per(d).ccw; }

void Decomposition::set_spatial_block(int d, ZMat block) {
  if (block.rows() != static_cast<std::size_t>(maps_[d].n_order + 1))
    throw std::invalid_argument("set_spatial_block: size mismatch");
  blocks_[d] = std::move(block);
}

void Decomposition::add_boundary_row(TauRow row) { boundary_rows_.push_back(std::move(row)); }

std::vector<TauRow> matching_rows(const Decomposition& dec) {
  std::vector<TauRow> rows;
  for (int d = 0; d + 1 < dec.domain_count(); ++d) {
    const DomainMap& ml = dec.map(d);
    const DomainMap& mr = dec.map(d + 1);
    const int nl = ml.n_order, nr = mr.n_order;
    const double xb_l = dec.physical(d).back();
    const double xb_r = dec.physical(d + 1).front();
    const double scale = std::max({std::abs(xb_l), std::abs(xb_r), 1.0});
    if (!(std::abs(xb_l - xb_r) <= 1e-12 * scale))
      throw std::invalid_argument("matching_rows: adjacent domains do not share a boundary point");

    TauRow value;
    value.row = dec.offset(d) + nl;
    value.entries.push_back({dec.offset(d) + nl, cplx(1.0, 0.0)});
    value.entries.push_back({dec.offset(d + 1), cplx(-1.0, 0.0)});
    rows.push_back(std::move(value));

    TauRow deriv;
    deriv.row = dec.offset(d + 1);
    const double jl = map_dl_dx(ml, -1.0);
    const double jr = map_dl_dx(mr, 1.0);
    const DMat& dl = dec.diff(d);
    const DMat& dr = dec.diff(d + 1);
    for (int a = 0; a <= nl; ++a)
      deriv.entries.push_back({dec.offset(d) + a, cplx(jl * dl(nl, a), 0.0)});
    for (int a = 0; a <= nr; ++a)
      deriv.entries.push_back({dec.offset(d + 1) + a, cplx(-jr * dr(0, a), 0.0)});
    rows.push_back(std::move(deriv));
  }
  return rows;
}

std::span<cplx> CompositeField::domain(int d) {
  return std::span<cplx>(values).subspan(decomp->offset(d), decomp->order(d) + 1);
}

std::span<const cplx> CompositeField::domain(int d) const {
  return std::span<const cplx>(values).subspan(decomp->offset(d), decomp->order(d) + 1);
}

CompositeField zero_field(const Decomposition& dec) {
  return CompositeField{&dec, ZVec(dec.total_size(), cplx(0.0, 0.0))};
}

CompositeOperator assemble(const Decomposition& dec, std::span<const double> potential_diag) {
  if (static_cast<int>(potential_diag.size()) != dec.total_size())
    throw std::invalid_argument("assemble: potential diagonal length mismatch");
  const int n = dec.total_size();
  CompositeOperator op{ZMat(n, n, cplx(0.0, 0.0)), dec.boundary_rows()};
  for (int d = 0; d < dec.domain_count(); ++d) {
    const ZMat& b = dec.spatial_block(d);
    const int off = dec.offset(d);
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) op.matrix(off + i, off + j) = b(i, j);
  }
  for (int i = 0; i < n; ++i) op.matrix(i, i) += potential_diag[i];
  return op;
}

cplx domain_integral(const Decomposition& dec, int d, std::span<const cplx> g, double* residue) {
  const DomainMap& m = dec.map(d);
  const auto w = dec.cc_weights(d);
  switch (m.kind) {
    case DomainMap::Kind::FiniteLinear:
    case DomainMap::Kind::Layer: {
      const double half = (m.x_max() - m.x_min()) / 2.0;
      return half * clenshaw_curtis(g, w);
    }
    case DomainMap::Kind::CompactifiedLeft:
    case DomainMap::Kind::CompactifiedRight: {
      // -dx/dl = c / (1 -+ l)^2 with c = -2 x_l (left) or 2 x_r (right)
      const bool left = m.kind == DomainMap::Kind::CompactifiedLeft;
      const int sign = left ? -1 : 1;
      const double c = left ? -2.0 * m.a : 2.0 * m.a;
      const ZVec a = dec.transform(d).to_coefficients(g);
      // the first residue is the profile value at infinity: the decay
      // indicator (the second division's residue picks up interpolation
      // noise even for admissible profiles, so it is subtracted but not
      // reported)
      double r1 = 0.0;
      const ZVec b1 = divide_by_factor(a, sign, &r1);
      const ZVec b2 = divide_by_factor(b1, sign);
      if (residue) *residue = std::max(*residue, r1);
      const ZVec vals = dec.transform(d).from_coefficients(b2);
      return c * clenshaw_curtis(vals, w);
    }
  }
  return cplx(0.0, 0.0);
}

namespace {

double integral_of_profile(const CompositeField& u, bool whole_line) {
  const Decomposition& dec = *u.decomp;
  double total = 0.0;
  double scale = 0.0;
  for (const cplx& v : u.values) scale = std::max(scale, std::norm(v));
  double residue = 0.0;
  for (int d = 0; d < dec.domain_count(); ++d) {
    const bool finite = dec.map(d).kind == DomainMap::Kind::FiniteLinear;
    if (!whole_line && !finite) continue;
    ZVec g(dec.order(d) + 1);
    auto ud = u.domain(d);
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = std::norm(ud[j]);
    total += domain_integral(dec, d, g, &residue).real();
  }
  if (whole_line && residue > kDecayTol * std::max(scale, 1e-300))
    throw NonDecayingField("whole_line_l2: field does not decay at infinity");
  return std::max(total, 0.0);
}

}  // namespace

double whole_line_l2(const CompositeField& u) { return integral_of_profile(u, true); }

double window_l2(const CompositeField& u) { return integral_of_profile(u, false); }

std::vector<double> measure_weights(const Decomposition& dec, int d) {
  const DomainMap& m = dec.map(d);
  const auto w = dec.cc_weights(d);
  const auto grid = dec.grid(d);
  std::vector<double> out(w.size());
  switch (m.kind) {
    case DomainMap::Kind::FiniteLinear:
    case DomainMap::Kind::Layer: {
      const double half = (m.x_max() - m.x_min()) / 2.0;
      for (std::size_t j = 0; j < w.size(); ++j) out[j] = half * w[j];
      break;
    }
    case DomainMap::Kind::CompactifiedLeft:
      for (std::size_t j = 0; j < w.size(); ++j) {
        const double d1 = 1.0 - grid[j];
        out[j] = (d1 == 0.0) ? 0.0 : w[j] * (-2.0 * m.a) / (d1 * d1);
      }
      break;
    case DomainMap::Kind::CompactifiedRight:
      for (std::size_t j = 0; j < w.size(); ++j) {
        const double d1 = 1.0 + grid[j];
        out[j] = (d1 == 0.0) ? 0.0 : w[j] * (2.0 * m.a) / (d1 * d1);
      }
      break;
  }
  return out;
}

double whole_line_l2_nodewise(const CompositeField& u) {
  const Decomposition& dec = *u.decomp;
  double total = 0.0;
  double scale = 0.0;
  for (const cplx& v : u.values) scale = std::max(scale, std::norm(v));
  for (int d = 0; d < dec.domain_count(); ++d) {
    const std::vector<double> w = measure_weights(dec, d);
    auto ud = u.domain(d);
    const auto xs = dec.physical(d);
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double g = std::norm(ud[j]);
      if (std::isinf(xs[j]) && g > kDecayTol * std::max(scale, 1e-300))
        throw NonDecayingField("whole_line_l2: field does not decay at infinity");
      total += g * w[j];
    }
  }
  return std::max(total, 0.0);
}

cplx evaluate_at(const CompositeField& u, double x) {
  const Decomposition& dec = *u.decomp;
  int dom = -1;
  for (int d = 0; d < dec.domain_count(); ++d) {
    if (x >= dec.map(d).x_min() && x <= dec.map(d).x_max()) {
      dom = d;
      break;
    }
  }
  if (dom < 0) throw std::invalid_argument("evaluate_at: point outside the decomposition");
  const DomainMap& m = dec.map(dom);
  double l = 0.0;
  switch (m.kind) {
    case DomainMap::Kind::FiniteLinear:
      l = (2.0 * x - m.a - m.b) / (m.a - m.b);
      break;
    case DomainMap::Kind::CompactifiedLeft:
      l = std::isinf(x) ? 1.0 : 1.0 - 2.0 * m.a / x;
      break;
    case DomainMap::Kind::CompactifiedRight:
      l = std::isinf(x) ? -1.0 : 2.0 * m.a / x - 1.0;
      break;
    case DomainMap::Kind::Layer:
      l = (2.0 * x - m.x_min() - m.x_max()) / (m.x_min() - m.x_max());
      break;
  }
  const auto grid = dec.grid(dom);
  const auto vals = u.domain(dom);
  const int n = m.n_order;
  // barycentric weights for the Lobatto grid: (-1)^j, halved at the ends
  cplx num(0.0, 0.0);
  double den = 0.0;
  for (int j = 0; j <= n; ++j) {
    const double diff = l - grid[j];
    if (diff == 0.0) return vals[j];
    double wj = (j % 2 == 0) ? 1.0 : -1.0;
    if (j == 0 || j == n) wj *= 0.5;
    const double q = wj / diff;
    num += q * vals[j];
    den += q;
  }
  return num / den;
}

}  // namespace specmd
