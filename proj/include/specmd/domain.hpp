#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "specmd/cheb.hpp"
#include "specmd/dense.hpp"

namespace specmd {

/// One domain of the whole-line decomposition. Local index j = 0 is the
/// smallest-x end of the domain (l = 1 under all the maps used here), so
/// the concatenated global vector runs left to right along the real line.
struct DomainMap {
  enum class Kind { FiniteLinear, CompactifiedLeft, CompactifiedRight, Layer };
  Kind kind = Kind::FiniteLinear;
  // FiniteLinear: a = x_left, b = x_right (a < b)
  // CompactifiedLeft: a = x_l < 0; covers (-inf, x_l]
  // CompactifiedRight: a = x_r > 0; covers [x_r, +inf)
  // Layer: a = x_inner (interface with the computational domain), b = x_outer
  double a = 0.0, b = 0.0;
  int n_order = 0;

  static DomainMap finite_linear(double x_left, double x_right, int n);
  static DomainMap compactified_left(double x_l, int n);
  static DomainMap compactified_right(double x_r, int n);
  static DomainMap layer(double x_inner, double x_outer, int n);

  double x_min() const;  // -inf for CompactifiedLeft
  double x_max() const;  // +inf for CompactifiedRight
};

/// Physical coordinate of local Chebyshev coordinate l; returns +-inf at
/// the compactified infinity end.
double map_to_physical(const DomainMap& map, double l);

/// Jacobian dl/dx at local coordinate l (0 at the compactified infinity end).
double map_dl_dx(const DomainMap& map, double l);

/// Matrix of the second spatial derivative on the domain's grid, in local
/// coordinates. For compactified domains this is s^4 d_ss + 2 s^3 d_s with
/// s = 1/x linear in l; the s = 0 row vanishes identically and carries no
/// boundary condition.
ZMat second_derivative_block(const DomainMap& map);

/// A tau row: the designated global row of the operator is replaced by the
/// (sparse) entries below, the right-hand side entry by rhs.
struct TauRow {
  int row = 0;
  std::vector<std::pair<int, cplx>> entries;
  cplx rhs{0.0, 0.0};
};

class Decomposition {
 public:
  explicit Decomposition(std::vector<DomainMap> maps);

  static Decomposition ced(double x_l, double x_r, int n_left, int n_mid, int n_right);
  static Decomposition single_interval(double x_l, double x_r, int n);

  int domain_count() const { return static_cast<int>(maps_.size()); }
  int total_size() const { return total_size_; }
  const DomainMap& map(int d) const { return maps_[d]; }
  int offset(int d) const { return offsets_[d]; }
  int order(int d) const { return maps_[d].n_order; }

  std::span<const double> grid(int d) const;       // l_j
  std::span<const double> physical(int d) const;   // x_j, +-inf at compactified ends
  const DMat& diff(int d) const;                   // d/dl on the local grid
  const ChebTransform& transform(int d) const;
  std::span<const double> cc_weights(int d) const;
  const ZMat& spatial_block(int d) const { return blocks_[d]; }

  const std::vector<TauRow>& boundary_rows() const { return boundary_rows_; }

  // used by the PML builder
  void set_spatial_block(int d, ZMat block);
  void add_boundary_row(TauRow row);

 private:
  struct PerOrder {
    ChebGrid grid;
    DiffMatrix d;
    std::unique_ptr<ChebTransform> tf;
    std::vector<double> ccw;
  };
  const PerOrder& per(int d) const { return *order_cache_.at(maps_[d].n_order); }

  std::vector<DomainMap> maps_;
  std::vector<int> offsets_;
  int total_size_ = 0;
  std::map<int, std::shared_ptr<PerOrder>> order_cache_;
  std::vector<std::vector<double>> physical_;
  std::vector<ZMat> blocks_;
  std::vector<TauRow> boundary_rows_;
};

/// C^1 matching tau rows for every interior boundary of the decomposition:
/// a value-continuity row in the last slot of the left domain and a
/// derivative-continuity row (jacobian-weighted D rows) in the first slot
/// of the right domain.
std::vector<TauRow> matching_rows(const Decomposition& dec);

struct CompositeField {
  const Decomposition* decomp = nullptr;
  ZVec values;

  std::span<cplx> domain(int d);
  std::span<const cplx> domain(int d) const;
};

CompositeField zero_field(const Decomposition& dec);

struct CompositeOperator {
  ZMat matrix;
  std::vector<TauRow> tau_rows;
};

/// Block-diagonal spatial operator plus the diagonal potential; tau rows are
/// recorded but not substituted (each time-stepping scheme substitutes them
/// into its own step matrix).
CompositeOperator assemble(const Decomposition& dec, std::span<const double> potential_diag);

struct NonDecayingField : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Integral over domain d of the sampled profile g (values on the domain's
/// grid) with the whole-line measure dx. Compactified domains divide twice
/// by the linear factor of s in coefficient space before Clenshaw-Curtis;
/// the subtracted boundary residues are maxed into *residue when non-null.
cplx domain_integral(const Decomposition& dec, int d, std::span<const cplx> g,
                     double* residue = nullptr);

/// Integral of |u|^2 over the whole line. Throws NonDecayingField when the
/// coefficient residues of the compactified-domain divisions exceed the
/// decay tolerance relative to the largest profile value.
double whole_line_l2(const CompositeField& u);

/// Per-node quadrature weights carrying the whole-line measure dx; the
/// weight of a compactified infinity node is zero (profiles integrated this
/// way must vanish there). Unlike the coefficient-division route this is
/// robust for noisy profiles such as squared error fields, whose
/// coefficient tails do not decay.
std::vector<double> measure_weights(const Decomposition& dec, int d);

/// Whole-line integral of |u|^2 by the node-wise measure; throws
/// NonDecayingField when the profile does not vanish at the infinity nodes.
double whole_line_l2_nodewise(const CompositeField& u);

/// Same integral restricted to the FiniteLinear domains (the computational
/// window of PML/TBC layouts).
double window_l2(const CompositeField& u);

/// Barycentric evaluation of the field at an arbitrary physical point.
cplx evaluate_at(const CompositeField& u, double x);

}  // namespace specmd
