#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "nlsb/point.hpp"
#include "nlsb/potential.hpp"

namespace nlsb {

/// Uniform tensor grid over a box. Node (i0, i1, i2) is stored row-major with
/// the last active axis fastest. Inactive axes have count 1.
class TensorGrid {
 public:
  TensorGrid() = default;
  TensorGrid(int dim, std::array<int, 3> counts, Point lo, Point hi);

  int dim() const { return dim_; }
  const std::array<int, 3>& counts() const { return counts_; }
  const Point& lo() const { return lo_; }
  const Point& hi() const { return hi_; }
  const Point& spacing() const { return spacing_; }
  std::size_t size() const { return size_; }
  /// Flat-index step of one node along each axis.
  const std::array<std::size_t, 3>& strides() const { return strides_; }
  double cell_volume() const;

  std::size_t index(int i0, int i1, int i2) const {
    return static_cast<std::size_t>(i0) * strides_[0] + static_cast<std::size_t>(i1) * strides_[1] +
           static_cast<std::size_t>(i2);
  }
  std::array<int, 3> multi_index(std::size_t flat) const;
  Point node(std::size_t flat) const;
  Point node(int i0, int i1, int i2) const {
    return {lo_[0] + i0 * spacing_[0], lo_[1] + i1 * spacing_[1], lo_[2] + i2 * spacing_[2]};
  }
  bool contains(const Point& x) const;
  /// Trapezoid weight of a node (product of 1/2 factors on box faces).
  double trapezoid_weight(std::size_t flat) const;

  bool operator==(const TensorGrid& other) const;

 private:
  int dim_ = 1;
  std::array<int, 3> counts_{1, 1, 1};
  Point lo_{};
  Point hi_{};
  Point spacing_{};
  std::array<std::size_t, 3> strides_{1, 1, 1};
  std::size_t size_ = 1;
};

/// Cube grid with n nodes per active axis on [lo, hi]^dim.
TensorGrid cube_grid(int dim, int n, double lo, double hi);

struct ScalarField {
  TensorGrid grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const TensorGrid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
  ScalarField(const TensorGrid& g, std::vector<double> v);

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

/// Semiclassical problem −ε²Δu + V u = |u|^{p−2}u on a box with homogeneous
/// Dirichlet data. V is cached on the grid nodes.
class ProblemSpec {
 public:
  ProblemSpec(double eps, double p, PotentialModel potential, TensorGrid grid);

  double eps() const { return eps_; }
  double p() const { return p_; }
  const PotentialModel& potential() const { return potential_; }
  const TensorGrid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  const std::vector<double>& v_nodes() const { return v_nodes_; }
  double v_min() const { return v_min_; }

 private:
  double eps_;
  double p_;
  PotentialModel potential_;
  TensorGrid grid_;
  std::vector<double> v_nodes_;
  double v_min_;
};

/// Box margin around each well patch required by ProblemSpec: 5 ε / sqrt(min depth).
double required_margin(const PotentialModel& pot, double eps);

void check_same_grid(const TensorGrid& a, const TensorGrid& b);

/// y = −ε² Δ_h x + V x, ghost zeros outside the box (raw arrays on spec.grid()).
void apply_linear(const ProblemSpec& spec, const double* x, double* y);
/// y = coef (−Δ_h x) + diag ⊙ x; diag may be null.
void apply_stencil(const TensorGrid& grid, double coef, const double* diag, const double* x, double* y);
/// y = −Δ_h x (unit coefficient, ghost zeros).
void apply_laplacian(const TensorGrid& grid, const double* x, double* y);

ScalarField apply_linear(const ProblemSpec& spec, const ScalarField& u);
ScalarField pde_residual(const ProblemSpec& spec, const ScalarField& u);

/// Forward-difference energy form ε² Σ_edges (δu)(δv)/h² + Σ w V u v, times the
/// cell volume. For fields vanishing on the boundary ring it equals
/// Σ (apply_linear u) v · cell volume exactly.
double eps_inner(const ProblemSpec& spec, const ScalarField& u, const ScalarField& v);
double eps_norm(const ProblemSpec& spec, const ScalarField& u);

/// Trapezoid quadrature of u v over the box.
double l2_inner(const ScalarField& u, const ScalarField& v);
double integrate(const ScalarField& f);
double sup_norm(const std::vector<double>& v);

/// Central-difference partial derivative along an axis, ghost zeros outside the box.
ScalarField partial_derivative(const ScalarField& u, int axis);

}  // namespace nlsb
