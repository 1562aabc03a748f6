#pragma once

#include <functional>
#include <vector>

#include "nlsb/grid.hpp"
#include "nlsb/point.hpp"

namespace nlsb {

/// Fraction of the axis-aligned box [-h/2, h/2]^dim lying in the half-space
/// n·z <= d (n a unit vector). Exact, by inclusion-exclusion.
double halfspace_box_fraction(int dim, const Point& half_widths, const Point& normal, double d);

/// Quadrature of f over the ball B_radius(center): each node weighs its dual
/// cell's coverage by the ball, with the sphere replaced by its tangent plane
/// at the closest point.
double ball_volume_integral(const ProblemSpec& spec, const ScalarField& f, const Point& center, double radius);
double ball_volume_integral(const TensorGrid& grid, const ScalarField& f, const Point& center, double radius);

struct SphereQuadrature {
  int dim = 3;
  Point center{};
  double radius = 1.0;
  std::vector<Point> nodes;
  std::vector<double> weights;
  std::vector<Point> normals;
};

/// dim 3: Gauss-Legendre in cos θ (n points) times 2n uniform azimuths.
/// dim 2: n uniform angles. dim 1: the two endpoints with unit weight.
SphereQuadrature make_sphere_quadrature(int dim, const Point& center, double radius, int n = 32);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Surface measure of the sphere of radius r in R^dim (2 for dim 1).
double sphere_area(int dim, double r);

using SurfaceIntegrand = std::function<double(const Point& node, const Point& normal)>;

double sphere_surface_integral(const SphereQuadrature& quad, const SurfaceIntegrand& g);

struct FieldSample {
  double value = 0.0;
  Point gradient{};
};

/// Multilinear interpolation of a field and of its central-difference gradient.
class FieldSampler {
 public:
  explicit FieldSampler(const ScalarField& u);
  FieldSample operator()(const Point& x) const;

 private:
  double interpolate(const std::vector<double>& data, const Point& x) const;

  TensorGrid grid_;
  std::vector<double> values_;
  std::vector<std::vector<double>> grads_;
};

}  // namespace nlsb
