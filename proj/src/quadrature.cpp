#include "nlsb/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/legendre.hpp>

#include "nlsb/error.hpp"
#include "nlsb/radial.hpp"

namespace nlsb {

double halfspace_box_fraction(int dim, const Point& half_widths, const Point& normal, double d) {
  // Map to t ∈ [0,1]^k with positive coefficients a: Σ a_i t_i <= s.
  double a[3];
  int k = 0;
  double s = d;
  double amax = 0.0;
  for (int i = 0; i < dim; ++i) amax = std::max(amax, std::abs(normal[i]) * 2.0 * half_widths[i]);
  double total = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double c = std::abs(normal[i]) * 2.0 * half_widths[i];
    if (c <= 1e-8 * amax) continue;
    a[k++] = c;
    s += 0.5 * c;
    total += c;
  }
  if (k == 0) return s >= 0.0 ? 1.0 : 0.0;
  if (s <= 0.0) return 0.0;
  if (s >= total) return 1.0;
  double acc = 0.0;
  for (int mask = 0; mask < (1 << k); ++mask) {
    double shift = 0.0;
    int bits = 0;
    for (int i = 0; i < k; ++i) {
      if (mask & (1 << i)) {
        shift += a[i];
        ++bits;
      }
    }
    const double r = s - shift;
    if (r <= 0.0) continue;
    acc += ((bits & 1) ? -1.0 : 1.0) * std::pow(r, k);
  }
  double denom = 1.0;
  for (int i = 0; i < k; ++i) denom *= a[i] * (i + 1);
  return std::clamp(acc / denom, 0.0, 1.0);
}

double ball_volume_integral(const TensorGrid& g, const ScalarField& f, const Point& center, double radius) {
  check_same_grid(g, f.grid);
  if (!(radius > 0.0)) fail(ErrorKind::Domain, "ball radius must be positive");
  for (int a = 0; a < g.dim(); ++a) {
    if (center[a] - radius < g.lo()[a] || center[a] + radius > g.hi()[a]) {
      fail(ErrorKind::Geometry, "ball exits the grid box");
    }
  }
  Point half{};
  double half_diag = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    half[a] = 0.5 * g.spacing()[a];
    half_diag += half[a] * half[a];
  }
  half_diag = std::sqrt(half_diag);

  // Only the index range covering the ball matters.
  std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
  for (int a = 0; a < g.dim(); ++a) {
    lo[a] = std::max(0, static_cast<int>(std::floor((center[a] - radius - g.lo()[a]) / g.spacing()[a])) - 1);
    hi[a] = std::min(g.counts()[a] - 1,
                     static_cast<int>(std::ceil((center[a] + radius - g.lo()[a]) / g.spacing()[a])) + 1);
  }
  double acc = 0.0;
  for (int i0 = lo[0]; i0 <= hi[0]; ++i0) {
    for (int i1 = lo[1]; i1 <= hi[1]; ++i1) {
      for (int i2 = lo[2]; i2 <= hi[2]; ++i2) {
        const Point x = g.node(i0, i1, i2);
        const Point y = x - center;
        const double r = norm(y);
        const double d = radius - r;
        double frac;
        if (d >= half_diag) {
          frac = 1.0;
        } else if (d <= -half_diag) {
          continue;
        } else {
          const Point n = r > 0.0 ? (1.0 / r) * y : Point{1.0, 0.0, 0.0};
          frac = halfspace_box_fraction(g.dim(), half, n, d);
        }
        acc += frac * f[g.index(i0, i1, i2)];
      }
    }
  }
  return acc * g.cell_volume();
}

double ball_volume_integral(const ProblemSpec& spec, const ScalarField& f, const Point& center, double radius) {
  return ball_volume_integral(spec.grid(), f, center, radius);
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  // legendre_p_zeros returns the nonnegative roots in increasing order.
  const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(n);
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (std::size_t k = 0; k < zeros.size(); ++k) {
    const double x = zeros[k];
    const double dp = boost::math::legendre_p_prime<double>(n, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const int up = n / 2 + static_cast<int>(k);
    nodes[up] = x;
    weights[up] = w;
    nodes[n - 1 - up] = -x;
    weights[n - 1 - up] = w;
  }
}

double sphere_area(int dim, double r) {
  if (dim == 1) return 2.0;
  return unit_sphere_area(dim) * std::pow(r, dim - 1);
}

SphereQuadrature make_sphere_quadrature(int dim, const Point& center, double radius, int n) {
  if (dim < 1 || dim > 3) fail(ErrorKind::Domain, "sphere dimension must be 1, 2 or 3");
  if (!(radius > 0.0)) fail(ErrorKind::Domain, "sphere radius must be positive");
  if (n < 2) fail(ErrorKind::Domain, "sphere rule needs at least 2 points");
  SphereQuadrature q;
  q.dim = dim;
  q.center = center;
  q.radius = radius;
  auto add = [&](const Point& nu, double w) {
    q.normals.push_back(nu);
    q.nodes.push_back(center + radius * nu);
    q.weights.push_back(w);
  };
  if (dim == 1) {
    add({-1.0, 0.0, 0.0}, 1.0);
    add({1.0, 0.0, 0.0}, 1.0);
  } else if (dim == 2) {
    const double w = 2.0 * std::numbers::pi * radius / n;
    for (int k = 0; k < n; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / n;
      add({std::cos(phi), std::sin(phi), 0.0}, w);
    }
  } else {
    std::vector<double> z, wz;
    gauss_legendre(n, z, wz);
    const int nphi = 2 * n;
    const double dphi = 2.0 * std::numbers::pi / nphi;
    for (int i = 0; i < n; ++i) {
      const double st = std::sqrt(std::max(0.0, 1.0 - z[i] * z[i]));
      for (int k = 0; k < nphi; ++k) {
        const double phi = dphi * k;
        add({st * std::cos(phi), st * std::sin(phi), z[i]}, wz[i] * dphi * radius * radius);
      }
    }
  }
  return q;
}

double sphere_surface_integral(const SphereQuadrature& quad, const SurfaceIntegrand& g) {
  double acc = 0.0;
  for (std::size_t i = 0; i < quad.nodes.size(); ++i) acc += quad.weights[i] * g(quad.nodes[i], quad.normals[i]);
  return acc;
}

FieldSampler::FieldSampler(const ScalarField& u) : grid_(u.grid), values_(u.values) {
  for (int a = 0; a < grid_.dim(); ++a) grads_.push_back(partial_derivative(u, a).values);
}

double FieldSampler::interpolate(const std::vector<double>& data, const Point& x) const {
  int base[3] = {0, 0, 0};
  double frac[3] = {0.0, 0.0, 0.0};
  for (int a = 0; a < grid_.dim(); ++a) {
    const double t = (x[a] - grid_.lo()[a]) / grid_.spacing()[a];
    int i = static_cast<int>(std::floor(t));
    i = std::clamp(i, 0, grid_.counts()[a] - 2);
    base[a] = i;
    frac[a] = t - i;
  }
  double acc = 0.0;
  const int corners = 1 << grid_.dim();
  for (int c = 0; c < corners; ++c) {
    int idx[3] = {base[0], base[1], base[2]};
    double w = 1.0;
    for (int a = 0; a < grid_.dim(); ++a) {
      const int bit = (c >> a) & 1;
      idx[a] += bit;
      w *= bit ? frac[a] : 1.0 - frac[a];
    }
    acc += w * data[grid_.index(idx[0], idx[1], idx[2])];
  }
  return acc;
}

FieldSample FieldSampler::operator()(const Point& x) const {
  if (!grid_.contains(x)) fail(ErrorKind::Geometry, "sample point outside the grid box");
  FieldSample s;
  s.value = interpolate(values_, x);
  for (int a = 0; a < grid_.dim(); ++a) s.gradient[a] = interpolate(grads_[a], x);
  return s;
}

}  // namespace nlsb
