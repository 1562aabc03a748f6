#include "nlsb/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlsb/error.hpp"
#include "nlsb/radial.hpp"

namespace nlsb {

TensorGrid::TensorGrid(int dim, std::array<int, 3> counts, Point lo, Point hi)
    : dim_(dim), counts_(counts), lo_(lo), hi_(hi) {
  if (dim < 1 || dim > 3) fail(ErrorKind::Domain, "grid dimension must be 1, 2 or 3");
  for (int a = 0; a < 3; ++a) {
    if (a < dim) {
      if (counts_[a] < 8) fail(ErrorKind::Shape, "grid needs at least 8 nodes per axis");
      if (!(hi_[a] > lo_[a])) fail(ErrorKind::Shape, "grid box must have hi > lo");
      spacing_[a] = (hi_[a] - lo_[a]) / (counts_[a] - 1);
    } else {
      counts_[a] = 1;
      lo_[a] = hi_[a] = 0.0;
      spacing_[a] = 0.0;
    }
  }
  strides_[2] = 1;
  strides_[1] = static_cast<std::size_t>(counts_[2]);
  strides_[0] = strides_[1] * static_cast<std::size_t>(counts_[1]);
  size_ = strides_[0] * static_cast<std::size_t>(counts_[0]);
}

double TensorGrid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= spacing_[a];
  return v;
}

std::array<int, 3> TensorGrid::multi_index(std::size_t flat) const {
  std::array<int, 3> m{};
  m[0] = static_cast<int>(flat / strides_[0]);
  flat %= strides_[0];
  m[1] = static_cast<int>(flat / strides_[1]);
  m[2] = static_cast<int>(flat % strides_[1]);
  return m;
}

Point TensorGrid::node(std::size_t flat) const {
  const auto m = multi_index(flat);
  return node(m[0], m[1], m[2]);
}

bool TensorGrid::contains(const Point& x) const {
  for (int a = 0; a < dim_; ++a) {
    if (x[a] < lo_[a] || x[a] > hi_[a]) return false;
  }
  return true;
}

double TensorGrid::trapezoid_weight(std::size_t flat) const {
  const auto m = multi_index(flat);
  double w = 1.0;
  for (int a = 0; a < dim_; ++a) {
    if (m[a] == 0 || m[a] == counts_[a] - 1) w *= 0.5;
  }
  return w;
}

bool TensorGrid::operator==(const TensorGrid& o) const {
  return dim_ == o.dim_ && counts_ == o.counts_ && lo_ == o.lo_ && hi_ == o.hi_;
}

TensorGrid cube_grid(int dim, int n, double lo, double hi) {
  std::array<int, 3> counts{1, 1, 1};
  Point l{}, h{};
  for (int a = 0; a < dim && a < 3; ++a) {
    counts[a] = n;
    l[a] = lo;
    h[a] = hi;
  }
  return TensorGrid(dim, counts, l, h);
}

ScalarField::ScalarField(const TensorGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) fail(ErrorKind::Shape, "field size does not match grid");
}

double required_margin(const PotentialModel& pot, double eps) {
  double dmin = pot.background();
  for (const auto& w : pot.wells()) dmin = std::min(dmin, w.depth);
  return 5.0 * eps / std::sqrt(dmin);
}

ProblemSpec::ProblemSpec(double eps, double p, PotentialModel potential, TensorGrid grid)
    : eps_(eps), p_(p), potential_(std::move(potential)), grid_(std::move(grid)) {
  if (!(eps_ > 0.0)) fail(ErrorKind::Domain, "eps must be positive");
  if (!(p_ > 2.0) || !(p_ < critical_exponent(grid_.dim()))) {
    fail(ErrorKind::Domain, "p must lie in (2, critical exponent)");
  }
  if (potential_.dim() != grid_.dim()) fail(ErrorKind::Shape, "potential and grid dimensions differ");
  const double reach = 2.0 * potential_.patch_radius() + required_margin(potential_, eps_);
  for (std::size_t j = 0; j < potential_.wells().size(); ++j) {
    const Point& c = potential_.wells()[j].center;
    for (int a = 0; a < grid_.dim(); ++a) {
      if (c[a] - reach < grid_.lo()[a] || c[a] + reach > grid_.hi()[a]) {
        std::ostringstream msg;
        msg << "grid box does not contain the patch of well " << j << " with margin "
            << required_margin(potential_, eps_);
        fail(ErrorKind::Geometry, msg.str());
      }
    }
  }
  v_nodes_.resize(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) v_nodes_[i] = potential_.value(grid_.node(i));
  v_min_ = *std::min_element(v_nodes_.begin(), v_nodes_.end());
}

void check_same_grid(const TensorGrid& a, const TensorGrid& b) {
  if (!(a == b)) fail(ErrorKind::Shape, "fields live on different grids");
}

namespace {

// y = coef * (−Δ_h x) + diag ⊙ x  (diag may be null).
void stencil(const TensorGrid& g, double coef, const double* diag, const double* x, double* y) {
  const auto& n = g.counts();
  const auto& s = g.strides();
  double inv[3];
  double center = 0.0;
  for (int a = 0; a < 3; ++a) {
    inv[a] = a < g.dim() ? coef / (g.spacing()[a] * g.spacing()[a]) : 0.0;
    center += 2.0 * inv[a];
  }
  for (int i0 = 0; i0 < n[0]; ++i0) {
    for (int i1 = 0; i1 < n[1]; ++i1) {
      const std::size_t row = g.index(i0, i1, 0);
      for (int i2 = 0; i2 < n[2]; ++i2) {
        const std::size_t k = row + static_cast<std::size_t>(i2);
        double acc = center * x[k];
        if (g.dim() >= 1) {
          if (i0 > 0) acc -= inv[0] * x[k - s[0]];
          if (i0 + 1 < n[0]) acc -= inv[0] * x[k + s[0]];
        }
        if (g.dim() >= 2) {
          if (i1 > 0) acc -= inv[1] * x[k - s[1]];
          if (i1 + 1 < n[1]) acc -= inv[1] * x[k + s[1]];
        }
        if (g.dim() >= 3) {
          if (i2 > 0) acc -= inv[2] * x[k - s[2]];
          if (i2 + 1 < n[2]) acc -= inv[2] * x[k + s[2]];
        }
        if (diag) acc += diag[k] * x[k];
        y[k] = acc;
      }
    }
  }
}

}  // namespace

void apply_laplacian(const TensorGrid& grid, const double* x, double* y) { stencil(grid, 1.0, nullptr, x, y); }

void apply_linear(const ProblemSpec& spec, const double* x, double* y) {
  stencil(spec.grid(), spec.eps() * spec.eps(), spec.v_nodes().data(), x, y);
}

void apply_stencil(const TensorGrid& grid, double coef, const double* diag, const double* x, double* y) {
  stencil(grid, coef, diag, x, y);
}

ScalarField apply_linear(const ProblemSpec& spec, const ScalarField& u) {
  check_same_grid(spec.grid(), u.grid);
  ScalarField out(u.grid);
  apply_linear(spec, u.values.data(), out.values.data());
  return out;
}

ScalarField pde_residual(const ProblemSpec& spec, const ScalarField& u) {
  ScalarField out = apply_linear(spec, u);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= power_nonlinearity(u[i], spec.p());
  return out;
}

double eps_inner(const ProblemSpec& spec, const ScalarField& u, const ScalarField& v) {
  const TensorGrid& g = spec.grid();
  check_same_grid(g, u.grid);
  check_same_grid(g, v.grid);
  const auto& n = g.counts();
  const auto& s = g.strides();
  const double e2 = spec.eps() * spec.eps();
  double inv[3];
  for (int a = 0; a < 3; ++a) inv[a] = a < g.dim() ? 1.0 / (g.spacing()[a] * g.spacing()[a]) : 0.0;
  auto face_w = [&](int idx, int a) { return (idx == 0 || idx == n[a] - 1) ? 0.5 : 1.0; };

  double grad = 0.0, mass = 0.0;
  for (int i0 = 0; i0 < n[0]; ++i0) {
    const double w0 = g.dim() >= 1 ? face_w(i0, 0) : 1.0;
    for (int i1 = 0; i1 < n[1]; ++i1) {
      const double w1 = g.dim() >= 2 ? face_w(i1, 1) : 1.0;
      for (int i2 = 0; i2 < n[2]; ++i2) {
        const double w2 = g.dim() >= 3 ? face_w(i2, 2) : 1.0;
        const std::size_t k = g.index(i0, i1, i2);
        mass += w0 * w1 * w2 * spec.v_nodes()[k] * (u[k] * v[k]);
        // Forward edges along each axis, weighted by the transverse trapezoid rule.
        if (i0 + 1 < n[0]) {
          grad += w1 * w2 * inv[0] * ((u[k + s[0]] - u[k]) * (v[k + s[0]] - v[k]));
        }
        if (g.dim() >= 2 && i1 + 1 < n[1]) {
          grad += w0 * w2 * inv[1] * ((u[k + s[1]] - u[k]) * (v[k + s[1]] - v[k]));
        }
        if (g.dim() >= 3 && i2 + 1 < n[2]) {
          grad += w0 * w1 * inv[2] * ((u[k + s[2]] - u[k]) * (v[k + s[2]] - v[k]));
        }
      }
    }
  }
  return (e2 * grad + mass) * g.cell_volume();
}

double eps_norm(const ProblemSpec& spec, const ScalarField& u) {
  return std::sqrt(std::max(0.0, eps_inner(spec, u, u)));
}

double l2_inner(const ScalarField& u, const ScalarField& v) {
  check_same_grid(u.grid, v.grid);
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += u.grid.trapezoid_weight(i) * (u[i] * v[i]);
  return acc * u.grid.cell_volume();
}

double integrate(const ScalarField& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += f.grid.trapezoid_weight(i) * f[i];
  return acc * f.grid.cell_volume();
}

double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

ScalarField partial_derivative(const ScalarField& u, int axis) {
  const TensorGrid& g = u.grid;
  if (axis < 0 || axis >= g.dim()) fail(ErrorKind::Shape, "derivative axis out of range");
  ScalarField out(g);
  const std::size_t st = g.strides()[axis];
  const int n = g.counts()[axis];
  const double inv2h = 0.5 / g.spacing()[axis];
  for (std::size_t k = 0; k < g.size(); ++k) {
    const int i = g.multi_index(k)[axis];
    const double up = i + 1 < n ? u[k + st] : 0.0;
    const double dn = i > 0 ? u[k - st] : 0.0;
    out[k] = (up - dn) * inv2h;
  }
  return out;
}

}  // namespace nlsb
