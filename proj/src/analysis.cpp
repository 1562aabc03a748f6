#include "nlsb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <set>

#include "nlsb/error.hpp"
#include "nlsb/quadrature.hpp"

namespace nlsb {

PohozaevReport pohozaev_terms(const ProblemSpec& spec, const ScalarField& u, const Point& center, double radius,
                              int direction, int sphere_points) {
  const int dim = spec.dim();
  if (direction < 0 || direction >= dim) fail(ErrorKind::Domain, "Pohozaev direction out of range");
  check_same_grid(spec.grid(), u.grid);
  const TensorGrid& g = spec.grid();
  const PotentialModel& pot = spec.potential();
  // The gradient stencil at a sphere node reaches one cell beyond the node.
  for (int a = 0; a < dim; ++a) {
    if (center[a] - radius - 2.0 * g.spacing()[a] < g.lo()[a] || center[a] + radius + 2.0 * g.spacing()[a] > g.hi()[a]) {
      fail(ErrorKind::Geometry, "Pohozaev ball too close to the grid boundary");
    }
  }

  PohozaevReport rep;
  rep.direction = direction;
  rep.center = center;
  rep.radius = radius;

  ScalarField dv_u2(g), abs_dv_u2(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double dv = pot.gradient(g.node(k))[direction];
    dv_u2[k] = dv * u[k] * u[k];
    abs_dv_u2[k] = std::abs(dv_u2[k]);
  }
  rep.lhs_volume = ball_volume_integral(g, dv_u2, center, radius);
  rep.lhs_abs = ball_volume_integral(g, abs_dv_u2, center, radius);

  if (sphere_points <= 0) sphere_points = dim == 3 ? 48 : 512;
  const SphereQuadrature quad = make_sphere_quadrature(dim, center, radius, sphere_points);
  const FieldSampler sampler(u);
  const double e2 = spec.eps() * spec.eps();
  const double p = spec.p();
  for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
    const Point& x = quad.nodes[q];
    const Point& nu = quad.normals[q];
    const double w = quad.weights[q];
    const FieldSample s = sampler(x);
    const double dnu = dot(s.gradient, nu);
    rep.i1 += w * (-2.0 * e2 * dnu * s.gradient[direction]);
    rep.i2 += w * (e2 * dot(s.gradient, s.gradient) + pot.value(x) * s.value * s.value) * nu[direction];
    rep.i3 += w * (-(2.0 / p) * std::pow(std::abs(s.value), p)) * nu[direction];
  }
  rep.residual = rep.lhs_volume - (rep.i1 + rep.i2 + rep.i3);
  const double scale = std::max({std::abs(rep.lhs_volume), std::abs(rep.i1), std::abs(rep.i2), std::abs(rep.i3),
                                 rep.lhs_abs});
  rep.rel_residual = scale > 0.0 ? std::abs(rep.residual) / scale : 0.0;
  return rep;
}

double localized_moment(const RadialProfile& profile, double eps, double m, const Point& offset, int direction,
                        double d, int dim) {
  if (!(d > 0.0) || !(eps > 0.0)) fail(ErrorKind::Domain, "moment radius and eps must be positive");
  const double R = d / eps;
  const SphereQuadrature sphere = make_sphere_quadrature(dim, Point{}, 1.0, dim == 3 ? 48 : 512);
  std::vector<double> gz, gw;
  gauss_legendre(8, gz, gw);
  const int panels = std::max(1, static_cast<int>(std::ceil(R / 0.05)));
  const double hp = R / panels;
  double acc = 0.0;
  for (int pnl = 0; pnl < panels; ++pnl) {
    for (int q = 0; q < 8; ++q) {
      const double rho = hp * (pnl + 0.5 * (gz[q] + 1.0));
      const double wr = 0.5 * hp * gw[q];
      const double u = profile.eval(rho).value;
      double ang = 0.0;
      for (std::size_t s = 0; s < sphere.nodes.size(); ++s) {
        const Point z = offset + (eps * rho) * sphere.normals[s];
        const double r = norm(z);
        if (r == 0.0) continue;
        ang += sphere.weights[s] * std::pow(r, m - 2.0) * z[direction];
      }
      acc += wr * std::pow(rho, dim - 1) * u * u * ang;
    }
  }
  return acc;
}

double localized_moment(const ProblemSpec& spec, const BumpDecomposition& dec, const AnsatzSpec& ansatz, int well,
                        int direction, double d) {
  if (well < 0 || well >= static_cast<int>(dec.centers.size())) fail(ErrorKind::Domain, "well index out of range");
  return localized_moment(*ansatz.bumps[well].profile, spec.eps(), spec.potential().exponent(),
                          dec.centers[well] - dec.reference[well], direction, d, spec.dim());
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 3) fail(ErrorKind::Domain, "rate fit needs at least three samples");
  std::set<double> distinct;
  for (const auto& [eps, value] : samples) {
    if (!(eps > 0.0)) fail(ErrorKind::Domain, "rate fit needs positive eps");
    if (!(value > 0.0)) fail(ErrorKind::Domain, "rate fit needs positive values");
    distinct.insert(eps);
  }
  if (distinct.size() != samples.size()) fail(ErrorKind::Domain, "rate fit needs distinct eps");
  RateFit fit;
  fit.samples = samples;
  const double n = static_cast<double>(samples.size());
  double sx = 0, sy = 0;
  for (const auto& [e, v] : samples) {
    sx += std::log(e);
    sy += std::log(v);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& [e, v] : samples) {
    const double dx = std::log(e) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(v) - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (const auto& [e, v] : samples) {
    fit.max_deviation = std::max(fit.max_deviation, std::abs(std::log(v) - fit.intercept - fit.slope * std::log(e)));
  }
  return fit;
}

double overlap_integral(const ProblemSpec& spec, const RadialProfile& profile_i, const Point& center_i,
                        const RadialProfile& profile_j, const Point& center_j, double q1, double q2) {
  const TensorGrid& g = spec.grid();
  const double inv_eps = 1.0 / spec.eps();
  ScalarField f(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point x = g.node(k);
    const double a = profile_i.eval(norm(x - center_i) * inv_eps).value;
    const double b = profile_j.eval(norm(x - center_j) * inv_eps).value;
    f[k] = std::pow(a, q1) * std::pow(b, q2);
  }
  return integrate(f);
}

AnsatzSpec tweak_ansatz(const AnsatzSpec& ansatz, const AnsatzTweak& tweak) {
  AnsatzSpec out = ansatz;
  for (auto& b : out.bumps) {
    b.amplitude *= tweak.amplitude;
    b.center = b.center + tweak.shift;
  }
  return out;
}

UniquenessReport uniqueness_probe(const ProblemSpec& spec, const AnsatzSpec& ansatz,
                                  const std::pair<AnsatzTweak, AnsatzTweak>& tweaks, const NewtonConfig& cfg,
                                  bool concurrent) {
  auto run = [&](const AnsatzTweak& t) { return newton_solve(spec, build_ansatz(spec, tweak_ansatz(ansatz, t)), cfg); };
  SolveResult a, b;
  if (concurrent) {
    auto fut = std::async(std::launch::async, run, tweaks.second);
    a = run(tweaks.first);
    b = fut.get();
  } else {
    a = run(tweaks.first);
    b = run(tweaks.second);
  }
  UniquenessReport rep;
  rep.first = a.report;
  rep.second = b.report;
  rep.sup_norm = sup_norm(a.u.values);
  for (std::size_t k = 0; k < a.u.size(); ++k) rep.sup_diff = std::max(rep.sup_diff, std::abs(a.u[k] - b.u[k]));
  rep.relative = rep.sup_norm > 0.0 ? rep.sup_diff / rep.sup_norm : 0.0;
  rep.pass = rep.sup_diff <= 1e-8 * rep.sup_norm;
  if (rep.sup_diff > 1e-12 * rep.sup_norm) {
    ScalarField xi(spec.grid());
    for (std::size_t k = 0; k < xi.size(); ++k) xi[k] = (a.u[k] - b.u[k]) / rep.sup_diff;
    rep.xi_field = std::move(xi);
    rep.normalized = true;
  }
  return rep;
}

}  // namespace nlsb
