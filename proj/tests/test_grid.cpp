#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "nlsb/error.hpp"
#include "nlsb/grid.hpp"
#include "nlsb/quadrature.hpp"
#include "nlsb/radial.hpp"

using namespace nlsb;

namespace {

ProblemSpec constant_problem(int dim, int n, double lo, double hi, double eps = 1.0, double v = 1.0, double p = 4.0) {
  return ProblemSpec(eps, p, PotentialModel::constant(dim, v), cube_grid(dim, n, lo, hi));
}

ScalarField sample(const TensorGrid& g, auto&& f) {
  ScalarField u(g);
  for (std::size_t k = 0; k < g.size(); ++k) u[k] = f(g.node(k));
  return u;
}

// Random field vanishing on the boundary ring.
ScalarField ring_zero_random(const TensorGrid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  ScalarField u(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto m = g.multi_index(k);
    bool edge = false;
    for (int a = 0; a < g.dim(); ++a) edge = edge || m[a] == 0 || m[a] == g.counts()[a] - 1;
    u[k] = edge ? 0.0 : d(rng);
  }
  return u;
}

double plain_dot(const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

TEST_CASE("grid layout is row-major with the last axis fastest") {
  const TensorGrid g(3, {8, 9, 10}, {0, 0, 0}, {1, 2, 3});
  CHECK(g.size() == 720);
  CHECK(g.index(0, 0, 1) == 1);
  CHECK(g.index(0, 1, 0) == 10);
  CHECK(g.index(1, 0, 0) == 90);
  CHECK(g.multi_index(g.index(3, 4, 5)) == std::array<int, 3>{3, 4, 5});
  CHECK(g.spacing()[1] == doctest::Approx(2.0 / 8.0));
  CHECK_THROWS_AS(TensorGrid(2, {7, 8, 1}, {0, 0, 0}, {1, 1, 0}), Error);
}

TEST_CASE("linear operator on zero and on a Dirichlet sine mode") {
  const ProblemSpec zero_spec = constant_problem(2, 16, -1, 1);
  const ScalarField z(zero_spec.grid());
  CHECK(sup_norm(apply_linear(zero_spec, z).values) == 0.0);
  CHECK(sup_norm(pde_residual(zero_spec, z).values) == 0.0);

  // The Dirichlet zeros sit on the ghost nodes just outside the box.
  const double L = 3.0;
  double prev = 0.0;
  for (int n : {63, 127}) {
    const double h = L / (n + 1);
    const ProblemSpec spec = constant_problem(1, n, h, L - h);
    const ScalarField u = sample(spec.grid(), [&](const Point& x) { return std::sin(std::numbers::pi * x[0] / L); });
    const ScalarField lu = apply_linear(spec, u);
    const double k2 = std::numbers::pi * std::numbers::pi / (L * L) + 1.0;
    double err = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) err = std::max(err, std::abs(lu[i] - k2 * u[i]));
    if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(2.0).epsilon(0.02));
    prev = err;
  }
}

TEST_CASE("sampled soliton satisfies the discrete PDE to second order") {
  double prev = 0.0;
  for (int n : {401, 801}) {
    const ProblemSpec spec = constant_problem(1, n, -20.0, 20.0);
    const ScalarField u = sample(spec.grid(), [](const Point& x) { return std::sqrt(2.0) / std::cosh(x[0]); });
    const double err = sup_norm(pde_residual(spec, u).values);
    if (prev > 0.0) CHECK(std::log2(prev / err) >= 1.9);
    prev = err;
  }
  CHECK(prev <= 2e-3);
}

TEST_CASE("energy form: symmetry, lower bound, discrete integration by parts") {
  std::mt19937_64 rng(11);
  for (int dim : {1, 2, 3}) {
    const int n = dim == 3 ? 12 : 24;
    const ProblemSpec spec(0.3, 3.0, PotentialModel::constant(dim, 1.7), cube_grid(dim, n, -1.0, 1.3));
    const ScalarField u = ring_zero_random(spec.grid(), rng);
    const ScalarField v = ring_zero_random(spec.grid(), rng);
    CHECK(eps_inner(spec, u, v) == eps_inner(spec, v, u));
    CHECK(eps_inner(spec, u, u) >= 1.7 * l2_inner(u, u));
    const double ibp = plain_dot(apply_linear(spec, u), v) * spec.grid().cell_volume();
    CHECK(std::abs(eps_inner(spec, u, v) - ibp) <= 1e-12 * eps_norm(spec, u) * eps_norm(spec, v));
    // Self-adjointness under the plain pairing.
    const double uav = plain_dot(u, apply_linear(spec, v));
    const double vau = plain_dot(v, apply_linear(spec, u));
    CHECK(std::abs(uav - vau) <= 1e-12 * std::abs(uav));
  }
}

TEST_CASE("energy norm of a rescaled ground state") {
  // −Δ U + U = U^{p−1} gives ‖U((x−a)/ε)‖_ε² = ε^N ∫ U^p when V ≡ 1.
  const double eps = 0.5, p = 3.0;
  const RadialProfile prof = solve_ground_state(1.0, p, 2);
  const double oracle = eps * eps * radial_moment(prof, p);
  const Point a{0.1, -0.05, 0.0};
  double prev = 0.0;
  for (int n : {161, 321}) {
    const ProblemSpec spec(eps, p, PotentialModel::constant(2, 1.0), cube_grid(2, n, -8.0, 8.0));
    const ScalarField u = sample(spec.grid(), [&](const Point& x) { return prof.eval(norm(x - a) / eps).value; });
    const double got = eps_norm(spec, u);
    const double err = std::abs(got * got - oracle) / oracle;
    if (prev > 0.0) CHECK(std::log2(prev / err) >= 1.8);
    prev = err;
  }
  CHECK(prev <= 2e-3);
}

TEST_CASE("half-space box fraction") {
  const Point half{0.5, 0.5, 0.5};
  for (int dim : {1, 2, 3}) {
    CHECK(halfspace_box_fraction(dim, half, {0.6, 0.8, 0.0}, 0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(halfspace_box_fraction(dim, half, {0.0, 0.0, 1.0}, 2.0) == 1.0);
  }
  // Axis-aligned cut through a unit square: fraction is linear in d.
  CHECK(halfspace_box_fraction(2, half, {1.0, 0.0, 0.0}, 0.2) == doctest::Approx(0.7).epsilon(1e-14));
  // Diagonal cut through the unit square corner region: area (s²/2) with s = d + 1.
  CHECK(halfspace_box_fraction(2, half, {std::sqrt(0.5), std::sqrt(0.5), 0.0}, -0.5) ==
        doctest::Approx(0.5 * std::pow(1.0 - 0.5 * std::sqrt(2.0), 2)).epsilon(1e-12));
}

TEST_CASE("ball volume quadrature") {
  const TensorGrid g3 = cube_grid(3, 41, -2.0, 2.0);
  const ScalarField one(g3, 1.0);
  CHECK(ball_volume_integral(g3, one, {0.013, 0.021, -0.017}, 1.0) ==
        doctest::Approx(4.0 * std::numbers::pi / 3.0).epsilon(0.01));
  const ScalarField odd = sample(g3, [](const Point& x) { return x[0] * std::exp(-norm(x)); });
  CHECK(std::abs(ball_volume_integral(g3, odd, {0.0, 0.0, 0.0}, 1.0)) <= 1e-13);

  // Gaussian over the unit ball against the one-dimensional radial integral.
  const double oracle =
      4.0 * std::numbers::pi * (0.25 * std::sqrt(std::numbers::pi) * std::erf(1.0) - 0.5 * std::exp(-1.0));
  const Point c{0.013, 0.021, -0.017};
  const ScalarField gauss = sample(g3, [&](const Point& x) { return std::exp(-dot(x - c, x - c)); });
  CHECK(ball_volume_integral(g3, gauss, c, 1.0) == doctest::Approx(oracle).epsilon(1e-3));

  // Refinement order in 2D on a smooth integrand.
  const double disk = std::numbers::pi * (1.0 - std::exp(-1.0));
  std::vector<double> errs;
  for (int n : {41, 81, 161, 321}) {
    const TensorGrid g2 = cube_grid(2, n, -2.0, 2.0);
    const Point c2{0.0137, -0.0213, 0.0};
    const ScalarField f = sample(g2, [&](const Point& x) { return std::exp(-dot(x - c2, x - c2)); });
    errs.push_back(std::abs(ball_volume_integral(g2, f, c2, 1.0) - disk));
  }
  const double order = std::log2(errs.front() / errs.back()) / 3.0;
  CHECK(order >= 1.5);
  CHECK_THROWS_AS(ball_volume_integral(g3, one, {1.5, 0.0, 0.0}, 1.0), Error);
}

TEST_CASE("sphere quadrature normalization and symmetry") {
  const SphereQuadrature s3 = make_sphere_quadrature(3, {0.1, 0.2, 0.3}, 0.7, 24);
  const double area = sphere_surface_integral(s3, [](const Point&, const Point&) { return 1.0; });
  CHECK(std::abs(area - 4.0 * std::numbers::pi * 0.49) <= 1e-10 * area);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(sphere_surface_integral(s3, [i](const Point&, const Point& n) { return n[i]; })) <= 1e-14);
  }
  for (std::size_t k = 0; k < s3.nodes.size(); ++k) {
    const Point d = (1.0 / 0.7) * (s3.nodes[k] - s3.center) - s3.normals[k];
    CHECK(norm(d) <= 1e-15);
  }
  const SphereQuadrature s2 = make_sphere_quadrature(2, {0.0, 0.0, 0.0}, 1.3, 64);
  CHECK(sphere_surface_integral(s2, [](const Point&, const Point&) { return 1.0; }) ==
        doctest::Approx(2.0 * std::numbers::pi * 1.3).epsilon(1e-13));
  const SphereQuadrature s1 = make_sphere_quadrature(1, {0.5, 0.0, 0.0}, 0.25, 2);
  CHECK(sphere_surface_integral(s1, [](const Point&, const Point&) { return 1.0; }) == 2.0);
  CHECK(sphere_area(1, 0.25) == 2.0);

  std::vector<double> z, w;
  gauss_legendre(5, z, w);
  double s = 0.0, m4 = 0.0;
  for (int i = 0; i < 5; ++i) {
    s += w[i];
    m4 += w[i] * std::pow(z[i], 8);
  }
  CHECK(s == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(m4 == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("surface integral of an interpolated polynomial converges at second order") {
  const Point c{0.11, -0.07, 0.05};
  const double R = 0.6;
  // ∮ (x0² + x1 x2 + 3 x2) = 4πR² (c0² + R²/3 + c1 c2 + 3 c2).
  const double exact = 4.0 * std::numbers::pi * R * R * (c[0] * c[0] + R * R / 3.0 + c[1] * c[2] + 3.0 * c[2]);
  // Flux of ∇(x0²) through the sphere = ∫_B 2 = 2 · (4/3)πR³.
  const double flux_exact = 2.0 * 4.0 / 3.0 * std::numbers::pi * R * R * R;
  const SphereQuadrature q = make_sphere_quadrature(3, c, R, 16);
  double prev = 0.0, prev_flux = 0.0;
  for (int n : {25, 49}) {
    const TensorGrid g = cube_grid(3, n, -1.0, 1.0);
    const ScalarField f = sample(g, [](const Point& x) { return x[0] * x[0] + x[1] * x[2] + 3.0 * x[2]; });
    const FieldSampler sampler(f);
    const double got = sphere_surface_integral(q, [&](const Point& x, const Point&) { return sampler(x).value; });
    const ScalarField sq = sample(g, [](const Point& x) { return x[0] * x[0]; });
    const FieldSampler sq_sampler(sq);
    const double flux = sphere_surface_integral(q, [&](const Point& x, const Point& nu) {
      return dot(sq_sampler(x).gradient, nu);
    });
    const double err = std::abs(got - exact), ferr = std::abs(flux - flux_exact);
    if (prev > 0.0) {
      CHECK(std::log2(prev / err) >= 1.8);
      CHECK(ferr <= 1e-12);
    }
    prev = err;
    prev_flux = ferr;
  }
  CHECK(prev_flux <= 1e-12);
}
