#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "doctest.h"
#include "nlsb/analysis.hpp"
#include "nlsb/fast_solver.hpp"
#include "nlsb/krylov.hpp"
#include "nlsb/potential.hpp"
#include "nlsb/radial.hpp"
#include "nlsb/solver.hpp"

using namespace nlsb;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

void full_residual(const ProblemSpec& spec, const std::vector<double>& u, std::vector<double>& f) {
  f.resize(u.size());
  apply_linear(spec, u.data(), f.data());
  for (std::size_t i = 0; i < u.size(); ++i) f[i] -= power_nonlinearity(u[i], spec.p());
}

ProblemSpec constant_spec(int n, double half, double p = 4.0) {
  return ProblemSpec(1.0, p, PotentialModel::constant(2, 1.0), cube_grid(2, n, -half, half));
}

AnsatzSpec single_bump(double v, double p, int dim, Point c = {}) {
  AnsatzSpec a;
  a.bumps.push_back({std::make_shared<const RadialProfile>(solve_ground_state(v, p, dim)), c, 1.0});
  return a;
}

}  // namespace

TEST_CASE("Krylov solvers match a dense factorization") {
  std::mt19937_64 rng(7);
  const int n = 120;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = 2.5 + 0.5 * std::sin(i);
    if (i + 1 < n) a(i, i + 1) = a(i + 1, i) = -1.0;
  }
  Eigen::MatrixXd indefinite = a;
  for (int i = 0; i < n; i += 7) indefinite(i, i) -= 4.0;
  const std::vector<double> b = random_vector(n, rng);
  const Eigen::Map<const Eigen::VectorXd> bv(b.data(), n);

  auto op = [&](const Eigen::MatrixXd& m) {
    return LinearOp([&m, n](const double* x, double* y) {
      Eigen::Map<Eigen::VectorXd>(y, n) = m * Eigen::Map<const Eigen::VectorXd>(x, n);
    });
  };
  const LinearOp jacobi = [&](const double* x, double* y) {
    for (int i = 0; i < n; ++i) y[i] = x[i] / a(i, i);
  };

  std::vector<double> x(n, 0.0);
  const KrylovResult cg = conjugate_gradient(op(a), jacobi, b, x, 1e-12, 500);
  CHECK(cg.converged);
  const Eigen::VectorXd ref = a.fullPivLu().solve(bv);
  CHECK((Eigen::Map<Eigen::VectorXd>(x.data(), n) - ref).norm() <= 1e-9 * ref.norm());

  std::fill(x.begin(), x.end(), 0.0);
  const KrylovResult mr = minres(op(indefinite), {}, b, x, 1e-12, 2000);
  CHECK(mr.converged);
  const Eigen::VectorXd ref2 = indefinite.fullPivLu().solve(bv);
  CHECK((Eigen::Map<Eigen::VectorXd>(x.data(), n) - ref2).norm() <= 1e-8 * ref2.norm());

  std::fill(x.begin(), x.end(), 0.0);
  const KrylovResult capped = minres(op(indefinite), {}, b, x, 1e-14, 3);
  CHECK_FALSE(capped.converged);
  CHECK(capped.iterations == 3);
}

TEST_CASE("sine-transform solver inverts the shifted Laplacian") {
  std::mt19937_64 rng(11);
  for (int dim = 1; dim <= 3; ++dim) {
    std::array<int, 3> counts{17, 1, 1};
    Point lo{-1.0, 0.0, 0.0}, hi{1.5, 0.0, 0.0};
    if (dim >= 2) {
      counts[1] = 12;
      lo[1] = 0.0;
      hi[1] = 0.8;
    }
    if (dim == 3) {
      counts[2] = 9;
      lo[2] = -0.3;
      hi[2] = 0.5;
    }
    const TensorGrid g(dim, counts, lo, hi);
    const FastHelmholtz fast(g, 0.07, 1.3);
    const std::vector<double> b = random_vector(g.size(), rng);
    std::vector<double> x(g.size()), back(g.size());
    fast.solve(b.data(), x.data());
    const std::vector<double> shift(g.size(), 1.3);
    apply_stencil(g, 0.07, shift.data(), x.data(), back.data());
    double err = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) err = std::max(err, std::abs(back[i] - b[i]));
    CAPTURE(dim);
    CHECK(err <= 1e-12);
  }
}

TEST_CASE("Newton from zero returns the trivial solution") {
  const ProblemSpec spec = constant_spec(33, 8.0);
  const SolveResult r = newton_solve(spec, ScalarField(spec.grid()));
  CHECK(r.report.converged);
  CHECK(r.report.trivial);
  CHECK(r.report.iterations == 0);
  CHECK_FALSE(r.report.positivity);
}

TEST_CASE("Newton at constant V converges quadratically to the radial ground state") {
  const ProblemSpec spec = constant_spec(129, 10.0);
  const AnsatzSpec a = single_bump(1.0, 4.0, 2);
  const SolveResult r = newton_solve(spec, build_ansatz(spec, a));
  CHECK(r.report.converged);
  CHECK(r.report.positivity);
  CHECK_FALSE(r.report.trivial);
  CHECK(r.report.iterations <= 4);
  CHECK(r.report.final_residual <= 1e-11);

  // Quadratic tail: once the residual is below 1e-3 each step at least squares it (up to a constant).
  const auto& hist = r.report.residual_history;
  for (std::size_t i = 1; i < hist.size(); ++i) {
    if (hist[i - 1] < 1e-3 && hist[i] > 1e-10) CHECK(hist[i] <= 10.0 * hist[i - 1] * hist[i - 1]);
  }

  auto sup_error = [&](const ProblemSpec& sp, const ScalarField& u) {
    double err = 0.0;
    for (std::size_t k = 0; k < sp.grid().size(); ++k) {
      err = std::max(err, std::abs(u[k] - a.bumps[0].profile->eval(norm(sp.grid().node(k))).value));
    }
    return err;
  };
  const ProblemSpec coarse = constant_spec(65, 10.0);
  const double e_fine = sup_error(spec, r.u);
  const double e_coarse = sup_error(coarse, newton_solve(coarse, build_ansatz(coarse, a)).u);
  CHECK(e_fine <= 0.6 * std::pow(spec.grid().spacing()[0], 2));
  CHECK(std::log2(e_coarse / e_fine) >= 1.8);
}

TEST_CASE("Jacobian is symmetric and consistent with the residual") {
  const ProblemSpec spec = constant_spec(41, 6.0, 4.0);
  std::mt19937_64 rng(5);
  const AnsatzSpec a = single_bump(1.0, 4.0, 2);
  const ScalarField u = build_ansatz(spec, a);
  const std::size_t n = u.size();
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = spec.v_nodes()[i] - 3.0 * u[i] * u[i];
  const std::vector<double> x = random_vector(n, rng), y = random_vector(n, rng);
  std::vector<double> jx(n), jy(n);
  apply_stencil(spec.grid(), 1.0, diag.data(), x.data(), jx.data());
  apply_stencil(spec.grid(), 1.0, diag.data(), y.data(), jy.data());
  CHECK(std::abs(dot(jx, y) - dot(x, jy)) <= 1e-12 * std::abs(dot(jx, y)));

  // Central differences of F along x converge to J x at second order.
  std::vector<double> errs;
  for (double t : {1e-2, 5e-3}) {
    std::vector<double> up(n), um(n), fp, fm;
    for (std::size_t i = 0; i < n; ++i) {
      up[i] = u[i] + t * x[i];
      um[i] = u[i] - t * x[i];
    }
    full_residual(spec, up, fp);
    full_residual(spec, um, fm);
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) e = std::max(e, std::abs((fp[i] - fm[i]) / (2 * t) - jx[i]));
    errs.push_back(e);
  }
  // For p = 4 the central-difference error is exactly t² x³ per node.
  CHECK(errs[0] <= 1e-4 * 1.0001);
  CHECK(errs[0] / errs[1] == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("Newton failure modes keep the partial iterate") {
  const ProblemSpec spec = constant_spec(65, 10.0);
  const AnsatzSpec a = single_bump(1.0, 4.0, 2);
  NewtonConfig cfg;
  cfg.max_newton = 1;
  try {
    (void)newton_solve(spec, build_ansatz(spec, tweak_ansatz(a, AnsatzTweak{0.5, {}})), cfg);
    FAIL("expected SolveError");
  } catch (const SolveError& e) {
    CHECK(e.kind() == ErrorKind::Convergence);
    CHECK(e.partial().report.iterations == 1);
    CHECK_FALSE(e.partial().report.converged);
    CHECK(e.partial().u.size() == spec.grid().size());
  }
  cfg = NewtonConfig{};
  cfg.backtrack = 1.5;
  CHECK_THROWS_AS(newton_solve(spec, build_ansatz(spec, a), cfg), Error);
}

TEST_CASE("ansatz profile must match the potential at its center") {
  const ProblemSpec spec = constant_spec(33, 8.0);
  const AnsatzSpec wrong = single_bump(2.0, 4.0, 2);
  try {
    (void)build_ansatz(spec, wrong);
    FAIL("expected a consistency error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Consistency);
  }
  const AnsatzSpec outside = single_bump(1.0, 4.0, 2, Point{20.0, 0.0, 0.0});
  CHECK_THROWS_AS(build_ansatz(spec, outside), Error);
}

TEST_CASE("grid rule aligns nodes and covers the margin") {
  const ProblemTemplate tpl{make_multiwell(2, {{{-1, 0, 0}, 1.0, 1.0}, {{1, 0, 0}, 1.21, 1.0}}, 2.0, 0.49), 3.0, {}};
  for (double eps : {0.4, 0.3, 0.25}) {
    const TensorGrid g = grid_for_eps(tpl, eps);
    const double h = g.spacing()[0];
    CHECK(h == doctest::Approx(1.0 / std::ceil(16.0 / eps)).epsilon(1e-14));
    CHECK(h <= eps / 16.0 + 1e-15);
    for (int a = 0; a < 2; ++a) {
      CHECK(std::abs(g.lo()[a] / h - std::round(g.lo()[a] / h)) <= 1e-9);
      CHECK(std::abs(g.hi()[a] / h - std::round(g.hi()[a] / h)) <= 1e-9);
    }
    CHECK(g.lo()[0] <= -1.0 - std::max(10 * eps, 0.98 + 5 * eps));
    CHECK(g.hi()[1] >= std::max(10 * eps, 0.98 + 5 * eps));
    // Well centers are grid nodes.
    const double t = (-1.0 - g.lo()[0]) / h;
    CHECK(std::abs(t - std::round(t)) <= 1e-9);
    CHECK_NOTHROW(make_problem(tpl, eps));
  }
}

TEST_CASE("interpolation and rescaled resampling") {
  const TensorGrid g = cube_grid(2, 21, -2.0, 2.0);
  ScalarField u(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point x = g.node(k);
    u[k] = 1.0 + 2.0 * x[0] - 0.5 * x[1] + 0.25 * x[0] * x[1];
  }
  // Bilinear functions are reproduced exactly.
  CHECK(interpolate(u, Point{0.33, -1.1, 0.0}) == doctest::Approx(1.0 + 0.66 + 0.55 - 0.25 * 0.363).epsilon(1e-13));
  CHECK(interpolate(u, Point{2.5, 0.0, 0.0}) == 0.0);

  const ScalarField same = rescale_resample(u, 0.3, 0.3, {Point{}}, g);
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(same[k] == doctest::Approx(u[k]).epsilon(1e-14));

  // Halving eps about the origin maps x to 2x in the old field.
  const ScalarField half = rescale_resample(u, 0.4, 0.2, {Point{}}, g);
  const Point x{0.4, -0.6, 0.0};
  const std::size_t k = g.index(12, 7, 0);
  CHECK(g.node(k)[0] == doctest::Approx(x[0]));
  CHECK(half[k] == doctest::Approx(interpolate(u, Point{0.8, -1.2, 0.0})).epsilon(1e-13));
}

TEST_CASE("continuation warm starts need no more iterations than cold starts") {
  const ProblemTemplate tpl{make_multiwell(2, {{{0, 0, 0}, 1.0, 1.0}}, 2.0, 0.49), 3.0, {8.0, 1.0, 10.0}};
  const AnsatzSpec a = well_ansatz(tpl.potential, 3.0);
  const auto steps = continuation_solve(tpl, {0.4, 0.3}, a);
  REQUIRE(steps.size() == 2);
  for (const auto& st : steps) {
    CHECK(st.error.empty());
    CHECK(st.report.converged);
    CHECK(st.report.positivity);
  }
  const ProblemSpec cold_spec = make_problem(tpl, 0.3);
  const SolveResult cold = newton_solve(cold_spec, build_ansatz(cold_spec, a));
  CHECK(steps[1].report.iterations <= cold.report.iterations);
  double diff = 0.0;
  for (std::size_t k = 0; k < cold.u.size(); ++k) diff = std::max(diff, std::abs(cold.u[k] - steps[1].u[k]));
  CHECK(diff <= 1e-9 * sup_norm(cold.u.values));

  CHECK_THROWS_AS(continuation_solve(tpl, {0.3, 0.4}, a), Error);
}
