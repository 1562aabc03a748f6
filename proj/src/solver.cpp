#include "nlsb/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "nlsb/fast_solver.hpp"
#include "nlsb/krylov.hpp"

namespace nlsb {

AnsatzSpec well_ansatz(const PotentialModel& pot, double p, const ShootingConfig& shooting) {
  AnsatzSpec ansatz;
  std::map<double, std::shared_ptr<const RadialProfile>> cache;
  for (const auto& w : pot.wells()) {
    auto& prof = cache[w.depth];
    if (!prof) prof = std::make_shared<const RadialProfile>(solve_ground_state(w.depth, p, pot.dim(), shooting));
    ansatz.bumps.push_back({prof, w.center, 1.0});
  }
  return ansatz;
}

ScalarField build_ansatz(const ProblemSpec& spec, const AnsatzSpec& ansatz) {
  const TensorGrid& g = spec.grid();
  for (std::size_t b = 0; b < ansatz.bumps.size(); ++b) {
    const Bump& bump = ansatz.bumps[b];
    if (!bump.profile) fail(ErrorKind::Domain, "bump without a profile");
    if (!g.contains(bump.center)) fail(ErrorKind::Geometry, "bump center outside the grid box");
    const int owner = spec.potential().owning_well(bump.center);
    const double expected = owner >= 0 ? spec.potential().wells()[owner].depth : spec.potential().value(bump.center);
    if (std::abs(bump.profile->v_a() - expected) > 1e-12 * std::max(1.0, std::abs(expected))) {
      std::ostringstream msg;
      msg << "bump " << b << " uses a profile for v_a = " << bump.profile->v_a() << " but the potential gives "
          << expected;
      fail(ErrorKind::Consistency, msg.str());
    }
    if (bump.profile->p() != spec.p() || bump.profile->dim() != spec.dim()) {
      fail(ErrorKind::Consistency, "bump profile p or dim differs from the problem");
    }
  }
  ScalarField u(g);
  const double inv_eps = 1.0 / spec.eps();
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point x = g.node(k);
    double acc = 0.0;
    for (const auto& bump : ansatz.bumps) {
      acc += bump.amplitude * bump.profile->eval(norm(x - bump.center) * inv_eps).value;
    }
    u[k] = acc;
  }
  return u;
}

namespace {

void residual(const ProblemSpec& spec, const std::vector<double>& u, std::vector<double>& f) {
  f.resize(u.size());
  apply_linear(spec, u.data(), f.data());
  for (std::size_t i = 0; i < u.size(); ++i) f[i] -= power_nonlinearity(u[i], spec.p());
}

}  // namespace

double residual_sup(const ProblemSpec& spec, const std::vector<double>& u) {
  std::vector<double> f;
  residual(spec, u, f);
  return sup_norm(f);
}

SolveResult newton_solve(const ProblemSpec& spec, const ScalarField& u0, const NewtonConfig& cfg) {
  check_same_grid(spec.grid(), u0.grid);
  if (!(cfg.tol_residual > 0.0) || cfg.max_newton <= 0 || !(cfg.krylov_tol > 0.0) || cfg.krylov_max <= 0 ||
      !(cfg.damping > 0.0 && cfg.damping <= 1.0) || !(cfg.backtrack > 0.0 && cfg.backtrack < 1.0)) {
    fail(ErrorKind::Domain, "invalid Newton configuration");
  }
  const TensorGrid& g = spec.grid();
  const std::size_t n = g.size();
  const double p = spec.p();
  const double e2 = spec.eps() * spec.eps();

  SolveResult out{u0, {}};
  std::vector<double>& u = out.u.values;
  SolveReport& rep = out.report;
  const double u0_sup = sup_norm(u0.values);

  std::vector<double> f, f_trial, step(n), trial(n), diag(n);
  residual(spec, u, f);
  double res = sup_norm(f);
  rep.residual_history.push_back(res);

  const FastHelmholtz precond(g, e2, spec.v_min());
  const LinearOp M = [&](const double* x, double* y) { precond.solve(x, y); };

  auto finish = [&](bool converged) {
    rep.converged = converged;
    rep.final_residual = res;
    const double sup = sup_norm(u);
    rep.trivial = sup == 0.0 || sup <= 1e-8 * u0_sup;
    rep.positivity = *std::min_element(u.begin(), u.end()) > 0.0;
  };

  while (res > cfg.tol_residual) {
    if (rep.iterations >= cfg.max_newton) {
      finish(false);
      std::ostringstream msg;
      msg << "Newton did not reach residual " << cfg.tol_residual << " in " << cfg.max_newton
          << " iterations (last " << res << ")";
      throw SolveError(ErrorKind::Convergence, msg.str(), out);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double a = std::abs(u[i]);
      diag[i] = spec.v_nodes()[i] - (p - 1.0) * (p == 3.0 ? a : std::pow(a, p - 2.0));
    }
    const LinearOp J = [&](const double* x, double* y) { apply_stencil(g, e2, diag.data(), x, y); };
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -f[i];
    std::fill(step.begin(), step.end(), 0.0);
    const KrylovResult kr = minres(J, M, rhs, step, cfg.krylov_tol, cfg.krylov_max);
    rep.krylov_iterations += kr.iterations;

    double t = cfg.damping;
    double trial_res = 0.0;
    while (true) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + t * step[i];
      residual(spec, trial, f_trial);
      trial_res = sup_norm(f_trial);
      if (trial_res < res || trial_res <= cfg.tol_residual) break;
      t *= cfg.backtrack;
      if (t < cfg.min_step) {
        finish(false);
        std::ostringstream msg;
        msg << "Newton line search stalled at residual " << res;
        throw SolveError(ErrorKind::Convergence, msg.str(), out);
      }
    }
    u.swap(trial);
    f.swap(f_trial);
    res = trial_res;
    ++rep.iterations;
    rep.residual_history.push_back(res);
  }
  finish(true);
  return out;
}

TensorGrid grid_for_eps(const ProblemTemplate& tpl, double eps) {
  if (!(eps > 0.0)) fail(ErrorKind::Domain, "eps must be positive");
  const GridRule& rule = tpl.grid;
  if (!(rule.points_per_eps > 0.0) || !(rule.align > 0.0)) fail(ErrorKind::Domain, "invalid grid rule");
  const PotentialModel& pot = tpl.potential;
  const int dim = pot.dim();
  const double h = rule.align / std::ceil(rule.align * rule.points_per_eps / eps);
  double dmin = pot.background();
  for (const auto& w : pot.wells()) dmin = std::min(dmin, w.depth);
  const double decay_len = eps / std::sqrt(dmin);
  double reach = rule.margin_decay_lengths * decay_len;
  if (!pot.is_constant()) reach = std::max(reach, 2.0 * pot.patch_radius() + 5.0 * decay_len);

  std::vector<Point> centers;
  for (const auto& w : pot.wells()) centers.push_back(w.center);
  if (centers.empty()) centers.push_back(Point{});
  std::array<int, 3> counts{1, 1, 1};
  Point lo{}, hi{};
  for (int a = 0; a < dim; ++a) {
    double cmin = centers[0][a], cmax = centers[0][a];
    for (const auto& c : centers) {
      cmin = std::min(cmin, c[a]);
      cmax = std::max(cmax, c[a]);
    }
    const long ilo = static_cast<long>(std::floor((cmin - reach) / h));
    const long ihi = static_cast<long>(std::ceil((cmax + reach) / h));
    lo[a] = static_cast<double>(ilo) * h;
    hi[a] = static_cast<double>(ihi) * h;
    counts[a] = static_cast<int>(ihi - ilo) + 1;
  }
  return TensorGrid(dim, counts, lo, hi);
}

ProblemSpec make_problem(const ProblemTemplate& tpl, double eps) {
  return ProblemSpec(eps, tpl.p, tpl.potential, grid_for_eps(tpl, eps));
}

double interpolate(const ScalarField& u, const Point& x) {
  const TensorGrid& g = u.grid;
  int base[3] = {0, 0, 0};
  double frac[3] = {0.0, 0.0, 0.0};
  for (int a = 0; a < g.dim(); ++a) {
    const double t = (x[a] - g.lo()[a]) / g.spacing()[a];
    if (t < 0.0 || t > g.counts()[a] - 1) return 0.0;
    const int i = std::min(static_cast<int>(std::floor(t)), g.counts()[a] - 2);
    base[a] = i;
    frac[a] = t - i;
  }
  double acc = 0.0;
  for (int c = 0; c < (1 << g.dim()); ++c) {
    int idx[3] = {base[0], base[1], base[2]};
    double w = 1.0;
    for (int a = 0; a < g.dim(); ++a) {
      const int bit = (c >> a) & 1;
      idx[a] += bit;
      w *= bit ? frac[a] : 1.0 - frac[a];
    }
    if (w != 0.0) acc += w * u[g.index(idx[0], idx[1], idx[2])];
  }
  return acc;
}

ScalarField rescale_resample(const ScalarField& u_old, double eps_old, double eps_new,
                             const std::vector<Point>& centers, const TensorGrid& target) {
  ScalarField out(target);
  const double ratio = eps_old / eps_new;
  for (std::size_t k = 0; k < target.size(); ++k) {
    const Point x = target.node(k);
    Point a{};
    double best = -1.0;
    for (const auto& c : centers) {
      const double d = norm(x - c);
      if (best < 0.0 || d < best) {
        best = d;
        a = c;
      }
    }
    out[k] = interpolate(u_old, a + ratio * (x - a));
  }
  return out;
}

std::vector<ContinuationStep> continuation_solve(const ProblemTemplate& tpl, const std::vector<double>& schedule,
                                                 const AnsatzSpec& ansatz, const NewtonConfig& cfg) {
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (!(schedule[i] < schedule[i - 1])) fail(ErrorKind::Domain, "eps schedule must be strictly decreasing");
  }
  std::vector<Point> centers;
  for (const auto& b : ansatz.bumps) centers.push_back(b.center);

  std::vector<ContinuationStep> steps;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    ContinuationStep st;
    st.eps = schedule[i];
    try {
      st.spec = std::make_shared<const ProblemSpec>(make_problem(tpl, st.eps));
      const ScalarField u0 = i == 0 ? build_ansatz(*st.spec, ansatz)
                                    : rescale_resample(steps.back().u, steps.back().eps, st.eps, centers,
                                                       st.spec->grid());
      SolveResult r = newton_solve(*st.spec, u0, cfg);
      st.u = std::move(r.u);
      st.report = std::move(r.report);
    } catch (const SolveError& e) {
      st.u = e.partial().u;
      st.report = e.partial().report;
      st.error = e.what();
    } catch (const Error& e) {
      st.error = e.what();
    }
    const bool failed = !st.error.empty();
    steps.push_back(std::move(st));
    if (failed) break;
  }
  return steps;
}

}  // namespace nlsb
