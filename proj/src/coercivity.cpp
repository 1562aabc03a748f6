#include "nlsb/coercivity.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "nlsb/error.hpp"
#include "nlsb/fast_solver.hpp"
#include "nlsb/krylov.hpp"

namespace nlsb {

namespace {

struct LanczosResult {
  std::vector<double> top;  ///< leading Ritz values, descending
  int steps = 0;
};

// Leading eigenvalues of a B-self-adjoint operator T by Lanczos with full
// reorthogonalization in the B-inner product. apply_b gives B x; project (may be
// empty) restricts the iteration to the range of a B-orthogonal projector.
LanczosResult lanczos_top(std::size_t n, const LinearOp& apply_t, const LinearOp& apply_b,
                          const std::function<void(std::vector<double>&)>& project, const CoercivityConfig& cfg,
                          int tracked) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> w(n), bw(n);
  for (double& x : w) x = dist(rng);
  if (project) project(w);

  std::vector<std::vector<double>> basis;
  std::vector<double> alpha, beta;
  auto b_normalize = [&]() {
    apply_b(w.data(), bw.data());
    const double nb = std::sqrt(std::max(dot(w, bw), 0.0));
    return nb;
  };
  auto reorthogonalize = [&]() {
    for (int pass = 0; pass < 2; ++pass) {
      apply_b(w.data(), bw.data());
      for (const auto& q : basis) {
        const double c = dot(bw, q);
        for (std::size_t i = 0; i < n; ++i) w[i] -= c * q[i];
      }
    }
  };

  double nb = b_normalize();
  if (!(nb > 0.0)) fail(ErrorKind::Spectral, "Lanczos start vector vanished");
  LanczosResult res;
  std::vector<double> prev_top;
  for (int j = 0; j < cfg.max_lanczos; ++j) {
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = w[i] / nb;
    basis.push_back(std::move(q));
    const std::vector<double>& qj = basis.back();

    apply_t(qj.data(), w.data());
    if (project) project(w);
    // ⟨T q, q⟩_B, with B symmetric under the plain dot.
    apply_b(w.data(), bw.data());
    alpha.push_back(dot(bw, qj));
    reorthogonalize();
    nb = b_normalize();

    const int m = static_cast<int>(alpha.size());
    Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd e(std::max(m - 1, 0));
    for (int i = 0; i + 1 < m; ++i) e(i) = beta[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
    const int t = std::min(tracked, m);
    bool settled = m >= cfg.min_lanczos || nb <= 1e-14;
    res.top.clear();
    for (int i = 0; i < t; ++i) {
      const int idx = m - 1 - i;
      const double theta = es.eigenvalues()(idx);
      res.top.push_back(theta);
      const double resid = nb * std::abs(es.eigenvectors()(m - 1, idx));
      if (resid > cfg.ritz_tol * std::max(1.0, std::abs(theta))) settled = false;
    }
    res.steps = m;
    if (settled || nb <= 1e-14) return res;
    beta.push_back(nb);
  }
  std::ostringstream msg;
  msg << "Lanczos did not settle in " << cfg.max_lanczos << " steps";
  fail(ErrorKind::Spectral, msg.str());
}

}  // namespace

CoercivityReport coercivity_estimate(const ProblemSpec& spec, const BumpDecomposition& dec, const AnsatzSpec& ansatz,
                                     const CoercivityConfig& cfg) {
  const TensorGrid& g = spec.grid();
  const std::size_t n = g.size();
  const int dim = spec.dim();
  const int k = static_cast<int>(dec.centers.size());
  const double p = spec.p();
  const double e2 = spec.eps() * spec.eps();

  std::vector<BumpFields> fields;
  std::vector<double> kdiag(n, 0.0);
  for (int j = 0; j < k; ++j) {
    fields.push_back(bump_fields(g, *ansatz.bumps[j].profile, dec.centers[j], spec.eps(), false));
    for (std::size_t i = 0; i < n; ++i) kdiag[i] += (p - 1.0) * std::pow(std::abs(fields[j].value[i]), p - 2.0);
  }

  const LinearOp apply_b = [&](const double* x, double* y) { apply_linear(spec, x, y); };
  const FastHelmholtz fast(g, e2, spec.v_min());
  const LinearOp precond = [&](const double* x, double* y) { fast.solve(x, y); };
  const LinearOp apply_t = [&](const double* x, double* y) {
    std::vector<double> rhs(n), sol(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = kdiag[i] * x[i];
    const KrylovResult kr = conjugate_gradient(apply_b, precond, rhs, sol, cfg.cg_tol, cfg.cg_max);
    if (!kr.converged) fail(ErrorKind::LinearSolver, "inner solve with −ε²Δ + V did not converge");
    std::copy(sol.begin(), sol.end(), y);
  };

  auto quotient = [&](const std::vector<double>& z) {
    std::vector<double> bz(n);
    apply_b(z.data(), bz.data());
    double kz = 0.0;
    for (std::size_t i = 0; i < n; ++i) kz += kdiag[i] * z[i] * z[i];
    return 1.0 - kz / dot(bz, z);
  };

  CoercivityReport rep;
  for (int j = 0; j < k; ++j) {
    for (int s = 0; s < dim; ++s) rep.translation_quotients.push_back(quotient(fields[j].gradient[s].values));
  }

  const int tracked = std::max(cfg.tracked, k + 2);
  const LanczosResult full = lanczos_top(n, apply_t, apply_b, {}, cfg, tracked);
  for (double mu : full.top) {
    rep.unprojected_quotients.push_back(1.0 - mu);
    if (1.0 - mu < -cfg.negative_threshold) ++rep.negative_directions;
  }
  rep.unprojected_min = rep.unprojected_quotients.front();

  // B-orthogonal projector onto the complement of span{B_j, ∂_s B_j}.
  std::vector<std::vector<double>> zs, bzs;
  for (int j = 0; j < k; ++j) {
    zs.push_back(fields[j].value.values);
    for (int s = 0; s < dim; ++s) zs.push_back(fields[j].gradient[s].values);
  }
  const int mz = static_cast<int>(zs.size());
  Eigen::MatrixXd gram(mz, mz);
  for (const auto& z : zs) {
    bzs.emplace_back(n);
    apply_b(z.data(), bzs.back().data());
  }
  for (int a = 0; a < mz; ++a) {
    for (int b = 0; b < mz; ++b) gram(a, b) = dot(bzs[a], zs[b]);
  }
  const Eigen::LDLT<Eigen::MatrixXd> gram_ldlt(gram);
  const auto project = [&](std::vector<double>& x) {
    Eigen::VectorXd c(mz);
    for (int a = 0; a < mz; ++a) c(a) = dot(bzs[a], x);
    const Eigen::VectorXd coef = gram_ldlt.solve(c);
    for (int a = 0; a < mz; ++a) {
      for (std::size_t i = 0; i < n; ++i) x[i] -= coef(a) * zs[a][i];
    }
  };
  const LanczosResult proj = lanczos_top(n, apply_t, apply_b, project, cfg, cfg.tracked);
  rep.rho = 1.0 - proj.top.front();
  rep.lanczos_steps = full.steps + proj.steps;
  return rep;
}

}  // namespace nlsb
