#include "nlsb/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlsb/error.hpp"

namespace nlsb {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

namespace {

void apply_precond(const LinearOp& precond, const std::vector<double>& r, std::vector<double>& z) {
  if (precond) precond(r.data(), z.data());
  else z = r;
}

}  // namespace

KrylovResult minres(const LinearOp& A, const LinearOp& precond, const std::vector<double>& b,
                    std::vector<double>& x, double rtol, int max_iterations) {
  const std::size_t n = b.size();
  x.resize(n, 0.0);
  KrylovResult res;

  std::vector<double> r1(n), y(n), v(n), w(n, 0.0), w1(n), w2(n, 0.0), r2(n);
  A(x.data(), y.data());
  for (std::size_t i = 0; i < n; ++i) r1[i] = b[i] - y[i];
  apply_precond(precond, r1, y);
  double beta1 = dot(r1, y);
  if (beta1 < 0.0) fail(ErrorKind::LinearSolver, "preconditioner is not positive definite");
  if (beta1 == 0.0) {
    res.converged = true;
    return res;
  }
  beta1 = std::sqrt(beta1);

  // Reference scale: the preconditioned norm of b itself.
  std::vector<double> mb(n);
  apply_precond(precond, b, mb);
  const double bnorm = std::sqrt(std::max(dot(b, mb), 0.0));
  const double scale = bnorm > 0.0 ? bnorm : beta1;

  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
  double cs = -1.0, sn = 0.0;
  r2 = r1;

  for (int itn = 1; itn <= max_iterations; ++itn) {
    const double s = 1.0 / beta;
    for (std::size_t i = 0; i < n; ++i) v[i] = s * y[i];
    A(v.data(), y.data());
    if (itn >= 2) {
      const double f = beta / oldb;
      for (std::size_t i = 0; i < n; ++i) y[i] -= f * r1[i];
    }
    const double alfa = dot(v, y);
    const double f = alfa / beta;
    for (std::size_t i = 0; i < n; ++i) y[i] -= f * r2[i];
    std::swap(r1, r2);
    r2 = y;
    apply_precond(precond, r2, y);
    oldb = beta;
    beta = dot(r2, y);
    if (beta < 0.0) fail(ErrorKind::LinearSolver, "preconditioner is not positive definite");
    beta = std::sqrt(beta);

    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    double gamma = std::hypot(gbar, beta);
    gamma = std::max(gamma, std::numeric_limits<double>::epsilon());
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;

    const double denom = 1.0 / gamma;
    std::swap(w1, w2);  // w1 <- old w2
    std::swap(w2, w);   // w2 <- old w
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) * denom;
      x[i] += phi * w[i];
    }

    res.iterations = itn;
    res.relative_residual = phibar / scale;
    if (res.relative_residual <= rtol || beta == 0.0) {
      res.converged = true;
      return res;
    }
  }
  return res;
}

KrylovResult conjugate_gradient(const LinearOp& A, const LinearOp& precond, const std::vector<double>& b,
                                std::vector<double>& x, double rtol, int max_iterations) {
  const std::size_t n = b.size();
  x.resize(n, 0.0);
  KrylovResult res;
  std::vector<double> r(n), z(n), p(n), q(n);
  A(x.data(), q.data());
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
  apply_precond(precond, r, z);
  double rz = dot(r, z);
  std::vector<double> mb(n);
  apply_precond(precond, b, mb);
  const double bnorm = std::sqrt(std::max(dot(b, mb), 0.0));
  if (bnorm == 0.0 || rz <= 0.0) {
    res.converged = rz >= 0.0;
    if (rz < 0.0) fail(ErrorKind::LinearSolver, "preconditioner is not positive definite");
    return res;
  }
  p = z;
  for (int itn = 1; itn <= max_iterations; ++itn) {
    A(p.data(), q.data());
    const double pq = dot(p, q);
    if (!(pq > 0.0)) fail(ErrorKind::LinearSolver, "conjugate gradients met a non-positive curvature");
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    apply_precond(precond, r, z);
    const double rz_new = dot(r, z);
    res.iterations = itn;
    res.relative_residual = std::sqrt(std::max(rz_new, 0.0)) / bnorm;
    if (res.relative_residual <= rtol) {
      res.converged = true;
      return res;
    }
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return res;
}

}  // namespace nlsb
