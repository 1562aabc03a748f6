#include "nlsb/decompose.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "nlsb/error.hpp"

namespace nlsb {

int hessian_index(int dim, int r, int s) {
  if (r > s) std::swap(r, s);
  // Row r of the upper triangle starts after r rows of lengths dim, dim−1, …
  return r * dim - r * (r - 1) / 2 + (s - r);
}

BumpFields bump_fields(const TensorGrid& grid, const RadialProfile& profile, const Point& center, double eps,
                       bool with_hessian) {
  const int dim = grid.dim();
  BumpFields f;
  f.value = ScalarField(grid);
  f.gradient.assign(dim, ScalarField(grid));
  if (with_hessian) f.hessian.assign(dim * (dim + 1) / 2, ScalarField(grid));
  const double inv_eps = 1.0 / eps;
  const double inv_eps2 = inv_eps * inv_eps;
  // Beyond this radius the bump is below every double-precision scale of interest.
  const double rho_cut = profile.r_max() + 40.0 / profile.decay_rate();
  const double curv0 = profile.second_derivative(0.0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Point y = grid.node(k) - center;
    const double r = norm(y);
    const double rho = r * inv_eps;
    if (rho > rho_cut) continue;
    const ProfileSample s = profile.eval(rho);
    f.value[k] = s.value;
    Point yhat{};
    if (r > 0.0) yhat = (1.0 / r) * y;
    for (int a = 0; a < dim; ++a) f.gradient[a][k] = s.slope * yhat[a] * inv_eps;
    if (with_hessian) {
      const double upp = r > 0.0 ? profile.second_derivative(rho) : curv0;
      const double up_over = rho > 0.0 ? s.slope / rho : curv0;
      for (int a = 0; a < dim; ++a) {
        for (int b = a; b < dim; ++b) {
          const double yy = yhat[a] * yhat[b];
          f.hessian[hessian_index(dim, a, b)][k] = (upp * yy + up_over * ((a == b ? 1.0 : 0.0) - yy)) * inv_eps2;
        }
      }
    }
  }
  return f;
}

BumpDecomposition decompose(const ProblemSpec& spec, const ScalarField& u, const AnsatzSpec& initial,
                            const DecomposeConfig& cfg) {
  check_same_grid(spec.grid(), u.grid);
  const int dim = spec.dim();
  const int k = static_cast<int>(initial.bumps.size());
  if (k == 0) fail(ErrorKind::Domain, "decomposition needs at least one bump");
  const int per = dim + 1;
  const int m = k * per;
  const TensorGrid& g = spec.grid();
  const PotentialModel& pot = spec.potential();

  BumpDecomposition dec;
  dec.amplitudes.assign(k, 0.0);
  std::vector<int> owner(k, -1);
  for (int j = 0; j < k; ++j) {
    dec.centers.push_back(initial.bumps[j].center);
    owner[j] = pot.owning_well(initial.bumps[j].center);
    dec.reference.push_back(owner[j] >= 0 ? pot.wells()[owner[j]].center : initial.bumps[j].center);
  }
  const double u_norm = eps_norm(spec, u);

  std::vector<BumpFields> fields(k);
  ScalarField v(g);
  Eigen::VectorXd G(m), znorm(m);
  auto z_of = [&](int j, int r) -> const ScalarField& {
    return r == 0 ? fields[j].value : fields[j].gradient[r - 1];
  };

  for (int it = 0;; ++it) {
    for (int j = 0; j < k; ++j) {
      fields[j] = bump_fields(g, *initial.bumps[j].profile, dec.centers[j], spec.eps(), true);
    }
    v = u;
    for (int j = 0; j < k; ++j) {
      const double amp = 1.0 + dec.amplitudes[j];
      for (std::size_t n = 0; n < v.size(); ++n) v[n] -= amp * fields[j].value[n];
    }
    const double v_norm = eps_norm(spec, v);
    bool done = true;
    for (int j = 0; j < k; ++j) {
      for (int r = 0; r < per; ++r) {
        const int row = j * per + r;
        G(row) = eps_inner(spec, v, z_of(j, r));
        znorm(row) = eps_norm(spec, z_of(j, r));
        // The floor covers roundoff in υ = u − Σ(1 + α)B when υ is tiny.
        const double tol = std::max(cfg.rel_tol * v_norm, 1e-12 * u_norm) * znorm(row);
        if (std::abs(G(row)) > tol) done = false;
      }
    }
    if (done) {
      dec.iterations = it;
      dec.remainder_v = v;
      dec.v_norm = v_norm;
      dec.projection_residuals.resize(m);
      for (int i = 0; i < m; ++i) dec.projection_residuals[i] = std::abs(G(i)) / znorm(i);
      break;
    }
    if (it >= cfg.max_iterations) {
      std::ostringstream msg;
      msg << "orthogonality system not solved in " << cfg.max_iterations << " iterations (max |G| = "
          << G.cwiseAbs().maxCoeff() << ")";
      fail(ErrorKind::Decomposition, msg.str());
    }

    // Jacobian of G with respect to (α_l, x_{l,s}), columns bump-major.
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
    std::vector<std::vector<double>> gram(m, std::vector<double>(m, 0.0));
    for (int a = 0; a < m; ++a) {
      for (int b = a; b < m; ++b) {
        gram[a][b] = gram[b][a] = eps_inner(spec, z_of(a / per, a % per), z_of(b / per, b % per));
      }
    }
    for (int j = 0; j < k; ++j) {
      for (int r = 0; r < per; ++r) {
        const int row = j * per + r;
        for (int l = 0; l < k; ++l) {
          J(row, l * per) = -gram[l * per][row];
          for (int s = 0; s < dim; ++s) {
            J(row, l * per + 1 + s) = (1.0 + dec.amplitudes[l]) * gram[l * per + 1 + s][row];
          }
        }
        // Z_{j,r} moves with x_j: ∂/∂x_{j,s} Z_{j,r} = −∂_s Z_{j,r}.
        for (int s = 0; s < dim; ++s) {
          const double term = r == 0 ? G(j * per + 1 + s)
                                     : eps_inner(spec, v, fields[j].hessian[hessian_index(dim, r - 1, s)]);
          J(row, j * per + 1 + s) -= term;
        }
      }
    }
    const Eigen::VectorXd delta = J.fullPivLu().solve(-G);
    if (!delta.allFinite()) fail(ErrorKind::Decomposition, "singular orthogonality Jacobian");
    for (int j = 0; j < k; ++j) {
      dec.amplitudes[j] += delta(j * per);
      for (int s = 0; s < dim; ++s) dec.centers[j][s] += delta(j * per + 1 + s);
      if (owner[j] >= 0 && norm(dec.centers[j] - dec.reference[j]) > pot.patch_radius()) {
        std::ostringstream msg;
        msg << "bump " << j << " center left the patch of its well";
        fail(ErrorKind::Geometry, msg.str());
      }
    }
  }

  dec.remainder_w = u;
  for (int j = 0; j < k; ++j) {
    for (std::size_t n = 0; n < u.size(); ++n) dec.remainder_w[n] -= fields[j].value[n];
  }
  dec.w_norm = eps_norm(spec, dec.remainder_w);
  return dec;
}

}  // namespace nlsb
