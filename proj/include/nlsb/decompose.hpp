#pragma once

#include <vector>

#include "nlsb/grid.hpp"
#include "nlsb/solver.hpp"

namespace nlsb {

/// A rescaled bump B(x) = U(|x − y| / ε) on the grid with its spatial gradient
/// and (optionally) Hessian, all from the profile analytically.
struct BumpFields {
  ScalarField value;
  std::vector<ScalarField> gradient;  ///< ∂_s B, s < dim
  std::vector<ScalarField> hessian;   ///< ∂_r ∂_s B, packed r <= s
};

BumpFields bump_fields(const TensorGrid& grid, const RadialProfile& profile, const Point& center, double eps,
                       bool with_hessian);

/// Index of (r, s) in the packed symmetric Hessian list.
int hessian_index(int dim, int r, int s);

struct DecomposeConfig {
  int max_iterations = 50;
  double rel_tol = 1e-8;  ///< |G| <= rel_tol · ‖υ‖_ε · ‖Z‖_ε
};

/// u = Σ (1 + α_j) U_j((x − x_j)/ε) + υ with υ ε-orthogonal to every bump and
/// its translation derivatives; w = u − Σ U_j((x − x_j)/ε) = Σ α_j U_j + υ.
struct BumpDecomposition {
  std::vector<Point> centers;
  std::vector<double> amplitudes;  ///< α_j
  std::vector<Point> reference;    ///< well centers a_j (initial centers when no well owns them)
  ScalarField remainder_w;
  ScalarField remainder_v;
  double w_norm = 0.0;
  double v_norm = 0.0;
  /// |(υ, Z)_ε| / ‖Z‖_ε for each bump j and Z ∈ {B_j, ∂_1 B_j, …}, bump-major.
  std::vector<double> projection_residuals;
  int iterations = 0;
};

/// Newton iteration on the k(N+1) orthogonality conditions, starting from the
/// ansatz centers with α = 0.
BumpDecomposition decompose(const ProblemSpec& spec, const ScalarField& u, const AnsatzSpec& initial,
                            const DecomposeConfig& cfg = {});

}  // namespace nlsb
