#pragma once

#include <vector>

#include "nlsb/decompose.hpp"
#include "nlsb/grid.hpp"

namespace nlsb {

struct CoercivityConfig {
  int max_lanczos = 120;
  int min_lanczos = 12;
  double ritz_tol = 1e-7;     ///< convergence of the extreme Ritz values
  double cg_tol = 1e-11;      ///< inner solves with −ε²Δ + V
  int cg_max = 2000;
  double negative_threshold = 1e-2;  ///< Q < −threshold counts as a negative direction
  int tracked = 4;            ///< number of leading Ritz values that must settle
  unsigned seed = 1;
};

/// Quotient Q(v) = 1 − ⟨K v, v⟩ / ⟨B v, v⟩ with B = −ε²Δ_h + V and K = (p−1) Σ_j U_j^{p−2}
/// (bumps at the decomposition centers). Extremes come from Lanczos on B⁻¹K in the
/// B-inner product.
struct CoercivityReport {
  double rho = 0.0;              ///< min Q on the B-orthogonal complement of {B_j, ∂_i B_j}
  double unprojected_min = 0.0;  ///< min Q over all fields
  int negative_directions = 0;   ///< unprojected eigen-directions with Q < −threshold
  std::vector<double> unprojected_quotients;  ///< smallest few Q, ascending
  std::vector<double> translation_quotients;  ///< Q(∂_i B_j), bump-major
  int lanczos_steps = 0;
};

CoercivityReport coercivity_estimate(const ProblemSpec& spec, const BumpDecomposition& dec, const AnsatzSpec& ansatz,
                                     const CoercivityConfig& cfg = {});

}  // namespace nlsb
