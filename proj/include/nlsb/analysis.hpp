#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "nlsb/decompose.hpp"
#include "nlsb/grid.hpp"
#include "nlsb/solver.hpp"

namespace nlsb {

/// Terms of the local Pohozaev identity on a ball Ω = B_radius(center):
///   ∫_Ω ∂_iV u² = −2ε² ∮ ∂_νu ∂_iu + ∮ (ε²|∇u|² + V u²) ν_i − (2/p) ∮ |u|^p ν_i.
struct PohozaevReport {
  int direction = 0;
  Point center{};
  double radius = 0.0;
  double lhs_volume = 0.0;
  double i1 = 0.0;
  double i2 = 0.0;
  double i3 = 0.0;
  double residual = 0.0;      ///< lhs_volume − (i1 + i2 + i3)
  double lhs_abs = 0.0;       ///< ∫_Ω |∂_iV| u²
  double rel_residual = 0.0;  ///< |residual| / max(|lhs|, |i1|, |i2|, |i3|, lhs_abs)
};

/// sphere_points: θ-nodes in 3D, angles in 2D (0 picks a default).
PohozaevReport pohozaev_terms(const ProblemSpec& spec, const ScalarField& u, const Point& center, double radius,
                              int direction, int sphere_points = 0);

/// ∫_{B_{d/ε}(0)} |εy + x_j − a_j|^{m−2} (εy_i + x_{j,i} − a_{j,i}) U_j(|y|)² dy by radial
/// quadrature on the profile table and a spherical rule in angle.
double localized_moment(const RadialProfile& profile, double eps, double m, const Point& offset, int direction,
                        double d, int dim);
double localized_moment(const ProblemSpec& spec, const BumpDecomposition& dec, const AnsatzSpec& ansatz, int well,
                        int direction, double d);

struct RateFit {
  std::vector<std::pair<double, double>> samples;
  double slope = 0.0;
  double intercept = 0.0;
  double max_deviation = 0.0;  ///< max |log value − fitted line|
};

/// Least squares of log(value) against log(eps).
RateFit fit_rate(const std::vector<std::pair<double, double>>& samples);

/// Trapezoid quadrature of U_i^{q1}((x − c_i)/ε) U_j^{q2}((x − c_j)/ε) over the box.
double overlap_integral(const ProblemSpec& spec, const RadialProfile& profile_i, const Point& center_i,
                        const RadialProfile& profile_j, const Point& center_j, double q1, double q2);

/// An initializer tweak: every bump amplitude scaled, every center shifted.
struct AnsatzTweak {
  double amplitude = 1.0;
  Point shift{};
};

AnsatzSpec tweak_ansatz(const AnsatzSpec& ansatz, const AnsatzTweak& tweak);

struct UniquenessReport {
  double sup_diff = 0.0;
  double sup_norm = 0.0;  ///< ‖u¹‖_∞
  double relative = 0.0;  ///< sup_diff / sup_norm
  bool normalized = false;
  std::optional<ScalarField> xi_field;  ///< (u¹ − u²)/sup_diff when sup_diff > 1e−12 sup_norm
  SolveReport first;
  SolveReport second;
  bool pass = false;  ///< sup_diff <= 1e−8 sup_norm
};

/// Two independent Newton solves from tweaked ansatzes. Solver failures
/// propagate as SolveError.
UniquenessReport uniqueness_probe(const ProblemSpec& spec, const AnsatzSpec& ansatz,
                                  const std::pair<AnsatzTweak, AnsatzTweak>& tweaks, const NewtonConfig& cfg = {},
                                  bool concurrent = false);

}  // namespace nlsb
