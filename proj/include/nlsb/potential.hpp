#pragma once

#include <vector>

#include "nlsb/point.hpp"

namespace nlsb {

/// One local expansion V(x) = depth + coeff |x - center|^m near a critical point.
struct WellSpec {
  Point center{};
  double depth = 1.0;
  double coeff = 1.0;
};

/// Globally bounded C^1 potential
///
///   V(x) = background + Σ_j χ(|x - a_j| / δ) (depth_j + coeff_j |x - a_j|^m - background)
///
/// with the cubic smoothstep cutoff χ ≡ 1 on [0,1], χ ≡ 0 on [2,∞). Inside
/// B_δ(a_j) the expansion holds exactly; outside every B_2δ(a_j) V is constant.
/// A model without wells is the constant potential V ≡ background.
class PotentialModel {
 public:
  int dim() const { return dim_; }
  const std::vector<WellSpec>& wells() const { return wells_; }
  double exponent() const { return exponent_; }
  double patch_radius() const { return patch_radius_; }
  double background() const { return background_; }
  bool is_constant() const { return wells_.empty(); }

  double value(const Point& x) const;
  Point gradient(const Point& x) const;

  /// Lower/upper bounds of V over R^dim (exact for this construction, up to a
  /// dense radial scan of each patch).
  double inf() const;
  double sup() const;

  /// Index of the well whose inner patch B_δ contains x, or -1.
  int owning_well(const Point& x) const;

  static PotentialModel constant(int dim, double value);

  friend PotentialModel make_multiwell(int dim, std::vector<WellSpec> wells, double m,
                                       double patch_radius, double background);

 private:
  double radial_value(const WellSpec& w, double r) const;

  int dim_ = 1;
  std::vector<WellSpec> wells_;
  double exponent_ = 2.0;
  double patch_radius_ = 1.0;
  double background_ = 1.0;
};

/// Default background: max_j (depth_j + max(coeff_j, 0) (2δ)^m), which keeps V
/// radially nondecreasing across the blend of every minimum-type well.
double default_background(const std::vector<WellSpec>& wells, double m, double patch_radius);

/// Validating constructor. background <= 0 selects default_background.
PotentialModel make_multiwell(int dim, std::vector<WellSpec> wells, double m, double patch_radius,
                              double background = 0.0);

double eval_potential(const PotentialModel& pot, const Point& x);
Point grad_potential(const PotentialModel& pot, const Point& x);

/// The C^1 cubic smoothstep cutoff and its derivative.
double cutoff(double s);
double cutoff_derivative(double s);

}  // namespace nlsb
