#include "nlsb/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nlsb/error.hpp"

namespace nlsb {

double cutoff(double s) {
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  const double t = s - 1.0;
  return 1.0 - 3.0 * t * t + 2.0 * t * t * t;
}

double cutoff_derivative(double s) {
  if (s <= 1.0 || s >= 2.0) return 0.0;
  const double t = s - 1.0;
  return -6.0 * t * (1.0 - t);
}

double default_background(const std::vector<WellSpec>& wells, double m, double patch_radius) {
  double bg = 0.0;
  const double outer = std::pow(2.0 * patch_radius, m);
  for (const auto& w : wells) bg = std::max(bg, w.depth + std::max(w.coeff, 0.0) * outer);
  return bg;
}

double PotentialModel::radial_value(const WellSpec& w, double r) const {
  const double chi = cutoff(r / patch_radius_);
  if (chi == 0.0) return background_;
  return background_ + chi * (w.depth + w.coeff * std::pow(r, exponent_) - background_);
}

double PotentialModel::value(const Point& x) const {
  double v = background_;
  for (const auto& w : wells_) {
    const double r = norm(x - w.center);
    if (r >= 2.0 * patch_radius_) continue;
    v += cutoff(r / patch_radius_) * (w.depth + w.coeff * std::pow(r, exponent_) - background_);
  }
  return v;
}

Point PotentialModel::gradient(const Point& x) const {
  Point g{};
  for (const auto& w : wells_) {
    const Point y = x - w.center;
    const double r = norm(y);
    if (r >= 2.0 * patch_radius_ || r == 0.0) continue;
    const double s = r / patch_radius_;
    const double chi = cutoff(s);
    const double local = w.depth + w.coeff * std::pow(r, exponent_) - background_;
    // d/dr of chi * local, times y / r.
    const double dr = cutoff_derivative(s) / patch_radius_ * local +
                      chi * exponent_ * w.coeff * std::pow(r, exponent_ - 1.0);
    g = g + (dr / r) * y;
  }
  for (int i = dim_; i < 3; ++i) g[i] = 0.0;
  return g;
}

namespace {
constexpr int kScanPoints = 4001;
}

double PotentialModel::inf() const {
  double lo = background_;
  for (const auto& w : wells_) {
    for (int i = 0; i < kScanPoints; ++i) {
      const double r = 2.0 * patch_radius_ * i / (kScanPoints - 1);
      lo = std::min(lo, radial_value(w, r));
    }
  }
  return lo;
}

double PotentialModel::sup() const {
  double hi = background_;
  for (const auto& w : wells_) {
    for (int i = 0; i < kScanPoints; ++i) {
      const double r = 2.0 * patch_radius_ * i / (kScanPoints - 1);
      hi = std::max(hi, radial_value(w, r));
    }
  }
  return hi;
}

int PotentialModel::owning_well(const Point& x) const {
  for (std::size_t j = 0; j < wells_.size(); ++j) {
    if (norm(x - wells_[j].center) <= patch_radius_) return static_cast<int>(j);
  }
  return -1;
}

PotentialModel PotentialModel::constant(int dim, double value) {
  if (dim < 1 || dim > 3) fail(ErrorKind::Domain, "dimension must be 1, 2 or 3");
  if (!(value > 0.0)) fail(ErrorKind::Positivity, "constant potential must be positive");
  PotentialModel pot;
  pot.dim_ = dim;
  pot.background_ = value;
  return pot;
}

PotentialModel make_multiwell(int dim, std::vector<WellSpec> wells, double m, double patch_radius,
                              double background) {
  if (dim < 1 || dim > 3) fail(ErrorKind::Domain, "dimension must be 1, 2 or 3");
  if (wells.empty()) fail(ErrorKind::Domain, "at least one well is required");
  if (!(m > 1.0)) fail(ErrorKind::Domain, "exponent m must exceed 1");
  if (!(patch_radius > 0.0)) fail(ErrorKind::Domain, "patch radius must be positive");
  for (auto& w : wells) {
    if (!(w.depth > 0.0)) fail(ErrorKind::Domain, "well depth must be positive");
    if (w.coeff == 0.0 || !std::isfinite(w.coeff)) fail(ErrorKind::Domain, "well coefficient must be nonzero");
    for (int i = dim; i < 3; ++i) {
      if (w.center[i] != 0.0) fail(ErrorKind::Domain, "well center has components beyond dim");
    }
  }
  for (std::size_t i = 0; i < wells.size(); ++i) {
    for (std::size_t j = i + 1; j < wells.size(); ++j) {
      const double d = norm(wells[i].center - wells[j].center);
      if (!(d > 4.0 * patch_radius)) {
        std::ostringstream msg;
        msg << "wells " << i << " and " << j << " are " << d << " apart, need more than "
            << 4.0 * patch_radius;
        fail(ErrorKind::Geometry, msg.str());
      }
    }
  }
  PotentialModel pot;
  pot.dim_ = dim;
  pot.wells_ = std::move(wells);
  pot.exponent_ = m;
  pot.patch_radius_ = patch_radius;
  pot.background_ = background > 0.0 ? background : default_background(pot.wells_, m, patch_radius);
  const double lo = pot.inf();
  if (!(lo > 0.0)) {
    std::ostringstream msg;
    msg << "inf V = " << lo << " is not positive";
    fail(ErrorKind::Positivity, msg.str());
  }
  return pot;
}

double eval_potential(const PotentialModel& pot, const Point& x) { return pot.value(x); }
Point grad_potential(const PotentialModel& pot, const Point& x) { return pot.gradient(x); }

}  // namespace nlsb
