#pragma once

#include <memory>
#include <vector>

#include "nlsb/grid.hpp"

namespace nlsb {

/// Exact solver for (coef · (−Δ_h) + shift) x = b on a tensor grid with ghost-zero
/// Dirichlet data, diagonalized by the type-I discrete sine transform.
class FastHelmholtz {
 public:
  FastHelmholtz(const TensorGrid& grid, double coef, double shift);
  ~FastHelmholtz();
  FastHelmholtz(const FastHelmholtz&) = delete;
  FastHelmholtz& operator=(const FastHelmholtz&) = delete;

  void solve(const double* b, double* x) const;
  std::size_t size() const { return size_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::size_t size_;
};

}  // namespace nlsb
