#include <cmath>
#include <random>

#include "doctest.h"
#include "nlsb/error.hpp"
#include "nlsb/potential.hpp"

using namespace nlsb;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

PotentialModel double_well(double m) {
  return make_multiwell(2, {{{-1.0, 0.0, 0.0}, 1.0, 1.0}, {{1.0, 0.0, 0.0}, 1.21, 1.0}}, m, 0.49);
}

Point central_difference(const PotentialModel& pot, const Point& x, double h) {
  Point g{};
  for (int a = 0; a < pot.dim(); ++a) {
    Point xp = x, xm = x;
    xp[a] += h;
    xm[a] -= h;
    g[a] = (pot.value(xp) - pot.value(xm)) / (2.0 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("single-well values follow the local expansion") {
  const PotentialModel quad = make_multiwell(3, {{{0.0, 0.0, 0.0}, 1.0, 1.0}}, 2.0, 1.0);
  CHECK(quad.value({0.5, 0.0, 0.0}) == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(quad.value({0.3, 0.4, 0.0}) == doctest::Approx(1.25).epsilon(1e-15));
  const Point g = quad.gradient({0.5, 0.0, 0.0});
  CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g[1] == 0.0);
  CHECK(g[2] == 0.0);

  const PotentialModel cubic = make_multiwell(3, {{{0.2, -0.1, 0.3}, 1.0, 1.0}}, 3.0, 0.5);
  CHECK(cubic.value({0.2, -0.1, 0.3}) == 1.0);
  CHECK(cubic.value({0.5, -0.1, 0.3}) == doctest::Approx(1.027).epsilon(1e-14));
  CHECK(cubic.value({5.2, -0.1, 0.3}) == cubic.background());
}

TEST_CASE("well centers are critical points and gradients vanish between patches") {
  for (double m : {1.5, 2.0, 3.0}) {
    const PotentialModel pot = double_well(m);
    for (const auto& w : pot.wells()) {
      const Point g = pot.gradient(w.center);
      CHECK(g[0] == 0.0);
      CHECK(g[1] == 0.0);
    }
    CHECK(pot.value({0.0, 0.0, 0.0}) == pot.background());
    const Point mid = pot.gradient({0.0, 0.0, 0.0});
    CHECK(mid[0] == 0.0);
    CHECK(mid[1] == 0.0);
  }
}

TEST_CASE("gradient magnitude near a well with m = 1.5 vanishes like sqrt(t)") {
  const PotentialModel pot = make_multiwell(3, {{{0.0, 0.0, 0.0}, 1.0, 1.0}}, 1.5, 1.0);
  for (double t : {1e-2, 1e-4, 1e-6}) {
    CHECK(pot.gradient({t, 0.0, 0.0})[0] == doctest::Approx(1.5 * std::sqrt(t)).epsilon(1e-12));
  }
}

TEST_CASE("analytic gradient agrees with central differences at second order") {
  std::mt19937_64 rng(7);
  for (double m : {1.5, 2.0, 3.0}) {
    const PotentialModel pot = double_well(m);
    std::uniform_real_distribution<double> ux(-2.2, 2.2), uy(-1.2, 1.2);
    int sampled = 0;
    double e1 = 0.0, e2 = 0.0;
    const double h = 1e-3;
    while (sampled < 1000) {
      const Point x{ux(rng), uy(rng), 0.0};
      // Keep away from the well centers (reduced smoothness for m < 3) and the
      // cutoff seams at r = δ, 2δ where V is only C¹.
      bool skip = false;
      for (const auto& w : pot.wells()) {
        const double r = norm(x - w.center);
        if (r < 0.05 || std::abs(r - 0.49) < 0.01 || std::abs(r - 0.98) < 0.01) skip = true;
      }
      if (skip) continue;
      ++sampled;
      const Point g = pot.gradient(x);
      const Point d1 = central_difference(pot, x, h);
      const Point d2 = central_difference(pot, x, h / 2);
      e1 = std::max(e1, std::max(std::abs(g[0] - d1[0]), std::abs(g[1] - d1[1])));
      e2 = std::max(e2, std::max(std::abs(g[0] - d2[0]), std::abs(g[1] - d2[1])));
    }
    CAPTURE(m);
    CHECK(e1 <= 1e-4);
    CHECK(std::log2(e1 / e2) >= 1.9);
  }
}

TEST_CASE("expansion remainder is bounded on the inner patch") {
  // Inside B_δ the construction is exact, so the remainder is roundoff.
  const PotentialModel pot = double_well(1.5);
  for (const auto& w : pot.wells()) {
    for (double r : {0.4, 0.1, 1e-2, 1e-3}) {
      const double v = pot.value(w.center + Point{r, 0.0, 0.0});
      const double rem = std::abs(v - w.depth - w.coeff * std::pow(r, 1.5));
      CHECK(rem <= 4e-16 * v);
    }
  }
}

TEST_CASE("positivity and boundedness on a dense sample") {
  for (double m : {1.5, 2.0, 3.0}) {
    const PotentialModel pot = double_well(m);
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i <= 400; ++i) {
      for (int j = 0; j <= 200; ++j) {
        const double v = pot.value({-3.0 + 6.0 * i / 400, -1.5 + 3.0 * j / 200, 0.0});
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    CHECK(lo > 0.0);
    CHECK(lo >= pot.inf() - 1e-12);
    CHECK(hi <= pot.sup() + 1e-12);
    CHECK(pot.inf() == doctest::Approx(1.0));
  }
}

TEST_CASE("midpoint between patches equals the background") {
  const PotentialModel pot = make_multiwell(2, {{{-1.0, 0.0, 0.0}, 1.0, 1.0}, {{1.0, 0.0, 0.0}, 1.21, 1.0}}, 1.5, 0.3);
  CHECK(pot.value({0.0, 0.0, 0.0}) == pot.background());
  CHECK(pot.background() == doctest::Approx(1.21 + std::pow(0.6, 1.5)));
}

TEST_CASE("construction errors") {
  CHECK(kind_of([] { make_multiwell(2, {{{-1.0, 0.0, 0.0}, 1.0, 1.0}, {{1.0, 0.0, 0.0}, 1.0, 1.0}}, 2.0, 0.5); }) ==
        ErrorKind::Geometry);
  CHECK(kind_of([] { make_multiwell(2, {{{0.0, 0.0, 0.0}, 1.0, 1.0}}, 1.0, 0.5); }) == ErrorKind::Domain);
  CHECK(kind_of([] { make_multiwell(2, {{{0.0, 0.0, 0.0}, 1.0, 0.0}}, 2.0, 0.5); }) == ErrorKind::Domain);
  CHECK(kind_of([] { make_multiwell(2, {{{0.0, 0.0, 0.0}, 0.5, -4.0}}, 2.0, 0.5); }) == ErrorKind::Positivity);
  CHECK(kind_of([] { make_multiwell(2, {}, 2.0, 0.5); }) == ErrorKind::Domain);
  // A local maximum that stays positive is accepted.
  const PotentialModel top = make_multiwell(2, {{{0.0, 0.0, 0.0}, 2.0, -1.0}}, 2.0, 0.5);
  CHECK(top.inf() > 0.0);
  CHECK(top.value({0.0, 0.0, 0.0}) == 2.0);
}
