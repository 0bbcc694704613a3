#include <doctest.h>

#include <cmath>
#include <random>

#include "bscount/potential.hpp"

using namespace bscount;

TEST_CASE("evaluate") {
  const auto V = Potential::piecewise(Geometry::HalfLine, {0.0, 1.0}, {1.0});
  CHECK(V(0.5) == cplx(1.0));
  CHECK(V(2.0) == cplx(0.0));
  CHECK_THROWS(V(-0.1));
  const auto E = Potential::truncated_exponential(Geometry::HalfLine, {1.0, 1.0}, 1.0, 3.0);
  CHECK(std::abs(E(1.0) - cplx(1.0, 1.0) * std::exp(-1.0)) < 1e-15);
  CHECK(E(3.5) == cplx(0.0));
}

TEST_CASE("sqrt decomposition") {
  auto check = [](cplx v) {
    const auto p = sqrt_decomposition(v);
    CHECK(std::abs(p.sqrt_v * p.sqrt_abs_v - v) < 1e-15 * std::max(1.0, std::abs(v)));
    CHECK(std::abs(std::abs(p.sqrt_v) - p.sqrt_abs_v) < 1e-15);
    return p;
  };
  const auto four = check(4.0);
  CHECK(four.sqrt_v == cplx(2.0));
  CHECK(four.sqrt_abs_v == 2.0);
  const auto two_i = check({0.0, 2.0});
  CHECK(std::abs(two_i.sqrt_v - cplx(0.0, std::sqrt(2.0))) < 1e-15);
  const auto zero = check(0.0);
  CHECK(zero.sqrt_v == cplx(0.0));
  CHECK(zero.sqrt_abs_v == 0.0);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int i = 0; i < 50; ++i) check({g(rng), g(rng)});
}

TEST_CASE("weighted integral examples") {
  const auto V = Potential::piecewise(Geometry::HalfLine, {0.0, 1.0}, {1.0});
  CHECK(weighted_integral(V, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(weighted_integral(V, 1.0, 1.0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
  const auto W = Potential::piecewise(Geometry::HalfLine, {0.0, 1.0}, {{1.0, 1.0}});
  CHECK(weighted_integral(W, 0.0, 2.0) == doctest::Approx(2.0).epsilon(1e-14));
  const auto B = Potential::piecewise(Geometry::Radial3D, {0.0, 1.0}, {1.0});
  CHECK(weighted_integral(B, 0.0, 1.0) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-14));
}

TEST_CASE("closed form agrees with quadrature on random potentials") {
  BatterySpec spec;
  spec.count = 50;
  spec.seed = 99;
  for (Geometry g : {Geometry::HalfLine, Geometry::Radial3D}) {
    for (const auto& V : random_battery(g, spec))
      for (double eps : {0.0, 0.7, 2.5})
        for (double p : {1.0, 2.0}) {
          const double a = weighted_integral(V, eps, p), b = weighted_integral_quadrature(V, eps, p);
          CHECK(std::abs(a - b) <= 1e-10 * a);
        }
  }
}

TEST_CASE("weighted integral is nondecreasing in eps and in support extension") {
  BatterySpec spec;
  spec.count = 20;
  for (const auto& V : random_battery(Geometry::HalfLine, spec)) {
    double prev = 0.0;
    for (double eps = 0.0; eps <= 5.0; eps += 0.25) {
      const double w = weighted_integral(V, eps, 1.0);
      CHECK(w >= prev);
      prev = w;
    }
  }
  for (double R = 0.5; R < 3.0; R += 0.5) {
    const auto a = Potential::truncated_gaussian(Geometry::Radial3D, {-2.0, 1.0}, 0.5, R);
    const auto b = Potential::truncated_gaussian(Geometry::Radial3D, {-2.0, 1.0}, 0.5, R + 0.5);
    CHECK(weighted_integral(a, 1.0, 2.0) <= weighted_integral(b, 1.0, 2.0));
  }
}

TEST_CASE("rescale maps the eps-optimal integral as a change of variables") {
  const auto V = Potential::piecewise(Geometry::HalfLine, {0.0, 0.4, 1.0}, {{-3.0, 1.0}, {2.0, -5.0}});
  for (double s : {0.5, 2.0, 3.0}) {
    const auto W = rescale(V, s);
    CHECK(W.support_radius() == doctest::Approx(s));
    // \int e^{(eps/s) x} |V(x/s)| / s^2 dx = (1/s) \int e^{eps y} |V(y)| dy
    CHECK(weighted_integral(W, 1.3 / s, 1.0) == doctest::Approx(weighted_integral(V, 1.3, 1.0) / s).epsilon(1e-13));
  }
}

TEST_CASE("sampled potentials read as piecewise constant") {
  const auto V = Potential::sampled(Geometry::HalfLine, 2.0, {1.0, 2.0, 3.0, 4.0});
  CHECK(V(0.1) == cplx(1.0));
  CHECK(V(1.1) == cplx(3.0));
  CHECK(V.as_piecewise() != nullptr);
  CHECK(V.breaks().size() == 5);
}

TEST_CASE("truncation helper reports the neglected tail") {
  const auto rep = truncate_exponential(Geometry::HalfLine, {2.0, 0.0}, 1.0, 4.0, 0.5, 1.0);
  // \int_4^\infty e^{0.5 x} 2 e^{-x} dx = 4 e^{-2}
  CHECK(rep.neglected_tail == doctest::Approx(4.0 * std::exp(-2.0)).epsilon(1e-14));
  CHECK(std::isinf(truncate_exponential(Geometry::HalfLine, 1.0, 1.0, 4.0, 1.0, 1.0).neglected_tail));
  const auto full = Potential::truncated_exponential(Geometry::HalfLine, {2.0, 0.0}, 1.0, 80.0);
  CHECK(weighted_integral(rep.potential, 0.5, 1.0) + rep.neglected_tail ==
        doctest::Approx(weighted_integral(full, 0.5, 1.0)).epsilon(1e-10));
}

TEST_CASE("random battery is deterministic and respects its bounds") {
  BatterySpec spec;
  const auto a = random_battery(Geometry::HalfLine, spec), b = random_battery(Geometry::HalfLine, spec);
  REQUIRE(a.size() == 20);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].as_piecewise()->values == b[i].as_piecewise()->values);
    CHECK(a[i].support_radius() <= spec.R_max);
    CHECK(a[i].sup_abs() <= spec.sup_abs);
  }
}

TEST_CASE("invalid potentials are rejected") {
  CHECK_THROWS(Potential::piecewise(Geometry::HalfLine, {0.0, 1.0, 0.5}, {1.0, 2.0}));
  CHECK_THROWS(Potential::piecewise(Geometry::HalfLine, {0.1, 1.0}, {1.0}));
  CHECK_THROWS(Potential::sampled(Geometry::HalfLine, -1.0, {1.0}));
}

TEST_CASE("weighted integral overflows to +inf instead of failing") {
  const auto E = Potential::truncated_exponential(Geometry::HalfLine, {-5.0, 5.0}, 1.0, 6.0);
  CHECK(std::isinf(weighted_integral(E, 200.0, 1.0)));
  const double moderate = weighted_integral(E, 2.0, 1.0);
  // \int_0^6 e^{2x} |v| e^{-x} dx = |v| (e^6 - 1)
  CHECK(moderate == doctest::Approx(std::abs(cplx(-5.0, 5.0)) * (std::exp(6.0) - 1.0)).epsilon(1e-10));
}
