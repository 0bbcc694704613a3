#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "bscount/jost.hpp"
#include "oracles.hpp"

using namespace bscount;
using namespace bscount::jost;

TEST_CASE("zero potential gives f = 1") {
  for (cplx k : {cplx(1.0, 0.0), cplx(-2.0, 0.5), cplx(0.3, -1.0)})
    CHECK(std::abs(jost_function(Potential::zero(Geometry::HalfLine), k) - 1.0) < 1e-15);
}

TEST_CASE("one cell matches the closed form") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const cplx v(4 * u(rng), 4 * u(rng)), k(u(rng), u(rng));
    const double R = 0.5 + std::abs(u(rng));
    const auto V = Potential::piecewise(Geometry::HalfLine, {0.0, R}, {v});
    const cplx ref = oracle::one_cell_jost(v, R, k);
    CHECK(std::abs(jost_function(V, k) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
  }
}

TEST_CASE("splitting a cell does not change f") {
  const auto a = Potential::piecewise(Geometry::HalfLine, {0.0, 1.0, 2.0}, {{-3.0, 1.0}, {2.0, 0.0}});
  const auto b =
      Potential::piecewise(Geometry::HalfLine, {0.0, 0.3, 1.0, 1.6, 2.0}, {{-3.0, 1.0}, {-3.0, 1.0}, 2.0, 2.0});
  for (cplx k : {cplx(0.7, 0.2), cplx(-1.5, -0.4), cplx(0.0, 2.0)})
    CHECK(std::abs(jost_function(a, k) - jost_function(b, k)) <= 1e-12 * std::abs(jost_function(a, k)));
}

TEST_CASE("f is analytic in k") {
  const auto V = Potential::piecewise(Geometry::HalfLine, {0.0, 0.5, 1.5}, {{-8.0, 2.0}, {3.0, -1.0}});
  const double h = 1e-5;
  for (cplx k : {cplx(0.4, 0.3), cplx(2.0, -0.8), cplx(-1.0, 1.5)}) {
    const cplx fx = (jost_function(V, k + h) - jost_function(V, k - h)) / (2 * h);
    const cplx fy = (jost_function(V, k + kI * h) - jost_function(V, k - kI * h)) / (2 * h);
    CHECK(std::abs(fy - kI * fx) <= 1e-7 * std::max(1.0, std::abs(fx)));
  }
}

TEST_CASE("real wells: zeros on the imaginary axis at the bound-state kappas") {
  for (double W : {3.0, 16.0, 40.0, 100.0}) {
    const double R = 1.0;
    const auto V = Potential::piecewise(Geometry::HalfLine, {0.0, R}, {-W});
    const auto kappas = oracle::real_well_kappas(W, R);
    const double top = std::sqrt(W) + 1.0;
    auto zs = oracle_eigenvalues(V, {-top, top, 1e-3, top});
    REQUIRE(zs.size() == kappas.size());
    std::sort(zs.begin(), zs.end(), [](const auto& a, const auto& b) { return a.k.imag() < b.k.imag(); });
    std::vector<double> ks = kappas;
    std::sort(ks.begin(), ks.end());
    for (std::size_t i = 0; i < ks.size(); ++i) {
      CHECK(std::abs(zs[i].k - cplx(0.0, ks[i])) < 1e-8);
      CHECK(zs[i].multiplicity == 1);
    }
  }
}

TEST_CASE("eigenvalue count is nondecreasing in the well depth") {
  std::size_t prev = 0;
  for (double W = 1.0; W <= 60.0; W += 3.0) {
    const auto V = Potential::piecewise(Geometry::HalfLine, {0.0, 1.0}, {-W});
    const double top = std::sqrt(W) + 1.0;
    const auto n = oracle_eigenvalues(V, {-top, top, 1e-3, top}).size();
    CHECK(n >= prev);
    prev = n;
  }
}

TEST_CASE("complex coupling: zeros move continuously along the homotopy") {
  // V_theta = e^{i theta} W on [0,1]; track the deepest zero through small steps
  const double W = -25.0;
  const zeros::Rectangle rect{-7, 7, 0.05, 7};
  auto deepest = [&](double theta) {
    const auto V = Potential::piecewise(Geometry::HalfLine, {0.0, 1.0}, {std::polar(1.0, theta) * W});
    const auto zs = oracle_eigenvalues(V, rect);
    REQUIRE(!zs.empty());
    return std::max_element(zs.begin(), zs.end(), [](const auto& a, const auto& b) { return a.k.imag() < b.k.imag(); })
        ->k;
  };
  cplx prev = deepest(0.0);
  for (int i = 1; i <= 6; ++i) {
    const cplx cur = deepest(0.05 * i);
    CHECK(std::abs(cur - prev) < 0.2);
    prev = cur;
  }
}

TEST_CASE("oracle rejects rectangles reaching the real axis") {
  const auto V = Potential::piecewise(Geometry::HalfLine, {0.0, 1.0}, {-4.0});
  CHECK_THROWS(oracle_eigenvalues(V, {-3, 3, 0.0, 3}));
  CHECK(oracle_eigenvalues(Potential::zero(Geometry::HalfLine), {-3, 3, 0.1, 3}).empty());
}

TEST_CASE("smooth potentials are projected onto cells with a settled value") {
  const auto V = Potential::truncated_gaussian(Geometry::HalfLine, {-5.0, 1.0}, 1.0, 3.0);
  const auto rep = oracle_representation(V);
  REQUIRE(rep.as_piecewise() != nullptr);
  const auto Vfine = Potential::sampled(Geometry::HalfLine, 3.0, [&] {
    std::vector<cplx> s;
    for (int i = 0; i < 8192; ++i) s.push_back(V((i + 0.5) * 3.0 / 8192));
    return s;
  }());
  for (cplx k : {cplx(1.0, 0.5), cplx(-0.5, 1.0)})
    CHECK(std::abs(jost_function(V, k) - jost_function(Vfine, k)) < 1e-6);
}
