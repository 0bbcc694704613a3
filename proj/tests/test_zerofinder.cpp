#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/special_functions/beta.hpp>

#include "bscount/zerofinder.hpp"

using namespace bscount;
using namespace bscount::zeros;

namespace {

// a(k) = (k - i)(k + 5i) / (k + 2i)^2 = 1 + O(k^{-2}), analytic above Im k = -2
cplx rational(cplx k) { return (k - kI) * (k + 5.0 * kI) / ((k + 2.0 * kI) * (k + 2.0 * kI)); }

}  // namespace

TEST_CASE("count_zeros examples") {
  CHECK(count_zeros([](cplx k) { return k * k + 1.0; }, {-2, 2, 0.5, 2}) == 1);
  CHECK(count_zeros([](cplx) { return cplx(1.0); }, {-3, 1, -2, 5}) == 0);
  CHECK(count_zeros([](cplx k) { return (k - cplx(1, 1)) * (k - cplx(1, 1)); }, {0, 2, 0, 2}) == 2);
}

TEST_CASE("count_zeros jitters a zero off the boundary") {
  // the zero sits on the left edge; the grown rectangle contains it
  CHECK(count_zeros([](cplx k) { return k - 1.0; }, {1, 2, -1, 1}) == 1);
}

TEST_CASE("locate_zeros examples") {
  const auto z = locate_zeros([](cplx k) { return k * k + 1.0; }, {-2, 2, 0.5, 2}, 1e-10);
  REQUIRE(z.size() == 1);
  CHECK(std::abs(z[0].k - kI) < 1e-10);
  CHECK(z[0].multiplicity == 1);

  const auto two =
      locate_zeros([](cplx k) { return (k - cplx(0.5, 0.5)) * (k - cplx(1.5, 0.5)); }, {0, 2, 0, 1}, 1e-10);
  REQUIRE(two.size() == 2);
  for (const auto& r : two) {
    CHECK(r.multiplicity == 1);
    CHECK(std::min(std::abs(r.k - cplx(0.5, 0.5)), std::abs(r.k - cplx(1.5, 0.5))) < 1e-10);
  }

  const auto dbl = locate_zeros([](cplx k) { return (k - cplx(1, 1)) * (k - cplx(1, 1)); }, {0, 2, 0, 2}, 1e-8);
  int total = 0;
  for (const auto& r : dbl) total += r.multiplicity;
  CHECK(total == 2);
}

TEST_CASE("multiplicities sum to the count on random polynomials") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<cplx> roots;
    for (int i = 0; i < 1 + trial % 6; ++i) roots.emplace_back(u(rng), u(rng));
    auto f = [&](cplx k) {
      cplx p = 1.0;
      for (const cplx& r : roots) p *= k - r;
      return p;
    };
    const Rectangle rect{-0.9, 0.8, -0.7, 0.95};
    int inside = 0;
    for (const cplx& r : roots) inside += rect.contains(r);
    const auto zs = locate_zeros(f, rect, 1e-9);
    int total = 0;
    for (const auto& z : zs) total += z.multiplicity;
    CHECK(total == inside);
  }
}

TEST_CASE("count_zeros is additive under rectangle splitting") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0), cut(-0.6, 0.6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<cplx> roots;
    for (int i = 0; i < 4; ++i) roots.emplace_back(u(rng), u(rng));
    double x = cut(rng);
    // keep the cut line away from the roots
    bool clear = false;
    while (!clear) {
      clear = true;
      for (const cplx& r : roots) clear = clear && std::abs(r.real() - x) > 1e-3;
      if (!clear) x = cut(rng);
    }
    auto f = [&](cplx k) {
      cplx p = 1.0;
      for (const cplx& r : roots) p *= k - r;
      return p;
    };
    const Rectangle whole{-1.3, 1.3, -1.2, 1.2};
    const int a = count_zeros(f, {whole.re_min, x, whole.im_min, whole.im_max});
    const int b = count_zeros(f, {x, whole.re_max, whole.im_min, whole.im_max});
    CHECK(a + b == count_zeros(f, whole));
    CHECK(a + b == 4);
  }
}

TEST_CASE("count_in_circle") {
  CHECK(count_in_circle([](cplx k) { return k * k * k; }, 0.0, 1.0) == 3);
  CHECK(count_in_circle([](cplx k) { return k - 2.0; }, 0.0, 1.0) == 0);
}

TEST_CASE("c_nu") {
  CHECK(std::abs(c_nu(2.0) - 0.5) < 1e-12);
  CHECK(std::abs(c_nu(3.0) - 1.0 / kPi) < 1e-10);
  // (1/2pi) \int (1 + t^2)^{-nu/2} dt = B(1/2, (nu - 1)/2) / 2pi
  for (double nu : {1.5, 2.5, 4.0, 7.0}) {
    const double ref = boost::math::beta(0.5, 0.5 * (nu - 1.0)) / (2 * kPi);
    CHECK(c_nu(nu) == doctest::Approx(ref).epsilon(1e-9));
  }
  CHECK_THROWS(c_nu(1.0));
}

TEST_CASE("Blaschke product") {
  CHECK(blaschke({0.3, 0.2}, {}, -1.0) == cplx(1.0));
  const std::vector<cplx> zs{{0.0, 1.0}, {1.5, 0.2}, {-2.0, -0.5}};
  for (int i = 0; i < 100; ++i) {
    const double x = -10.0 + 0.2 * i;
    CHECK(std::abs(std::abs(blaschke({x, -1.0}, zs, -1.0)) - 1.0) < 1e-12);
  }
  const std::vector<cplx> one{kI};
  CHECK(std::abs(blaschke({0.0, 2.0}, one, -1.0) - cplx(0.2)) < 1e-15);
  CHECK_THROWS(blaschke(0.0, std::vector<cplx>{{0.0, -2.0}}, -1.0));
}

TEST_CASE("zero-sum inequality on a rational function with known zeros") {
  LineSampling line;
  line.x_max = 200.0;
  line.spacing = 0.05;
  line.zero_window = {-10, 10, -1, 10};
  line.probes = {50.0, 100.0, 200.0};
  const auto rep = verify_prop21(rational, -1.0, 2.0, line);
  REQUIRE(rep.zeros.size() == 1);
  CHECK(std::abs(rep.zeros[0].k - kI) < 1e-8);
  CHECK(rep.lhs == doctest::Approx(2.0).epsilon(1e-8));
  // independent dense sampling of |k|^2 ln|a| on the line
  double A = 0.0;
  for (int i = 0; i <= 400000; ++i) {
    const cplx k(-200.0 + 400.0 * i / 400000, -1.0);
    A = std::max(A, std::norm(k) * std::log(std::abs(rational(k))));
  }
  CHECK(rep.A >= A * (1 - 1e-6));
  CHECK(rep.rhs == doctest::Approx(0.5 * rep.A).epsilon(1e-12));
  CHECK(rep.passed());
}

TEST_CASE("a = 1 has no zeros and zero A") {
  LineSampling line;
  line.x_max = 10.0;
  line.spacing = 0.1;
  line.zero_window = {-5, 5, -1, 5};
  const auto rep = verify_prop21([](cplx) { return cplx(1.0); }, -1.0, 2.0, line);
  CHECK(rep.zeros.empty());
  CHECK(rep.A == 0.0);
  CHECK(rep.inequality_holds);
}
