#include <doctest.h>

#include <cmath>
#include <random>

#include "bscount/nystrom.hpp"

using namespace bscount;
using namespace bscount::nystrom;

namespace {

SemiSeparable random_generators(int n, std::uint64_t seed, double growth) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  SemiSeparable m;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    m.ut.emplace_back(g(rng), g(rng));
    m.et.emplace_back(g(rng), g(rng));
    s += growth * std::abs(g(rng));
    m.log_scale.push_back(s);
    m.a.emplace_back(0.3 * g(rng), 0.3 * g(rng));
    m.b.emplace_back(0.3 * g(rng), 0.3 * g(rng));
  }
  return m;
}

}  // namespace

TEST_CASE("O(n) kernels agree with the dense matrix") {
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = random_generators(3 + 4 * trial, 100 + trial, trial % 2 ? 0.5 : 0.0);
    const ComplexMatrix d = dense(m);
    const ComplexMatrix one = ComplexMatrix::Identity(d.rows(), d.cols()) + d;
    const cplx det = numerics::complex_determinant(one);
    const cplx ld = log_det_one_plus(m);
    CHECK(std::abs(std::exp(ld) - det) <= 1e-10 * std::max(1.0, std::abs(det)));
    ComplexMatrix p = d;
    for (int k = 1; k <= 3; ++k) {
      const cplx tr = p.trace();
      CHECK(std::abs(trace_power(m, k) - tr) <= 1e-10 * std::max(1.0, std::abs(tr)));
      p = p * d;
    }
    CHECK(frobenius_squared(m) == doctest::Approx(d.squaredNorm()).epsilon(1e-12));
    const ComplexVector x = ComplexVector::LinSpaced(d.cols(), 0.0, 1.0);
    CHECK((matvec(m, x) - d * x).norm() <= 1e-12 * std::max(1.0, (d * x).norm()));
    CHECK((dense(adjoint(m)) - d.adjoint()).norm() <= 1e-12 * std::max(1.0, d.norm()));
    double s4 = 0.0;
    for (double s : numerics::singular_values(d)) s4 += std::pow(s, 4);
    CHECK(schatten4_power(m) == doctest::Approx(s4).epsilon(1e-10));
  }
}

TEST_CASE("regularized log determinant removes the trace terms") {
  const auto m = random_generators(12, 5, 0.0);
  const cplx t1 = trace_power(m, 1), t2 = trace_power(m, 2), t3 = trace_power(m, 3);
  const cplx ld = log_det_one_plus(m);
  CHECK(std::abs(std::exp(log_det_regularized(m, 2)) - std::exp(ld - t1)) < 1e-12 * std::abs(std::exp(ld - t1)));
  const cplx l4 = ld - t1 + t2 / 2.0 - t3 / 3.0;
  CHECK(std::abs(std::exp(log_det_regularized(m, 4)) - std::exp(l4)) < 1e-12 * std::abs(std::exp(l4)));
}

TEST_CASE("Romberg extrapolation of the trapezoid rule") {
  // trapezoid error expands in even powers of h
  auto trap = [](int level) {
    const int n = 4 << level;
    double s = 0.5 * (std::exp(0.0) + std::exp(1.0));
    for (int i = 1; i < n; ++i) s += std::exp(double(i) / n);
    return std::pair{cplx(s / n), n};
  };
  const auto r = romberg_adaptive(trap, 1e-13, 1 << 16, 4, "trapezoid");
  CHECK(std::abs(r.value - cplx(std::exp(1.0) - 1.0)) < 1e-12);
  CHECK(r.levels >= 3);
}

TEST_CASE("Romberg budget exhaustion is reported") {
  auto noisy = [](int level) { return std::pair{cplx(level % 2 ? 1.0 : -1.0), 8 << level}; };
  try {
    romberg_adaptive(noisy, 1e-10, 1024, 8, "noisy");
    FAIL("expected BudgetExhausted");
  } catch (const NumericalError& e) {
    CHECK(e.kind() == NumericalError::Kind::BudgetExhausted);
  }
}

TEST_CASE("base panels scale with the rate") {
  const std::vector<double> br{0.0, 1.0, 3.0};
  const auto lo = base_panels(br, 1.0, 8), hi = base_panels(br, 50.0, 8);
  REQUIRE(lo.size() == 2);
  for (std::size_t c = 0; c < 2; ++c) CHECK(hi[c] > lo[c]);
  CHECK(hi[1] >= hi[0]);
}
