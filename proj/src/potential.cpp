#include "bscount/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace bscount {

std::string to_string(Geometry g) { return g == Geometry::HalfLine ? "half_line" : "radial"; }

Potential Potential::piecewise(Geometry g, std::vector<double> breakpoints, std::vector<cplx> values) {
  if (breakpoints.size() < 2 || values.size() + 1 != breakpoints.size())
    throw std::invalid_argument("piecewise potential: need n+1 breakpoints for n values");
  if (breakpoints.front() != 0.0)
    throw std::invalid_argument("piecewise potential: breakpoints must start at 0");
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
    if (!(breakpoints[i] < breakpoints[i + 1]))
      throw std::invalid_argument("piecewise potential: breakpoints must increase");
  for (const cplx& v : values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::invalid_argument("piecewise potential: non-finite value");
  const double R = breakpoints.back();
  return Potential(g, R, PiecewiseConstant{std::move(breakpoints), std::move(values)});
}

Potential Potential::sampled(Geometry g, double R, std::vector<cplx> values) {
  if (!(R > 0) || values.empty()) throw std::invalid_argument("sampled potential: need R > 0 and values");
  const std::size_t n = values.size();
  std::vector<double> br(n + 1);
  for (std::size_t i = 0; i <= n; ++i) br[i] = R * static_cast<double>(i) / static_cast<double>(n);
  br.back() = R;
  return piecewise(g, std::move(br), std::move(values));
}

Potential Potential::truncated_exponential(Geometry g, cplx v, double a, double R) {
  if (!(R > 0) || !std::isfinite(a)) throw std::invalid_argument("truncated exponential: need R > 0");
  return Potential(g, R, TruncatedExponential{v, a, R});
}

Potential Potential::truncated_gaussian(Geometry g, cplx v, double a, double R) {
  if (!(R > 0) || !std::isfinite(a)) throw std::invalid_argument("truncated gaussian: need R > 0");
  return Potential(g, R, TruncatedGaussian{v, a, R});
}

Potential Potential::zero(Geometry g, double R) { return piecewise(g, {0.0, R}, {0.0}); }

cplx Potential::operator()(double x) const {
  if (x < 0) throw std::invalid_argument("potential evaluated at negative x");
  if (x > R_) return 0.0;
  struct Visitor {
    double x;
    cplx operator()(const PiecewiseConstant& p) const {
      auto it = std::upper_bound(p.breakpoints.begin(), p.breakpoints.end(), x);
      std::size_t cell = static_cast<std::size_t>(it - p.breakpoints.begin());
      cell = cell == 0 ? 0 : cell - 1;
      cell = std::min(cell, p.values.size() - 1);  // x == R belongs to the last cell
      return p.values[cell];
    }
    cplx operator()(const TruncatedExponential& e) const { return e.v * std::exp(-e.a * x); }
    cplx operator()(const TruncatedGaussian& e) const { return e.v * std::exp(-e.a * x * x); }
  };
  return std::visit(Visitor{x}, rep_);
}

std::vector<double> Potential::breaks() const {
  if (const auto* p = as_piecewise()) return p->breakpoints;
  return {0.0, R_};
}

double Potential::sup_abs() const {
  struct Visitor {
    double operator()(const PiecewiseConstant& p) const {
      double s = 0.0;
      for (const cplx& v : p.values) s = std::max(s, std::abs(v));
      return s;
    }
    double operator()(const TruncatedExponential& e) const {
      return std::abs(e.v) * std::max(1.0, std::exp(-e.a * e.R));
    }
    double operator()(const TruncatedGaussian& e) const {
      return std::abs(e.v) * std::max(1.0, std::exp(-e.a * e.R * e.R));
    }
  };
  return std::visit(Visitor{}, rep_);
}

bool Potential::is_zero() const { return sup_abs() == 0.0; }

SqrtPair sqrt_decomposition(cplx value) {
  const double m = std::abs(value);
  if (m == 0.0) return {0.0, 0.0};
  const double s = std::sqrt(m);
  return {value / s, s};
}

SqrtPair sqrt_decomposition(const Potential& V, double x) { return sqrt_decomposition(V(x)); }

namespace {

// \int_a^b e^{eps x} dx
double exp_moment0(double eps, double a, double b) {
  if (eps == 0.0) return b - a;
  return std::exp(eps * a) * std::expm1(eps * (b - a)) / eps;
}

// \int_a^b r^2 e^{eps r} dr
double exp_moment2(double eps, double a, double b) {
  if (eps * b < 1.0) {
    // power series; terms eps^m/m! (b^{m+3} - a^{m+3})/(m+3)
    double sum = 0.0, fact = 1.0, epow = 1.0;
    for (int m = 0; m < 60; ++m) {
      const double term = epow / fact * (std::pow(b, m + 3) - std::pow(a, m + 3)) / (m + 3);
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
      epow *= eps;
      fact *= (m + 1);
    }
    return sum;
  }
  auto F = [eps](double r) {
    return std::exp(eps * r) * (r * r / eps - 2.0 * r / (eps * eps) + 2.0 / (eps * eps * eps));
  };
  return F(b) - F(a);
}

double measure_factor(Geometry g, double x) { return g == Geometry::HalfLine ? 1.0 : 4.0 * kPi * x * x; }

}  // namespace

double weighted_integral_quadrature(const Potential& V, double eps, double p) {
  if (eps < 0 || p < 1) throw std::invalid_argument("weighted_integral: need eps >= 0, p >= 1");
  const auto br = V.breaks();
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    const double lo = br[i], hi = br[i + 1];
    // e^{eps hi} is factored out; the product overflows to +inf only when the value does
    auto f = [&](double x) {
      return std::exp(eps * (x - hi)) * std::pow(std::abs(V(x)), p) * measure_factor(V.geometry(), x);
    };
    // sample the cell interior so the piecewise value is unambiguous
    const double scaled = numerics::integrate(
        [&](double x) { return f(std::clamp(x, lo + 1e-15 * (hi - lo), hi - 1e-15 * (hi - lo))); },
        lo, hi, 1e-12);
    if (scaled > 0.0) total += scaled * std::exp(eps * hi);
  }
  return total;
}

double weighted_integral(const Potential& V, double eps, double p) {
  if (eps < 0 || p < 1) throw std::invalid_argument("weighted_integral: need eps >= 0, p >= 1");
  const auto* pc = V.as_piecewise();
  if (!pc) return weighted_integral_quadrature(V, eps, p);
  double total = 0.0;
  for (std::size_t i = 0; i < pc->values.size(); ++i) {
    const double m = std::pow(std::abs(pc->values[i]), p);
    if (m == 0.0) continue;
    const double a = pc->breakpoints[i], b = pc->breakpoints[i + 1];
    total += V.geometry() == Geometry::HalfLine ? m * exp_moment0(eps, a, b)
                                                : 4.0 * kPi * m * exp_moment2(eps, a, b);
  }
  return total;
}

Potential rescale(const Potential& V, double s) {
  if (!(s > 0)) throw std::invalid_argument("rescale: s must be positive");
  const double f = 1.0 / (s * s);
  struct Visitor {
    Geometry g;
    double s, f;
    Potential operator()(const PiecewiseConstant& p) const {
      std::vector<double> br = p.breakpoints;
      for (double& b : br) b *= s;
      std::vector<cplx> vals = p.values;
      for (cplx& v : vals) v *= f;
      return Potential::piecewise(g, std::move(br), std::move(vals));
    }
    Potential operator()(const TruncatedExponential& e) const {
      return Potential::truncated_exponential(g, e.v * f, e.a / s, e.R * s);
    }
    Potential operator()(const TruncatedGaussian& e) const {
      return Potential::truncated_gaussian(g, e.v * f, e.a / (s * s), e.R * s);
    }
  };
  return std::visit(Visitor{V.geometry(), s, f}, V.representation());
}

Potential project_piecewise(const Potential& V, int cells) {
  if (cells < 1) throw std::invalid_argument("project_piecewise: cells >= 1");
  const double R = V.support_radius();
  std::vector<double> br;
  for (int i = 0; i <= cells; ++i) br.push_back(R * i / cells);
  for (double b : V.breaks()) br.push_back(b);
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end(),
                       [R](double x, double y) { return std::abs(x - y) <= 1e-14 * R; }),
           br.end());
  br.front() = 0.0;
  br.back() = R;
  const auto gl = numerics::gauss_legendre(8, -1.0, 1.0);
  std::vector<cplx> vals;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    const double mid = 0.5 * (br[i] + br[i + 1]), half = 0.5 * (br[i + 1] - br[i]);
    cplx s = 0.0;
    for (std::size_t q = 0; q < gl.size(); ++q) s += gl.weights[q] * V(mid + half * gl.nodes[q]);
    vals.push_back(0.5 * s);
  }
  return Potential::piecewise(V.geometry(), std::move(br), std::move(vals));
}

TruncationReport truncate_exponential(Geometry g, cplx v, double a, double R, double eps, double p) {
  Potential V = Potential::truncated_exponential(g, v, a, R);
  const double rate = a * p - eps;  // tail integrand ~ e^{-rate x}
  const double m = std::pow(std::abs(v), p);
  double tail;
  if (m == 0.0) {
    tail = 0.0;
  } else if (!(rate > 0)) {
    tail = std::numeric_limits<double>::infinity();
  } else if (g == Geometry::HalfLine) {
    tail = m * std::exp(-rate * R) / rate;
  } else {
    // 4 pi \int_R^\infty r^2 e^{-rate r} dr
    tail = 4.0 * kPi * m * std::exp(-rate * R) *
           (R * R / rate + 2.0 * R / (rate * rate) + 2.0 / (rate * rate * rate));
  }
  return {std::move(V), tail};
}

std::vector<Potential> random_battery(Geometry g, const BatterySpec& spec) {
  if (spec.count < 0 || spec.max_cells < 1 || !(spec.R_min > 0) || spec.R_max < spec.R_min || spec.sup_abs < 0)
    throw std::invalid_argument("random_battery: invalid spec");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Potential> out;
  out.reserve(spec.count);
  for (int i = 0; i < spec.count; ++i) {
    const double R = spec.R_min + (spec.R_max - spec.R_min) * unit(rng);
    const int cells = 1 + static_cast<int>(unit(rng) * spec.max_cells) % spec.max_cells;
    std::vector<double> bp{0.0};
    for (int c = 1; c < cells; ++c) bp.push_back(R * unit(rng));
    std::sort(bp.begin(), bp.end());
    bp.push_back(R);
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    std::vector<cplx> values;
    for (std::size_t c = 0; c + 1 < bp.size(); ++c)
      values.push_back(std::polar(spec.sup_abs * unit(rng), 2.0 * kPi * unit(rng)));
    out.push_back(Potential::piecewise(g, std::move(bp), std::move(values)));
  }
  return out;
}

}  // namespace bscount
