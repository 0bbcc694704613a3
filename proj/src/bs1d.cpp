#include "bscount/bs1d.hpp"

#include <algorithm>
#include <cmath>

namespace bscount::bs1d {

namespace {

// sin(z)/z, cancellation free near 0
cplx sinc(cplx z) {
  if (std::abs(z) < 1e-3) {
    const cplx z2 = z * z;
    return 1.0 - z2 / 6.0 * (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0));
  }
  return std::sin(z) / z;
}

}  // namespace

cplx regular_solution(cplx k, double x) { return x * sinc(k * x); }

cplx kernel_g1d(cplx k, double x, double y) {
  const double lo = std::min(x, y), hi = std::max(x, y);
  return regular_solution(k, lo) * std::exp(kI * k * hi);
}

numerics::QuadratureRule nystrom_rule(const Potential& V, int n) {
  const auto br = V.breaks();
  const int cells = static_cast<int>(br.size()) - 1;
  if (n < 2 * cells) n = 2 * cells;
  const double R = V.support_radius();
  numerics::QuadratureRule rule;
  rule.a = 0.0;
  rule.b = R;
  int used = 0;
  for (int c = 0; c < cells; ++c) {
    int nc = (c + 1 == cells) ? n - used
                              : std::max(2, static_cast<int>(std::lround(n * (br[c + 1] - br[c]) / R)));
    nc = std::max(2, std::min(nc, n - used - 2 * (cells - c - 1)));
    used += nc;
    const auto g = numerics::gauss_legendre(nc, br[c], br[c + 1]);
    rule.nodes.insert(rule.nodes.end(), g.nodes.begin(), g.nodes.end());
    rule.weights.insert(rule.weights.end(), g.weights.begin(), g.weights.end());
  }
  return rule;
}

nystrom::SemiSeparable generators(const Potential& V, cplx k, const numerics::QuadratureRule& rule) {
  nystrom::SemiSeparable m;
  const std::size_t n = rule.size();
  m.ut.resize(n);
  m.et.resize(n);
  m.log_scale.assign(n, 0.0);
  m.a.resize(n);
  m.b.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rule.nodes[i];
    m.ut[i] = regular_solution(k, x);
    m.et[i] = std::exp(kI * k * x);
    const SqrtPair sp = sqrt_decomposition(V, x);
    const double sw = std::sqrt(rule.weights[i]);
    m.a[i] = sw * sp.sqrt_v;
    m.b[i] = sw * sp.sqrt_abs_v;
  }
  return m;
}

DiscretizedBS discretize(const Potential& V, cplx k, const numerics::QuadratureRule& rule) {
  if (V.geometry() != Geometry::HalfLine) throw std::invalid_argument("bs1d: potential must be half-line");
  if (rule.size() < 2) throw std::invalid_argument("bs1d: need at least 2 nodes");
  return {k, rule, nystrom::dense(generators(V, k, rule))};
}

DiscretizedBS discretize(const Potential& V, cplx k, int n) {
  if (n < 2) throw std::invalid_argument("bs1d: need at least 2 nodes");
  return discretize(V, k, nystrom_rule(V, n));
}

namespace {

// g_k(x, y) e^{-neg (x + y)} with neg = (Im k)_-, free of overflow for large |Im k|
cplx scaled_kernel(cplx k, double x, double y, double neg) {
  const double lo = std::min(x, y), hi = std::max(x, y);
  if (neg * (x + y) < 50.0) return kernel_g1d(k, x, y) * std::exp(-neg * (x + y));
  const cplx ik(-k.imag(), k.real());
  cplx s;  // sin(k lo) e^{-neg lo} / k
  if (std::abs(k) * lo < 1e-3) {
    s = regular_solution(k, lo) * std::exp(-neg * lo);
  } else {
    s = (std::exp(ik * lo - neg * lo) - std::exp(-ik * lo - neg * lo)) / (cplx(0.0, 2.0) * k);
  }
  return s * std::exp(ik * hi - neg * hi);
}

}  // namespace

double hs_norm(const Potential& V, cplx k, double rel_tol) {
  if (k == cplx(0.0)) throw std::invalid_argument("hs_norm: k = 0");
  const auto br = V.breaks();
  const double neg = std::max(0.0, -k.imag()), R = V.support_radius();
  // |V(x)| e^{2 neg (x - R)}; the factor e^{4 neg R} goes back in at the end
  auto absV = [&](double x) { return std::abs(V(x)) * std::exp(2.0 * neg * (x - R)); };
  // inner(x) = \int |g_k(x,y)|^2 |V(y)| dy, split at the kink y = x and at cells
  auto inner = [&](double x) {
    std::vector<double> cuts = br;
    cuts.push_back(x);
    std::sort(cuts.begin(), cuts.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double lo = cuts[i], hi = cuts[i + 1];
      if (!(hi > lo)) continue;
      const double eps = 1e-14 * (hi - lo);
      s += numerics::integrate(
          [&](double y) {
            y = std::clamp(y, lo + eps, hi - eps);
            return std::norm(scaled_kernel(k, x, y, neg)) * absV(y);
          },
          lo, hi, rel_tol);
    }
    return s;
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    const double lo = br[i], hi = br[i + 1];
    const double eps = 1e-14 * (hi - lo);
    total += numerics::integrate(
        [&](double x) {
          x = std::clamp(x, lo + eps, hi - eps);
          const double w = absV(x);
          return w == 0.0 ? 0.0 : w * inner(x);
        },
        lo, hi, rel_tol);
  }
  return std::sqrt(total) * std::exp(2.0 * neg * R);
}

double hs_norm_bound(const Potential& V, cplx k) {
  if (k == cplx(0.0)) throw std::invalid_argument("hs_norm_bound: k = 0");
  const double neg = std::max(0.0, -k.imag());
  return weighted_integral(V, 2.0 * neg, 1.0) / std::abs(k);
}

namespace {

numerics::QuadratureRule panel_rule(const Potential& V, cplx k, int level, int order,
                                    const std::vector<double>& br) {
  // local wavenumber: oscillation/growth of e^{ikx} and of the solutions in V
  const double rate = std::max({std::abs(k), std::sqrt(V.sup_abs()), 1.0 / V.support_radius()});
  auto panels = nystrom::base_panels(br, rate, order);
  for (int& p : panels) p <<= level;
  return numerics::composite_gauss(br, panels, order);
}

cplx det2_on_rule(const Potential& V, cplx k, const numerics::QuadratureRule& rule) {
  const auto m = generators(V, k, rule);
  return std::exp(nystrom::log_det_regularized(m, 2));
}

}  // namespace

nystrom::AdaptiveResult det2(const Potential& V, cplx k, const DetOptions& opts) {
  if (V.geometry() != Geometry::HalfLine) throw std::invalid_argument("det2: potential must be half-line");
  if (V.is_zero()) return {1.0, 0, 0, 0.0};
  const auto br = V.breaks();
  const int n0 = static_cast<int>(panel_rule(V, k, 0, opts.order, br).size());
  return nystrom::romberg_adaptive(
      [&](int level) {
        const auto rule = panel_rule(V, k, level, opts.order, br);
        return std::pair{det2_on_rule(V, k, rule), static_cast<int>(rule.size())};
      },
      opts.tol, opts.max_nodes, n0, "det2_eval");
}

cplx det2_eval(const Potential& V, cplx k, double tol) {
  DetOptions o;
  o.tol = tol;
  return det2(V, k, o).value;
}

cplx det2_fixed(const Potential& V, cplx k, int level, int order) {
  return det2_on_rule(V, k, panel_rule(V, k, level, order, V.breaks()));
}

}  // namespace bscount::bs1d
