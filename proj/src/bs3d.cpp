#include "bscount/bs3d.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bscount::bs3d {

double beta3() {
  const double e = std::exp(1.0);
  return 2.0 * (e * e - 1.0) / (e - 1.0);
}

double gamma3() {
  const double e = std::exp(1.0);
  return e * e / (e - 1.0);
}

double kss_constant() { return 1.0 / (8.0 * kPi); }

cplx helmholtz_kernel_3d(cplx k, double r) {
  if (!(r > 0)) throw std::invalid_argument("helmholtz_kernel_3d: r must be positive");
  return std::exp(kI * k * r) / (4.0 * kPi * r);
}

cplx bessel_K_half(double nu, cplx z) {
  const double twice = 2.0 * nu;
  if (!(nu >= 0.5) || std::abs(twice - std::round(twice)) > 1e-12 || static_cast<long>(std::round(twice)) % 2 != 1)
    throw std::invalid_argument("bessel_K_half: nu must be a half-integer >= 1/2");
  if (!(z.real() > 0)) throw std::invalid_argument("bessel_K_half: requires Re z > 0");
  cplx km = std::sqrt(kPi / (2.0 * z)) * std::exp(-z);  // K_{1/2} = K_{-1/2}
  cplx k = km;
  // K_{m+1} = K_{m-1} + (2m/z) K_m, starting from m = 1/2
  for (double m = 0.5; m < nu - 0.25; m += 1.0) {
    const cplx next = km + (2.0 * m / z) * k;
    km = k;
    k = next;
  }
  return k;
}

namespace {

struct SectorValue {
  cplx h_mant;   // h_l(z) / |h_l(z)|
  double h_log;  // log |h_l(z)|
  cplx jh;       // j_l(z) h_l(z)
};

// Upward ratios eta_m = h_{m+1}/h_m for h, backward ratios rho_m = j_m/j_{m-1}
// for j, and the Wronskian j_l h_{l+1} - j_{l+1} h_l = i/z^2, which gives
// j_l h_l = i / (z^2 (rho_{l+1} - eta_l)).
SectorValue sector_value(int l, cplx z) {
  if (z == cplx(0.0)) throw std::invalid_argument("spherical functions: z = 0");
  const double az = std::abs(z);
  SectorValue out;
  out.h_log = -z.imag() - std::log(az);
  out.h_mant = -kI * std::exp(cplx(0.0, z.real())) * std::conj(z) / az;
  cplx eta = 1.0 / z - kI;
  for (int m = 1; m <= l; ++m) {
    const double a = std::abs(eta);
    out.h_mant *= eta / a;
    out.h_log += std::log(a);
    eta = double(2 * m + 1) / z - 1.0 / eta;
  }
  // eta now holds eta_l
  const int top = std::max(l + 1, static_cast<int>(std::ceil(1.5 * az))) + 60;
  cplx rho = z / double(2 * top + 3);
  for (int m = top; m >= l + 1; --m) rho = 1.0 / (double(2 * m + 1) / z - rho);
  // rho = rho_{l+1}
  out.jh = kI / (z * z * (rho - eta));
  return out;
}

}  // namespace

SphericalPair spherical_pair(int L, cplx z) {
  if (L < 0) throw std::invalid_argument("spherical_pair: L >= 0");
  SphericalPair p;
  for (int l = 0; l <= L; ++l) {
    const SectorValue v = sector_value(l, z);
    p.h_mant.push_back(v.h_mant);
    p.h_log.push_back(v.h_log);
    p.jh.push_back(v.jh);
  }
  return p;
}

cplx spherical_h(int l, cplx z) {
  const SectorValue v = sector_value(l, z);
  return v.h_mant * std::exp(v.h_log);
}

cplx spherical_j(int l, cplx z) {
  const SectorValue v = sector_value(l, z);
  return v.jh / v.h_mant * std::exp(-v.h_log);
}

nystrom::SemiSeparable sector_generators(const Potential& V, cplx k, int ell,
                                         const numerics::QuadratureRule& rule) {
  if (V.geometry() != Geometry::Radial3D) throw std::invalid_argument("bs3d: potential must be radial");
  if (k == cplx(0.0)) throw std::invalid_argument("bs3d: k = 0");
  if (ell < 0) throw std::invalid_argument("bs3d: ell >= 0");
  nystrom::SemiSeparable m;
  const std::size_t n = rule.size();
  m.ut.resize(n);
  m.et.resize(n);
  m.log_scale.resize(n);
  m.a.resize(n);
  m.b.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = rule.nodes[i];
    const SectorValue v = sector_value(ell, k * r);
    // u = ik r j_l = (ik r jh / mant) e^{-h_log},  e = r h_l = r mant e^{h_log}
    m.ut[i] = kI * k * r * v.jh / v.h_mant;
    m.et[i] = r * v.h_mant;
    m.log_scale[i] = -v.h_log;
    const SqrtPair sp = sqrt_decomposition(V, r);
    const double sw = std::sqrt(rule.weights[i]);
    m.a[i] = sw * sp.sqrt_v;
    m.b[i] = sw * sp.sqrt_abs_v;
  }
  return m;
}

namespace {

// Panels for sector l: width at most `radians` over the rate of the Bessel
// functions and of V. (r/r')^l varies on the scale r/l: uniform panels use
// the rate l/R, graded ones shrink to width radians * r / l towards r = 0
// (one panel remains below 1e-4 R). The Nystrom extrapolation wants uniform
// panels, the nested radial integrals graded ones.
std::vector<std::pair<double, double>> sector_panels(const Potential& V, cplx k, int ell, int level, int order,
                                                     bool graded) {
  const auto br = V.breaks();
  const double R = V.support_radius();
  const double rate = std::max({std::abs(k), std::sqrt(V.sup_abs()), 1.0 / R, graded ? 0.0 : ell / R});
  const auto counts = nystrom::base_panels(br, rate, order);
  const double radians = 0.25 * order;
  std::vector<std::pair<double, double>> base;
  for (std::size_t c = 0; c + 1 < br.size(); ++c) {
    const double b0 = br[c], b1 = br[c + 1];
    const double H = (b1 - b0) / counts[c];
    std::vector<std::pair<double, double>> cell;
    if (ell == 0 || !graded) {
      for (int p = 0; p < counts[c]; ++p) cell.emplace_back(b0 + p * H, p + 1 == counts[c] ? b1 : b0 + (p + 1) * H);
    } else {
      double x = b1;
      while (x > b0) {
        const double w = std::min(H, radians * x / ell);
        if (x - w <= b0 + 1e-3 * w || x <= 1e-4 * R) {
          cell.emplace_back(b0, x);
          break;
        }
        cell.emplace_back(x - w, x);
        x -= w;
      }
      std::reverse(cell.begin(), cell.end());
    }
    base.insert(base.end(), cell.begin(), cell.end());
  }
  if (level == 0) return base;
  std::vector<std::pair<double, double>> out;
  const int split = 1 << level;
  for (const auto& [lo, hi] : base) {
    const double w = (hi - lo) / split;
    for (int j = 0; j < split; ++j) out.emplace_back(lo + j * w, j + 1 == split ? hi : lo + (j + 1) * w);
  }
  return out;
}

}  // namespace

numerics::QuadratureRule sector_rule(const Potential& V, cplx k, int ell, int level, int order) {
  numerics::QuadratureRule rule;
  rule.a = 0.0;
  rule.b = V.support_radius();
  for (const auto& [lo, hi] : sector_panels(V, k, ell, level, order, false)) {
    const auto g = numerics::gauss_legendre(order, lo, hi);
    rule.nodes.insert(rule.nodes.end(), g.nodes.begin(), g.nodes.end());
    rule.weights.insert(rule.weights.end(), g.weights.begin(), g.weights.end());
  }
  return rule;
}

PartialWaveSector sector_matrix(const Potential& V, cplx k, int ell, int n) {
  if (n < 2) throw std::invalid_argument("sector_matrix: n >= 2");
  const auto br = V.breaks();
  const int cells = static_cast<int>(br.size()) - 1;
  numerics::QuadratureRule rule;
  rule.a = 0.0;
  rule.b = V.support_radius();
  int used = 0;
  for (int c = 0; c < cells; ++c) {
    const int rest = cells - c - 1;
    int nc = c + 1 == cells ? n - used
                            : static_cast<int>(std::lround(n * (br[c + 1] - br[c]) / rule.b));
    nc = std::max(2, std::min(nc, n - used - 2 * rest));
    used += nc;
    const auto g = numerics::gauss_legendre(nc, br[c], br[c + 1]);
    rule.nodes.insert(rule.nodes.end(), g.nodes.begin(), g.nodes.end());
    rule.weights.insert(rule.weights.end(), g.weights.begin(), g.weights.end());
  }
  PartialWaveSector s;
  s.ell = ell;
  s.k = k;
  s.matrix = nystrom::dense(sector_generators(V, k, ell, rule));
  s.rule = std::move(rule);
  return s;
}

int ell_budget(const Potential& V, cplx k, const SectorOptions& opts) {
  if (opts.max_ell >= 0) return opts.max_ell;
  return 4 * static_cast<int>(std::ceil(std::abs(k) * V.support_radius())) + 40;
}

namespace {

double schatten_power_on_rule(const Potential& V, cplx k, int ell, int p, const numerics::QuadratureRule& rule) {
  const auto m = sector_generators(V, k, ell, rule);
  return p == 2 ? nystrom::frobenius_squared(m) : nystrom::schatten4_power(m);
}

// ||K_l||_2^2 = 2 \int_0^R |V(r)| |k|^2 r^2 |h_l(kr)|^2 \int_0^r |V(s)| s^2 |j_l(ks)|^2 ds dr,
// with the inner integral by Gauss on [panel start, r] so the integrand seen
// by every rule is smooth
double hs_power_nested(const Potential& V, cplx k, int ell, int level, int order, int& nodes) {
  const double k2 = std::norm(k);
  // |V(s)| s^2 |j_l(ks)|^2 e^{2 h_log(ks)} = |V(s)| s^2 |jh|^2
  auto inner = [&](double s, double& hlog) {
    const SectorValue v = sector_value(ell, k * s);
    hlog = v.h_log;
    return std::abs(V(s)) * s * s * std::norm(v.jh);
  };
  double total = 0.0;
  double acc = 0.0, acc_log = 0.0;  // \int_0^{lo} ... = acc * e^{-2 acc_log}
  bool have_acc = false;
  nodes = 0;
  for (const auto& [lo, hi] : sector_panels(V, k, ell, level, order, true)) {
    const auto outer = numerics::gauss_legendre(order, lo, hi);
    nodes += order;
    for (std::size_t i = 0; i < outer.size(); ++i) {
      const double r = outer.nodes[i];
      const SectorValue vr = sector_value(ell, k * r);
      const double absv = std::abs(V(r));
      if (absv == 0.0) continue;
      const auto g = numerics::gauss_legendre(order, lo, r);
      double part = 0.0;
      for (std::size_t j = 0; j < g.size(); ++j) {
        double hl;
        const double f = inner(g.nodes[j], hl);
        part += g.weights[j] * f * std::exp(2.0 * (vr.h_log - hl));
      }
      if (have_acc) part += acc * std::exp(2.0 * (vr.h_log - acc_log));
      total += outer.weights[i] * absv * k2 * r * r * part;
    }
    // advance the cumulative inner integral to hi, referenced to h_log(k hi)
    const double ref = sector_value(ell, k * hi).h_log;
    double next = have_acc ? acc * std::exp(2.0 * (ref - acc_log)) : 0.0;
    for (std::size_t j = 0; j < outer.size(); ++j) {
      double hl;
      const double f = inner(outer.nodes[j], hl);
      next += outer.weights[j] * f * std::exp(2.0 * (ref - hl));
    }
    acc = next;
    acc_log = ref;
    have_acc = true;
  }
  return 2.0 * total;
}

}  // namespace

nystrom::AdaptiveResult sector_schatten_power(const Potential& V, cplx k, int ell, int p, const SectorOptions& opts,
                                              double scale) {
  if (p != 2 && p != 4) throw std::invalid_argument("sector_schatten_power: p must be 2 or 4");
  if (V.is_zero()) return {0.0, 0, 0, 0.0};
  if (p == 2) {
    int nodes = 0;
    double prev = hs_power_nested(V, k, ell, 0, opts.order, nodes);
    for (int level = 1;; ++level) {
      if (nodes * 2 > opts.max_nodes)
        throw NumericalError(NumericalError::Kind::BudgetExhausted, "sector_schatten_power: node budget exhausted");
      const double cur = hs_power_nested(V, k, ell, level, opts.order, nodes);
      const double change = std::abs(cur - prev);
      if (change <= opts.tol * std::max(std::abs(cur), scale)) return {cur, nodes, level + 1, change};
      prev = cur;
    }
  }
  const int n0 = static_cast<int>(sector_rule(V, k, ell, 0, opts.order).size());
  return nystrom::romberg_adaptive(
      [&](int level) {
        const auto rule = sector_rule(V, k, ell, level, opts.order);
        return std::pair{cplx(schatten_power_on_rule(V, k, ell, p, rule)), static_cast<int>(rule.size())};
      },
      opts.tol, opts.max_nodes, n0, "sector_schatten_power", scale);
}

namespace {

struct DetParts {
  cplx det;      // det(1 + M)
  cplx tr[3]{};  // tr M^j, j = 1, 2, 3
  int nodes = 0, levels = 0;
  double change = 0.0;
};

// det(1 + M) and, if requested, tr M, tr M^2, tr M^3 extrapolated
// separately: near a zero det_4 is a small det(1 + M) times a possibly large
// exponential, and only the factors carry a usable absolute error scale
DetParts sector_det_parts(const Potential& V, cplx k, int ell, const SectorOptions& opts, bool traces) {
  nystrom::Romberg det, tr[3];
  const int n0 = static_cast<int>(sector_rule(V, k, ell, 0, opts.order).size());
  const int nt = traces ? 3 : 0;
  for (int level = 0;; ++level) {
    if ((static_cast<long long>(n0) << level) > opts.max_nodes) {
      std::ostringstream os;
      os << "sector_det: no convergence within " << opts.max_nodes << " nodes (l = " << ell << ", k = " << k << ")";
      throw NumericalError(NumericalError::Kind::BudgetExhausted, os.str());
    }
    const auto rule = sector_rule(V, k, ell, level, opts.order);
    const auto m = sector_generators(V, k, ell, rule);
    det.push(std::exp(nystrom::log_det_one_plus(m)));
    for (int j = 0; j < nt; ++j) tr[j].push(nystrom::trace_power(m, j + 1));
    bool done = det.change() <= opts.tol * std::max(std::abs(det.best()), 1.0);
    double change = det.change();
    for (int j = 0; j < nt; ++j) {
      done = done && tr[j].change() <= opts.tol * std::max(std::abs(tr[j].best()), 1.0);
      change = std::max(change, tr[j].change());
    }
    if (done) {
      DetParts out;
      out.det = det.best();
      for (int j = 0; j < nt; ++j) out.tr[j] = tr[j].best();
      out.nodes = static_cast<int>(rule.size());
      out.levels = det.levels();
      out.change = change;
      if (!std::isfinite(out.det.real()) || !std::isfinite(out.det.imag()))
        throw NumericalError(NumericalError::Kind::NonFinite, "sector_det: non-finite value");
      return out;
    }
  }
}

}  // namespace

nystrom::AdaptiveResult sector_log_det4(const Potential& V, cplx k, int ell, const SectorOptions& opts) {
  if (V.is_zero()) return {0.0, 0, 0, 0.0};
  const DetParts d = sector_det_parts(V, k, ell, opts, true);
  const cplx value = std::log(d.det) - d.tr[0] + d.tr[1] / 2.0 - d.tr[2] / 3.0;
  return {value, d.nodes, d.levels, d.change};
}

cplx sector_fredholm_det(const Potential& V, cplx k, int ell, const SectorOptions& opts) {
  if (V.is_zero()) return 1.0;
  return sector_det_parts(V, k, ell, opts, false).det;
}

cplx sector_det4(const Potential& V, cplx k, int ell, const SectorOptions& opts) {
  return std::exp(sector_log_det4(V, k, ell, opts).value);
}

namespace {

// Hurwitz zeta sum_{n>=0} (a + n)^{-s} by Euler-Maclaurin after N direct terms
double hurwitz_zeta(double s, double a) {
  constexpr int N = 10;
  double sum = 0.0;
  for (int n = 0; n < N; ++n) sum += std::pow(a + n, -s);
  const double x = a + N;
  sum += std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s);
  // B2/2!, B4/4!, B6/6!, B8/8!
  static constexpr double kB[] = {1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0};
  double rising = s;  // s (s+1) ... (s + 2j - 2)
  for (int j = 0; j < 4; ++j) {
    sum += kB[j] * rising * std::pow(x, -s - 2 * j - 1);
    rising *= (s + 2 * j + 1) * (s + 2 * j + 2);
  }
  return sum;
}

}  // namespace

SchattenResult schatten_norm_3d(const Potential& V, cplx k, double p, const SectorOptions& opts) {
  if (k == cplx(0.0)) throw std::invalid_argument("schatten_norm_3d: k = 0");
  const int ip = static_cast<int>(p);
  if (p != ip || (ip != 2 && ip != 4)) throw std::invalid_argument("schatten_norm_3d: p must be 2 or 4");
  SchattenResult res;
  if (V.is_zero()) return res;
  const int budget = ell_budget(V, k, opts);
  double total = 0.0;
  int small = 0;
  for (int l = 0; l <= budget; ++l) {
    // later terms only matter relative to the running sum
    const double scale = 1e-3 * total / (2 * l + 1);
    const double term = (2 * l + 1) * sector_schatten_power(V, k, l, ip, opts, scale).value.real();
    res.sector_terms.push_back(term);
    total += term;
    res.ell_max = l;
    small = term < 1e-10 * total ? small + 1 : 0;
    if (small == 2) {
      res.norm = std::pow(total, 1.0 / p);
      return res;
    }
  }
  // (2l+1)||K_l||_p^p decays like l^{2-2p}: fit the last three terms to
  // sum_j c_j (l+1/2)^{-(2p-2+j)} and add the fitted tail
  const int L = res.ell_max;
  if (L >= 3) {
    Eigen::Matrix3d A;
    Eigen::Vector3d y;
    for (int i = 0; i < 3; ++i) {
      const double x = L - 2 + i + 0.5;
      for (int j = 0; j < 3; ++j) A(i, j) = std::pow(x, -(2 * ip - 2 + j));
      y(i) = res.sector_terms[L - 2 + i];
    }
    const Eigen::Vector3d c = A.colPivHouseholderQr().solve(y);
    for (int j = 0; j < 3; ++j) res.tail += c(j) * hurwitz_zeta(2 * ip - 2 + j, L + 1.5);
    res.tail = std::max(0.0, res.tail);
  }
  res.norm = std::pow(total + res.tail, 1.0 / p);
  return res;
}

cplx log_det4(const Potential& V, cplx k, const SectorOptions& opts) {
  if (V.is_zero()) return 0.0;
  const int budget = ell_budget(V, k, opts);
  cplx total = 0.0;
  int small = 0;
  for (int l = 0; l <= budget; ++l) {
    const cplx term = double(2 * l + 1) * sector_log_det4(V, k, l, opts).value;
    total += term;
    small = std::abs(term) < opts.tol * std::max(1.0, std::abs(total)) ? small + 1 : 0;
    if (small == 2) return total;
  }
  std::ostringstream os;
  os << "det4_eval: sector product not converged within l <= " << budget;
  throw NumericalError(NumericalError::Kind::BudgetExhausted, os.str());
}

cplx det4_eval(const Potential& V, cplx k, double tol) {
  SectorOptions o;
  o.tol = tol;
  return std::exp(log_det4(V, k, o));
}

double lemma62_rhs(const Potential& V, cplx k) {
  const double ak = std::abs(k);
  if (ak == 0.0) throw std::invalid_argument("lemma62_rhs: k = 0");
  return std::sqrt(kss_constant() / ak * weighted_integral(V, 4.0 * ak, 2.0));
}

double prop42_scale(const Potential& V, cplx k) {
  const double ak = std::abs(k);
  if (ak == 0.0) throw std::invalid_argument("prop42_scale: k = 0");
  const double neg = std::max(0.0, -k.imag());
  return std::sqrt(weighted_integral(V, beta3() * neg, 2.0) / ak);
}

double lemma61_scale(const Potential& V, cplx k) {
  const double den = std::abs(k.real()) - gamma3() * std::abs(k.imag());
  if (!(k.imag() < 0) || !(den > 0)) throw std::invalid_argument("lemma61_scale: k outside the admissible sector");
  return std::sqrt(weighted_integral(V, beta3() * std::abs(k.imag()), 2.0) / den);
}

Envelope c3_empirical(const Potential& V, const std::vector<cplx>& ks, const SectorOptions& opts) {
  Envelope env;
  for (const cplx& k : ks) {
    const double scale = prop42_scale(V, k);
    if (scale == 0.0) continue;
    const double ratio = schatten_norm_3d(V, k, 4, opts).norm / scale;
    ++env.samples;
    if (ratio > env.value) env.value = ratio, env.argmax = k;
  }
  return env;
}

Envelope alpha3_empirical(const Potential& V, const std::vector<cplx>& ks, const SectorOptions& opts) {
  Envelope env;
  for (const cplx& k : ks) {
    if (!(k.imag() < 0) || !(std::abs(k.real()) > gamma3() * std::abs(k.imag()))) continue;
    const double scale = lemma61_scale(V, k);
    if (scale == 0.0) continue;
    const double ratio = schatten_norm_3d(V, k, 4, opts).norm / scale;
    ++env.samples;
    if (ratio > env.value) env.value = ratio, env.argmax = k;
  }
  return env;
}

Eigenvalues3D eigenvalues_3d(const Potential& V, const zeros::Rectangle& rect, double zero_tol,
                             const SectorOptions& opts, int empty_run, double indeterminate_band) {
  Eigenvalues3D out;
  if (V.is_zero()) return out;
  const double kmax = std::max({std::abs(cplx(rect.re_min, rect.im_min)), std::abs(cplx(rect.re_max, rect.im_min)),
                                std::abs(cplx(rect.re_min, rect.im_max)), std::abs(cplx(rect.re_max, rect.im_max))});
  const int budget = opts.max_ell >= 0 ? opts.max_ell
                                       : 4 * static_cast<int>(std::ceil(kmax * V.support_radius())) + 40;
  int empty = 0;
  for (int l = 0; l <= budget; ++l) {
    auto f = [&V, l, &opts](cplx k) { return sector_fredholm_det(V, k, l, opts); };
    SectorCount sc{l, zeros::locate_zeros(f, rect, zero_tol)};
    for (const auto& z : sc.zeros) {
      if (std::abs(z.k.imag()) <= indeterminate_band)
        out.indeterminate += (2 * l + 1) * z.multiplicity;
      else if (z.k.imag() > 0)
        out.count += (2 * l + 1) * z.multiplicity;
    }
    const bool none = sc.zeros.empty();
    out.sectors.push_back(std::move(sc));
    empty = none ? empty + 1 : 0;
    if (empty >= empty_run) return out;
  }
  throw NumericalError(NumericalError::Kind::BudgetExhausted, "eigenvalues_3d: l budget exhausted");
}

}  // namespace bscount::bs3d
