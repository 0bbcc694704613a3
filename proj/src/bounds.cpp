#include "bscount/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <variant>

#include "bscount/jost.hpp"

namespace bscount::bounds {

namespace {

void require_half_line(const Potential& V, const char* what) {
  if (V.geometry() != Geometry::HalfLine) throw std::invalid_argument(std::string(what) + ": potential must be half-line");
}

// inf Re V and sup |Im V| over the support
std::pair<double, double> value_bounds(const Potential& V) {
  struct Visitor {
    std::pair<double, double> range(cplx v, double fmin, double fmax) const {
      return {std::min(v.real() * fmin, v.real() * fmax), std::abs(v.imag()) * fmax};
    }
    std::pair<double, double> operator()(const PiecewiseConstant& p) const {
      double lo = 0.0, im = 0.0;
      for (const cplx& v : p.values) lo = std::min(lo, v.real()), im = std::max(im, std::abs(v.imag()));
      return {lo, im};
    }
    std::pair<double, double> operator()(const TruncatedExponential& e) const {
      const double f = std::exp(-e.a * e.R);
      return range(e.v, std::min(1.0, f), std::max(1.0, f));
    }
    std::pair<double, double> operator()(const TruncatedGaussian& e) const {
      const double f = std::exp(-e.a * e.R * e.R);
      return range(e.v, std::min(1.0, f), std::max(1.0, f));
    }
  };
  auto [lo, im] = std::visit(Visitor{}, V.representation());
  return {std::min(lo, 0.0), im};
}

double line_integral(const Potential& V, double eps) {
  return weighted_integral(V.with_geometry(Geometry::HalfLine), eps, 1.0);
}

}  // namespace

double theorem1_rhs(const Potential& V, double eps) {
  require_half_line(V, "theorem1_rhs");
  if (!(eps > 0)) throw std::invalid_argument("theorem1_rhs: eps must be positive");
  const double I = weighted_integral(V, eps, 1.0);
  return (I * I) / (eps * eps);
}

std::vector<double> default_eps_grid(const Potential& V) {
  const double R = V.support_radius();
  std::vector<double> grid(16);
  for (int i = 0; i < 16; ++i) grid[i] = 0.1 * std::pow(100.0, i / 15.0) / R;
  return grid;
}

EpsOptimum theorem1_optimized(const Potential& V, const std::vector<double>& eps_grid) {
  if (eps_grid.empty()) throw std::invalid_argument("theorem1_optimized: empty grid");
  std::vector<double> grid = eps_grid;
  std::sort(grid.begin(), grid.end());
  EpsOptimum best{grid[0], theorem1_rhs(V, grid[0])};
  std::size_t at = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double r = theorem1_rhs(V, grid[i]);
    if (r < best.rhs) best = {grid[i], r}, at = i;
  }
  if (grid.size() < 2 || best.rhs == 0.0) return best;
  // golden section in log eps between the neighbours of the grid minimum
  double lo = std::log(grid[at == 0 ? 0 : at - 1]), hi = std::log(grid[std::min(at + 1, grid.size() - 1)]);
  constexpr double kRatio = 0.6180339887498949;
  auto f = [&](double t) { return theorem1_rhs(V, std::exp(t)); };
  double x1 = hi - kRatio * (hi - lo), x2 = lo + kRatio * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 60 && hi - lo > 1e-10; ++it) {
    if (f1 < f2) {
      hi = x2, x2 = x1, f2 = f1;
      x1 = hi - kRatio * (hi - lo), f1 = f(x1);
    } else {
      lo = x1, x1 = x2, f1 = f2;
      x2 = lo + kRatio * (hi - lo), f2 = f(x2);
    }
  }
  for (auto [x, v] : {std::pair{x1, f1}, std::pair{x2, f2}})
    if (v < best.rhs) best = {std::exp(x), v};
  return best;
}

zeros::Rectangle eigenvalue_window(const Potential& V) {
  const double S = 1.01 * line_integral(V, 0.0) + 0.1;
  const auto [re_min, im_max] = value_bounds(V);
  const double m = -re_min, b = im_max;
  const double Y = 1.01 * std::sqrt(0.5 * (m + std::hypot(m, b))) + 0.1;
  return {-S, S, -1e-3, Y};
}

zeros::Rectangle zero_window_above(const Potential& V, double eta) {
  if (!(eta < 0)) throw std::invalid_argument("zero_window_above: eta must be negative");
  const double S = 1.01 * line_integral(V, 2.0 * std::abs(eta)) + 0.1;
  return {-S, S, eta, S};
}

Eigenvalues eigenvalues_1d(const Potential& V, const SearchOptions& opts) {
  require_half_line(V, "eigenvalues_1d");
  Eigenvalues out;
  if (V.is_zero()) return out;
  const zeros::Rectangle rect = opts.window.value_or(eigenvalue_window(V));
  bs1d::DetOptions d;
  d.tol = opts.det_tol;
  d.max_nodes = opts.max_nodes;
  auto f = [&V, d](cplx k) { return bs1d::det2(V, k, d).value; };
  for (const auto& z : zeros::locate_zeros(f, rect, opts.zero_tol, opts.contour)) {
    if (std::abs(z.k.imag()) <= kIndeterminateBand) {
      out.indeterminate.push_back(z);
    } else if (z.k.imag() > 0) {
      out.zeros.push_back(z);
      out.count += z.multiplicity;
    }
  }
  return out;
}

OracleAgreement oracle_agreement_1d(const Potential& V, const Eigenvalues& eigs, const SearchOptions& opts,
                                    double match_tol) {
  OracleAgreement out;
  if (V.is_zero()) return out;
  zeros::Rectangle rect = opts.window.value_or(eigenvalue_window(V));
  rect.im_min = kIndeterminateBand;
  out.oracle = jost::oracle_eigenvalues(V, rect, opts.zero_tol);
  int total = 0;
  for (const auto& z : out.oracle) total += z.multiplicity;
  if (total != eigs.count) out.agree = false;
  std::vector<bool> used(out.oracle.size(), false);
  for (const auto& z : eigs.zeros) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t at = 0;
    for (std::size_t j = 0; j < out.oracle.size(); ++j) {
      const double d = std::abs(out.oracle[j].k - z.k);
      if (!used[j] && d < best) best = d, at = j;
    }
    if (!std::isfinite(best) || out.oracle[at].multiplicity != z.multiplicity) {
      out.agree = false;
      continue;
    }
    used[at] = true;
    out.max_dk = std::max(out.max_dk, best);
    if (best > match_tol) out.agree = false;
  }
  return out;
}

ChainReport chain_report_1d(const Potential& V, double eps, const SearchOptions& opts, const LineOptions& line) {
  require_half_line(V, "chain_report_1d");
  if (!(eps > 0)) throw std::invalid_argument("chain_report_1d: eps must be positive");
  ChainReport rep;
  BoundReport& b = rep.bound;
  b.route = "chain_1d";
  b.eps = eps;
  b.eta = -eps / kBeta1;
  b.constants = {kBeta1, kGamma22, kC1, false};
  const double I = weighted_integral(V, eps, 1.0);
  rep.A_theory = kGamma22 * kC1 * kC1 * (I * I);
  b.A = rep.A_theory;
  b.c_nu_val = kC2;
  b.rhs = kC2 * b.A / (b.eta * b.eta);
  b.rhs_without_constant = theorem1_rhs(V, eps);
  rep.rhs_exact = b.rhs == b.rhs_without_constant;

  const double R = V.support_radius();
  zeros::LineSampling ls;
  ls.x_max = line.x_max > 0 ? line.x_max : std::min(8.0 * (I + 1.0 / R), 200.0 / R);
  ls.spacing = line.spacing > 0 ? line.spacing : ls.x_max / 400.0;
  ls.zero_window = zero_window_above(V, b.eta);
  ls.zero_tol = opts.zero_tol;
  ls.probes = {0.25 * ls.x_max, 0.5 * ls.x_max, ls.x_max};
  if (V.is_zero()) {
    rep.prop21.eta = b.eta;
    rep.prop21.c_nu_value = zeros::c_nu(2.0);
    rep.prop21.inequality_holds = true;
  } else {
    bs1d::DetOptions d;
    d.tol = opts.det_tol;
    d.max_nodes = opts.max_nodes;
    auto a = [&V, d](cplx k) { return bs1d::det2(V, k, d).value; };
    rep.prop21 = zeros::verify_prop21(a, b.eta, 2.0, ls, opts.contour);
  }
  rep.A_empirical = rep.prop21.A;
  rep.A_within_theory = rep.A_empirical <= rep.A_theory * (1.0 + 1e-4);
  for (const auto& z : rep.prop21.zeros) {
    if (std::abs(z.k.imag()) <= kIndeterminateBand) {
      b.indeterminate += z.multiplicity;
    } else if (z.k.imag() > 0) {
      b.zeros.push_back(z);
      b.N_computed += z.multiplicity;
    }
  }
  b.margin = b.rhs - b.N_computed;
  b.passed = rep.passed() && b.margin >= 0;
  if (!rep.prop21.tail_certified) b.notes.push_back("line supremum not tail-certified; A_empirical is a lower bound");
  return rep;
}

BoundReport verify_theorem1(const Potential& V, const std::vector<double>& eps_grid, const SearchOptions& opts) {
  require_half_line(V, "verify_theorem1");
  BoundReport b;
  b.route = "theorem1";
  b.constants = {kBeta1, kGamma22, kC1, false};
  const Eigenvalues eigs = eigenvalues_1d(V, opts);
  const OracleAgreement agree = oracle_agreement_1d(V, eigs, opts);
  if (!agree.agree) {
    std::ostringstream os;
    os << "verify_theorem1: determinant zeros (" << eigs.count << ") and Jost zeros (" << agree.oracle.size()
       << " distinct) disagree, max |dk| = " << agree.max_dk;
    throw OracleMismatch(os.str());
  }
  const EpsOptimum opt = theorem1_optimized(V, eps_grid.empty() ? default_eps_grid(V) : eps_grid);
  b.N_computed = eigs.count;
  b.indeterminate = 0;
  for (const auto& z : eigs.indeterminate) b.indeterminate += z.multiplicity;
  b.zeros = eigs.zeros;
  b.eps = opt.eps;
  b.eta = -opt.eps / kBeta1;
  const double I = weighted_integral(V, opt.eps, 1.0);
  b.A = kGamma22 * (I * I);
  b.rhs = opt.rhs;
  b.rhs_without_constant = opt.rhs;
  b.margin = b.rhs - b.N_computed;
  b.passed = b.N_computed <= b.rhs;
  if (b.indeterminate > 0) b.notes.push_back("zeros within 1e-8 of the real axis excluded from N");
  return b;
}

BoundReport corollary22_check(const zeros::Prop21Report& prop21) {
  BoundReport b;
  b.route = "corollary22";
  b.eta = prop21.eta;
  b.nu = prop21.nu;
  b.A = prop21.A;
  b.c_nu_val = prop21.c_nu_value;
  for (const auto& z : prop21.zeros) {
    if (z.k.imag() >= 0) {
      b.zeros.push_back(z);
      b.N_computed += z.multiplicity;
    }
  }
  b.rhs = b.c_nu_val * b.A * std::pow(std::abs(b.eta), -b.nu);
  b.margin = b.rhs - b.N_computed;
  b.passed = b.margin >= -1e-6 * b.rhs;
  if (!prop21.tail_certified) b.notes.push_back("line supremum not tail-certified; A is a lower bound");
  return b;
}

BoundReport corollary22_check(const zeros::AnalyticFunction& a, double eta, double nu,
                              const zeros::LineSampling& line, const zeros::ContourOptions& opts) {
  return corollary22_check(zeros::verify_prop21(a, eta, nu, line, opts));
}

BoundReport theorem2_report(const Potential& V, double eps, const Theorem2Options& opts) {
  if (V.geometry() != Geometry::Radial3D) throw std::invalid_argument("theorem2_report: potential must be radial");
  if (!(eps > 0)) throw std::invalid_argument("theorem2_report: eps must be positive");
  BoundReport b;
  b.route = "theorem2";
  b.dimension = 3;
  b.eps = eps;
  b.eta = -eps / bs3d::beta3();
  const double I2 = weighted_integral(V, eps, 2.0);
  b.rhs_without_constant = (I2 * I2) / (eps * eps);

  if (!V.is_zero()) {
    const zeros::Rectangle rect = opts.window.value_or(eigenvalue_window(V));
    const auto eigs = bs3d::eigenvalues_3d(V, rect, opts.zero_tol, opts.sector, 1, kIndeterminateBand);
    b.N_computed = eigs.count;
    b.indeterminate = eigs.indeterminate;
    for (const auto& s : eigs.sectors)
      for (const auto& z : s.zeros)
        if (z.k.imag() > kIndeterminateBand) b.zeros.push_back({z.k, z.multiplicity * (2 * s.ell + 1), z.residual});
  }

  double envelope = 0.0;
  if (!V.is_zero() && opts.envelope_samples > 0) {
    const double X = 2.0 * std::max(1.0 / V.support_radius(), std::sqrt(V.sup_abs()));
    std::vector<cplx> ks;
    for (int j = 0; j < opts.envelope_samples; ++j)
      ks.emplace_back(-X + 2.0 * X * (j + 0.5) / opts.envelope_samples, b.eta);
    envelope = bs3d::c3_empirical(V, ks, opts.sector).value;
  }

  b.constants.beta = bs3d::beta3();
  b.constants.Gamma = opts.Gamma44.value_or(0.0);
  b.constants.C_d = opts.C3.value_or(envelope);
  b.constants.C_d_empirical = !opts.C3.has_value();
  b.c_nu_val = kC2;
  if (opts.C3 && opts.Gamma44) {
    const double C = *opts.C3;
    b.A = *opts.Gamma44 * std::pow(C, 4) * (I2 * I2);
    b.rhs = kC2 * b.A / (b.eta * b.eta);
    b.margin = b.rhs - b.N_computed;
    b.passed = b.N_computed <= b.rhs && C >= envelope;
    if (C < envelope) b.notes.push_back("supplied C3 is below the empirical envelope");
  } else {
    b.report_only = true;
    b.rhs = b.rhs_without_constant;
    b.margin = b.rhs - b.N_computed;
    std::ostringstream os;
    os << "report only: C3 and Gamma44 not supplied; empirical C3 envelope " << envelope;
    if (b.rhs_without_constant > 0) os << ", N / rhs_without_constant = " << b.N_computed / b.rhs_without_constant;
    b.notes.push_back(os.str());
  }
  return b;
}

}  // namespace bscount::bounds
