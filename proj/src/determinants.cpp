#include "bscount/determinants.hpp"

#include <cmath>
#include <limits>

namespace bscount::determinants {

cplx log_det_n_from_eigs(const EigenvalueList& eigs, int n) {
  if (n < 1) throw std::invalid_argument("det_n: n >= 1");
  cplx total = 0.0;
  for (const cplx& l : eigs) {
    if (!std::isfinite(l.real()) || !std::isfinite(l.imag()))
      throw std::invalid_argument("det_n: non-finite eigenvalue");
    if (l == cplx(-1.0)) return {-std::numeric_limits<double>::infinity(), 0.0};
    // log(1 + l) via log1p on the modulus for small |l|
    cplx term;
    if (std::abs(l) < 0.5) {
      const double re = std::log1p(l.real() * (2.0 + l.real()) + l.imag() * l.imag()) * 0.5;
      term = {re, std::arg(1.0 + l)};
    } else {
      term = std::log(1.0 + l);
    }
    cplx pw = 1.0;
    for (int m = 1; m < n; ++m) {
      pw *= l;
      term += (m % 2 == 1 ? -1.0 : 1.0) * pw / double(m);
    }
    total += term;
  }
  return total;
}

cplx det_n_from_eigs(const EigenvalueList& eigs, int n) {
  const cplx lg = log_det_n_from_eigs(eigs, n);
  if (std::isinf(lg.real())) return 0.0;
  return std::exp(lg);
}

double gamma_n(int n, double theta) {
  if (n < 1) throw std::invalid_argument("gamma_n: n >= 1");
  if (!(theta >= 0.0 && theta < 1.0)) throw std::invalid_argument("gamma_n: need 0 <= theta < 1");
  if (theta < 0.25) {
    // the closed form cancels badly for small theta
    double sum = 0.0, pw = 1.0;
    for (int m = n; m < n + 200; ++m) {
      const double term = pw / m;
      sum += term;
      if (term < 1e-18 * sum) break;
      pw *= theta;
    }
    return sum;
  }
  double head = 0.0, pw = 1.0;
  for (int m = 1; m < n; ++m) {
    pw *= theta;
    head += pw / m;
  }
  return -(std::log1p(-theta) + head) / std::pow(theta, n);
}

double gamma_np(int n, double p, double theta) {
  if (!(p > 0 && p <= n)) throw std::invalid_argument("gamma_np: need 0 < p <= n");
  return std::pow(theta, n - p) * gamma_n(n, theta);
}

double schatten_p_power(const ComplexMatrix& m, double p) {
  double s = 0.0;
  for (double sv : numerics::singular_values(m)) s += std::pow(sv, p);
  return s;
}

namespace {

CheckReport make_report(double lhs, double rhs, double slack) {
  CheckReport r;
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.passed = r.margin >= -slack;
  return r;
}

}  // namespace

CheckReport lemma31_bound1(const ComplexMatrix& m, int n, double p, double gamma) {
  if (!(p > 0) || p < n - 1 || p > n) throw std::invalid_argument("lemma31_bound1: need n-1 <= p <= n, p > 0");
  const cplx lg = log_det_n_from_eigs(numerics::eigenvalues(m), n);
  const double rhs = gamma * schatten_p_power(m, p);
  return make_report(lg.real(), rhs, 1e-10 * std::max(1.0, rhs));
}

CheckReport lemma31_bound2(const ComplexMatrix& m, int n, double p, double theta) {
  const auto sv = numerics::singular_values(m);
  const double op = sv.empty() ? 0.0 : sv.front();
  if (op > theta * (1.0 + 1e-12)) throw std::invalid_argument("lemma31_bound2: operator norm exceeds theta");
  const cplx lg = log_det_n_from_eigs(numerics::eigenvalues(m), n);
  double sp = 0.0;
  for (double s : sv) sp += std::pow(s, p);
  const double rhs = gamma_np(n, p, theta) * sp;
  return make_report(std::abs(lg), rhs, 1e-10 * std::max(1.0, rhs));
}

CheckReport weyl_check(const ComplexMatrix& m, double p) {
  if (!(p >= 1)) throw std::invalid_argument("weyl_check: p >= 1");
  double lhs = 0.0;
  for (const cplx& l : numerics::eigenvalues(m)) lhs += std::pow(std::abs(l), p);
  const double rhs = schatten_p_power(m, p);
  return make_report(lhs, rhs, 1e-10 * std::max(1.0, rhs));
}

}  // namespace bscount::determinants
