#include "bscount/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace bscount::numerics {

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("gauss_legendre: need finite a < b");

  QuadratureRule rule;
  rule.a = a;
  rule.b = b;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  // Newton on P_n from the Tricomi initial guess; roots are symmetric so
  // only the upper half is iterated.
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      const double pn = (n == 1) ? x : p1;
      const double pnm1 = (n == 1) ? 1.0 : p0;
      dp = n * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    const double pn = (n == 1) ? x : p1;
    const double pnm1 = (n == 1) ? 1.0 : p0;
    dp = n * (x * pn - pnm1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // x descends from near +1; store ascending
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.nodes[i] = mid - half * x;
    rule.weights[n - 1 - i] = half * w;
    rule.weights[i] = half * w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = mid;
  return rule;
}

QuadratureRule composite_gauss(std::span<const double> breaks,
                               std::span<const int> panels, int order) {
  if (breaks.size() < 2 || panels.size() + 1 != breaks.size())
    throw std::invalid_argument("composite_gauss: breaks/panels mismatch");
  const QuadratureRule ref = gauss_legendre(order, -1.0, 1.0);
  QuadratureRule rule;
  rule.a = breaks.front();
  rule.b = breaks.back();
  for (std::size_t c = 0; c + 1 < breaks.size(); ++c) {
    const double lo = breaks[c], hi = breaks[c + 1];
    if (!(lo < hi)) throw std::invalid_argument("composite_gauss: breaks must increase");
    const int np = std::max(1, panels[c]);
    const double h = (hi - lo) / np;
    for (int p = 0; p < np; ++p) {
      const double pa = lo + p * h;
      const double pb = (p + 1 == np) ? hi : lo + (p + 1) * h;
      const double mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
      for (int q = 0; q < order; ++q) {
        rule.nodes.push_back(mid + half * ref.nodes[q]);
        rule.weights.push_back(half * ref.weights[q]);
      }
    }
  }
  return rule;
}

namespace {

const QuadratureRule& unit_rule10() {
  static const QuadratureRule r = gauss_legendre(10, -1.0, 1.0);
  return r;
}

template <typename T, typename F>
T gauss10(const F& f, double a, double b) {
  const auto& r = unit_rule10();
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  T s{};
  for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
  return s * half;
}

template <typename T, typename F>
T integrate_impl(const F& f, double a, double b, double rel_tol, double abs_tol) {
  if (a == b) return T{};
  if (a > b) return -integrate_impl<T>(f, b, a, rel_tol, abs_tol);

  struct Piece {
    double a, b;
    T value;
    double err;
  };
  auto make = [&](double lo, double hi) {
    const double m = 0.5 * (lo + hi);
    const T whole = gauss10<T>(f, lo, hi);
    const T left = gauss10<T>(f, lo, m);
    const T right = gauss10<T>(f, m, hi);
    return Piece{lo, hi, left + right, std::abs(left + right - whole)};
  };

  std::vector<Piece> pieces{make(a, b)};
  constexpr int kMaxPieces = 20000;
  while (true) {
    T total{};
    double err = 0.0;
    for (const auto& p : pieces) {
      total += p.value;
      err += p.err;
    }
    if (!std::isfinite(std::abs(total)))
      throw NumericalError(NumericalError::Kind::NonFinite, "integrate: non-finite integrand");
    if (err <= std::max(rel_tol * std::abs(total), abs_tol)) return total;
    if (static_cast<int>(pieces.size()) >= kMaxPieces)
      throw NumericalError(NumericalError::Kind::NoConvergence,
                           "integrate: interval budget exhausted");
    auto worst = std::max_element(pieces.begin(), pieces.end(),
                                  [](const Piece& x, const Piece& y) { return x.err < y.err; });
    const double lo = worst->a, hi = worst->b, m = 0.5 * (lo + hi);
    if (!(lo < m && m < hi)) {
      // cannot split further; accept what we have
      return total;
    }
    *worst = make(lo, m);
    pieces.push_back(make(m, hi));
  }
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, double abs_tol) {
  return integrate_impl<double>(f, a, b, rel_tol, abs_tol);
}

cplx integrate_complex(const std::function<cplx(double)>& f, double a, double b,
               double rel_tol, double abs_tol) {
  return integrate_impl<cplx>(f, a, b, rel_tol, abs_tol);
}

void require_finite(const ComplexMatrix& m) {
  if (!m.allFinite())
    throw NumericalError(NumericalError::Kind::NonFinite, "matrix has non-finite entries");
}

cplx complex_determinant(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant of non-square matrix");
  require_finite(m);
  if (m.rows() == 0) return 1.0;
  return m.partialPivLu().determinant();
}

cplx log_determinant(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant of non-square matrix");
  require_finite(m);
  if (m.rows() == 0) return 0.0;
  Eigen::PartialPivLU<ComplexMatrix> lu(m);
  const ComplexMatrix& u = lu.matrixLU();
  cplx s = 0.0;
  for (Eigen::Index i = 0; i < u.rows(); ++i) s += std::log(u(i, i));
  if (lu.permutationP().determinant() < 0) s += cplx(0.0, kPi);
  return s;
}

std::vector<cplx> eigenvalues(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("eigenvalues of non-square matrix");
  require_finite(m);
  if (m.rows() == 0) return {};
  Eigen::ComplexEigenSolver<ComplexMatrix> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw NumericalError(NumericalError::Kind::NoConvergence, "eigensolver did not converge");
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

std::vector<double> singular_values(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("singular values of non-square matrix");
  require_finite(m);
  if (m.rows() == 0) return {};
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  const auto& s = svd.singularValues();
  std::vector<double> out(s.data(), s.data() + s.size());
  for (double v : out)
    if (!std::isfinite(v))
      throw NumericalError(NumericalError::Kind::NoConvergence, "SVD did not converge");
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

int winding_number(std::span<const cplx> samples) {
  if (samples.size() < 2) throw std::invalid_argument("winding_number: need a closed path");
  double scale = 0.0;
  for (const cplx& z : samples) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw NumericalError(NumericalError::Kind::NonFinite, "winding_number: non-finite sample");
    scale = std::max(scale, std::abs(z));
  }
  if (scale == 0.0) throw NumericalError(NumericalError::Kind::ZeroOnPath, "zero on path");
  for (const cplx& z : samples)
    if (std::abs(z) < kZeroFloor * scale)
      throw NumericalError(NumericalError::Kind::ZeroOnPath, "zero on path");

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    const double step = std::arg(samples[i + 1] / samples[i]);
    if (std::abs(step) >= kMaxPhaseStep) {
      std::ostringstream os;
      os << "sampling too coarse: phase step " << step << " at sample " << i;
      throw NumericalError(NumericalError::Kind::SamplingTooCoarse, os.str());
    }
    total += step;
  }
  const double turns = total / (2.0 * kPi);
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 1e-6)
    throw NumericalError(NumericalError::Kind::SamplingTooCoarse,
                         "winding_number: path is not closed");
  return static_cast<int>(rounded);
}

}  // namespace bscount::numerics
