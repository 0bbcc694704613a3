#include "bscount/nystrom.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace bscount::nystrom {

cplx log_det_one_plus(const SemiSeparable& m) {
  const std::size_t n = m.size();
  if (n == 0) return 0.0;
  // State (S/s_i, T s_i) of the discrete Volterra recursion; its T-component
  // after the last node is det(1 + M). `lognorm` carries the magnitude.
  cplx s = 0.0, t = 1.0;
  double lognorm = m.log_scale[0];
  for (std::size_t i = 0; i < n; ++i) {
    const cplx c = -m.rho(i) * (m.et[i] * s + m.ut[i] * t);
    s += m.ut[i] * c;
    t -= m.et[i] * c;
    if (i + 1 < n) {
      const double d = m.log_scale[i + 1] - m.log_scale[i];
      s *= std::exp(-2.0 * d);
      lognorm += d;
    }
    const double mu = std::max(std::abs(s), std::abs(t));
    if (mu > 0 && (mu > 1e100 || mu < 1e-100)) {
      s /= mu;
      t /= mu;
      lognorm += std::log(mu);
    }
  }
  return std::log(t) + lognorm - m.log_scale[n - 1];
}

cplx trace_power(const SemiSeparable& m, int power) {
  const std::size_t n = m.size();
  cplx tr = 0.0;
  if (power == 1) {
    for (std::size_t i = 0; i < n; ++i) tr += m.rho(i) * m.ut[i] * m.et[i];
    return tr;
  }
  if (power != 2 && power != 3) throw std::invalid_argument("trace_power: power must be 1, 2 or 3");
  // prefix sums over i < k, rescaled to node k
  cplx A = 0.0, B = 0.0, C = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const cplx r = m.rho(k);
    const cplx ue = m.ut[k] * m.et[k];
    const cplx e2 = m.et[k] * m.et[k];
    const cplx u2 = m.ut[k] * m.ut[k];
    if (power == 2) {
      tr += r * r * ue * ue + 2.0 * r * e2 * A;
    } else {
      tr += r * r * r * ue * ue * ue + 3.0 * r * e2 * B + 3.0 * r * r * ue * e2 * A + 6.0 * r * e2 * C;
    }
    // C needs A before the k-th term is added
    C += r * ue * A;
    A += r * u2;
    B += r * r * ue * u2;
    if (k + 1 < n) {
      const double q2 = std::exp(2.0 * (m.log_scale[k] - m.log_scale[k + 1]));
      A *= q2;
      B *= q2;
      C *= q2;
    }
  }
  return tr;
}

double frobenius_squared(const SemiSeparable& m) {
  const std::size_t n = m.size();
  // pa, pb: sum_{j<k} |a_j|^2 |u_j|^2 and |b_j|^2 |u_j|^2 at the scale of node k
  double total = 0.0, pa = 0.0, pb = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double a2 = std::norm(m.a[k]), b2 = std::norm(m.b[k]);
    total += a2 * b2 * std::norm(m.ut[k] * m.et[k]) + std::norm(m.et[k]) * (b2 * pa + a2 * pb);
    pa += a2 * std::norm(m.ut[k]);
    pb += b2 * std::norm(m.ut[k]);
    if (k + 1 < n) {
      const double f = std::exp(2.0 * (m.log_scale[k] - m.log_scale[k + 1]));
      pa *= f;
      pb *= f;
    }
  }
  return total;
}

ComplexMatrix dense(const SemiSeparable& m) {
  const auto n = static_cast<Eigen::Index>(m.size());
  ComplexMatrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::Index lo = std::min(i, j), hi = std::max(i, j);
      const cplx g = m.ut[lo] * m.et[hi] * std::exp(m.log_scale[lo] - m.log_scale[hi]);
      out(i, j) = m.a[i] * g * m.b[j];
    }
  }
  return out;
}

ComplexVector matvec(const SemiSeparable& m, const ComplexVector& x) {
  const std::size_t n = m.size();
  ComplexVector y(static_cast<Eigen::Index>(n));
  if (n == 0) return y;
  // lower part sum_{j <= i} u_j b_j x_j, upper part sum_{j > i} e_j b_j x_j,
  // both kept relative to the scale of node i
  std::vector<cplx> lower(n);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) acc *= std::exp(m.log_scale[i - 1] - m.log_scale[i]);
    acc += m.ut[i] * m.b[i] * x[i];
    lower[i] = acc;
  }
  cplx upper = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    y[i] = m.a[i] * (m.et[i] * lower[i] + m.ut[i] * upper);
    if (i > 0) upper = (upper + m.et[i] * m.b[i] * x[i]) * std::exp(m.log_scale[i - 1] - m.log_scale[i]);
  }
  return y;
}

SemiSeparable adjoint(const SemiSeparable& m) {
  SemiSeparable out = m;
  for (std::size_t i = 0; i < m.size(); ++i) {
    out.ut[i] = std::conj(m.ut[i]);
    out.et[i] = std::conj(m.et[i]);
    out.a[i] = std::conj(m.b[i]);
    out.b[i] = std::conj(m.a[i]);
  }
  return out;
}

double schatten4_power(const SemiSeparable& m) {
  const std::size_t n = m.size();
  const SemiSeparable adj = adjoint(m);
  ComplexVector col(static_cast<Eigen::Index>(n));
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = std::min(i, j), hi = std::max(i, j);
      col[i] = m.a[i] * m.ut[lo] * m.et[hi] * std::exp(m.log_scale[lo] - m.log_scale[hi]) * m.b[j];
    }
    total += matvec(adj, col).squaredNorm();
  }
  return total;
}

cplx log_det_regularized(const SemiSeparable& m, int n) {
  if (n < 1 || n > 4) throw std::invalid_argument("log_det_regularized: 1 <= n <= 4");
  cplx value = log_det_one_plus(m);
  for (int j = 1; j < n; ++j) value += (j % 2 == 1 ? -1.0 : 1.0) * trace_power(m, j) / double(j);
  return value;
}

void Romberg::push(cplx value) {
  std::vector<cplx> row{value};
  if (!rows_.empty()) {
    const auto& prev = rows_.back();
    double factor = 1.0;
    for (std::size_t j = 1; j <= prev.size(); ++j) {
      factor *= 4.0;
      row.push_back(row[j - 1] + (row[j - 1] - prev[j - 1]) / (factor - 1.0));
    }
  }
  rows_.push_back(std::move(row));
}

double Romberg::change() const {
  if (rows_.size() < 3) return std::numeric_limits<double>::infinity();
  return std::abs(rows_.back().back() - rows_[rows_.size() - 2].back());
}

AdaptiveResult romberg_adaptive(const std::function<std::pair<cplx, int>(int)>& level_value,
                                double tol, int max_nodes, int nodes_at_level0, const char* what,
                                double floor) {
  Romberg table;
  cplx last = 0.0, before = 0.0;
  int nodes = 0;
  for (int level = 0;; ++level) {
    const long long planned = static_cast<long long>(nodes_at_level0) << level;
    if (planned > max_nodes) {
      std::ostringstream os;
      os << what << ": no convergence within " << max_nodes << " nodes (last iterates " << before
         << ", " << last << ")";
      throw NumericalError(NumericalError::Kind::BudgetExhausted, os.str());
    }
    auto [value, n] = level_value(level);
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
      throw NumericalError(NumericalError::Kind::NonFinite, std::string(what) + ": non-finite value");
    nodes = n;
    table.push(value);
    before = last;
    last = table.best();
    const double change = table.change();
    if (change <= tol * std::max(std::abs(last), floor))
      return {last, nodes, table.levels(), change};
  }
}

std::vector<int> base_panels(const std::vector<double>& breaks, double rate, int order) {
  // one panel per ~(order/4) radians of phase or growth
  const double radians = 0.25 * order;
  std::vector<int> panels;
  for (std::size_t c = 0; c + 1 < breaks.size(); ++c) {
    const double width = breaks[c + 1] - breaks[c];
    panels.push_back(std::max(1, static_cast<int>(std::ceil(width * rate / radians))));
  }
  return panels;
}

}  // namespace bscount::nystrom
