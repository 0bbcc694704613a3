#pragma once

#include <functional>
#include <vector>

#include "bscount/numerics.hpp"

namespace bscount::nystrom {

/// Symmetrically weighted Nystrom matrix of a semi-separable kernel
///
///   M_ij = a_i G(x_i, x_j) b_j,   G(x, y) = u(min(x, y)) e(max(x, y)),
///
/// on sorted nodes. Generators are stored rescaled, u_i = ut_i s_i and
/// e_i = et_i / s_i with s_i = exp(log_scale_i) nondecreasing, so partial
/// waves with r^l growth stay representable.
struct SemiSeparable {
  std::vector<cplx> ut, et;
  std::vector<double> log_scale;
  std::vector<cplx> a, b;

  std::size_t size() const { return ut.size(); }
  cplx rho(std::size_t i) const { return a[i] * b[i]; }
};

/// log det(1 + M) by an O(n) 2x2 transfer product. Imaginary part is only
/// defined modulo 2 pi.
cplx log_det_one_plus(const SemiSeparable& m);

/// tr M, tr M^2, tr M^3 in O(n).
cplx trace_power(const SemiSeparable& m, int power);

/// ||M||_F^2 in O(n).
double frobenius_squared(const SemiSeparable& m);

ComplexMatrix dense(const SemiSeparable& m);

/// M x in O(n).
ComplexVector matvec(const SemiSeparable& m, const ComplexVector& x);

/// The generators of M^*.
SemiSeparable adjoint(const SemiSeparable& m);

/// ||M||_{S_4}^4 = ||M^* M||_F^2 column by column, O(n^2) time and O(n) memory.
double schatten4_power(const SemiSeparable& m);

/// log det_n(1 + M) = log det(1 + M) + sum_{j<n} (-1)^j tr M^j / j, n <= 4.
cplx log_det_regularized(const SemiSeparable& m, int n);

/// Romberg table over a sequence whose error expands in even powers of the
/// panel width (h -> h/2 per level).
class Romberg {
 public:
  void push(cplx value);
  cplx best() const { return rows_.back().back(); }
  /// |best - previous best|; infinity until three levels exist.
  double change() const;
  int levels() const { return static_cast<int>(rows_.size()); }

 private:
  std::vector<std::vector<cplx>> rows_;
};

struct AdaptiveResult {
  cplx value;
  int nodes = 0;
  int levels = 0;
  double change = 0.0;
};

/// Drives `level_value(level)` (returns value and node count) through
/// panel doubling until the Romberg estimate moves less than
/// tol * max(|value|, floor). Throws BudgetExhausted beyond max_nodes.
AdaptiveResult romberg_adaptive(const std::function<std::pair<cplx, int>(int)>& level_value,
                                double tol, int max_nodes, int nodes_at_level0,
                                const char* what, double floor = 1.0);

/// Panels per cell for a kernel oscillating/growing at rate |k|.
std::vector<int> base_panels(const std::vector<double>& breaks, double rate, int order);

}  // namespace bscount::nystrom
