#pragma once

#include <vector>

#include "bscount/numerics.hpp"

/// Regularized determinants from eigenvalue lists, the Gamma-constant
/// bounds for ln|det_n| and the Weyl eigenvalue/singular value inequality.
namespace bscount::determinants {

using EigenvalueList = std::vector<cplx>;

/// Sum_j [log(1 + l_j) + sum_{m<n} (-1)^m l_j^m / m], principal branch per
/// factor. Real part is -inf when some l_j = -1.
cplx log_det_n_from_eigs(const EigenvalueList& eigs, int n);

/// prod_j (1 + l_j) exp(sum_{m=1}^{n-1} (-1)^m l_j^m / m).
cplx det_n_from_eigs(const EigenvalueList& eigs, int n);

/// sum_{m>=n} theta^{m-n} / m, for 0 <= theta < 1.
double gamma_n(int n, double theta);

/// Gamma_{n,p}(theta) = theta^{n-p} gamma_n(theta).
double gamma_np(int n, double p, double theta);

/// ||M||_{S_p}^p from singular values.
double schatten_p_power(const ComplexMatrix& m, double p);

struct CheckReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs
  bool passed = false;
};

/// ln|det_n(1 + M)| <= Gamma ||M||_p^p, with caller-supplied Gamma.
CheckReport lemma31_bound1(const ComplexMatrix& m, int n, double p, double gamma);

/// |log det_n(1 + M)| <= Gamma_{n,p}(theta) ||M||_p^p for ||M|| <= theta < 1.
CheckReport lemma31_bound2(const ComplexMatrix& m, int n, double p, double theta);

/// sum |l_j(M)|^p <= sum s_j(M)^p.
CheckReport weyl_check(const ComplexMatrix& m, double p);

}  // namespace bscount::determinants
