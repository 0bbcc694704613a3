#pragma once

#include "bscount/nystrom.hpp"
#include "bscount/potential.hpp"

/// Birman-Schwinger operator K(k) = sqrt(V) (-d^2/dx^2 - k^2)^{-1} sqrt|V| of
/// the Dirichlet half-line, its Nystrom discretization and det_2(1 + K(k)).
namespace bscount::bs1d {

struct SpectralPoint {
  cplx k;
  cplx lambda() const { return k * k; }
};

/// Dirichlet resolvent kernel (e^{ik(x+y)} - e^{ik|x-y|}) / (2ik), entire in
/// k, with g_0(x, y) = min(x, y).
cplx kernel_g1d(cplx k, double x, double y);

/// u(x) = sin(kx)/k (regular at k = 0) and e(x) = e^{ikx}; g = u(x<) e(x>).
cplx regular_solution(cplx k, double x);

struct DiscretizedBS {
  cplx k;
  numerics::QuadratureRule rule;
  ComplexMatrix matrix;
};

/// n nodes split over the cells of V, one Gauss rule per cell.
numerics::QuadratureRule nystrom_rule(const Potential& V, int n);

nystrom::SemiSeparable generators(const Potential& V, cplx k, const numerics::QuadratureRule& rule);

DiscretizedBS discretize(const Potential& V, cplx k, int n);
DiscretizedBS discretize(const Potential& V, cplx k, const numerics::QuadratureRule& rule);

/// ||K(k)||_{S_2} from the double integral of |V||g_k|^2|V|.
double hs_norm(const Potential& V, cplx k, double rel_tol = 1e-10);

/// (1/|k|) \int e^{2x (Im k)_-} |V(x)| dx.
double hs_norm_bound(const Potential& V, cplx k);

struct DetOptions {
  double tol = 1e-10;
  int max_nodes = 16384;
  int order = 8;
};

/// a(k) = det_2(1 + K(k)) = det(1 + M) e^{-tr M}, extrapolated in the panel
/// width until converged to tol.
nystrom::AdaptiveResult det2(const Potential& V, cplx k, const DetOptions& opts = {});
cplx det2_eval(const Potential& V, cplx k, double tol = 1e-10);

/// The same determinant on a fixed panel level (no extrapolation).
cplx det2_fixed(const Potential& V, cplx k, int level, int order = 8);

}  // namespace bscount::bs1d
