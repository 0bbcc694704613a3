#pragma once

#include <vector>

#include "bscount/potential.hpp"
#include "bscount/zerofinder.hpp"

/// Independent eigenvalue oracle for the Dirichlet half-line: exact
/// transfer-matrix propagation of the Jost solution through constant cells.
namespace bscount::jost {

struct TransferState {
  cplx f;
  cplx fprime;
  double x;
};

/// Propagates (f, f') from the right end of a constant cell of width
/// `width` and value v to its left end, for -f'' + v f = k^2 f.
TransferState propagate_left(const TransferState& right, cplx k, cplx v, double width);

/// f(k) = f_k(0), f_k(x) = e^{ikx} for x >= R. Entire in k. Non-piecewise
/// potentials are projected onto doubling cell counts until the value at
/// probe points settles to 1e-8.
cplx jost_function(const Potential& V, cplx k);

/// The piecewise-constant potential the oracle actually propagates through.
Potential oracle_representation(const Potential& V);

/// Zeros of the Jost function in a rectangle of the open upper half-plane;
/// each is an eigenvalue lambda = k^2 with its algebraic multiplicity.
std::vector<zeros::Zero> oracle_eigenvalues(const Potential& V, const zeros::Rectangle& rect,
                                            double tol = 1e-10);

}  // namespace bscount::jost
