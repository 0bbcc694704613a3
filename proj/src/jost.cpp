#include "bscount/jost.hpp"

#include <cmath>

namespace bscount::jost {

namespace {

// cos z and sin z / z as power series in w = z^2 (used for |z| < 1e-3)
void small_trig(cplx w, cplx& c, cplx& s) {
  c = 0.0;
  s = 0.0;
  cplx term_c = 1.0, term_s = 1.0;
  for (int m = 0; m < 8; ++m) {
    c += term_c;
    s += term_s;
    term_c *= -w / double((2 * m + 1) * (2 * m + 2));
    term_s *= -w / double((2 * m + 2) * (2 * m + 3));
  }
}

}  // namespace

TransferState propagate_left(const TransferState& right, cplx k, cplx v, double width) {
  if (!(width > 0)) throw std::invalid_argument("propagate_left: width must be positive");
  const cplx kappa2 = k * k - v;
  const cplx kappa = std::sqrt(kappa2);
  const cplx z = kappa * width;
  cplx c, sinc_z;  // cos(kappa w), sin(kappa w)/(kappa w)
  if (std::abs(z) < 1e-3) {
    small_trig(z * z, c, sinc_z);
  } else {
    c = std::cos(z);
    sinc_z = std::sin(z) / z;
  }
  // sin(kappa w)/kappa = w sinc, kappa sin(kappa w) = kappa^2 w sinc
  const cplx s_over = width * sinc_z;
  const cplx k_sin = kappa2 * width * sinc_z;
  TransferState left;
  left.x = right.x - width;
  left.f = right.f * c - right.fprime * s_over;
  left.fprime = right.f * k_sin + right.fprime * c;
  return left;
}

namespace {

cplx jost_piecewise(const PiecewiseConstant& p, cplx k) {
  const double R = p.breakpoints.back();
  const cplx e = std::exp(kI * k * R);
  TransferState st{e, kI * k * e, R};
  for (std::size_t c = p.values.size(); c-- > 0;)
    st = propagate_left(st, k, p.values[c], p.breakpoints[c + 1] - p.breakpoints[c]);
  return st.f;
}

}  // namespace

Potential oracle_representation(const Potential& V) {
  if (V.geometry() != Geometry::HalfLine) throw std::invalid_argument("jost: potential must be half-line");
  if (V.as_piecewise()) return V;
  const double R = V.support_radius();
  const cplx probes[] = {cplx(0.0, 1.0 / R), cplx(1.0 / R, 1.0 / R), cplx(3.0 / R, 0.0)};
  Potential prev = project_piecewise(V, 256);
  for (int cells = 512; cells <= (1 << 18); cells *= 2) {
    Potential next = project_piecewise(V, cells);
    double change = 0.0, scale = 0.0;
    for (const cplx& k : probes) {
      const cplx a = jost_piecewise(*prev.as_piecewise(), k), b = jost_piecewise(*next.as_piecewise(), k);
      change = std::max(change, std::abs(a - b));
      scale = std::max(scale, std::abs(b));
    }
    prev = std::move(next);
    // cell averaging converges as h^2: one more doubling quarters the error
    if (change <= 1e-8 * std::max(scale, 1.0)) return prev;
  }
  throw NumericalError(NumericalError::Kind::BudgetExhausted, "jost: projection did not settle");
}

cplx jost_function(const Potential& V, cplx k) {
  const Potential rep = oracle_representation(V);
  return jost_piecewise(*rep.as_piecewise(), k);
}

std::vector<zeros::Zero> oracle_eigenvalues(const Potential& V, const zeros::Rectangle& rect, double tol) {
  if (!(rect.im_min > 0)) throw std::invalid_argument("oracle_eigenvalues: rectangle must lie in Im k > 0");
  const Potential rep = oracle_representation(V);
  const PiecewiseConstant pc = *rep.as_piecewise();
  return zeros::locate_zeros([&pc](cplx k) { return jost_piecewise(pc, k); }, rect, tol);
}

}  // namespace bscount::jost
