#pragma once

#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bscount {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

/// Failure of a numerical procedure. The kind lets callers (jitter loops,
/// the CLI exit-code mapping) react without parsing messages.
class NumericalError : public std::runtime_error {
 public:
  enum class Kind {
    NonFinite,
    NoConvergence,
    SamplingTooCoarse,
    ZeroOnPath,
    BudgetExhausted,
    PoleHit,
  };

  NumericalError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

namespace numerics {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  double a = 0.0;
  double b = 0.0;

  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule mapped to [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

/// Composite Gauss-Legendre: `panels[c]` equal panels of `order` points on
/// each cell [breaks[c], breaks[c+1]]. Nodes come out sorted.
QuadratureRule composite_gauss(std::span<const double> breaks,
                               std::span<const int> panels, int order);

/// Globally adaptive Gauss-Legendre (10 vs 2x10 points) to
/// max(rel_tol*|I|, abs_tol).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10, double abs_tol = 0.0);
cplx integrate_complex(const std::function<cplx(double)>& f, double a, double b,
               double rel_tol = 1e-10, double abs_tol = 0.0);

void require_finite(const ComplexMatrix& m);

cplx complex_determinant(const ComplexMatrix& m);

/// Sum of principal logs of the LU pivots; exp() of it is the determinant.
/// Never overflows where the determinant itself would.
cplx log_determinant(const ComplexMatrix& m);

/// Eigenvalues repeated by algebraic multiplicity.
std::vector<cplx> eigenvalues(const ComplexMatrix& m);

/// Nonincreasing singular values.
std::vector<double> singular_values(const ComplexMatrix& m);

/// Phase-step acceptance threshold for winding_number.
inline constexpr double kMaxPhaseStep = kPi / 2;
/// Samples with |f| below this fraction of the largest modulus count as zero.
inline constexpr double kZeroFloor = 1e-13;

/// Winding number about 0 of a closed sampled path. `samples.front()` and
/// `samples.back()` are values at the same contour point.
int winding_number(std::span<const cplx> samples);

}  // namespace numerics
}  // namespace bscount
