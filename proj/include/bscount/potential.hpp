#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "bscount/numerics.hpp"

namespace bscount {

enum class Geometry { HalfLine, Radial3D };

std::string to_string(Geometry g);

/// Values on cells [breakpoints[i], breakpoints[i+1]); breakpoints start at 0.
struct PiecewiseConstant {
  std::vector<double> breakpoints;
  std::vector<cplx> values;
};

/// v * exp(-a x) on [0, R].
struct TruncatedExponential {
  cplx v;
  double a = 0.0;
  double R = 1.0;
};

/// v * exp(-a x^2) on [0, R].
struct TruncatedGaussian {
  cplx v;
  double a = 0.0;
  double R = 1.0;
};

struct SqrtPair {
  cplx sqrt_v;        // V / sqrt|V|, or 0
  double sqrt_abs_v;  // sqrt|V|
};

/// Complex potential with compact support [0, R], either on the Dirichlet
/// half-line or radial in R^3. Immutable after construction.
class Potential {
 public:
  using Representation = std::variant<PiecewiseConstant, TruncatedExponential, TruncatedGaussian>;

  static Potential piecewise(Geometry g, std::vector<double> breakpoints, std::vector<cplx> values);
  /// Uniform grid of `values.size()` cells on [0, R], read as piecewise constant.
  static Potential sampled(Geometry g, double R, std::vector<cplx> values);
  static Potential truncated_exponential(Geometry g, cplx v, double a, double R);
  static Potential truncated_gaussian(Geometry g, cplx v, double a, double R);
  static Potential zero(Geometry g, double R = 1.0);

  Geometry geometry() const { return geometry_; }
  /// The same profile read in another geometry.
  Potential with_geometry(Geometry g) const { return Potential(g, R_, rep_); }
  double support_radius() const { return R_; }
  const Representation& representation() const { return rep_; }
  const PiecewiseConstant* as_piecewise() const { return std::get_if<PiecewiseConstant>(&rep_); }

  /// V(x); exactly 0 for x > R. Throws on x < 0.
  cplx operator()(double x) const;

  /// Points where V may be non-smooth: cell boundaries, or {0, R}.
  std::vector<double> breaks() const;

  double sup_abs() const;
  bool is_zero() const;

 private:
  Potential(Geometry g, double R, Representation rep) : geometry_(g), R_(R), rep_(std::move(rep)) {}

  Geometry geometry_;
  double R_;
  Representation rep_;
};

SqrtPair sqrt_decomposition(cplx value);
SqrtPair sqrt_decomposition(const Potential& V, double x);

/// \int e^{eps x} |V(x)|^p dmu, with dmu = dx (half-line) or 4 pi r^2 dr
/// (radial). Piecewise-constant cells use the closed form.
double weighted_integral(const Potential& V, double eps, double p);

/// Same integral by adaptive quadrature regardless of representation.
double weighted_integral_quadrature(const Potential& V, double eps, double p);

/// x -> V(x / s) / s^2 (support scaled by s).
Potential rescale(const Potential& V, double s);

/// Cell-average projection onto `cells` equal cells on [0, R] (each
/// existing breakpoint kept).
Potential project_piecewise(const Potential& V, int cells);

struct TruncationReport {
  Potential potential;
  double neglected_tail;  // \int_R^\infty e^{eps x}|V|^p dmu of the untruncated profile
};

/// Truncates v e^{-a x} at R and reports the part of the weighted integral
/// beyond R (infinite when eps >= a p).
TruncationReport truncate_exponential(Geometry g, cplx v, double a, double R, double eps, double p);

struct BatterySpec {
  int count = 20;
  std::uint64_t seed = 20240607;
  double sup_abs = 30.0;
  double R_min = 0.5;
  double R_max = 2.0;
  int max_cells = 6;
};

/// Random complex piecewise-constant potentials: R uniform in [R_min, R_max],
/// 1..max_cells cells with sorted uniform breakpoints, values r e^{i theta}
/// with r uniform in [0, sup_abs]. Deterministic for a fixed seed.
std::vector<Potential> random_battery(Geometry g, const BatterySpec& spec);

}  // namespace bscount
