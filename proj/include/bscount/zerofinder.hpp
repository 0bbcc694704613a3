#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bscount/numerics.hpp"

/// Argument-principle zero counting and localization on rectangles, the
/// Blaschke product of a zero set and the half-plane zero-sum inequality.
namespace bscount::zeros {

struct Rectangle {
  double re_min = 0.0, re_max = 0.0, im_min = 0.0, im_max = 0.0;

  void validate() const;
  double diameter() const;
  cplx center() const { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }
  bool contains(cplx z) const {
    return z.real() > re_min && z.real() < re_max && z.imag() > im_min && z.imag() < im_max;
  }
  double distance_to_boundary(cplx z) const;
};

struct Zero {
  cplx k;
  int multiplicity = 1;
  double residual = 0.0;
};

/// Must be safe to call from several threads at once.
using AnalyticFunction = std::function<cplx(cplx)>;

struct ContourOptions {
  int initial_per_edge = 24;
  int max_samples = 1 << 17;
  /// Segments whose phase step exceeds this are bisected before the
  /// winding number (with its pi/2 acceptance threshold) is taken.
  double refine_step = kPi / 5;
  int threads = 1;
  int max_jitter = 5;
};

/// Number of zeros inside `rect`, with multiplicity. A zero on the boundary
/// triggers up to `max_jitter` retries on a rectangle grown by 1e-9 diameter.
int count_zeros(const AnalyticFunction& f, const Rectangle& rect, const ContourOptions& opts = {});

/// Winding number of f on the circle |z - center| = radius.
int count_in_circle(const AnalyticFunction& f, cplx center, double radius,
                    const ContourOptions& opts = {});

/// Zeros in `rect`, polished to |dk| <= tol; multiplicities sum to
/// count_zeros(f, rect).
std::vector<Zero> locate_zeros(const AnalyticFunction& f, const Rectangle& rect, double tol,
                               const ContourOptions& opts = {});

/// (1/2 pi) \int_R (1 + t^2)^{-nu/2} dt for nu > 1.
double c_nu(double nu);

/// prod_j (k - k_j) / (k - conj(k_j) - 2 i eta), all Im k_j > eta.
cplx blaschke(cplx k, std::span<const cplx> zero_set, double eta);

struct LineSampling {
  /// Largest |Re k| sampled on the line Im k = eta.
  double x_max = 50.0;
  /// Grid spacing along the line before local refinement of the maximum.
  double spacing = 0.05;
  /// Zero search window; its im_min is replaced by eta.
  Rectangle zero_window{};
  double zero_tol = 1e-9;
  /// Re k of the three decay probes; empty disables the precheck.
  std::vector<double> probes;
};

struct Prop21Report {
  double eta = 0.0;
  double nu = 2.0;
  double A = 0.0;            // max(0, sup |k|^nu ln|a(k)|) over the sampled line
  double A_raw = 0.0;        // unclamped supremum
  double argmax_re = 0.0;
  bool tail_certified = false;
  bool precheck_passed = true;
  std::vector<double> probe_values;  // |k||a(k) - 1| at the probes
  std::vector<Zero> zeros;           // zeros with Im k > eta
  double lhs = 0.0;          // sum (Im k_j - eta)
  double c_nu_value = 0.0;
  double rhs = 0.0;          // c_nu A |eta|^{1-nu}
  double margin = 0.0;       // rhs - lhs
  bool inequality_holds = false;
  /// False when the inequality failed but A was not tail-certified, so the
  /// failure is only logged.
  bool asserted = true;
  bool passed() const { return precheck_passed && (inequality_holds || !asserted); }
};

/// Samples A on Im k = eta, locates the zeros above the line and compares
/// the zero sum against c_nu A |eta|^{1-nu}.
Prop21Report verify_prop21(const AnalyticFunction& a, double eta, double nu,
                           const LineSampling& line, const ContourOptions& opts = {});

}  // namespace bscount::zeros
