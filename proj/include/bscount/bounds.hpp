#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bscount/bs1d.hpp"
#include "bscount/bs3d.hpp"
#include "bscount/potential.hpp"
#include "bscount/zerofinder.hpp"

/// Right-hand sides of the eigenvalue-count bounds, the one-dimensional
/// constant chain and the end-to-end checks N <= bound.
namespace bscount::bounds {

/// c_2, Gamma_{2,2}, beta_1 and C_1; their product c_2 Gamma_{2,2} beta_1^2 is 1.
inline constexpr double kC2 = 0.5;
inline constexpr double kGamma22 = 0.5;
inline constexpr double kBeta1 = 2.0;
inline constexpr double kC1 = 1.0;

/// Zeros within this distance of the real axis are reported but not counted.
inline constexpr double kIndeterminateBand = 1e-8;

/// Thrown when the determinant and Jost zero sets disagree.
class OracleMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// eps^{-2} (\int e^{eps x} |V| dx)^2 for a half-line potential.
double theorem1_rhs(const Potential& V, double eps);

/// 16 logarithmically spaced points spanning [0.1, 10] / R.
std::vector<double> default_eps_grid(const Potential& V);

struct EpsOptimum {
  double eps = 0.0;
  double rhs = 0.0;
};

/// Grid minimum of theorem1_rhs, refined by golden section between the
/// neighbours of the best grid point.
EpsOptimum theorem1_optimized(const Potential& V, const std::vector<double>& eps_grid);

/// Rectangle holding every k with Im k >= 0 and k^2 an eigenvalue, extended
/// 1e-3 below the real axis so near-real zeros sit inside: |Re k| from the
/// Hilbert-Schmidt bound, Im k from the numerical range.
zeros::Rectangle eigenvalue_window(const Potential& V);

/// Rectangle holding every zero of a(k) = det_2(1 + K(k)) with Im k > eta
/// (eta < 0), from ||K(k)||_2 <= |k|^{-1} \int e^{2|eta| x} |V| on that strip.
zeros::Rectangle zero_window_above(const Potential& V, double eta);

struct Eigenvalues {
  std::vector<zeros::Zero> zeros;          // Im k > kIndeterminateBand
  std::vector<zeros::Zero> indeterminate;  // |Im k| <= kIndeterminateBand
  int count = 0;                           // sum of multiplicities in `zeros`
};

struct SearchOptions {
  double det_tol = 1e-10;
  double zero_tol = 1e-10;
  int max_nodes = 16384;
  int max_ell = -1;
  zeros::ContourOptions contour{};
  /// Overrides eigenvalue_window when set.
  std::optional<zeros::Rectangle> window;
};

/// Zeros of det2_eval in the eigenvalue window, split by the indeterminate band.
Eigenvalues eigenvalues_1d(const Potential& V, const SearchOptions& opts = {});

struct OracleAgreement {
  bool agree = true;
  double max_dk = 0.0;
  std::vector<zeros::Zero> oracle;
};

/// Compares the counted zeros with the Jost oracle on the part of the window
/// above the indeterminate band: same total multiplicity and every zero
/// matched within `match_tol`.
OracleAgreement oracle_agreement_1d(const Potential& V, const Eigenvalues& eigs, const SearchOptions& opts = {},
                                    double match_tol = 1e-6);

struct Constants {
  double beta = 0.0;
  double Gamma = 0.0;
  double C_d = 0.0;
  bool C_d_empirical = false;
};

struct BoundReport {
  std::string route;
  int dimension = 1;
  int N_computed = 0;
  int indeterminate = 0;
  double eps = 0.0;
  double eta = 0.0;
  double nu = 2.0;
  double A = 0.0;
  double c_nu_val = kC2;
  double rhs = 0.0;
  double margin = 0.0;
  Constants constants;
  /// eps^{-2} (\int e^{eps|x|} |V|^{(d+1)/2})^2, the bound without constants.
  double rhs_without_constant = 0.0;
  bool report_only = false;
  bool passed = true;
  std::vector<zeros::Zero> zeros;
  std::vector<std::string> notes;
};

struct ChainReport {
  BoundReport bound;
  double A_theory = 0.0;
  double A_empirical = 0.0;
  /// bound.rhs == theorem1_rhs(V, eps), compared bit for bit.
  bool rhs_exact = false;
  bool A_within_theory = false;
  zeros::Prop21Report prop21;
  bool passed() const { return rhs_exact && A_within_theory && prop21.passed(); }
};

struct LineOptions {
  /// Largest |Re k| on the line; non-positive selects 8 (S + 1/R) with S the
  /// weighted integral of |V|.
  double x_max = 0.0;
  /// Grid spacing; non-positive selects x_max / 400.
  double spacing = 0.0;
};

/// eta = -eps/2, A_theory = Gamma_{2,2} C_1^2 (\int e^{eps x}|V|)^2 and
/// rhs = c_2 A_theory |eta|^{-2}; A_empirical from sampling det2_eval on
/// Im k = eta, checked against A_theory (1 + 1e-4).
ChainReport chain_report_1d(const Potential& V, double eps, const SearchOptions& opts = {},
                            const LineOptions& line = {});

/// N from det2_eval zeros (cross-checked against the Jost oracle, mismatch
/// throws OracleMismatch) against the eps-optimized one-dimensional bound.
BoundReport verify_theorem1(const Potential& V, const std::vector<double>& eps_grid,
                            const SearchOptions& opts = {});

/// #{zeros with Im k >= 0} <= c_nu A |eta|^{-nu}, from an existing line
/// sampling report; margin must be >= -1e-6 rhs.
BoundReport corollary22_check(const zeros::Prop21Report& prop21);
BoundReport corollary22_check(const zeros::AnalyticFunction& a, double eta, double nu,
                              const zeros::LineSampling& line, const zeros::ContourOptions& opts = {});

struct Theorem2Options {
  /// S_4 constant C_3; together with Gamma_{4,4} it turns the report into
  /// an assertion.
  std::optional<double> C3;
  std::optional<double> Gamma44;
  /// Samples of Re k on Im k = -eps/beta_3 for the empirical envelope.
  int envelope_samples = 8;
  bs3d::SectorOptions sector{};
  double zero_tol = 1e-9;
  std::optional<zeros::Rectangle> window;
};

/// Three-dimensional count: N from the sector determinants, the bound
/// without constants and the empirical C_3 envelope. Report-only unless C3
/// and Gamma44 are supplied; then rhs = eps^{-2} beta_3^2 c_2 Gamma44 C3^4
/// (\int ...)^2 and the check also requires C3 >= the envelope.
BoundReport theorem2_report(const Potential& V, double eps, const Theorem2Options& opts = {});

}  // namespace bscount::bounds
