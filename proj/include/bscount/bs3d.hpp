#pragma once

#include <vector>

#include "bscount/nystrom.hpp"
#include "bscount/potential.hpp"
#include "bscount/zerofinder.hpp"

/// Radial Birman-Schwinger operator in R^3 through its partial-wave
/// sectors, with kernels ik r j_l(k r<) h_l(k r>) r'.
namespace bscount::bs3d {

/// beta_3 = 2(e^2 - 1)/(e - 1), gamma_3 = e^2/(e - 1).
double beta3();
double gamma3();

/// (2 pi)^{-3} \int_{R^3} d xi / (1 + |xi|^2)^2 = 1/(8 pi).
double kss_constant();

/// e^{ikr} / (4 pi r); r = 0 is rejected.
cplx helmholtz_kernel_3d(cplx k, double r);

/// K_nu(z) for half-integer nu >= 1/2 from K_{1/2}(z) = sqrt(pi/2z) e^{-z}
/// and the upward recurrence. Requires Re z > 0.
cplx bessel_K_half(double nu, cplx z);

/// Spherical Bessel j_l and Hankel h_l^{(1)} by direct evaluation; for
/// moderate l and |z| (tests and small sectors).
cplx spherical_j(int l, cplx z);
cplx spherical_h(int l, cplx z);

/// For one argument z != 0 and all l <= L: h_l(z) = h_mant[l] e^{h_log[l]}
/// with |h_mant| = 1, and the product jh[l] = j_l(z) h_l(z), which stays of
/// order 1/(l |z|) where j and h separately overflow.
struct SphericalPair {
  std::vector<cplx> h_mant;
  std::vector<double> h_log;
  std::vector<cplx> jh;
};
SphericalPair spherical_pair(int L, cplx z);

struct PartialWaveSector {
  int ell = 0;
  cplx k;
  numerics::QuadratureRule rule;
  ComplexMatrix matrix;
};

/// Sector kernel generators on a rule: ut = ik r j_l(kr), et = r h_l(kr) in
/// log-scaled form, weights and sqrt V folded into a, b.
nystrom::SemiSeparable sector_generators(const Potential& V, cplx k, int ell,
                                         const numerics::QuadratureRule& rule);

/// Dense sector matrix on n Gauss nodes split over the cells of V.
PartialWaveSector sector_matrix(const Potential& V, cplx k, int ell, int n);

struct SectorOptions {
  double tol = 1e-8;
  int max_nodes = 16384;
  int order = 8;
  /// Largest l summed; negative selects 4 ceil(|k| R) + 40.
  int max_ell = -1;
};

int ell_budget(const Potential& V, cplx k, const SectorOptions& opts);

/// Composite Gauss rule for sector l at panel level `level`.
numerics::QuadratureRule sector_rule(const Potential& V, cplx k, int ell, int level, int order);

/// ||K_l(k)||_{S_p}^p for p = 2 (nested radial integral) or p = 4 (Nystrom,
/// O(n^2), extrapolated in the panel width), converged to
/// tol * max(value, scale).
nystrom::AdaptiveResult sector_schatten_power(const Potential& V, cplx k, int ell, int p,
                                              const SectorOptions& opts = {}, double scale = 0.0);

/// log det_4(1 + K_l(k)), extrapolated in the panel width.
nystrom::AdaptiveResult sector_log_det4(const Potential& V, cplx k, int ell, const SectorOptions& opts = {});
cplx sector_det4(const Potential& V, cplx k, int ell, const SectorOptions& opts = {});

/// det(1 + K_l(k)). Each sector is trace class, and this differs from
/// det_4(1 + K_l) by a nonvanishing entire factor, so the zeros agree while
/// the dynamic range along a contour is far smaller.
cplx sector_fredholm_det(const Potential& V, cplx k, int ell, const SectorOptions& opts = {});

struct SchattenResult {
  double norm = 0.0;
  int ell_max = 0;          // last sector summed
  double tail = 0.0;        // fitted contribution of sectors beyond ell_max (p = 2)
  std::vector<double> sector_terms;  // (2l + 1) ||K_l||_p^p
};

/// (sum_l (2l+1) ||K_l||_p^p)^{1/p}, p in {2, 4}. The p = 4 sum is truncated
/// once two consecutive terms fall below 1e-10 of the running sum; the p = 2
/// terms decay like l^{-2}, so that sum runs to the l budget and adds a
/// fitted a/(l+1/2)^2 + b/(l+1/2)^3 + c/(l+1/2)^4 tail.
SchattenResult schatten_norm_3d(const Potential& V, cplx k, double p, const SectorOptions& opts = {});

/// prod_l det_4(1 + K_l)^{2l+1}, truncated like the p = 4 Schatten sum.
cplx det4_eval(const Potential& V, cplx k, double tol = 1e-8);
cplx log_det4(const Potential& V, cplx k, const SectorOptions& opts = {});

/// [(1/(8 pi)) |k|^{-1} \int |V|^2 e^{4|k||x|} d^3x]^{1/2}.
double lemma62_rhs(const Potential& V, cplx k);

/// ((1/|k|) \int e^{beta_3 (Im k)_- |x|} |V|^2 d^3x)^{1/2}.
double prop42_scale(const Potential& V, cplx k);

/// (\int e^{beta_3 |Im k||x|}|V|^2 d^3x / (|Re k| - gamma_3 |Im k|))^{1/2};
/// requires Im k < 0 and |Re k| > gamma_3 |Im k|.
double lemma61_scale(const Potential& V, cplx k);

struct Envelope {
  double value = 0.0;
  cplx argmax{};
  int samples = 0;
};

/// sup over the samples of ||K(k)||_{S_4} / prop42_scale(V, k).
Envelope c3_empirical(const Potential& V, const std::vector<cplx>& ks, const SectorOptions& opts = {});

/// sup over admissible samples of ||K(k)||_{S_4} / lemma61_scale(V, k).
Envelope alpha3_empirical(const Potential& V, const std::vector<cplx>& ks, const SectorOptions& opts = {});

struct SectorCount {
  int ell = 0;
  std::vector<zeros::Zero> zeros;
};

struct Eigenvalues3D {
  std::vector<SectorCount> sectors;
  /// sum_l (2l+1) * (zeros of sector l with Im k > indeterminate_band)
  int count = 0;
  /// zeros with |Im k| <= indeterminate_band, excluded from count
  int indeterminate = 0;
};

/// Zeros of the sector determinants (sector_fredholm_det) in `rect`, one
/// sector at a time, until `empty_run` consecutive sectors have none.
Eigenvalues3D eigenvalues_3d(const Potential& V, const zeros::Rectangle& rect, double zero_tol,
                             const SectorOptions& opts = {}, int empty_run = 1,
                             double indeterminate_band = 1e-8);

}  // namespace bscount::bs3d
