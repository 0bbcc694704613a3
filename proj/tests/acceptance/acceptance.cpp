// Acceptance driver: one PASS/FAIL line per criterion. Optional arguments
// select criteria by number (e.g. `acceptance 1 6`).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bscount/bounds.hpp"
#include "bscount/bs1d.hpp"
#include "bscount/bs3d.hpp"
#include "bscount/determinants.hpp"
#include "bscount/jost.hpp"
#include "bscount/zerofinder.hpp"
#include "commands.hpp"
#include "oracles.hpp"

using namespace bscount;

namespace {

// pinned tolerances
constexpr double kCnuTol = 1e-10;
constexpr double kMatrixMarginTol = 1e-10;
constexpr double kHsRelativeSlack = 1e-6;
constexpr double kZeroMatchTol = 1e-6;
constexpr double kZeroPotentialTol = 1e-12;
constexpr double kZeroSumRelTol = 1e-6;
constexpr double kBesselTol = 1e-8;
constexpr double kS2Tol = 1e-4;
constexpr double kKssRelSlack = 1e-6;
constexpr double kScaleTol = 1e-8;
constexpr std::uint64_t kSeed = 20240607;

struct Outcome {
  bool passed = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;
  std::function<Outcome()> run;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::vector<Potential> battery_1d() { return random_battery(Geometry::HalfLine, BatterySpec{}); }

Outcome constants() {
  Outcome o;
  const double c2 = zeros::c_nu(2.0);
  const auto lemma = cli::lemma31_suite(kSeed, 100);
  o.passed = std::abs(c2 - 0.5) <= kCnuTol && lemma["passed"].get<bool>();
  const double m1 = lemma["bound1"]["min_margin"], m2 = lemma["bound2"]["min_margin"];
  o.passed = o.passed && m1 >= -kMatrixMarginTol && m2 >= 0.0;
  o.detail = "c_2=" + fmt(c2) + " gamma_2(1/2)=" + fmt(lemma["gamma_2_half"].get<double>()) +
             " min margin Gamma22=" + fmt(m1) + " contractions=" + fmt(m2);
  return o;
}

Outcome hs_bound() {
  const std::vector<Potential> pots{
      Potential::piecewise(Geometry::HalfLine, {0.0, 1.0}, {-10.0}),
      Potential::piecewise(Geometry::HalfLine, {0.0, 1.5}, {{-8.0, 6.0}}),
      Potential::piecewise(Geometry::HalfLine, {0.0, 0.5, 2.0}, {{4.0, -3.0}, {-12.0, 1.0}}),
      Potential::truncated_exponential(Geometry::HalfLine, {-5.0, 5.0}, 1.0, 6.0),
      Potential::truncated_gaussian(Geometry::HalfLine, {3.0, -7.0}, 0.8, 3.0)};
  Outcome o;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& V : pots)
    for (int i = 0; i < 100; ++i) {
      const double r = 0.1 * std::pow(1000.0, i / 99.0);
      const cplx k = std::polar(r, std::fmod(i * 2.399963229728653, 2 * kPi));
      const double lhs = bs1d::hs_norm(V, k), rhs = bs1d::hs_norm_bound(V, k);
      worst = std::max(worst, (lhs - rhs) / rhs);
    }
  o.passed = worst <= kHsRelativeSlack;
  o.detail = "500 samples, worst relative excess " + fmt(worst);
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  int zeros_total = 0;
  double worst = 0.0;
  int failures = 0;
  for (const auto& V : battery_1d()) {
    const auto eigs = bounds::eigenvalues_1d(V);
    const auto agree = bounds::oracle_agreement_1d(V, eigs, {}, kZeroMatchTol);
    zeros_total += eigs.count;
    worst = std::max(worst, agree.max_dk);
    if (!agree.agree) ++failures;
  }
  o.passed = failures == 0;
  o.detail = "20 potentials, " + std::to_string(zeros_total) + " zeros, max |dk| " + fmt(worst) + ", " +
             std::to_string(failures) + " mismatches";
  return o;
}

Outcome theorem1() {
  Outcome o;
  double min_margin = std::numeric_limits<double>::infinity();
  int failures = 0, total_N = 0;
  for (const auto& V : battery_1d()) {
    try {
      const auto r = bounds::verify_theorem1(V, bounds::default_eps_grid(V));
      min_margin = std::min(min_margin, r.margin);
      total_N += r.N_computed;
      if (!r.passed) ++failures;
    } catch (const bounds::OracleMismatch&) {
      ++failures;
    }
  }
  const auto Z = Potential::zero(Geometry::HalfLine);
  double worst_a = 0.0;
  for (int i = 0; i < 100; ++i) {
    const cplx k(-5.0 + 10.0 * (i % 10) / 9.0, -1.0 + 2.0 * (i / 10) / 9.0);
    worst_a = std::max(worst_a, std::abs(bs1d::det2_eval(Z, k) - 1.0));
  }
  const auto zr = bounds::verify_theorem1(Z, {0.5, 1.0, 2.0});
  o.passed = failures == 0 && worst_a <= kZeroPotentialTol && zr.N_computed == 0;
  o.detail = "battery N total " + std::to_string(total_N) + ", min margin " + fmt(min_margin) + ", " +
             std::to_string(failures) + " failures; V=0: N=" + std::to_string(zr.N_computed) + " max|a-1|=" +
             fmt(worst_a);
  return o;
}

Outcome zero_sum() {
  Outcome o;
  const bool chain_exact = bounds::kC2 * bounds::kGamma22 * bounds::kBeta1 * bounds::kBeta1 == 1.0;
  int failures = 0;
  double worst_sum = std::numeric_limits<double>::infinity(), worst_count = worst_sum;
  for (const auto& V : battery_1d()) {
    const double eps = bounds::theorem1_optimized(V, bounds::default_eps_grid(V)).eps;
    const auto chain = bounds::chain_report_1d(V, eps);
    const auto cor = bounds::corollary22_check(chain.prop21);
    const auto& p = chain.prop21;
    const bool sum_ok = p.margin >= -kZeroSumRelTol * p.rhs;
    const bool count_ok = cor.margin >= -kZeroSumRelTol * cor.rhs;
    worst_sum = std::min(worst_sum, p.rhs > 0 ? p.margin / p.rhs : 0.0);
    worst_count = std::min(worst_count, cor.rhs > 0 ? cor.margin / cor.rhs : 0.0);
    if (!(sum_ok && count_ok && chain.rhs_exact && chain.A_within_theory)) ++failures;
  }
  o.passed = chain_exact && failures == 0;
  o.detail = std::string("c2*Gamma22*beta1^2 == 1: ") + (chain_exact ? "yes" : "no") +
             ", min relative margin sum " + fmt(worst_sum) + " count " + fmt(worst_count) + ", " +
             std::to_string(failures) + " failures";
  return o;
}

Outcome weyl() {
  const auto w = cli::weyl_suite(kSeed, 100);
  Outcome o;
  o.passed = w["passed"].get<bool>();
  std::ostringstream d;
  d << "min margins";
  for (const auto& [p, v] : w["p"].items()) d << " p=" << p << ": " << fmt(v["min_margin"].get<double>());
  o.detail = d.str();
  return o;
}

Outcome three_d() {
  Outcome o;
  // half-integer K against its integral representation
  double worst_K = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double nu = 0.5 + (i % 5);
    const cplx z = std::polar(0.3 + 0.4 * (i / 5), 0.9 * std::sin(1.7 * i));
    const cplx ref = oracle::bessel_K_integral(nu, z);
    worst_K = std::max(worst_K, std::abs(bs3d::bessel_K_half(nu, z) - ref) / std::abs(ref));
  }
  // S2 sector sum against the direct double integral
  const std::vector<Potential> pots{
      Potential::piecewise(Geometry::Radial3D, {0.0, 1.0}, {{-6.0, 2.0}}),
      Potential::piecewise(Geometry::Radial3D, {0.0, 0.5, 1.2}, {{3.0, -1.0}, {-4.0, 0.5}}),
      Potential::piecewise(Geometry::Radial3D, {0.0, 0.8}, {-20.0}),
      Potential::truncated_gaussian(Geometry::Radial3D, {-4.0, 3.0}, 1.0, 2.0),
      Potential::truncated_exponential(Geometry::Radial3D, {2.0, -5.0}, 1.5, 2.5)};
  double worst_S2 = 0.0;
  for (const auto& V : pots)
    for (int i = 0; i < 10; ++i) {
      const cplx k(-2.0 + 4.0 * i / 9.0 + 0.05, i % 2 ? 0.6 : -0.3);
      const double direct = oracle::s2_direct_3d(V, k);
      const double s = bs3d::schatten_norm_3d(V, k, 2.0).norm;
      worst_S2 = std::max(worst_S2, std::abs(s * s - direct) / direct);
    }
  // explicit Kato-Seiler-Simon chain in the lower half-plane
  double worst_ks = -std::numeric_limits<double>::infinity();
  const auto& Vks = pots[1];
  for (int i = 0; i < 20; ++i) {
    const double r = (0.3 + 1.7 * i / 19.0) / Vks.support_radius();
    const cplx k = std::polar(r, -kPi * (i + 0.5) / 20.0);
    const double lhs = bs3d::schatten_norm_3d(Vks, k, 4.0).norm, rhs = bs3d::lemma62_rhs(Vks, k);
    worst_ks = std::max(worst_ks, (lhs - rhs) / rhs);
  }
  // deep real well: sector counts with degeneracy against radial shooting
  const auto deep = Potential::piecewise(Geometry::Radial3D, {0.0, 1.0}, {-60.0});
  const double top = std::sqrt(60.0) + 1.0;
  const int N = bs3d::eigenvalues_3d(deep, {-top, top, 1e-3, top}, 1e-10).count;
  int expected = 0;
  for (int l = 0;; ++l) {
    const auto kap = oracle::radial_bound_kappas(deep, l);
    if (kap.empty()) break;
    expected += (2 * l + 1) * static_cast<int>(kap.size());
  }
  o.passed = worst_K <= kBesselTol && worst_S2 <= kS2Tol && worst_ks <= kKssRelSlack && N == expected;
  o.detail = "K_nu rel err " + fmt(worst_K) + ", S2 rel err " + fmt(worst_S2) + " (50 pairs), KSS worst excess " +
             fmt(worst_ks) + ", deep well N=" + std::to_string(N) + " oracle " + std::to_string(expected);
  return o;
}

Outcome theorem2_scaling() {
  Outcome o;
  const std::vector<Potential> pots{Potential::piecewise(Geometry::Radial3D, {0.0, 1.0}, {{-8.0, 1.0}}),
                                    Potential::piecewise(Geometry::Radial3D, {0.0, 0.6, 1.4}, {{-5.0, 3.0}, 2.0})};
  bounds::Theorem2Options opts;
  opts.envelope_samples = 4;
  double worst = 0.0, envelope = 0.0;
  bool counts_ok = true, all_report_only = true;
  for (const auto& V : pots) {
    const double eps = 1.0 / V.support_radius();
    const auto base = bounds::theorem2_report(V, eps, opts);
    envelope = std::max(envelope, base.constants.C_d);
    all_report_only = all_report_only && base.report_only;
    for (double s : {0.5, 0.7, 2.0, 3.0}) {
      const auto r = bounds::theorem2_report(rescale(V, s), eps / s, opts);
      worst = std::max(worst, std::abs(r.rhs_without_constant - base.rhs_without_constant) / base.rhs_without_constant);
      counts_ok = counts_ok && r.N_computed == base.N_computed;
    }
  }
  o.passed = worst <= kScaleTol && counts_ok && all_report_only && std::isfinite(envelope) && envelope > 0;
  o.detail = "C3_emp envelope " + fmt(envelope) + ", scale deviation " + fmt(worst) +
             (counts_ok ? ", N invariant" : ", N changed under scaling");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "constants and Gamma bounds", 10, constants},
      {2, "Hilbert-Schmidt bound", 120, hs_bound},
      {3, "determinant zeros = Jost zeros", 600, oracle_equivalence},
      {4, "1-D count bound end to end", 600, theorem1},
      {5, "zero-sum inequality and count bound", 600, zero_sum},
      {6, "Weyl inequality", 10, weyl},
      {7, "3-D radial checks", 1200, three_d},
      {8, "3-D envelope and scale invariance", 1200, theorem2_scaling},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  bool all = true;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.time_limit_s;
    const bool ok = out.passed && in_time;
    all = all && ok;
    std::printf("%s criterion %d (%s): %s; %.1f s of %.0f s\n", ok ? "PASS" : "FAIL", c.id, c.name.c_str(),
                out.detail.c_str(), secs, c.time_limit_s);
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
