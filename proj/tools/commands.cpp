#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "bscount/bounds.hpp"
#include "bscount/bs1d.hpp"
#include "bscount/bs3d.hpp"
#include "bscount/determinants.hpp"

namespace bscount::cli {

#ifndef BSCOUNT_VERSION
#define BSCOUNT_VERSION "0.0.0"
#endif
const char* const kVersion = BSCOUNT_VERSION;

namespace {

json header(const ExperimentConfig& cfg, const std::string& command) {
  return {{"version", kVersion}, {"config_hash", cfg.hash}, {"config_id", cfg.id}, {"command", command}};
}

std::string csv_header(const ExperimentConfig& cfg) {
  return std::string("# bscount ") + kVersion + " config " + cfg.hash + "\n";
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

/// Runs body(i) for i in [0, n) on `threads` workers; results go to slot i.
template <class F>
void parallel_for(int n, int threads, F body) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (int i = t; i < n; i += threads) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void require_dimension(const ExperimentConfig& cfg, int d, const std::string& what) {
  if (cfg.dimension != d) throw ConfigError(what + " needs dimension " + std::to_string(d));
  if (cfg.potentials.empty()) throw ConfigError(what + " needs at least one potential");
}

bounds::SearchOptions search_options(const ExperimentConfig& cfg, int threads) {
  bounds::SearchOptions o;
  o.det_tol = cfg.det_tol;
  o.zero_tol = cfg.zero_tol;
  o.max_nodes = cfg.max_nodes;
  o.max_ell = cfg.max_ell;
  o.contour.threads = threads;
  o.window = cfg.k_window;
  return o;
}

bs3d::SectorOptions sector_options(const ExperimentConfig& cfg) {
  bs3d::SectorOptions o;
  o.max_nodes = cfg.max_nodes;
  o.max_ell = cfg.max_ell;
  return o;
}

json zero_json(const zeros::Zero& z) {
  return {{"k", complex_to_json(z.k)},
          {"lambda", complex_to_json(z.k * z.k)},
          {"multiplicity", z.multiplicity},
          {"residual", z.residual}};
}

json report_json(const bounds::BoundReport& b) {
  json zs = json::array();
  for (const auto& z : b.zeros) zs.push_back(zero_json(z));
  return {{"route", b.route},
          {"dimension", b.dimension},
          {"N", b.N_computed},
          {"indeterminate", b.indeterminate},
          {"eps", b.eps},
          {"eta", b.eta},
          {"nu", b.nu},
          {"A", b.A},
          {"c_nu", b.c_nu_val},
          {"rhs", b.rhs},
          {"margin", b.margin},
          {"rhs_without_constant", b.rhs_without_constant},
          {"constants",
           {{"beta", b.constants.beta},
            {"Gamma", b.constants.Gamma},
            {"C_d", b.constants.C_d},
            {"C_d_empirical", b.constants.C_d_empirical}}},
          {"report_only", b.report_only},
          {"passed", b.passed},
          {"zeros", zs},
          {"notes", b.notes}};
}

double eps_for(const ExperimentConfig& cfg, const Potential& V) {
  return cfg.eps.value_or(1.0 / V.support_radius());
}

json potential_entry(const NamedPotential& np) {
  json j = {{"id", np.id}, {"potential", potential_to_json(np.potential)}};
  if (np.neglected_tail) j["neglected_tail"] = *np.neglected_tail;
  return j;
}

template <class F>
json guarded(const NamedPotential& np, bool& all_passed, F body) {
  json j = potential_entry(np);
  try {
    body(j);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    j["error"] = e.what();
    j["passed"] = false;
  }
  if (!j.value("passed", false)) all_passed = false;
  return j;
}

std::string summary_row(const std::string& id, const bounds::BoundReport& b, double seconds) {
  return id + "," + fmt(b.eps) + "," + std::to_string(b.N_computed) + "," + fmt(b.rhs) + "," + fmt(b.margin) + "," +
         fmt(seconds) + "\n";
}

json prop41_suite(const ExperimentConfig& cfg, bool& all_passed) {
  json results = json::array();
  for (const auto& np : cfg.potentials)
    results.push_back(guarded(np, all_passed, [&](json& j) {
      double worst = -std::numeric_limits<double>::infinity();
      bool ok = true;
      constexpr int kSamples = 100;
      for (int i = 0; i < kSamples; ++i) {
        const double r = 0.1 * std::pow(1000.0, i / double(kSamples - 1));
        const double theta = std::fmod(i * 2.399963229728653, 2.0 * kPi);  // golden angle
        const cplx k = std::polar(r, theta);
        const double lhs = bs1d::hs_norm(np.potential, k), rhs = bs1d::hs_norm_bound(np.potential, k);
        const double rel = rhs > 0 ? (lhs - rhs) / rhs : (lhs > 0 ? 1.0 : 0.0);
        worst = std::max(worst, rel);
        if (rel > 1e-6) ok = false;
      }
      j["samples"] = kSamples;
      j["worst_relative_excess"] = worst;
      j["passed"] = ok;
    }));
  return results;
}

json prop21_suite(const ExperimentConfig& cfg, int threads, bool& all_passed) {
  json results = json::array();
  const auto opts = search_options(cfg, threads);
  for (const auto& np : cfg.potentials)
    results.push_back(guarded(np, all_passed, [&](json& j) {
      const double eps =
          cfg.eps.value_or(bounds::theorem1_optimized(np.potential, cfg.eps_grid.empty()
                                                                        ? bounds::default_eps_grid(np.potential)
                                                                        : cfg.eps_grid)
                               .eps);
      const auto chain = bounds::chain_report_1d(np.potential, eps, opts);
      const auto cor = bounds::corollary22_check(chain.prop21);
      j["eps"] = eps;
      j["eta"] = chain.prop21.eta;
      j["A_theory"] = chain.A_theory;
      j["A_empirical"] = chain.A_empirical;
      j["A_within_theory"] = chain.A_within_theory;
      j["rhs_exact"] = chain.rhs_exact;
      j["tail_certified"] = chain.prop21.tail_certified;
      j["precheck_passed"] = chain.prop21.precheck_passed;
      j["zero_sum"] = {{"lhs", chain.prop21.lhs}, {"rhs", chain.prop21.rhs}, {"margin", chain.prop21.margin},
                       {"holds", chain.prop21.inequality_holds}, {"asserted", chain.prop21.asserted}};
      j["count"] = {{"N", cor.N_computed}, {"rhs", cor.rhs}, {"margin", cor.margin}, {"passed", cor.passed}};
      j["passed"] = chain.passed() && cor.passed;
    }));
  return results;
}

json lemma62_suite(const ExperimentConfig& cfg, bool& all_passed) {
  json results = json::array();
  const auto so = sector_options(cfg);
  for (const auto& np : cfg.potentials)
    results.push_back(guarded(np, all_passed, [&](json& j) {
      constexpr int kSamples = 20;
      double worst = -std::numeric_limits<double>::infinity();
      bool ok = true;
      const double R = np.potential.support_radius();
      for (int i = 0; i < kSamples; ++i) {
        const double r = (0.3 + 1.7 * i / double(kSamples - 1)) / R;
        const double phi = kPi * (i + 0.5) / kSamples;  // lower half-plane
        const cplx k = std::polar(r, -phi);
        const double lhs = bs3d::schatten_norm_3d(np.potential, k, 4.0, so).norm;
        const double rhs = bs3d::lemma62_rhs(np.potential, k);
        const double rel = rhs > 0 ? (lhs - rhs) / rhs : (lhs > 0 ? 1.0 : 0.0);
        worst = std::max(worst, rel);
        if (rel > 1e-6) ok = false;
      }
      j["samples"] = kSamples;
      j["kss_constant"] = bs3d::kss_constant();
      j["worst_relative_excess"] = worst;
      j["passed"] = ok;
    }));
  return results;
}

bounds::Theorem2Options theorem2_options(const ExperimentConfig& cfg) {
  bounds::Theorem2Options o;
  o.C3 = cfg.C3;
  o.Gamma44 = cfg.Gamma44;
  o.sector = sector_options(cfg);
  o.zero_tol = std::max(cfg.zero_tol, 1e-9);
  o.window = cfg.k_window;
  return o;
}

}  // namespace

ComplexMatrix random_matrix(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  ComplexMatrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = cplx(gauss(rng), gauss(rng));
  return m;
}

json lemma31_suite(std::uint64_t seed, int trials) {
  json out;
  bool ok = true;
  double worst1 = std::numeric_limits<double>::infinity(), worst2 = worst1;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < trials; ++t) {
    const ComplexMatrix m = random_matrix(10, 10, rng()) * (0.05 + unit(rng));
    const auto r = determinants::lemma31_bound1(m, 2, 2.0, bounds::kGamma22);
    worst1 = std::min(worst1, r.margin);
    ok = ok && r.margin >= -1e-10;
  }
  constexpr double kTheta = 0.5;
  for (int t = 0; t < trials; ++t) {
    ComplexMatrix m = random_matrix(10, 10, rng());
    const double op = numerics::singular_values(m).front();
    m *= kTheta * (0.05 + 0.95 * unit(rng)) / op;
    const auto r = determinants::lemma31_bound2(m, 2, 2.0, kTheta);
    worst2 = std::min(worst2, r.margin);
    ok = ok && r.margin >= 0.0;
  }
  const double g2 = determinants::gamma_n(2, 0.5), g2_closed = 4.0 * (std::log(2.0) - 0.5);
  ok = ok && std::abs(g2 - g2_closed) <= 1e-10;
  out["gamma_2_half"] = g2;
  out["gamma_2_half_closed_form"] = g2_closed;
  out["bound1"] = {{"trials", trials}, {"n", 2}, {"p", 2}, {"Gamma", bounds::kGamma22}, {"min_margin", worst1}};
  out["bound2"] = {{"trials", trials}, {"n", 2}, {"p", 2}, {"theta", kTheta}, {"min_margin", worst2}};
  out["passed"] = ok;
  return out;
}

json weyl_suite(std::uint64_t seed, int trials) {
  json out;
  bool ok = true;
  std::mt19937_64 rng(seed);
  json per_p = json::object();
  for (double p : {1.0, 2.0, 4.0}) {
    double worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
      const int n = 1 + static_cast<int>(rng() % 20);
      const auto r = determinants::weyl_check(random_matrix(n, n, rng()), p);
      worst = std::min(worst, r.margin);
      ok = ok && r.margin >= -1e-10;
    }
    per_p[fmt(p)] = {{"trials", trials}, {"min_margin", worst}};
  }
  out["p"] = per_p;
  out["passed"] = ok;
  return out;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"prop21", "prop41", "lemma31", "weyl", "thm1", "thm2", "lemma62"};
  return names;
}

Output cmd_det(const ExperimentConfig& cfg, int threads) {
  if (cfg.potentials.empty()) throw ConfigError("det needs at least one potential");
  const KGrid& g = cfg.k_grid;
  std::vector<cplx> ks;
  for (int b = 0; b < g.n_im; ++b)
    for (int a = 0; a < g.n_re; ++a) {
      const double re = g.n_re == 1 ? g.re_min : g.re_min + (g.re_max - g.re_min) * a / (g.n_re - 1);
      const double im = g.n_im == 1 ? g.im_min : g.im_min + (g.im_max - g.im_min) * b / (g.n_im - 1);
      ks.emplace_back(re, im);
    }
  Output out;
  out.csv_name = "det.csv";
  out.json_name = "det.json";
  out.csv = csv_header(cfg) + "potential-id,re_k,im_k,re_a,im_a,abs_a\n";
  out.report = header(cfg, "det");
  json summary = json::array();
  for (const auto& np : cfg.potentials) {
    std::vector<cplx> vals(ks.size());
    parallel_for(static_cast<int>(ks.size()), threads, [&](int i) {
      vals[i] = cfg.dimension == 1 ? bs1d::det2_eval(np.potential, ks[i], cfg.det_tol)
                                   : bs3d::det4_eval(np.potential, ks[i], std::max(cfg.det_tol, 1e-8));
    });
    for (std::size_t i = 0; i < ks.size(); ++i)
      out.csv += np.id + "," + fmt(ks[i].real()) + "," + fmt(ks[i].imag()) + "," + fmt(vals[i].real()) + "," +
                 fmt(vals[i].imag()) + "," + fmt(std::abs(vals[i])) + "\n";
    summary.push_back({{"id", np.id}, {"rows", ks.size()}});
  }
  out.report["potentials"] = summary;
  return out;
}

Output cmd_eigs(const ExperimentConfig& cfg, int threads) {
  if (cfg.potentials.empty()) throw ConfigError("eigs needs at least one potential");
  Output out;
  out.json_name = "eigs.json";
  out.report = header(cfg, "eigs");
  json results = json::array();
  const auto opts = search_options(cfg, threads);
  for (const auto& np : cfg.potentials) {
    json j = potential_entry(np);
    json list = json::array(), flagged = json::array();
    if (cfg.dimension == 1) {
      const auto eigs = bounds::eigenvalues_1d(np.potential, opts);
      const auto agree = bounds::oracle_agreement_1d(np.potential, eigs, opts);
      for (const auto& z : eigs.zeros) {
        json e = zero_json(z);
        bool matched = false;
        for (const auto& o : agree.oracle)
          matched = matched || (std::abs(o.k - z.k) <= 1e-6 && o.multiplicity == z.multiplicity);
        e["oracle_agreement"] = matched && agree.agree;
        list.push_back(e);
      }
      for (const auto& z : eigs.indeterminate) flagged.push_back(zero_json(z));
      j["count"] = eigs.count;
      j["oracle_agreement"] = agree.agree;
      j["oracle_max_dk"] = agree.max_dk;
    } else {
      const zeros::Rectangle rect = cfg.k_window.value_or(bounds::eigenvalue_window(np.potential));
      const auto eigs = bs3d::eigenvalues_3d(np.potential, rect, std::max(cfg.zero_tol, 1e-9), sector_options(cfg), 1,
                                             bounds::kIndeterminateBand);
      for (const auto& s : eigs.sectors)
        for (const auto& z : s.zeros) {
          json e = zero_json(z);
          e["ell"] = s.ell;
          e["degeneracy"] = 2 * s.ell + 1;
          (std::abs(z.k.imag()) <= bounds::kIndeterminateBand ? flagged : list).push_back(e);
        }
      j["count"] = eigs.count;
    }
    j["eigenvalues"] = list;
    j["indeterminate"] = flagged;
    results.push_back(j);
  }
  out.report["results"] = results;
  return out;
}

Output cmd_verify(const ExperimentConfig& cfg, const std::string& suite, int threads) {
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end())
    throw ConfigError("unknown suite '" + suite + "'");
  Output out;
  out.json_name = "verify-" + suite + ".json";
  out.report = header(cfg, "verify");
  out.report["suite"] = suite;
  bool ok = true;
  if (suite == "lemma31") {
    out.report["results"] = lemma31_suite(cfg.seed);
    ok = out.report["results"]["passed"];
  } else if (suite == "weyl") {
    out.report["results"] = weyl_suite(cfg.seed);
    ok = out.report["results"]["passed"];
  } else if (suite == "prop41") {
    require_dimension(cfg, 1, "suite prop41");
    out.report["results"] = prop41_suite(cfg, ok);
  } else if (suite == "prop21") {
    require_dimension(cfg, 1, "suite prop21");
    out.report["results"] = prop21_suite(cfg, threads, ok);
  } else if (suite == "lemma62") {
    require_dimension(cfg, 3, "suite lemma62");
    out.report["results"] = lemma62_suite(cfg, ok);
  } else {
    require_dimension(cfg, suite == "thm1" ? 1 : 3, "suite " + suite);
    Output b = cmd_bound(cfg, threads);
    out.report["results"] = b.report["results"];
    out.csv = b.csv;
    out.csv_name = "verify-" + suite + ".csv";
    ok = b.exit_code == 0;
  }
  out.report["passed"] = ok;
  out.exit_code = ok ? 0 : 1;
  return out;
}

Output cmd_bound(const ExperimentConfig& cfg, int threads) {
  if (cfg.potentials.empty()) throw ConfigError("bound needs at least one potential");
  Output out;
  out.json_name = "bound.json";
  out.csv_name = "bound.csv";
  out.report = header(cfg, "bound");
  out.csv = csv_header(cfg) + "potential-id,eps,N,rhs,margin,wall-time\n";
  json results = json::array();
  bool ok = true;
  const auto opts = search_options(cfg, threads);
  for (const auto& np : cfg.potentials)
    results.push_back(guarded(np, ok, [&](json& j) {
      const auto t0 = std::chrono::steady_clock::now();
      const bounds::BoundReport b =
          cfg.dimension == 1 ? bounds::verify_theorem1(np.potential, cfg.eps_grid, opts)
                             : bounds::theorem2_report(np.potential, eps_for(cfg, np.potential), theorem2_options(cfg));
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      j["report"] = report_json(b);
      j["passed"] = b.passed;
      out.csv += summary_row(np.id, b, secs);
    }));
  out.report["results"] = results;
  out.report["passed"] = ok;
  out.exit_code = ok ? 0 : 1;
  return out;
}

}  // namespace bscount::cli
