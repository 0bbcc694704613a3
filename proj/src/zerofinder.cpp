#include "bscount/zerofinder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace bscount::zeros {

void Rectangle::validate() const {
  if (!(re_max > re_min) || !(im_max > im_min) || !std::isfinite(re_min) || !std::isfinite(re_max) ||
      !std::isfinite(im_min) || !std::isfinite(im_max))
    throw std::invalid_argument("Rectangle: empty or non-finite");
}

double Rectangle::diameter() const { return std::hypot(re_max - re_min, im_max - im_min); }

double Rectangle::distance_to_boundary(cplx z) const {
  return std::min({z.real() - re_min, re_max - z.real(), z.imag() - im_min, im_max - z.imag()});
}

namespace {

struct KeyLess {
  bool operator()(const cplx& a, const cplx& b) const {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  }
};

// Evaluates f on batches of points, on worker threads when asked, and
// remembers every value so that shared edges are computed once.
class Evaluator {
 public:
  Evaluator(const AnalyticFunction& f, int threads) : f_(f), threads_(std::max(1, threads)) {}

  std::vector<cplx> operator()(const std::vector<cplx>& points) {
    std::vector<cplx> todo;
    for (const cplx& z : points)
      if (!cache_.count(z)) todo.push_back(z);
    std::sort(todo.begin(), todo.end(), KeyLess{});
    todo.erase(std::unique(todo.begin(), todo.end()), todo.end());
    std::vector<cplx> values(todo.size());
    const int workers = static_cast<int>(std::min<std::size_t>(threads_, todo.size()));
    if (workers <= 1) {
      for (std::size_t i = 0; i < todo.size(); ++i) values[i] = f_(todo[i]);
    } else {
      std::vector<std::thread> pool;
      std::exception_ptr error;
      std::mutex error_mutex;
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t i = w; i < todo.size(); i += workers) values[i] = f_(todo[i]);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        });
      }
      for (auto& t : pool) t.join();
      if (error) std::rethrow_exception(error);
    }
    for (std::size_t i = 0; i < todo.size(); ++i) cache_.emplace(todo[i], values[i]);
    std::vector<cplx> out;
    out.reserve(points.size());
    for (const cplx& z : points) out.push_back(cache_.at(z));
    return out;
  }

  cplx operator()(cplx z) { return (*this)(std::vector<cplx>{z}).front(); }

 private:
  const AnalyticFunction& f_;
  int threads_;
  std::map<cplx, cplx, KeyLess> cache_;
};

using PathFn = std::function<cplx(double)>;

// Bisects every segment of (t, f) selected by `pick`; returns false if
// nothing was selected.
template <class Pick>
bool bisect(Evaluator& eval, const PathFn& path, std::vector<double>& t, std::vector<cplx>& f, Pick pick,
            const ContourOptions& opts) {
  std::vector<std::size_t> split;
  for (std::size_t i = 0; i + 1 < f.size(); ++i)
    if (pick(i)) {
      if (t[i + 1] - t[i] < 1e-13)
        throw NumericalError(NumericalError::Kind::ZeroOnPath, "zero on path (unresolvable phase change)");
      split.push_back(i);
    }
  if (split.empty()) return false;
  if (static_cast<int>(t.size() + split.size()) > opts.max_samples)
    throw NumericalError(NumericalError::Kind::SamplingTooCoarse, "contour sampling exceeded max_samples");
  std::vector<cplx> mids;
  std::vector<double> tm;
  for (std::size_t i : split) {
    tm.push_back(0.5 * (t[i] + t[i + 1]));
    mids.push_back(path(tm.back()));
  }
  const std::vector<cplx> fm = eval(mids);
  std::vector<double> t2;
  std::vector<cplx> f2;
  t2.reserve(t.size() + split.size());
  f2.reserve(t.size() + split.size());
  std::size_t s = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    t2.push_back(t[i]);
    f2.push_back(f[i]);
    if (s < split.size() && split[s] == i) {
      t2.push_back(tm[s]);
      f2.push_back(fm[s]);
      ++s;
    }
  }
  t.swap(t2);
  f.swap(f2);
  return true;
}

// Total phase change in turns. There is no global zero floor here: along a
// contour a(k) can span more than 13 decades, and adaptive sampling already
// keeps neighbouring moduli within a factor e, so a zero on the path shows
// up as an unresolvable segment in bisect().
int turns(const std::vector<cplx>& f) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) {
    const double step = std::arg(f[i + 1] / f[i]);
    if (std::abs(step) >= numerics::kMaxPhaseStep)
      throw NumericalError(NumericalError::Kind::SamplingTooCoarse, "sampling too coarse");
    total += step;
  }
  const double w = total / (2.0 * kPi);
  if (std::abs(w - std::round(w)) > 1e-6)
    throw NumericalError(NumericalError::Kind::SamplingTooCoarse, "winding: path is not closed");
  return static_cast<int>(std::round(w));
}

// Samples f on the closed path t -> path(t), t in [0, 1], bisecting
// segments until phase steps stay below opts.refine_step and moduli change
// by less than a factor e. The result is then confirmed by doubling every
// segment until the integer is stable.
int winding_on_path(Evaluator& eval, const PathFn& path, int initial, const ContourOptions& opts) {
  std::vector<double> t(initial + 1);
  for (int i = 0; i <= initial; ++i) t[i] = static_cast<double>(i) / initial;
  std::vector<cplx> z(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) z[i] = path(t[i]);
  z.back() = z.front();
  std::vector<cplx> f = eval(z);
  for (const cplx& v : f)
    if (v == cplx(0.0) || !std::isfinite(std::abs(v)))
      throw NumericalError(v == cplx(0.0) ? NumericalError::Kind::ZeroOnPath : NumericalError::Kind::NonFinite,
                           "zero or non-finite value on path");

  auto fast = [&](std::size_t i) {
    const cplx q = f[i + 1] / f[i];
    return std::abs(std::arg(q)) > opts.refine_step || std::abs(std::log(std::abs(q))) > 1.0;
  };
  auto adapt = [&] {
    while (bisect(eval, path, t, f, fast, opts)) {
      for (const cplx& v : f)
        if (v == cplx(0.0)) throw NumericalError(NumericalError::Kind::ZeroOnPath, "zero on path");
    }
  };
  adapt();
  int w = turns(f);
  for (int round = 0; round < 8; ++round) {
    bisect(eval, path, t, f, [](std::size_t) { return true; }, opts);
    adapt();
    const int w2 = turns(f);
    if (w2 == w) return w;
    w = w2;
  }
  throw NumericalError(NumericalError::Kind::SamplingTooCoarse, "winding number unstable under refinement");
}

PathFn rectangle_path(const Rectangle& r) {
  const cplx c[5] = {{r.re_min, r.im_min}, {r.re_max, r.im_min}, {r.re_max, r.im_max},
                     {r.re_min, r.im_max}, {r.re_min, r.im_min}};
  return [c](double t) {
    const double s = std::clamp(t, 0.0, 1.0) * 4.0;
    const int e = std::min(3, static_cast<int>(s));
    const double u = s - e;
    // exact corners so that neighbouring rectangles share samples
    if (u == 0.0) return c[e];
    return c[e] + u * (c[e + 1] - c[e]);
  };
}

Rectangle jittered(const Rectangle& r, int attempt) {
  if (attempt == 0) return r;
  const double d = 1e-9 * r.diameter() * attempt;
  // unequal offsets so a zero on a corner or on two edges moves off all of them
  return {r.re_min - d, r.re_max + 0.7 * d, r.im_min - 0.6 * d, r.im_max + 0.9 * d};
}

int count_rect(Evaluator& eval, const Rectangle& rect, const ContourOptions& opts, Rectangle* used) {
  rect.validate();
  std::string last;
  for (int attempt = 0; attempt <= opts.max_jitter; ++attempt) {
    const Rectangle r = jittered(rect, attempt);
    try {
      const int n = winding_on_path(eval, rectangle_path(r), 4 * opts.initial_per_edge, opts);
      if (n < 0) throw NumericalError(NumericalError::Kind::PoleHit, "negative winding: pole inside contour");
      if (used) *used = r;
      return n;
    } catch (const NumericalError& e) {
      if (e.kind() != NumericalError::Kind::ZeroOnPath && e.kind() != NumericalError::Kind::SamplingTooCoarse)
        throw;
      last = e.what();
    }
  }
  throw NumericalError(NumericalError::Kind::ZeroOnPath,
                       "count_zeros: jitter retries exhausted (" + last + ")");
}

int count_circle(Evaluator& eval, cplx center, double radius, const ContourOptions& opts) {
  if (!(radius > 0)) throw std::invalid_argument("count_in_circle: radius must be positive");
  return winding_on_path(
      eval, [=](double t) { return center + radius * std::exp(kI * (2.0 * kPi * t)); },
      4 * opts.initial_per_edge, opts);
}

struct Locator {
  Evaluator& eval;
  const ContourOptions& opts;
  double tol;
  std::vector<Zero> found;

  cplx derivative(cplx z, double h) {
    const auto v = eval(std::vector<cplx>{z + h, z - h, z + kI * h, z - kI * h});
    // average of the real and imaginary central differences
    return 0.5 * ((v[0] - v[1]) / (2.0 * h) + (v[2] - v[3]) / (2.0 * kI * h));
  }

  // Modified Newton for a cluster of total multiplicity m. Returns false if
  // the iteration leaves `box` or stalls.
  bool newton(cplx& z, int m, const Rectangle& box) {
    const double scale = std::max(1.0, std::abs(z));
    for (int it = 0; it < 60; ++it) {
      const cplx fz = eval(z);
      if (fz == cplx(0.0)) return true;
      const double h = std::max(1e-7 * scale, 10.0 * tol);
      const cplx d = derivative(z, h);
      if (d == cplx(0.0) || !std::isfinite(std::abs(d))) return false;
      const cplx step = double(m) * fz / d;
      z -= step;
      if (!box.contains(z)) return false;
      if (std::abs(step) <= 0.1 * tol) return true;
    }
    return false;
  }

  void emit(cplx z, int m) {
    found.push_back({z, m, std::abs(eval(z))});
  }

  void run(const Rectangle& rect, int count, int depth) {
    if (count == 0) return;
    const double diam = rect.diameter();
    cplx z = rect.center();
    if (newton(z, count, rect)) {
      const double r = std::min(0.5 * rect.distance_to_boundary(z), std::max(1e3 * tol, 1e-7 * std::max(1.0, std::abs(z))));
      if (r > 10.0 * tol) {
        try {
          if (count_circle(eval, z, r, opts) == count) {
            emit(z, count);
            return;
          }
        } catch (const NumericalError& e) {
          if (e.kind() != NumericalError::Kind::ZeroOnPath && e.kind() != NumericalError::Kind::SamplingTooCoarse)
            throw;
        }
      }
    }
    if (diam < tol || depth > 80) {
      // unresolved cluster at working precision
      emit(rect.center(), count);
      return;
    }
    // off-centre splits keep symmetric zero sets (real wells, even
    // potentials) away from the new edges
    static constexpr double kFractions[][2] = {{0.4713, 0.5281}, {0.5377, 0.4629}, {0.4411, 0.4523}};
    std::string last;
    for (const auto& frac : kFractions) {
      const double xs = rect.re_min + frac[0] * (rect.re_max - rect.re_min);
      const double ys = rect.im_min + frac[1] * (rect.im_max - rect.im_min);
      const Rectangle kids[4] = {{rect.re_min, xs, rect.im_min, ys},
                                 {xs, rect.re_max, rect.im_min, ys},
                                 {rect.re_min, xs, ys, rect.im_max},
                                 {xs, rect.re_max, ys, rect.im_max}};
      int counts[4];
      int total = 0;
      try {
        for (int i = 0; i < 4; ++i) {
          counts[i] = winding_on_path(eval, rectangle_path(kids[i]), 4 * opts.initial_per_edge, opts);
          total += counts[i];
        }
      } catch (const NumericalError& e) {
        if (e.kind() != NumericalError::Kind::ZeroOnPath && e.kind() != NumericalError::Kind::SamplingTooCoarse)
          throw;
        last = e.what();
        continue;
      }
      if (total != count) {
        last = "child counts do not add up";
        continue;
      }
      for (int i = 0; i < 4; ++i) run(kids[i], counts[i], depth + 1);
      return;
    }
    throw NumericalError(NumericalError::Kind::NoConvergence, "locate_zeros: cannot split rectangle (" + last + ")");
  }
};

}  // namespace

int count_zeros(const AnalyticFunction& f, const Rectangle& rect, const ContourOptions& opts) {
  Evaluator eval(f, opts.threads);
  return count_rect(eval, rect, opts, nullptr);
}

int count_in_circle(const AnalyticFunction& f, cplx center, double radius, const ContourOptions& opts) {
  Evaluator eval(f, opts.threads);
  return count_circle(eval, center, radius, opts);
}

std::vector<Zero> locate_zeros(const AnalyticFunction& f, const Rectangle& rect, double tol,
                               const ContourOptions& opts) {
  if (!(tol > 0)) throw std::invalid_argument("locate_zeros: tol must be positive");
  Evaluator eval(f, opts.threads);
  Rectangle used;
  const int n = count_rect(eval, rect, opts, &used);
  Locator loc{eval, opts, tol, {}};
  loc.run(used, n, 0);
  std::sort(loc.found.begin(), loc.found.end(), [](const Zero& a, const Zero& b) {
    return a.k.real() < b.k.real() || (a.k.real() == b.k.real() && a.k.imag() < b.k.imag());
  });
  return loc.found;
}

double c_nu(double nu) {
  if (!(nu > 1.0)) throw std::invalid_argument("c_nu: nu must exceed 1");
  constexpr double T = 2.0;
  const double head = numerics::integrate([nu](double t) { return std::pow(1.0 + t * t, -0.5 * nu); }, 0.0, T, 1e-14);
  // \int_T^inf t^{-nu} (1 + t^{-2})^{-nu/2} dt, binomial series in t^{-2}
  const double alpha = -0.5 * nu;
  double binom = 1.0, tail = 0.0;
  for (int m = 0; m < 200; ++m) {
    if (m > 0) binom *= (alpha - (m - 1)) / m;
    const double term = binom * std::pow(T, 1.0 - nu - 2.0 * m) / (nu - 1.0 + 2.0 * m);
    tail += term;
    if (std::abs(term) < 1e-18 * std::abs(tail)) break;
  }
  return (head + tail) / kPi;
}

cplx blaschke(cplx k, std::span<const cplx> zero_set, double eta) {
  cplx b = 1.0;
  for (const cplx& kj : zero_set) {
    if (!(kj.imag() > eta)) throw std::invalid_argument("blaschke: zeros must lie above Im k = eta");
    const cplx den = k - std::conj(kj) - 2.0 * kI * eta;
    if (std::abs(den) == 0.0) throw NumericalError(NumericalError::Kind::PoleHit, "blaschke: evaluated at a pole");
    b *= (k - kj) / den;
  }
  return b;
}

Prop21Report verify_prop21(const AnalyticFunction& a, double eta, double nu, const LineSampling& line,
                           const ContourOptions& opts) {
  if (!(eta < 0)) throw std::invalid_argument("verify_prop21: eta must be negative");
  if (!(line.x_max > 0) || !(line.spacing > 0)) throw std::invalid_argument("verify_prop21: bad line sampling");
  Prop21Report rep;
  rep.eta = eta;
  rep.nu = nu;
  Evaluator eval(a, opts.threads);

  auto g_of = [&](double x, cplx value) {
    const cplx k(x, eta);
    return std::pow(std::abs(k), nu) * std::log(std::abs(value));
  };

  const int n = static_cast<int>(std::ceil(2.0 * line.x_max / line.spacing));
  std::vector<double> xs(n + 1);
  std::vector<cplx> ks(n + 1);
  for (int i = 0; i <= n; ++i) {
    xs[i] = -line.x_max + 2.0 * line.x_max * i / n;
    ks[i] = {xs[i], eta};
  }
  const auto values = eval(ks);
  std::vector<double> g(n + 1);
  for (int i = 0; i <= n; ++i) g[i] = g_of(xs[i], values[i]);

  // golden-section polish around the largest grid maxima
  std::vector<int> peaks;
  for (int i = 0; i <= n; ++i) {
    const bool left = i == 0 || g[i] >= g[i - 1];
    const bool right = i == n || g[i] >= g[i + 1];
    if (left && right) peaks.push_back(i);
  }
  std::sort(peaks.begin(), peaks.end(), [&](int p, int q) { return g[p] > g[q]; });
  if (peaks.size() > 4) peaks.resize(4);
  double best = -std::numeric_limits<double>::infinity(), best_x = 0.0;
  for (int i = 0; i <= n; ++i)
    if (g[i] > best) best = g[i], best_x = xs[i];
  auto g_at = [&](double x) { return g_of(x, eval(cplx(x, eta))); };
  constexpr double kRatio = 0.6180339887498949;
  for (int p : peaks) {
    double lo = xs[std::max(0, p - 1)], hi = xs[std::min(n, p + 1)];
    double x1 = hi - kRatio * (hi - lo), x2 = lo + kRatio * (hi - lo);
    double g1 = g_at(x1), g2 = g_at(x2);
    for (int it = 0; it < 30; ++it) {
      if (g1 > g2) {
        hi = x2, x2 = x1, g2 = g1;
        x1 = hi - kRatio * (hi - lo), g1 = g_at(x1);
      } else {
        lo = x1, x1 = x2, g1 = g2;
        x2 = lo + kRatio * (hi - lo), g2 = g_at(x2);
      }
    }
    for (auto [x, v] : {std::pair{x1, g1}, std::pair{x2, g2}})
      if (v > best) best = v, best_x = x;
  }
  rep.A_raw = best;
  rep.A = std::max(0.0, best);
  rep.argmax_re = best_x;

  // tail: the outer half of the line must either decay against the inner
  // shell or stay well below A
  double outer = 0.0, shell = 0.0, outer_signed = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    const double ax = std::abs(xs[i]);
    if (ax >= 0.5 * line.x_max) {
      outer = std::max(outer, std::abs(g[i]));
      outer_signed = std::max(outer_signed, g[i]);
    } else if (ax >= 0.25 * line.x_max) {
      shell = std::max(shell, std::abs(g[i]));
    }
  }
  rep.tail_certified = outer <= 0.75 * shell || (rep.A > 0 && outer_signed <= 0.5 * rep.A);

  if (!line.probes.empty()) {
    std::vector<cplx> pk;
    for (double x : line.probes) pk.emplace_back(x, eta);
    const auto pv = eval(pk);
    for (std::size_t i = 0; i < pk.size(); ++i) rep.probe_values.push_back(std::abs(pk[i]) * std::abs(pv[i] - 1.0));
    for (std::size_t i = 1; i < rep.probe_values.size(); ++i)
      if (!(rep.probe_values[i] < rep.probe_values[i - 1])) rep.precheck_passed = false;
  }

  Rectangle window = line.zero_window;
  window.im_min = eta;
  rep.zeros = locate_zeros(a, window, line.zero_tol, opts);
  rep.lhs = 0.0;
  for (const Zero& z : rep.zeros) rep.lhs += z.multiplicity * (z.k.imag() - eta);
  rep.c_nu_value = c_nu(nu);
  rep.rhs = rep.c_nu_value * rep.A * std::pow(std::abs(eta), 1.0 - nu);
  rep.margin = rep.rhs - rep.lhs;
  rep.inequality_holds = rep.margin >= -1e-6 * std::max(rep.rhs, 1e-300);
  rep.asserted = rep.inequality_holds || rep.tail_certified;
  return rep;
}

}  // namespace bscount::zeros
