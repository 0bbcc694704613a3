#include "config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace bscount::cli {

namespace {

cplx parse_complex(const json& j, const char* what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  if (j.is_object() && j.contains("re")) return {j.at("re").get<double>(), j.value("im", 0.0)};
  throw ConfigError(std::string(what) + ": expected a number, [re, im] or {re, im}");
}

std::vector<cplx> parse_complex_list(const json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + ": expected an array");
  std::vector<cplx> out;
  for (const auto& e : j) out.push_back(parse_complex(e, what));
  return out;
}

Geometry parse_geometry(const std::string& s) {
  if (s == "half_line") return Geometry::HalfLine;
  if (s == "radial_3d") return Geometry::Radial3D;
  throw ConfigError("unknown geometry '" + s + "' (half_line or radial_3d)");
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

double positive(const json& j, const char* key, double fallback) {
  const double v = j.value(key, fallback);
  if (!(v > 0)) throw ConfigError(std::string(key) + " must be positive");
  return v;
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

Potential parse_potential(const json& j, Geometry default_geometry, std::optional<double>* neglected_tail) {
  if (!j.is_object()) throw ConfigError("potential: expected an object");
  const Geometry g = j.contains("geometry") ? parse_geometry(j.at("geometry").get<std::string>()) : default_geometry;
  const std::string type = j.value("type", "");
  try {
    if (type == "piecewise") {
      check_keys(j, {"id", "geometry", "type", "breakpoints", "values"}, "piecewise potential");
      return Potential::piecewise(g, j.at("breakpoints").get<std::vector<double>>(),
                                  parse_complex_list(j.at("values"), "values"));
    }
    if (type == "sampled") {
      check_keys(j, {"id", "geometry", "type", "R", "values"}, "sampled potential");
      return Potential::sampled(g, j.at("R").get<double>(), parse_complex_list(j.at("values"), "values"));
    }
    if (type == "exponential") {
      check_keys(j, {"id", "geometry", "type", "v", "a", "R", "tail"}, "exponential potential");
      const cplx v = parse_complex(j.at("v"), "v");
      const double a = j.at("a").get<double>(), R = j.at("R").get<double>();
      if (j.contains("tail")) {
        const json& t = j.at("tail");
        check_keys(t, {"eps", "p"}, "tail");
        auto rep = truncate_exponential(g, v, a, R, t.at("eps").get<double>(), t.value("p", 1.0));
        if (neglected_tail) *neglected_tail = rep.neglected_tail;
        return rep.potential;
      }
      return Potential::truncated_exponential(g, v, a, R);
    }
    if (type == "gaussian") {
      check_keys(j, {"id", "geometry", "type", "v", "a", "R"}, "gaussian potential");
      return Potential::truncated_gaussian(g, parse_complex(j.at("v"), "v"), j.at("a").get<double>(),
                                           j.at("R").get<double>());
    }
    if (type == "zero") {
      check_keys(j, {"id", "geometry", "type", "R"}, "zero potential");
      return Potential::zero(g, j.value("R", 1.0));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("potential: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("potential: ") + e.what());
  }
  throw ConfigError("potential: unknown type '" + type + "' (piecewise, sampled, exponential, gaussian, zero)");
}

json potential_to_json(const Potential& V) {
  json j;
  j["geometry"] = V.geometry() == Geometry::HalfLine ? "half_line" : "radial_3d";
  j["R"] = V.support_radius();
  struct Visitor {
    json& j;
    void operator()(const PiecewiseConstant& p) const {
      j["type"] = "piecewise";
      j["breakpoints"] = p.breakpoints;
      json vals = json::array();
      for (const cplx& v : p.values) vals.push_back(complex_to_json(v));
      j["values"] = vals;
    }
    void operator()(const TruncatedExponential& e) const {
      j["type"] = "exponential";
      j["v"] = complex_to_json(e.v);
      j["a"] = e.a;
    }
    void operator()(const TruncatedGaussian& e) const {
      j["type"] = "gaussian";
      j["v"] = complex_to_json(e.v);
      j["a"] = e.a;
    }
  };
  std::visit(Visitor{j}, V.representation());
  return j;
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  check_keys(j,
             {"id", "dimension", "potential", "potentials", "battery", "eps_grid", "eps", "k_window", "k_grid",
              "tolerances", "budgets", "constants", "seed", "output"},
             "config");
  ExperimentConfig c;
  c.raw = j;
  c.hash = fnv1a_hex(j.dump());
  try {
    c.id = j.value("id", c.id);
    c.dimension = j.value("dimension", 1);
    if (c.dimension != 1 && c.dimension != 3) throw ConfigError("dimension must be 1 or 3");
    const Geometry g = c.dimension == 1 ? Geometry::HalfLine : Geometry::Radial3D;

    auto add = [&](const json& p, const std::string& fallback_id) {
      NamedPotential np{p.value("id", fallback_id), Potential::zero(g), std::nullopt};
      np.potential = parse_potential(p, g, &np.neglected_tail);
      if (np.potential.geometry() != g) throw ConfigError("potential '" + np.id + "': geometry does not match dimension");
      c.potentials.push_back(std::move(np));
    };
    if (j.contains("potential")) add(j.at("potential"), "potential");
    if (j.contains("potentials")) {
      if (!j.at("potentials").is_array()) throw ConfigError("potentials: expected an array");
      int i = 0;
      for (const auto& p : j.at("potentials")) add(p, "potential-" + std::to_string(i++));
    }
    if (j.contains("battery")) {
      const json& b = j.at("battery");
      check_keys(b, {"count", "seed", "sup_abs", "R_min", "R_max", "max_cells"}, "battery");
      BatterySpec spec;
      spec.count = b.value("count", spec.count);
      spec.seed = b.value("seed", spec.seed);
      spec.sup_abs = b.value("sup_abs", spec.sup_abs);
      spec.R_min = b.value("R_min", spec.R_min);
      spec.R_max = b.value("R_max", spec.R_max);
      spec.max_cells = b.value("max_cells", spec.max_cells);
      int i = 0;
      for (auto& V : random_battery(g, spec))
        c.potentials.push_back({"battery-" + std::to_string(i++), std::move(V), std::nullopt});
    }

    if (j.contains("eps_grid")) {
      c.eps_grid = j.at("eps_grid").get<std::vector<double>>();
      for (double e : c.eps_grid)
        if (!(e > 0)) throw ConfigError("eps_grid entries must be positive");
    }
    if (j.contains("eps")) c.eps = positive(j, "eps", 0.0);
    if (j.contains("k_window")) {
      const json& w = j.at("k_window");
      check_keys(w, {"re_min", "re_max", "im_min", "im_max"}, "k_window");
      zeros::Rectangle r{w.at("re_min").get<double>(), w.at("re_max").get<double>(), w.at("im_min").get<double>(),
                         w.at("im_max").get<double>()};
      if (!(r.re_min < r.re_max && r.im_min < r.im_max)) throw ConfigError("k_window: empty rectangle");
      c.k_window = r;
    }
    if (j.contains("k_grid")) {
      const json& k = j.at("k_grid");
      check_keys(k, {"re", "im"}, "k_grid");
      auto axis = [&](const char* key, double& lo, double& hi, int& n) {
        if (!k.contains(key)) return;
        const json& a = k.at(key);
        if (!a.is_array() || a.size() != 3) throw ConfigError(std::string("k_grid.") + key + ": expected [min, max, n]");
        lo = a[0].get<double>(), hi = a[1].get<double>(), n = a[2].get<int>();
        if (n < 1 || (n > 1 && !(lo < hi))) throw ConfigError(std::string("k_grid.") + key + ": invalid axis");
      };
      axis("re", c.k_grid.re_min, c.k_grid.re_max, c.k_grid.n_re);
      axis("im", c.k_grid.im_min, c.k_grid.im_max, c.k_grid.n_im);
    }
    if (j.contains("tolerances")) {
      const json& t = j.at("tolerances");
      check_keys(t, {"det_tol", "zero_tol"}, "tolerances");
      c.det_tol = positive(t, "det_tol", c.det_tol);
      c.zero_tol = positive(t, "zero_tol", c.zero_tol);
    }
    if (j.contains("budgets")) {
      const json& b = j.at("budgets");
      check_keys(b, {"max_nodes", "max_ell"}, "budgets");
      c.max_nodes = b.value("max_nodes", c.max_nodes);
      c.max_ell = b.value("max_ell", c.max_ell);
      if (c.max_nodes < 16) throw ConfigError("max_nodes must be at least 16");
    }
    if (j.contains("constants")) {
      const json& k = j.at("constants");
      check_keys(k, {"C3", "Gamma44"}, "constants");
      if (k.contains("C3")) c.C3 = positive(k, "C3", 0.0);
      if (k.contains("Gamma44")) c.Gamma44 = positive(k, "Gamma44", 0.0);
    }
    c.seed = j.value("seed", c.seed);
    if (j.contains("output")) {
      check_keys(j.at("output"), {"dir"}, "output");
      c.out_dir = j.at("output").value("dir", "");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in '" + path + "': " + e.what());
  }
  return parse_config(j);
}

}  // namespace bscount::cli
