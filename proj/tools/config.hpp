#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bscount/potential.hpp"
#include "bscount/zerofinder.hpp"

/// Experiment configuration for the command-line front end.
namespace bscount::cli {

using json = nlohmann::json;

/// Malformed or inconsistent configuration; exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NamedPotential {
  std::string id;
  Potential potential;
  /// Weighted integral beyond the truncation radius, when the potential
  /// came from the truncation helper.
  std::optional<double> neglected_tail;
};

struct KGrid {
  double re_min = -5.0, re_max = 5.0;
  int n_re = 21;
  double im_min = -1.0, im_max = 1.0;
  int n_im = 5;
};

struct ExperimentConfig {
  std::string id = "experiment";
  int dimension = 1;
  std::vector<NamedPotential> potentials;
  std::vector<double> eps_grid;  // empty: default grid per potential
  std::optional<double> eps;     // fixed eps for prop21 / thm2 / 3-D bound
  std::optional<zeros::Rectangle> k_window;
  KGrid k_grid;
  double det_tol = 1e-10;
  double zero_tol = 1e-10;
  int max_nodes = 16384;
  int max_ell = -1;
  std::optional<double> C3;
  std::optional<double> Gamma44;
  std::uint64_t seed = 1;  // for the matrix suites
  std::string out_dir;
  json raw;
  std::string hash;
};

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& bytes);

ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config(const std::string& path);

Potential parse_potential(const json& j, Geometry default_geometry, std::optional<double>* neglected_tail = nullptr);
json potential_to_json(const Potential& V);

json complex_to_json(cplx z);

}  // namespace bscount::cli
