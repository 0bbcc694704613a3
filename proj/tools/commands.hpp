#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace bscount::cli {

extern const char* const kVersion;

/// One command's artifacts: a JSON report, an optional CSV table, and the
/// exit code (0 pass, 1 assertion failure).
struct Output {
  json report;
  std::string csv;
  std::string csv_name;
  std::string json_name;
  int exit_code = 0;
};

/// Rows (potential-id, Re k, Im k, Re a, Im a, |a|) over the k-grid, with
/// a = det_2 in 1-D and det_4 in 3-D.
Output cmd_det(const ExperimentConfig& cfg, int threads = 1);

/// Zeros with Im k > 0 per potential, with lambda = k^2, multiplicity,
/// residual and the Jost-oracle agreement flag (1-D); near-real zeros are
/// listed separately as indeterminate.
Output cmd_eigs(const ExperimentConfig& cfg, int threads = 1);

const std::vector<std::string>& suite_names();

/// Runs one named suite; throws ConfigError for unknown names.
Output cmd_verify(const ExperimentConfig& cfg, const std::string& suite, int threads = 1);

/// Bound report per potential (1-D optimized over eps, 3-D at cfg.eps or
/// 1/R) plus the CSV summary potential-id, eps, N, rhs, margin, wall-time.
Output cmd_bound(const ExperimentConfig& cfg, int threads = 1);

/// Seeded complex Gaussian matrix with entries of unit variance.
ComplexMatrix random_matrix(int rows, int cols, std::uint64_t seed);

/// Matrix suites shared with the acceptance driver.
json lemma31_suite(std::uint64_t seed, int trials = 100);
json weyl_suite(std::uint64_t seed, int trials = 100);

}  // namespace bscount::cli
