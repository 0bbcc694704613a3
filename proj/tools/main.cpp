#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace fs = std::filesystem;
using namespace bscount::cli;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

void emit(const Output& out, const std::string& dir) {
  const std::string json_text = out.report.dump(2) + "\n";
  if (dir.empty()) {
    if (!out.csv.empty()) std::cout << out.csv;
    if (!out.report.is_null() && (out.csv.empty() || out.report.contains("results"))) std::cout << json_text;
    return;
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
  if (!out.json_name.empty()) write_file(fs::path(dir) / out.json_name, json_text);
  if (!out.csv.empty() && !out.csv_name.empty()) write_file(fs::path(dir) / out.csv_name, out.csv);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eigenvalue counting for complex potentials via regularized determinants"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string config_path, out_dir, suite;
  int threads = 1;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Experiment config (JSON)")->required();
    sub->add_option("--out", out_dir, "Output directory (default: config output.dir, else stdout)");
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  };
  auto* det = app.add_subcommand("det", "Evaluate the regularized determinant on a k-grid (CSV)");
  auto* eigs = app.add_subcommand("eigs", "Locate eigenvalues with oracle agreement (JSON)");
  auto* verify = app.add_subcommand("verify", "Run a verification suite (JSON pass/fail)");
  auto* bound = app.add_subcommand("bound", "Eigenvalue count against the bound (JSON + CSV summary)");
  for (auto* sub : {det, eigs, verify, bound}) add_common(sub);
  verify->add_option("--suite", suite, "prop21 | prop41 | lemma31 | weyl | thm1 | thm2 | lemma62")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const ExperimentConfig cfg = load_config(config_path);
    const std::string dir = out_dir.empty() ? cfg.out_dir : out_dir;
    Output out;
    if (*det) out = cmd_det(cfg, threads);
    else if (*eigs) out = cmd_eigs(cfg, threads);
    else if (*verify) out = cmd_verify(cfg, suite, threads);
    else out = cmd_bound(cfg, threads);
    emit(out, dir);
    if (out.exit_code != 0) std::cerr << "assertion failure; see report\n";
    return out.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
