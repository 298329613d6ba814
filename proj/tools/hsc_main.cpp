#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hsc/experiments.hpp"

namespace {

CLI::Option* add_common_flags(CLI::App* cmd, hsc::ExperimentConfig* cfg) {
  cmd->set_config("--config", "", "key=value config file");
  cmd->add_option("--n", cfg->n, "space dimension");
  cmd->add_option("--alpha", cfg->alpha, "weight exponent of (1+|x|)^-alpha");
  cmd->add_option("--lambda", cfg->lambda, "Riesz order");
  cmd->add_option("--band", cfg->lambda_max, "eigenvalue band limit (0 = default)");
  cmd->add_option("--grid-m", cfg->grid_m, "quadrature points per axis (0 = 2*band)");
  cmd->add_option("--delta", cfg->deltas, "delta list (geometric)");
  cmd->add_option("--k-list", cfg->eigenvalues, "eigenvalue list for trace decay");
  cmd->add_option("--r-min", cfg->r_min, "smallest Riesz radius");
  cmd->add_option("--r-max", cfg->r_max, "largest Riesz radius (0 = sqrt(2*band))");
  cmd->add_option("--r-per-octave", cfg->r_per_octave, "R grid density");
  cmd->add_option("--t-per-window", cfg->t_points_per_window,
                  "t grid points across each square-function response window");
  cmd->add_option("--b", cfg->b_name, "symbol name: const:<c> | sin | log1p_abs | sign_times_log");
  cmd->add_option("--trials", cfg->trials, "random trial count (0 = default)");
  cmd->add_flag("--parallel", cfg->parallel, "parallelize R/t loops");
  cmd->add_option("--out", cfg->out_path, "CSV output path");
  return cmd->add_option("--seed", cfg->seed, "RNG seed (mandatory for trial runs)");
}

int finish(const hsc::ExperimentReport& rep, const hsc::ExperimentConfig& cfg) {
  for (const std::string& w : rep.warnings) std::cerr << "warning: " << w << "\n";
  for (const hsc::CheckResult& c : rep.checks) {
    std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << " (value " << c.value << ")";
    if (!c.detail.empty()) std::cout << " - " << c.detail;
    std::cout << "\n";
  }
  std::cout << rep.experiment << ": " << rep.rows.size() << " rows, "
            << rep.runtime_seconds << " s\n";
  if (!cfg.out_path.empty()) {
    hsc::write_report_csv(rep, cfg.out_path);
    std::cout << "wrote " << cfg.out_path << "\n";
  }
  return rep.all_passed() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hermite spectral calculus experiments"};
  app.require_subcommand(1);

  hsc::ExperimentConfig cfg;

  auto* trace = app.add_subcommand("trace-decay", "eigenspace weighted-norm decay");
  auto* scaling = app.add_subcommand("delta-scaling", "square-function scaling exponent");
  auto* conv = app.add_subcommand("convergence", "commutated Riesz means at growing R");
  auto* ratio = app.add_subcommand("theorem-ratio", "maximal-commutator bounded-ratio study");
  auto* ident = app.add_subcommand("identity-suite", "subordination and synthesis identities");
  std::vector<CLI::Option*> seed_opts;
  for (CLI::App* cmd : {trace, scaling, conv, ratio, ident}) {
    seed_opts.push_back(add_common_flags(cmd, &cfg));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 1;
  }
  for (const CLI::Option* opt : seed_opts) {
    if (opt->count() > 0) cfg.seed_set = true;
  }

  try {
    if (trace->parsed()) return finish(hsc::run_trace_decay(cfg), cfg);
    if (scaling->parsed()) return finish(hsc::run_delta_scaling(cfg), cfg);
    if (conv->parsed()) return finish(hsc::run_convergence(cfg), cfg);
    if (ratio->parsed()) return finish(hsc::run_theorem_ratio(cfg), cfg);
    if (ident->parsed()) return finish(hsc::run_identity_suite(cfg), cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
