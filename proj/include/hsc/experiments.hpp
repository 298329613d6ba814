#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hsc/commutator.hpp"
#include "hsc/multiplier.hpp"
#include "hsc/weighted.hpp"

namespace hsc {

/// Shared knob set for the experiment runners. Every runner validates the
/// fields it uses up front and throws std::invalid_argument on violations.
struct ExperimentConfig {
  int n = 1;
  double alpha = 0.0;
  double lambda = 1.0;
  std::vector<double> deltas;        // delta-scaling; empty => {2^-3..2^-7}
  std::vector<int> eigenvalues;      // trace-decay; empty => canonical ladder
  int lambda_max = 0;                // 0 => per-experiment default
  int grid_m = 0;                    // 0 => 2*lambda_max per axis
  double r_min = 0.0, r_max = 0.0;   // 0 => derived from the band
  int r_per_octave = 8;
  int t_points_per_window = 12;
  std::string b_name = "sin";
  int trials = 0;                    // 0 => per-experiment default
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool parallel = false;
  std::string out_path;              // empty => no file written
};

struct ReportRow {
  std::string experiment;
  int n = 0;
  double alpha = 0.0;
  std::string param;
  double value = 0.0;
  int band = 0;
  int grid_m = 0;
  std::uint64_t seed = 0;
  std::string flag;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  std::string detail;
};

struct ExperimentReport {
  std::string experiment;
  std::vector<ReportRow> rows;
  std::vector<CheckResult> checks;
  std::vector<std::string> warnings;
  double runtime_seconds = 0.0;

  bool all_passed() const;
};

/// Eigenspace norm decay against the eigenvalue, with a fitted log-log slope.
ExperimentReport run_trace_decay(const ExperimentConfig& cfg);

/// Empirical scaling exponent of the square-function energy ratio in delta.
ExperimentReport run_delta_scaling(const ExperimentConfig& cfg);

/// Riesz-mean commutator of a fixed Gaussian bump as R grows.
ExperimentReport run_convergence(const ExperimentConfig& cfg);

/// Bounded-ratio study for the maximal commutator with band-doubling
/// stability. Trials are drawn band-limited at roughly half the working
/// band so the product projection is converged at both working bands.
ExperimentReport run_theorem_ratio(const ExperimentConfig& cfg);

/// Subordination identity sweep plus the frequency-piece reconstruction
/// and decay fits.
ExperimentReport run_identity_suite(const ExperimentConfig& cfg);

/// Deterministic CSV body (header + rows, no timestamp).
std::string report_csv_body(const ExperimentReport& report);

/// Atomic write (temp + rename) of a timestamp comment line followed by the
/// deterministic body. Throws if any row is missing provenance fields.
void write_report_csv(const ExperimentReport& report, const std::string& path);

}  // namespace hsc
