#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>

#include "hsc/experiments.hpp"

using namespace hsc;

namespace {

ExperimentConfig seeded(std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.seed = seed;
  cfg.seed_set = true;
  return cfg;
}

}  // namespace

TEST_CASE("trace decay rejects the A2 regime") {
  ExperimentConfig cfg;
  cfg.alpha = 0.5;
  CHECK_THROWS_AS(run_trace_decay(cfg), std::invalid_argument);
}

TEST_CASE("trace decay small ladder is deterministic and well-formed") {
  ExperimentConfig cfg;
  cfg.alpha = 2.0;
  cfg.eigenvalues = {17, 33, 65, 129};
  const ExperimentReport a = run_trace_decay(cfg);
  const ExperimentReport b = run_trace_decay(cfg);
  CHECK(report_csv_body(a) == report_csv_body(b));
  CHECK(a.rows.size() == 6);  // 4 norms + slope + stderr
  bool has_slope = false;
  for (const ReportRow& r : a.rows) {
    CHECK(!r.param.empty());
    if (r.param == "slope") {
      has_slope = true;
      CHECK(r.value < 0.0);
    }
  }
  CHECK(has_slope);
}

TEST_CASE("delta scaling guards its hypotheses") {
  CHECK_THROWS_AS(run_delta_scaling([] {
                    ExperimentConfig c = seeded(1);
                    c.alpha = 1.0;
                    return c;
                  }()),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_delta_scaling([] {
                    ExperimentConfig c = seeded(1);
                    c.n = 1;
                    c.alpha = 1.5;
                    return c;
                  }()),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_delta_scaling([] {
                    ExperimentConfig c = seeded(1);
                    c.n = 2;
                    c.alpha = 0.5;
                    return c;
                  }()),
                  std::invalid_argument);
  // seed mandatory
  ExperimentConfig noseed;
  noseed.alpha = 0.0;
  CHECK_THROWS_AS(run_delta_scaling(noseed), std::invalid_argument);
  // delta list validation
  CHECK_THROWS_AS(run_delta_scaling([] {
                    ExperimentConfig c = seeded(1);
                    c.deltas = {0.125, 0.05, 0.04, 0.039};
                    return c;
                  }()),
                  std::invalid_argument);
}

TEST_CASE("delta scaling degenerate symbol is flagged") {
  ExperimentConfig cfg = seeded(5);
  cfg.b_name = "const:3";
  cfg.lambda_max = 33;
  cfg.trials = 3;
  cfg.deltas = {0.25, 0.125, 0.0625, 0.03125};
  const ExperimentReport rep = run_delta_scaling(cfg);
  CHECK(rep.all_passed());
  bool saw_flag = false;
  for (const ReportRow& r : rep.rows) {
    if (r.flag == "degenerate") saw_flag = true;
    if (r.param.rfind("delta=", 0) == 0) CHECK(r.value < 1e-20);  // zero up to roundoff
  }
  CHECK(saw_flag);
}

TEST_CASE("delta scaling small run produces a positive slope") {
  ExperimentConfig cfg = seeded(21);
  cfg.lambda_max = 65;
  cfg.trials = 6;
  cfg.deltas = {0.25, 0.125, 0.0625, 0.03125};
  const ExperimentReport rep = run_delta_scaling(cfg);
  double slope = 0.0;
  for (const ReportRow& r : rep.rows) {
    if (r.param == "slope") slope = r.value;
  }
  CHECK(slope > 0.5);
}

TEST_CASE("convergence run: monotone table, flags at lambda=0") {
  ExperimentConfig cfg;
  cfg.lambda = 1.0;
  cfg.lambda_max = 129;
  const ExperimentReport rep = run_convergence(cfg);
  CHECK(rep.all_passed());
  double first = -1.0, last = -1.0, ratio = -1.0;
  for (const ReportRow& r : rep.rows) {
    if (r.param == "sup_R=4") first = r.value;
    if (r.param == "sup_R=64") last = r.value;
    if (r.param == "final_over_initial") ratio = r.value;
    CHECK(r.flag.empty());
  }
  CHECK(first > 0.0);
  CHECK(last < 0.2 * first);
  CHECK(ratio == doctest::Approx(last / first).epsilon(1e-12));

  ExperimentConfig zero = cfg;
  zero.lambda = 0.0;
  const ExperimentReport repz = run_convergence(zero);
  bool flagged = false;
  for (const ReportRow& r : repz.rows) {
    if (r.flag == "outside-corollary-hypotheses") flagged = true;
  }
  CHECK(flagged);

  ExperimentConfig bad = cfg;
  bad.lambda = -1.0;
  CHECK_THROWS_AS(run_convergence(bad), std::invalid_argument);
}

TEST_CASE("convergence with a constant symbol reports zeros throughout") {
  ExperimentConfig cfg;
  cfg.lambda = 1.0;
  cfg.lambda_max = 33;
  cfg.b_name = "const:5";
  const ExperimentReport rep = run_convergence(cfg);
  for (const ReportRow& r : rep.rows) {
    if (r.param.rfind("sup_R=", 0) == 0) CHECK(r.value < 1e-10);
  }
}

TEST_CASE("theorem ratio also runs the unweighted study") {
  ExperimentConfig cfg = seeded(10);
  cfg.alpha = 0.0;  // weight identically one
  cfg.lambda = 1.0;
  cfg.lambda_max = 65;
  cfg.trials = 8;
  const ExperimentReport rep = run_theorem_ratio(cfg);
  CHECK(rep.all_passed());
}

TEST_CASE("theorem ratio guards and small-run stability") {
  CHECK_THROWS_AS(run_theorem_ratio([] {
                    ExperimentConfig c = seeded(1);
                    c.alpha = 0.9;
                    c.lambda = 0.0;  // needs lambda > 0
                    return c;
                  }()),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_theorem_ratio([] {
                    ExperimentConfig c = seeded(1);
                    c.alpha = 1.5;  // out of the weight range for n=1
                    return c;
                  }()),
                  std::invalid_argument);

  ExperimentConfig cfg = seeded(9);
  cfg.alpha = 0.5;
  cfg.lambda = 1.0;
  cfg.lambda_max = 65;
  cfg.trials = 8;
  const ExperimentReport rep = run_theorem_ratio(cfg);
  CHECK(rep.all_passed());
  for (const ReportRow& r : rep.rows) {
    if (r.param == "band_doubling_drift") CHECK(r.value < 0.10);
    if (r.param == "max_ratio") CHECK(r.value > 0.0);
  }
}

TEST_CASE("identity suite passes and echoes the anchor tuple") {
  ExperimentConfig cfg;
  const ExperimentReport rep = run_identity_suite(cfg);
  CHECK(rep.all_passed());
  bool saw_anchor = false;
  for (const ReportRow& r : rep.rows) {
    if (r.param.find("m=1,R=2):lhs") != std::string::npos) {
      saw_anchor = true;
      CHECK(r.value == doctest::Approx(0.75).epsilon(1e-12));
    }
  }
  CHECK(saw_anchor);
  // row count: 5 tuples x 3 rows + reconstruction + decay + dyadic residual
  CHECK(rep.rows.size() == 5 * 3 + 3);
}

TEST_CASE("csv body determinism and atomic write") {
  ExperimentConfig cfg = seeded(77);
  cfg.lambda_max = 33;
  cfg.trials = 3;
  cfg.deltas = {0.25, 0.125, 0.0625, 0.03125};
  const ExperimentReport a = run_delta_scaling(cfg);
  const ExperimentReport b = run_delta_scaling(cfg);
  CHECK(report_csv_body(a) == report_csv_body(b));

  const std::string path = "test_report_out.csv";
  write_report_csv(a, path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# generated", 0) == 0);
  std::getline(in, line);
  CHECK(line == "experiment,n,alpha,param,value,band,grid_m,seed,flag");
  std::remove(path.c_str());

  // different seed changes the body
  ExperimentConfig cfg2 = cfg;
  cfg2.seed = 78;
  const ExperimentReport c = run_delta_scaling(cfg2);
  CHECK(report_csv_body(c) != report_csv_body(a));
}

TEST_CASE("provenance self-check rejects malformed rows") {
  ExperimentReport rep;
  rep.experiment = "x";
  rep.rows.push_back(ReportRow{});  // empty fields
  CHECK_THROWS_AS(write_report_csv(rep, "bad.csv"), std::runtime_error);
}
