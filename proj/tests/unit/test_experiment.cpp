#include "flexkrylov/experiment.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace flexkrylov;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("flexkrylov_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string small_config(const std::string& dir) {
  return R"({
    "schema_version": 1,
    "problem": {"generator": "blur1d", "n": 64, "noise_level": 0.01, "seed": 3,
                "transform": "haar", "transform_levels": 1},
    "solvers": [
      {"name": "lsqr", "method": "lsqr", "max_iter": 15},
      {"name": "fi", "method": "flsqr_i", "max_iter": 15, "weights": {"tau1": 0.2, "mode": "absolute"},
       "param": {"kind": "dp_exact"}},
      {"name": "irn", "method": "irn", "max_iter": 3, "inner_iter": 5, "lambda_from": "fi"},
      {"name": "fista", "method": "fista", "lambda_from": "fi", "budget_from": "fi"}
    ],
    "output": {"dir": ")" + dir + R"("}
  })";
}

void write_trace(const fs::path& dir, const std::string& name, const std::vector<std::pair<double, int>>& rows) {
  std::ofstream out(dir / (name + "_trace.csv"));
  out << "iter,lambda,res_norm,ne_res_norm,rel_err,matvecs,wall_ms\n";
  int k = 1;
  for (const auto& [err, mv] : rows) out << k++ << ",0,1,nan," << err << "," << mv << ",0\n";
}

}  // namespace

TEST(Config, ParsesSolverFamilies) {
  const ExperimentConfig cfg = parse_experiment_config(small_config("x"));
  ASSERT_EQ(cfg.solvers.size(), 4u);
  EXPECT_EQ(cfg.solvers[0].family, SolverFamily::krylov);
  EXPECT_EQ(cfg.solvers[1].krylov.method, Method::flsqr_i);
  EXPECT_EQ(cfg.solvers[1].krylov.weights.mode, ThresholdMode::absolute);
  EXPECT_EQ(cfg.solvers[2].family, SolverFamily::irn);
  EXPECT_EQ(cfg.solvers[2].irn.inner_iterations, 5);
  EXPECT_EQ(cfg.solvers[3].family, SolverFamily::fista);
  EXPECT_EQ(cfg.solvers[3].budget_from, "fi");
  EXPECT_EQ(cfg.output.dir, "x");
}

TEST(Config, RejectsMalformedInput) {
  const char* bad[] = {
      "{",
      "[]",
      R"({"problem": {"generator": "heat"}, "solvers": [{"method": "lsqr"}]})",
      R"({"schema_version": 2, "problem": {"generator": "heat"}, "solvers": [{"method": "lsqr"}]})",
      R"({"schema_version": 1, "problem": {"generator": "heat"}, "solvers": []})",
      R"({"schema_version": 1, "problem": {"generator": "heat"}, "solvers": [{"method": "cg"}]})",
      R"({"schema_version": 1, "problem": {"generator": "heat"}, "solvers": [{"method": "lsqr", "speed": 1}]})",
      R"({"schema_version": 1, "problem": {"generator": "heat"}, "solvers": [{"method": "lsqr", "max_iter": 0}]})",
      R"({"schema_version": 1, "problem": {"generator": "heat"}, "solvers": [{"method": "lsqr"}, {"method": "lsqr"}]})",
      R"({"schema_version": 1, "problem": {"generator": "heat"}, "solvers": [{"method": "irn", "lambda_from": "later"}]})",
      R"({"schema_version": 1, "problem": {"generator": "heat"}, "solvers": [{"method": "lsqr", "budget_from": "x"}]})",
      R"({"schema_version": 1, "problem": {"generator": "heat"}, "solvers": [{"method": "flsqr_i", "param": {"kind": "dp_exact"}}]})",
      R"({"schema_version": 1, "problem": {"generator": "heat"}, "solvers": [{"name": "a/b", "method": "lsqr"}]})",
      R"({"schema_version": 1, "problem": {"generator": "heat"}, "solvers": [{"method": "lsqr"}], "extra": 1})",
      R"({"schema_version": 1, "problem": {"generator": "heat", "n": 4}, "solvers": [{"method": "lsqr"}]})",
  };
  for (const char* text : bad) EXPECT_THROW(parse_experiment_config(text), ConfigError) << text;
}

TEST(Experiment, RunsAndBorrowsLambdaAndBudget) {
  const ExperimentConfig cfg = parse_experiment_config(small_config("unused"));
  const ExperimentResult res = execute_experiment(cfg);
  ASSERT_EQ(res.runs.size(), 4u);
  const SolverRun& fi = res.runs[1].second;
  const SolverRun& fista = res.runs[3].second;
  EXPECT_GT(fi.final_lambda, 0.0);
  EXPECT_EQ(fista.iterations(), static_cast<int>(fi.records.back().matvecs / 2));
  for (const auto& [name, run] : res.runs) EXPECT_TRUE(std::isfinite(run.best_rel_err)) << name;
}

TEST(Experiment, WritesOutputsDeterministically) {
  const fs::path a = scratch("exp_a");
  const fs::path b = scratch("exp_b");
  run_experiment(parse_experiment_config(small_config(a.string())));
  run_experiment(parse_experiment_config(small_config(b.string())));
  for (const char* f : {"lsqr_trace.csv", "fi_trace.csv", "irn_trace.csv", "fista_trace.csv", "summary.json"}) {
    ASSERT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  EXPECT_EQ(slurp(a / "lsqr_trace.csv").substr(0, 48), "iter,lambda,res_norm,ne_res_norm,rel_err,matvecs");
  const std::string report = compare_report(a);
  EXPECT_NE(report.find("| fi |"), std::string::npos);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Experiment, ImagesGetPgmWithSidecar) {
  const fs::path dir = scratch("exp_img");
  const std::string text = R"({"schema_version": 1,
    "problem": {"generator": "deblur2d", "n": 16, "psf": {"kind": "disk", "param": 2}, "noise_level": 0.01},
    "solvers": [{"name": "g", "method": "lsqr", "max_iter": 3}],
    "output": {"dir": ")" + dir.string() + R"(", "save_problem": true}})";
  run_experiment(parse_experiment_config(text));
  const std::string pgm = slurp(dir / "g_best.pgm");
  EXPECT_EQ(pgm.substr(0, 13), "P5\n16 16\n255\n");
  EXPECT_EQ(pgm.size(), 13u + 256u);
  EXPECT_TRUE(fs::exists(dir / "g_best.pgm.json"));
  EXPECT_TRUE(fs::exists(dir / "x_true.pgm"));
  EXPECT_TRUE(fs::exists(dir / "problem" / "problem.json"));
  fs::remove_all(dir);
}

TEST(Report, SingleTraceSingleRow) {
  const fs::path dir = scratch("rep_single");
  fs::create_directories(dir);
  write_trace(dir, "only", {{0.5, 3}, {0.25, 5}, {0.3, 7}});
  const std::string r = compare_report(dir);
  EXPECT_EQ(std::count(r.begin(), r.end(), '\n'), 3);
  EXPECT_NE(r.find("| only | 0.25"), std::string::npos);
  EXPECT_NE(r.find("| 2 | 5 |"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Report, SortsByErrorThenMatvecs) {
  const fs::path dir = scratch("rep_sort");
  fs::create_directories(dir);
  write_trace(dir, "slow", {{0.2, 50}});
  write_trace(dir, "fast", {{0.2, 10}});
  write_trace(dir, "best", {{0.1, 99}});
  const std::string r = compare_report(dir);
  const auto best = r.find("| best");
  const auto fast = r.find("| fast");
  const auto slow = r.find("| slow");
  EXPECT_LT(best, fast);
  EXPECT_LT(fast, slow);
  fs::remove_all(dir);
}

TEST(Report, EmptyDirectoryIsAnError) {
  const fs::path dir = scratch("rep_empty");
  fs::create_directories(dir);
  EXPECT_THROW(compare_report(dir), ConfigError);
  EXPECT_THROW(compare_report(dir / "missing"), ConfigError);
  fs::remove_all(dir);
}

TEST(Pgm, MinMaxScaling) {
  const fs::path dir = scratch("pgm");
  fs::create_directories(dir);
  Vector img(4);
  img << -1.0, 0.0, 1.0, 3.0;
  const auto [lo, hi] = write_pgm(dir / "a.pgm", img, 2, 2);
  EXPECT_EQ(lo, -1.0);
  EXPECT_EQ(hi, 3.0);
  const std::string bytes = slurp(dir / "a.pgm");
  ASSERT_EQ(bytes.size(), 11u + 4u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[11]), 0);
  EXPECT_EQ(static_cast<unsigned char>(bytes[14]), 255);
  fs::remove_all(dir);
}
