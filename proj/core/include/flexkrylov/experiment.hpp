#ifndef FLEXKRYLOV_EXPERIMENT_HPP
#define FLEXKRYLOV_EXPERIMENT_HPP

#include "flexkrylov/baselines.hpp"
#include "flexkrylov/problems.hpp"
#include "flexkrylov/solvers.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace flexkrylov {

enum class SolverFamily { krylov, irn, pirn, fista };

/// One solver entry of an experiment config.
struct SolverSpec {
  std::string name;
  SolverFamily family = SolverFamily::krylov;
  SolverConfig krylov;
  IrnConfig irn;
  FistaConfig fista;
  /// Use the problem's sparsifying transform (when it has one).
  bool use_transform = true;
  /// Take lambda from the final lambda of an earlier solver (irn/pirn/fista).
  std::string lambda_from;
  /// Give fista the total matvec count of an earlier solver as its budget.
  std::string budget_from;
};

struct OutputOptions {
  std::string dir = "out";
  bool pgm = true;
  bool save_problem = false;
  /// Off by default so traces are byte-reproducible; wall_ms is then 0.
  bool wall_time = false;
};

struct ExperimentConfig {
  int schema_version = 1;
  ProblemSpec problem;
  std::vector<SolverSpec> solvers;
  OutputOptions output;

  void validate() const;
};

/// Parses and validates a JSON config; throws ConfigError on any problem.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct ExperimentResult {
  TestProblem problem;
  std::vector<std::pair<std::string, SolverRun>> runs;
};

/// Solves the configured problem with every solver in order, without
/// touching the file system.
ExperimentResult execute_experiment(const ExperimentConfig& cfg);

/// execute_experiment, then writes `<name>_trace.csv`, summary.json and (for
/// 2D problems) PGM images with JSON sidecars into cfg.output.dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// 8-bit binary PGM with linear min-max scaling; returns {min, max}.
std::pair<double, double> write_pgm(const std::filesystem::path& path, const Vector& image,
                                    Index rows, Index cols);

/// Markdown table over every `*_trace.csv` in dir: solver, best relative
/// error, its iteration and the matvecs spent up to it. Sorted by best
/// error, ties broken by fewer matvecs. Throws ConfigError when dir holds no
/// traces.
std::string compare_report(const std::filesystem::path& dir);

}  // namespace flexkrylov

#endif  // FLEXKRYLOV_EXPERIMENT_HPP
