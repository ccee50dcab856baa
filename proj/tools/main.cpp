// flexkrylov: batch experiment runner.
//
//   flexkrylov run <config.json> [--out DIR] [--seed N]
//   flexkrylov report <DIR>
//   flexkrylov list-problems
//   flexkrylov list-solvers
//
// Exit codes: 0 success, 1 bad config or arguments, 2 solver aborted on
// non-finite values.

#include "flexkrylov/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

namespace fk = flexkrylov;

namespace {

int cmd_run(const std::string& config_path, const std::optional<std::string>& out,
            const std::optional<std::uint64_t>& seed) {
  fk::ExperimentConfig cfg = fk::load_experiment_config(config_path);
  if (out) cfg.output.dir = *out;
  if (seed) cfg.problem.seed = *seed;
  cfg.validate();

  const fk::ExperimentResult res = fk::run_experiment(cfg);
  std::cout << res.problem.name << ": " << res.problem.a->rows() << "x" << res.problem.a->cols()
            << ", noise level " << res.problem.noise_level << "\n";
  for (const auto& [name, run] : res.runs) {
    std::printf("  %-12s %4d its  best rel err %.6g @ %d  stop: %s\n", name.c_str(), run.iterations(),
                run.best_rel_err, run.best_iteration, fk::to_string(run.stop_reason).c_str());
  }
  std::cout << "outputs written to " << cfg.output.dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flexible Krylov solvers for sparsity-regularized inverse problems"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config_path, "JSON experiment config")->required();
  run->add_option("--out", out_dir, "Output directory (overrides output.dir)");
  run->add_option("--seed", seed, "Noise seed (overrides problem.seed)");

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Summarize the traces in a directory");
  report->add_option("dir", report_dir, "Directory holding *_trace.csv files")->required();

  auto* list_problems = app.add_subcommand("list-problems", "List problem generators");
  auto* list_solvers = app.add_subcommand("list-solvers", "List solver methods");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(config_path, out_dir, seed);
    if (*report) {
      std::cout << fk::compare_report(report_dir);
      return 0;
    }
    if (*list_problems) {
      for (const auto& g : fk::problem_generators()) std::cout << g << "\n";
      return 0;
    }
    if (*list_solvers) {
      for (fk::Method m : fk::all_methods()) std::cout << fk::to_string(m) << "\n";
      std::cout << "irn\npirn\nfista\n";
      return 0;
    }
  } catch (const fk::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const fk::NumericalError& e) {
    std::cerr << "solver aborted: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
