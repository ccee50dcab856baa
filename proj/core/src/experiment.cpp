#include "flexkrylov/experiment.hpp"

#include "flexkrylov/problem_io.hpp"
#include "json_util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace flexkrylov {

namespace fs = std::filesystem;
using detail::get_or;
using detail::json;
using detail::reject_unknown_keys;

namespace {

bool valid_name(const std::string& name) {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
  });
}

WeightPolicy parse_weights(const json& j, const std::string& where) {
  reject_unknown_keys(j, {"p", "tau1", "tau2", "mode"}, where);
  WeightPolicy w;
  w.p = get_or<double>(j, "p", w.p, where);
  w.tau1 = get_or<double>(j, "tau1", w.tau1, where);
  w.tau2 = get_or<double>(j, "tau2", w.tau2, where);
  const auto mode = get_or<std::string>(j, "mode", "relative", where);
  if (mode == "relative") {
    w.mode = ThresholdMode::relative;
  } else if (mode == "absolute") {
    w.mode = ThresholdMode::absolute;
  } else {
    throw ConfigError(where + ".mode must be 'relative' or 'absolute'");
  }
  return w;
}

ParamPolicy parse_param(const json& j, const std::string& where) {
  reject_unknown_keys(j,
                      {"kind", "lambda", "eta", "lambda0", "lambda_min", "lambda_max",
                       "grid_points"},
                      where);
  ParamPolicy p;
  p.kind = parse_param_kind(get_or<std::string>(j, "kind", "fixed", where));
  p.fixed_lambda = get_or<double>(j, "lambda", p.fixed_lambda, where);
  p.eta = get_or<double>(j, "eta", p.eta, where);
  if (j.contains("lambda0")) p.lambda0 = get_or<double>(j, "lambda0", 1.0, where);
  p.lambda_min = get_or<double>(j, "lambda_min", p.lambda_min, where);
  p.lambda_max = get_or<double>(j, "lambda_max", p.lambda_max, where);
  p.grid_points = get_or<int>(j, "grid_points", p.grid_points, where);
  return p;
}

SolverSpec parse_solver(const json& j, std::size_t index) {
  std::string where = "solvers[" + std::to_string(index) + "]";
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  reject_unknown_keys(j,
                      {"name", "method", "max_iter", "weights", "param", "stop", "transform",
                       "lambda", "lambda_from", "budget_from", "inner_iter", "inner_tol", "step",
                       "power_iterations"},
                      where);
  if (!j.contains("method")) throw ConfigError(where + ": missing 'method'");
  SolverSpec s;
  const auto method = get_or<std::string>(j, "method", "", where);
  s.name = get_or<std::string>(j, "name", method, where);
  where += " (" + s.name + ")";
  const int max_iter = get_or<int>(j, "max_iter", 100, where);
  s.use_transform = get_or<bool>(j, "transform", true, where);
  s.lambda_from = get_or<std::string>(j, "lambda_from", "", where);
  s.budget_from = get_or<std::string>(j, "budget_from", "", where);
  const double lambda = get_or<double>(j, "lambda", 0.0, where);
  const WeightPolicy weights =
      j.contains("weights") ? parse_weights(j.at("weights"), where + ".weights") : WeightPolicy{};

  if (method == "irn" || method == "pirn") {
    s.family = method == "irn" ? SolverFamily::irn : SolverFamily::pirn;
    s.irn.outer_iterations = max_iter;
    s.irn.inner_iterations = get_or<int>(j, "inner_iter", s.irn.inner_iterations, where);
    s.irn.inner_tol = get_or<double>(j, "inner_tol", s.irn.inner_tol, where);
    s.irn.lambda = lambda;
    s.irn.weights = weights;
  } else if (method == "fista") {
    s.family = SolverFamily::fista;
    s.fista.max_iterations = max_iter;
    s.fista.lambda = lambda;
    s.fista.step = get_or<double>(j, "step", s.fista.step, where);
    s.fista.power_iterations = get_or<int>(j, "power_iterations", s.fista.power_iterations, where);
  } else {
    s.family = SolverFamily::krylov;
    s.krylov.method = parse_method(method);
    s.krylov.stop.max_iterations = max_iter;
    s.krylov.weights = weights;
    if (j.contains("param")) s.krylov.param = parse_param(j.at("param"), where + ".param");
    if (j.contains("lambda")) s.krylov.param.fixed_lambda = lambda;
    if (j.contains("stop")) {
      const json& st = j.at("stop");
      const std::string w = where + ".stop";
      reject_unknown_keys(st, {"stagnation_tol", "stagnation_window", "discrepancy"}, w);
      s.krylov.stop.stagnation_tol = get_or<double>(st, "stagnation_tol", s.krylov.stop.stagnation_tol, w);
      s.krylov.stop.stagnation_window =
          get_or<int>(st, "stagnation_window", s.krylov.stop.stagnation_window, w);
      s.krylov.stop.discrepancy = get_or<bool>(st, "discrepancy", s.krylov.stop.discrepancy, w);
    }
  }
  if (!s.budget_from.empty() && s.family != SolverFamily::fista) {
    throw ConfigError(where + ": budget_from is only supported for fista");
  }
  if (!s.lambda_from.empty() && s.family == SolverFamily::krylov) {
    throw ConfigError(where + ": lambda_from is only supported for irn, pirn and fista");
  }
  return s;
}

/// Validation that needs no operator: everything except dimensions.
void validate_solver(const SolverSpec& s, double noise_level) {
  const std::string where = "solver '" + s.name + "'";
  try {
    switch (s.family) {
      case SolverFamily::krylov: {
        const auto& c = s.krylov;
        if (c.stop.max_iterations < 1) throw ConfigError("max_iter must be >= 1");
        if (c.stop.stagnation_window < 1) throw ConfigError("stagnation window must be >= 1");
        c.weights.validate();
        if (traits(c.method).hybrid) {
          ParamPolicy probe = c.param;
          if (probe.kind == ParamKind::dp_exact || probe.kind == ParamKind::dp_secant) {
            if (!(noise_level > 0.0)) {
              throw ConfigError("the discrepancy principle needs a noisy problem");
            }
            probe.noise_norm = 1.0;
          }
          probe.validate();
        }
        if (c.stop.discrepancy && !(noise_level > 0.0)) {
          throw ConfigError("the discrepancy stop rule needs a noisy problem");
        }
        break;
      }
      case SolverFamily::irn:
      case SolverFamily::pirn: {
        const auto& c = s.irn;
        if (c.outer_iterations < 1 || c.inner_iterations < 1) {
          throw ConfigError("iteration counts must be >= 1");
        }
        if (!(c.inner_tol >= 0.0) || !(c.lambda >= 0.0)) {
          throw ConfigError("lambda and inner_tol must be >= 0");
        }
        c.weights.validate();
        break;
      }
      case SolverFamily::fista: {
        const auto& c = s.fista;
        if (c.max_iterations < 1 || c.power_iterations < 1) {
          throw ConfigError("iteration counts must be >= 1");
        }
        if (!(c.lambda >= 0.0) || !(c.step >= 0.0)) throw ConfigError("lambda and step must be >= 0");
        break;
      }
    }
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

void ExperimentConfig::validate() const {
  if (schema_version != 1) throw ConfigError("unsupported schema_version " + std::to_string(schema_version));
  problem.validate();
  if (solvers.empty()) throw ConfigError("config lists no solvers");
  if (output.dir.empty()) throw ConfigError("output.dir is empty");
  std::set<std::string> seen;
  for (const auto& s : solvers) {
    if (!valid_name(s.name)) {
      throw ConfigError("solver name '" + s.name + "' must use only letters, digits, '_', '-', '.'");
    }
    for (const std::string* ref : {&s.lambda_from, &s.budget_from}) {
      if (!ref->empty() && !seen.count(*ref)) {
        throw ConfigError("solver '" + s.name + "' refers to '" + *ref +
                          "', which is not an earlier solver");
      }
    }
    if (!seen.insert(s.name).second) throw ConfigError("duplicate solver name '" + s.name + "'");
    validate_solver(s, problem.noise_level);
  }
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  reject_unknown_keys(j, {"schema_version", "problem", "solvers", "output", "description"}, "config");
  ExperimentConfig cfg;
  if (!j.contains("schema_version")) throw ConfigError("config: missing schema_version");
  cfg.schema_version = get_or<int>(j, "schema_version", 0, "config");
  if (!j.contains("problem")) throw ConfigError("config: missing 'problem'");
  cfg.problem = detail::problem_spec_from_json(j.at("problem"));
  if (!j.contains("solvers") || !j.at("solvers").is_array()) {
    throw ConfigError("config: 'solvers' must be a list");
  }
  std::size_t i = 0;
  for (const auto& s : j.at("solvers")) cfg.solvers.push_back(parse_solver(s, i++));
  if (j.contains("output")) {
    const json& o = j.at("output");
    reject_unknown_keys(o, {"dir", "pgm", "save_problem", "wall_time"}, "output");
    cfg.output.dir = get_or<std::string>(o, "dir", cfg.output.dir, "output");
    cfg.output.pgm = get_or<bool>(o, "pgm", cfg.output.pgm, "output");
    cfg.output.save_problem = get_or<bool>(o, "save_problem", cfg.output.save_problem, "output");
    cfg.output.wall_time = get_or<bool>(o, "wall_time", cfg.output.wall_time, "output");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_experiment_config(text.str());
}

ExperimentResult execute_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult out;
  out.problem = generate(cfg.problem);
  const TestProblem& p = out.problem;
  std::map<std::string, const SolverRun*> by_name;
  out.runs.reserve(cfg.solvers.size());  // keeps by_name pointers valid

  for (const auto& spec : cfg.solvers) {
    const TransformPtr psi = spec.use_transform ? p.psi : nullptr;
    double borrowed_lambda = std::numeric_limits<double>::quiet_NaN();
    if (!spec.lambda_from.empty()) borrowed_lambda = by_name.at(spec.lambda_from)->final_lambda;
    SolverRun run;
    switch (spec.family) {
      case SolverFamily::krylov: {
        SolverConfig c = spec.krylov;
        c.param.noise_norm = p.e.norm();
        c.x_true = p.x_true;
        c.transform = psi;
        c.record_wall_time = cfg.output.wall_time;
        run = run_krylov(p.a, p.b, c);
        break;
      }
      case SolverFamily::irn:
      case SolverFamily::pirn: {
        IrnConfig c = spec.irn;
        if (!spec.lambda_from.empty()) c.lambda = borrowed_lambda;
        c.x_true = p.x_true;
        c.transform = psi;
        c.record_wall_time = cfg.output.wall_time;
        run = spec.family == SolverFamily::irn ? run_irn(p.a, p.b, c) : run_pirn(p.a, p.b, c);
        break;
      }
      case SolverFamily::fista: {
        FistaConfig c = spec.fista;
        if (!spec.lambda_from.empty()) c.lambda = borrowed_lambda;
        if (!spec.budget_from.empty()) {
          const SolverRun& ref = *by_name.at(spec.budget_from);
          const std::int64_t budget = ref.records.empty() ? 2 : ref.records.back().matvecs;
          c.max_iterations = static_cast<int>(std::max<std::int64_t>(1, budget / 2));
        }
        c.x_true = p.x_true;
        c.transform = psi;
        c.record_wall_time = cfg.output.wall_time;
        run = run_fista(p.a, p.b, c);
        break;
      }
    }
    run.method = spec.family == SolverFamily::krylov ? to_string(spec.krylov.method) : run.method;
    out.runs.emplace_back(spec.name, std::move(run));
    by_name[spec.name] = &out.runs.back().second;
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult res = execute_experiment(cfg);
  const fs::path dir(cfg.output.dir);
  fs::create_directories(dir);
  const TestProblem& p = res.problem;
  const bool image = p.image_rows > 0;

  json summary;
  summary["schema_version"] = 1;
  summary["problem"] = detail::problem_spec_to_json(cfg.problem);
  summary["problem"]["rows"] = p.a->rows();
  summary["problem"]["cols"] = p.a->cols();
  summary["problem"]["noise_norm"] = p.e.norm();
  summary["problem"]["noise_rng"] = kNoiseRng;
  summary["solvers"] = json::array();

  for (const auto& [name, run] : res.runs) {
    std::ofstream csv(dir / (name + "_trace.csv"), std::ios::binary);
    if (!csv) throw ConfigError("cannot write trace for " + name);
    write_trace_csv(csv, run);

    json s;
    s["name"] = name;
    s["method"] = run.method;
    s["iterations"] = run.iterations();
    s["best_rel_err"] = number_or_null(run.best_rel_err);
    s["best_iteration"] = run.best_iteration;
    s["stop_reason"] = to_string(run.stop_reason);
    s["final_lambda"] = number_or_null(run.final_lambda);
    s["matvecs"] = run.records.empty() ? 0 : run.records.back().matvecs;
    if (!run.diagnostic.empty()) s["diagnostic"] = run.diagnostic;
    summary["solvers"].push_back(s);

    if (image && cfg.output.pgm) {
      const auto [lo, hi] = write_pgm(dir / (name + "_best.pgm"), run.x_best, p.image_rows, p.image_cols);
      json side{{"min", lo}, {"max", hi}, {"rows", p.image_rows}, {"cols", p.image_cols},
                {"scaling", "linear min-max to 0..255"}, {"iterate", run.best_iteration}};
      std::ofstream(dir / (name + "_best.pgm.json"), std::ios::binary) << side.dump(2) << "\n";
    }
  }
  if (image && cfg.output.pgm) {
    const auto [lo, hi] = write_pgm(dir / "x_true.pgm", p.x_true, p.image_rows, p.image_cols);
    json side{{"min", lo}, {"max", hi}, {"rows", p.image_rows}, {"cols", p.image_cols},
              {"scaling", "linear min-max to 0..255"}};
    std::ofstream(dir / "x_true.pgm.json", std::ios::binary) << side.dump(2) << "\n";
  }
  if (cfg.output.save_problem) save_problem(dir / "problem", p, cfg.problem);
  std::ofstream(dir / "summary.json", std::ios::binary) << summary.dump(2) << "\n";
  return res;
}

std::pair<double, double> write_pgm(const fs::path& path, const Vector& image, Index rows, Index cols) {
  if (image.size() != rows * cols || rows < 1) throw ConfigError("write_pgm: image shape mismatch");
  const double lo = image.minCoeff();
  const double hi = image.maxCoeff();
  const double span = hi > lo ? hi - lo : 1.0;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "P5\n" << cols << " " << rows << "\n255\n";
  for (Index i = 0; i < image.size(); ++i) {
    const long v = std::lround(255.0 * (image[i] - lo) / span);
    out.put(static_cast<char>(static_cast<unsigned char>(std::clamp(v, 0L, 255L))));
  }
  return {lo, hi};
}

std::string compare_report(const fs::path& dir) {
  struct Row {
    std::string name;
    double best = std::numeric_limits<double>::quiet_NaN();
    int iteration = 0;
    long long matvecs = 0;
  };
  if (!fs::is_directory(dir)) throw ConfigError("report: " + dir.string() + " is not a directory");
  const std::string suffix = "_trace.csv";
  std::vector<Row> rows;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string f = entry.path().filename().string();
    if (entry.is_regular_file() && f.size() > suffix.size() &&
        f.compare(f.size() - suffix.size(), suffix.size(), suffix) == 0) {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) throw ConfigError("report: no *_trace.csv files in " + dir.string());
  std::sort(files.begin(), files.end());

  for (const auto& path : files) {
    Row row;
    const std::string f = path.filename().string();
    row.name = f.substr(0, f.size() - suffix.size());
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      if (cells.size() != 7) throw ConfigError("report: malformed row in " + f);
      const double err = std::strtod(cells[4].c_str(), nullptr);
      if (std::isfinite(err) && (std::isnan(row.best) || err < row.best)) {
        row.best = err;
        row.iteration = std::stoi(cells[0]);
        row.matvecs = std::stoll(cells[5]);
      }
    }
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    const bool an = std::isnan(a.best);
    const bool bn = std::isnan(b.best);
    if (an != bn) return bn;
    if (!an && a.best != b.best) return a.best < b.best;
    return a.matvecs < b.matvecs;
  });

  std::ostringstream os;
  os << "| solver | best rel. error | iteration | matvecs |\n";
  os << "|---|---|---|---|\n";
  for (const auto& r : rows) {
    os << "| " << r.name << " | " << (std::isnan(r.best) ? std::string("n/a") : fmt(r.best)) << " | "
       << r.iteration << " | " << r.matvecs << " |\n";
  }
  return os.str();
}

}  // namespace flexkrylov
