#include "flexkrylov/run.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace flexkrylov {

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::max_iterations:
      return "max_iterations";
    case StopReason::breakdown:
      return "breakdown";
    case StopReason::stagnation:
      return "stagnation";
    case StopReason::discrepancy:
      return "discrepancy";
    case StopReason::diverged:
      return "diverged";
    case StopReason::inner_not_converged:
      return "inner_not_converged";
  }
  return "unknown";
}

namespace {

void put_real(std::ostream& os, double v) {
  char buf[40];
  if (std::isnan(v)) {
    os << "nan";
    return;
  }
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

}  // namespace

void write_trace_csv(std::ostream& os, const SolverRun& run) {
  os << "iter,lambda,res_norm,ne_res_norm,rel_err,matvecs,wall_ms\n";
  for (const auto& r : run.records) {
    os << r.iteration << ',';
    put_real(os, r.lambda);
    os << ',';
    put_real(os, r.res_norm);
    os << ',';
    put_real(os, r.ne_res_norm);
    os << ',';
    put_real(os, r.rel_err);
    os << ',' << r.matvecs << ',';
    put_real(os, r.wall_ms);
    os << '\n';
  }
}

namespace detail {

RunRecorder::RunRecorder(SolverRun& run, const Vector* x_true, bool wall_time, bool keep_iterates)
    : run_(run),
      x_true_(x_true && x_true->size() ? x_true : nullptr),
      wall_time_(wall_time),
      keep_iterates_(keep_iterates),
      start_(std::chrono::steady_clock::now()) {
  if (x_true_) x_true_norm_ = x_true_->norm();
}

double RunRecorder::record(const Vector& x, double lambda, double res_norm, double ne_res_norm,
                           std::int64_t matvecs) {
  if (!x.allFinite() || !std::isfinite(lambda)) {
    throw NumericalError(run_.method + ": non-finite iterate at iteration " +
                         std::to_string(run_.records.size() + 1));
  }
  IterationRecord rec;
  rec.iteration = static_cast<int>(run_.records.size()) + 1;
  rec.lambda = lambda;
  rec.res_norm = res_norm;
  rec.ne_res_norm = ne_res_norm;
  rec.matvecs = matvecs;
  if (wall_time_) {
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                            start_)
                      .count();
  }
  if (x_true_) {
    rec.rel_err = x_true_norm_ > 0.0 ? (x - *x_true_).norm() / x_true_norm_ : (x - *x_true_).norm();
    if (std::isnan(run_.best_rel_err) || rec.rel_err < run_.best_rel_err) {
      run_.best_rel_err = rec.rel_err;
      run_.best_iteration = rec.iteration;
      run_.x_best = x;
    }
  }
  run_.records.push_back(rec);
  run_.x = x;
  run_.final_lambda = lambda;
  if (keep_iterates_) run_.iterates.push_back(x);

  double change = std::numeric_limits<double>::infinity();
  if (prev_.size() == x.size()) {
    const double nx = x.norm();
    change = nx > 0.0 ? (x - prev_).norm() / nx : (x - prev_).norm();
  }
  prev_ = x;
  return change;
}

}  // namespace detail

}  // namespace flexkrylov
