#ifndef FLEXKRYLOV_RUN_HPP
#define FLEXKRYLOV_RUN_HPP

#include "flexkrylov/common.hpp"

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace flexkrylov {

enum class StopReason {
  max_iterations,
  breakdown,
  stagnation,
  discrepancy,
  diverged,
  inner_not_converged,
};

std::string to_string(StopReason reason);

/// One row of a solver trace. Quantities a method cannot produce without extra
/// operator applications are NaN.
struct IterationRecord {
  int iteration = 0;
  double lambda = 0.0;
  double res_norm = std::numeric_limits<double>::quiet_NaN();     ///< ||A x_k - b||
  double ne_res_norm = std::numeric_limits<double>::quiet_NaN();  ///< ||A^T (A x_k - b)||
  double rel_err = std::numeric_limits<double>::quiet_NaN();      ///< ||x_k - x_true|| / ||x_true||
  std::int64_t matvecs = 0;  ///< cumulative products with A and A^T
  double wall_ms = 0.0;
};

struct SolverRun {
  std::string method;
  std::vector<IterationRecord> records;
  Vector x;  ///< final iterate, in the original (pixel) domain
  Vector x_best;
  int best_iteration = 0;
  double best_rel_err = std::numeric_limits<double>::quiet_NaN();
  double final_lambda = 0.0;
  StopReason stop_reason = StopReason::max_iterations;
  std::string diagnostic;
  std::vector<Vector> iterates;  ///< filled only when requested

  int iterations() const noexcept { return static_cast<int>(records.size()); }
};

/// CSV with header `iter,lambda,res_norm,ne_res_norm,rel_err,matvecs,wall_ms`;
/// reals printed with 17 significant digits.
void write_trace_csv(std::ostream& os, const SolverRun& run);

namespace detail {

/// Shared bookkeeping for iteration drivers: records, best iterate, timing.
class RunRecorder {
 public:
  RunRecorder(SolverRun& run, const Vector* x_true, bool wall_time, bool keep_iterates);

  /// Appends a record for iterate x and returns the relative change
  /// ||x - x_prev|| / ||x|| (infinity for the first iterate).
  double record(const Vector& x, double lambda, double res_norm, double ne_res_norm,
                std::int64_t matvecs);

 private:
  SolverRun& run_;
  const Vector* x_true_;
  double x_true_norm_ = 0.0;
  bool wall_time_;
  bool keep_iterates_;
  std::chrono::steady_clock::time_point start_;
  Vector prev_;
};

}  // namespace detail

}  // namespace flexkrylov

#endif  // FLEXKRYLOV_RUN_HPP
