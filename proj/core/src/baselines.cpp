#include "flexkrylov/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

namespace flexkrylov {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_common(const LinearOperator& a, const Vector& x_true, const TransformPtr& psi,
                  const char* who) {
  if (x_true.size() != 0 && x_true.size() != a.cols()) {
    throw ConfigError(std::string(who) + ": x_true length does not match operator columns");
  }
  if (psi && psi->rows() != a.cols()) {
    throw ConfigError(std::string(who) + ": transform length does not match operator columns");
  }
}

enum class IrnForm { general, standard };

SolverRun run_reweighted(OperatorPtr a, const Vector& b, const IrnConfig& cfg, IrnForm form) {
  if (!a) throw ConfigError("irn: null operator");
  cfg.validate(*a);
  if (b.size() != a->rows()) throw ConfigError("irn: right-hand side length mismatch");

  SolverRun run;
  run.method = form == IrnForm::general ? "irn" : "pirn";
  auto counter = std::make_shared<CountingOperator>(a);
  const Index m = a->rows();
  const Index n = a->cols();
  const double root_lambda = std::sqrt(cfg.lambda);
  detail::RunRecorder rec(run, &cfg.x_true, cfg.record_wall_time, cfg.keep_iterates);

  Vector rhs = Vector::Zero(m + n);
  rhs.head(m) = b;
  Vector x = Vector::Zero(n);
  bool inner_failed = false;

  for (int k = 1; k <= cfg.outer_iterations; ++k) {
    const Vector coeffs = cfg.transform ? cfg.transform->forward(x) : x;
    const WeightPair w = k == 1 ? WeightPair{DiagonalOperator::identity(n),
                                             DiagonalOperator::identity(n)}
                                : build_weights(coeffs, cfg.weights);
    CglsResult inner;
    if (form == IrnForm::general) {
      OperatorPtr reg = std::make_shared<DiagonalOperator>(w.l);
      if (cfg.transform) reg = compose({reg, cfg.transform});
      const OperatorPtr aug = stack(counter, scale(reg, root_lambda));
      inner = cgls(*aug, rhs, x, cfg.inner_iterations, cfg.inner_tol);
      x = inner.x;
    } else {
      // x = Psi^T L^{-1} xhat
      OperatorPtr back = std::make_shared<DiagonalOperator>(w.l_inverse);
      if (cfg.transform) back = compose({adjoint(cfg.transform), back});
      const OperatorPtr aug =
          stack(compose({counter, back}), scale(std::make_shared<IdentityOperator>(n), root_lambda));
      const Vector xhat0 = w.l.apply(coeffs);
      inner = cgls(*aug, rhs, xhat0, cfg.inner_iterations, cfg.inner_tol);
      x = back->apply(inner.x);
    }
    if (cfg.inner_tol > 0.0 && !inner.converged) {
      inner_failed = true;
      run.diagnostic = "inner CGLS missed its tolerance at outer iteration " + std::to_string(k);
    }
    rec.record(x, cfg.lambda, inner.residual.head(m).norm(), kNaN, counter->total_count());
  }
  if (inner_failed) run.stop_reason = StopReason::inner_not_converged;
  if (run.x.size() == 0) run.x = x;
  if (run.x_best.size() == 0) {
    run.x_best = run.x;
    run.best_iteration = run.iterations();
  }
  return run;
}

}  // namespace

void IrnConfig::validate(const LinearOperator& a) const {
  if (outer_iterations < 1) throw ConfigError("irn config: outer iterations must be >= 1");
  if (inner_iterations < 1) throw ConfigError("irn config: inner iterations must be >= 1");
  if (!(inner_tol >= 0.0)) throw ConfigError("irn config: inner tolerance must be nonnegative");
  if (!(lambda >= 0.0)) throw ConfigError("irn config: lambda must be nonnegative");
  weights.validate();
  check_common(a, x_true, transform, "irn config");
}

void FistaConfig::validate(const LinearOperator& a) const {
  if (!(lambda >= 0.0)) throw ConfigError("fista config: lambda must be nonnegative");
  if (max_iterations < 1) throw ConfigError("fista config: max iterations must be >= 1");
  if (!(step >= 0.0) || !std::isfinite(step)) throw ConfigError("fista config: step must be >= 0");
  if (power_iterations < 1) throw ConfigError("fista config: power iterations must be >= 1");
  check_common(a, x_true, transform, "fista config");
}

CglsResult cgls(const LinearOperator& k, const Vector& rhs, const Vector& x0, int max_iterations,
                double tol) {
  if (rhs.size() != k.rows() || x0.size() != k.cols()) {
    throw ConfigError("cgls: dimension mismatch");
  }
  CglsResult out;
  Vector x = x0;
  Vector r = x0.isZero(0.0) ? rhs : Vector(rhs - k.apply(x0));
  Vector s = k.apply_adjoint(r);
  Vector p = s;
  double gamma = s.squaredNorm();
  const double g0 = std::sqrt(gamma);
  const double stop = tol * g0;

  out.x = x;
  out.residual = r;
  if (gamma == 0.0) {
    out.converged = true;
    return out;
  }
  // ||K x - rhs|| decreases monotonically, so the last iterate is normally
  // the one to keep. Near roundoff level the recursive residual drifts and
  // the iteration can diverge; there the iterate with the smallest ||K^T r||
  // is remembered and returned once ||K^T r|| has grown well past it.
  const double late = 1e-6 * g0;
  double best = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iterations; ++it) {
    const Vector q = k.apply(p);
    const double qq = q.squaredNorm();
    if (!(qq > 0.0)) break;
    const double alpha = gamma / qq;
    x += alpha * p;
    r -= alpha * q;
    s = k.apply_adjoint(r);
    const double gamma_next = s.squaredNorm();
    const double sn = std::sqrt(gamma_next);
    if (!std::isfinite(sn) || sn > 100.0 * best) break;
    out.iterations = it;
    if (sn > late || sn <= best) {
      out.x = x;
      out.residual = r;
      if (sn <= late) best = sn;
    }
    if (sn <= stop) {
      out.converged = true;
      break;
    }
    p = s + (gamma_next / gamma) * p;
    gamma = gamma_next;
  }
  return out;
}

Vector soft_threshold(const Vector& t, double gamma) {
  Vector out(t.size());
  for (Index i = 0; i < t.size(); ++i) {
    const double mag = std::abs(t[i]) - gamma;
    out[i] = mag > 0.0 ? std::copysign(mag, t[i]) : 0.0;
  }
  return out;
}

SolverRun run_irn(OperatorPtr a, const Vector& b, const IrnConfig& cfg) {
  return run_reweighted(std::move(a), b, cfg, IrnForm::general);
}

SolverRun run_pirn(OperatorPtr a, const Vector& b, const IrnConfig& cfg) {
  return run_reweighted(std::move(a), b, cfg, IrnForm::standard);
}

double fista_objective(const LinearOperator& a, const Vector& b, const Vector& x, double lambda,
                       const OrthonormalTransform* psi) {
  const Vector s = psi ? psi->forward(x) : x;
  return 0.5 * (a.apply(x) - b).squaredNorm() + lambda * s.lpNorm<1>();
}

SolverRun run_fista(OperatorPtr a, const Vector& b, const FistaConfig& cfg) {
  if (!a) throw ConfigError("fista: null operator");
  cfg.validate(*a);
  if (b.size() != a->rows()) throw ConfigError("fista: right-hand side length mismatch");

  SolverRun run;
  run.method = "fista";
  auto counter = std::make_shared<CountingOperator>(a);
  // Iterate on s = Psi x so the prox is plain soft thresholding.
  const OperatorPtr h = cfg.transform ? conjugate_by_transform(counter, cfg.transform) : counter;
  auto to_x = [&](const Vector& s) { return cfg.transform ? cfg.transform->inverse(s) : s; };

  double step = cfg.step;
  if (step == 0.0) {
    const OperatorPtr plain = cfg.transform ? conjugate_by_transform(a, cfg.transform) : a;
    const double sigma = 1.02 * estimate_norm(*plain, cfg.power_iterations, cfg.seed);
    if (!(sigma > 0.0)) throw NumericalError("fista: operator norm estimate is zero");
    step = 1.0 / (sigma * sigma);
  }
  const double gamma = cfg.lambda * step;

  detail::RunRecorder rec(run, &cfg.x_true, cfg.record_wall_time, cfg.keep_iterates);
  const Index n = h->cols();
  Vector s = Vector::Zero(n);
  Vector hs = Vector::Zero(b.size());
  Vector y = s;
  Vector hy = hs;
  double t = 1.0;
  const double f0 = 0.5 * b.squaredNorm();

  for (int k = 1; k <= cfg.max_iterations; ++k) {
    const Vector grad = h->apply_adjoint(hy - b);
    const Vector s_next = soft_threshold(y - step * grad, gamma);
    const Vector hs_next = h->apply(s_next);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / t_next;
    y = s_next + beta * (s_next - s);
    hy = hs_next + beta * (hs_next - hs);
    s = s_next;
    hs = hs_next;
    t = t_next;

    const double res = (hs - b).norm();
    rec.record(to_x(s), cfg.lambda, res, kNaN, counter->total_count());
    const double f = 0.5 * res * res + cfg.lambda * s.lpNorm<1>();
    if (f > 10.0 * f0) {
      run.stop_reason = StopReason::diverged;
      run.diagnostic = "objective grew past 10x its starting value; step too large?";
      break;
    }
  }
  if (run.x_best.size() == 0) {
    run.x_best = run.x;
    run.best_iteration = run.iterations();
  }
  return run;
}

}  // namespace flexkrylov
