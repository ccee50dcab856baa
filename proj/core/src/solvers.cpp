#include "flexkrylov/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <utility>

namespace flexkrylov {

namespace {

struct MethodEntry {
  Method method;
  const char* name;
  MethodTraits traits;
};

// {golub_kahan, lsmr_family, flexible, hybrid, qr_regularizer}
const MethodEntry kMethods[] = {
    {Method::lsqr, "lsqr", {true, false, false, false, false}},
    {Method::lsmr, "lsmr", {true, true, false, false, false}},
    {Method::flsqr, "flsqr", {true, false, true, false, false}},
    {Method::flsmr, "flsmr", {true, true, true, false, false}},
    {Method::flsqr_i, "flsqr_i", {true, false, true, true, false}},
    {Method::flsqr_r, "flsqr_r", {true, false, true, true, true}},
    {Method::flsmr_i, "flsmr_i", {true, true, true, true, false}},
    {Method::flsmr_r, "flsmr_r", {true, true, true, true, true}},
    {Method::gmres, "gmres", {false, false, false, false, false}},
    {Method::fgmres, "fgmres", {false, false, true, false, false}},
    {Method::gat, "gat", {false, false, true, true, false}},
};

const MethodEntry& entry(Method m) {
  for (const auto& e : kMethods) {
    if (e.method == m) return e;
  }
  throw ConfigError("unknown method");
}

/// Per-iteration lambda choice for the hybrid variants.
class LambdaSelector {
 public:
  LambdaSelector(const ParamPolicy& policy, bool hybrid, double beta1)
      : policy_(policy), hybrid_(hybrid), prev_(policy.initial_lambda(beta1)) {}

  bool needs_spectrum() const {
    return hybrid_ && policy_.kind != ParamKind::fixed;
  }

  double select(const std::function<double(double)>& data_residual,
                const std::function<double(double)>& derivative,
                const std::function<Vector(double)>& solve_x, const Vector& x_true) {
    if (!hybrid_) return 0.0;
    switch (policy_.kind) {
      case ParamKind::fixed:
        return policy_.fixed_lambda;
      case ParamKind::dp_exact:
        return solve_discrepancy(data_residual, derivative, policy_.discrepancy_target(),
                                 policy_.lambda_min, policy_.lambda_max);
      case ParamKind::dp_secant: {
        const double r_zero = data_residual(0.0);
        const double r_reg = data_residual(prev_);
        prev_ = select_dp_secant(prev_, r_reg, r_zero, policy_.noise_norm, policy_.eta,
                                 policy_.lambda_min, policy_.lambda_max);
        return prev_;
      }
      case ParamKind::optimal: {
        const auto grid = log_grid(policy_.lambda_min, policy_.lambda_max, policy_.grid_points);
        return select_optimal(grid, solve_x, x_true);
      }
    }
    return 0.0;
  }

 private:
  const ParamPolicy& policy_;
  bool hybrid_;
  double prev_;
};

/// L_k^{-1} for step k (1-based) from the previous coefficient iterate.
DiagonalOperator next_l_inverse(const SolverConfig& cfg, bool flexible, int k,
                                const Vector& s_prev) {
  if (!cfg.fixed_preconditioners.empty()) {
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(k - 1),
                                           cfg.fixed_preconditioners.size() - 1);
    return cfg.fixed_preconditioners[idx].inverse();
  }
  if (!flexible || k == 1) return DiagonalOperator::identity(s_prev.size());
  return build_weights(s_prev, cfg.weights).l_inverse;
}

struct Stagnation {
  int count = 0;
  bool update(const StopRule& rule, double change) {
    if (!(rule.stagnation_tol > 0.0)) return false;
    count = change < rule.stagnation_tol ? count + 1 : 0;
    return count >= rule.stagnation_window;
  }
};

void finalize(SolverRun& run) {
  if (run.x_best.size() == 0) {
    run.x_best = run.x;
    run.best_iteration = run.iterations();
  }
}

}  // namespace

MethodTraits traits(Method m) { return entry(m).traits; }

std::string to_string(Method m) { return entry(m).name; }

Method parse_method(const std::string& name) {
  std::string key = name;
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) {
    return c == '-' ? '_' : static_cast<char>(std::tolower(c));
  });
  for (const auto& e : kMethods) {
    if (key == e.name) return e.method;
  }
  throw ConfigError("unknown solver method '" + name + "'");
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = [] {
    std::vector<Method> v;
    for (const auto& e : kMethods) v.push_back(e.method);
    return v;
  }();
  return methods;
}

void SolverConfig::validate(const LinearOperator& a) const {
  const MethodTraits t = traits(method);
  if (stop.max_iterations < 1) throw ConfigError("solver config: max_iterations must be >= 1");
  if (stop.stagnation_window < 1) throw ConfigError("solver config: stagnation window must be >= 1");
  if (!t.golub_kahan && !a.is_square()) {
    throw ConfigError("solver config: " + to_string(method) + " requires a square operator");
  }
  weights.validate();
  if (t.hybrid) param.validate();
  if (t.hybrid && param.kind == ParamKind::optimal && x_true.size() == 0) {
    throw ConfigError("solver config: the optimal parameter policy needs x_true");
  }
  if (x_true.size() != 0 && x_true.size() != a.cols()) {
    throw ConfigError("solver config: x_true length does not match operator columns");
  }
  if (transform && transform->rows() != a.cols()) {
    throw ConfigError("solver config: transform length does not match operator columns");
  }
  if (data_transform && data_transform->rows() != a.rows()) {
    throw ConfigError("solver config: data transform length does not match operator rows");
  }
  for (const auto& l : fixed_preconditioners) {
    if (l.rows() != a.cols()) throw ConfigError("solver config: preconditioner size mismatch");
  }
}

// --- Golub-Kahan family -----------------------------------------------------

SolverRun run_flexible(OperatorPtr a, const Vector& b, const SolverConfig& cfg) {
  if (!a) throw ConfigError("run_flexible: null operator");
  const MethodTraits t = traits(cfg.method);
  if (!t.golub_kahan) throw ConfigError("run_flexible: " + to_string(cfg.method) + " is an Arnoldi method");
  cfg.validate(*a);
  if (b.size() != a->rows()) throw ConfigError("run_flexible: right-hand side length mismatch");

  SolverRun run;
  run.method = to_string(cfg.method);
  auto counter = std::make_shared<CountingOperator>(a);
  OperatorPtr op = cfg.transform ? conjugate_by_transform(counter, cfg.transform) : counter;
  auto to_x = [&](const Vector& s) { return cfg.transform ? cfg.transform->inverse(s) : s; };

  detail::RunRecorder rec(run, &cfg.x_true, cfg.record_wall_time, cfg.keep_iterates);
  FgkState state = FgkState::init(op, b);
  const double beta1 = state.beta1();
  LambdaSelector selector(cfg.param, t.hybrid, beta1);
  IncrementalQr qr;
  Stagnation stagnation;
  Vector s_prev = Vector::Zero(op->cols());
  const double eta_eps = cfg.param.discrepancy_target();

  if (!state.can_expand()) {
    run.stop_reason = StopReason::breakdown;
    run.diagnostic = "A^T b = 0";
    run.x = Vector::Zero(a->cols());
    finalize(run);
    return run;
  }

  for (int k = 1; k <= cfg.stop.max_iterations; ++k) {
    const DiagonalOperator l_inverse = next_l_inverse(cfg, t.flexible, k, s_prev);
    const Breakdown bd = state.expand(l_inverse);
    if (t.qr_regularizer && !qr.append(state.z(k - 1))) {
      run.stop_reason = StopReason::breakdown;
      run.diagnostic = "solution basis Z_k lost rank";
      break;
    }

    const Matrix m = state.m_matrix();
    const Matrix tm = t.lsmr_family ? Matrix(state.t_matrix() * m) : Matrix();
    ProjectedProblem p;
    p.coeff = t.lsmr_family ? tm : m;
    p.beta = t.lsmr_family ? beta1 * state.t11() : beta1;
    if (t.qr_regularizer) p.reg = qr.r_matrix();

    double lambda = 0.0;
    if (t.hybrid) {
      if (selector.needs_spectrum()) {
        const SpectralTikhonov spec(p);
        auto solve_x = [&](double l) { return to_x(state.combine(spec.solve(l))); };
        if (!t.lsmr_family) {
          lambda = selector.select([&](double l) { return spec.residual(l); },
                                   [&](double l) { return spec.residual_derivative(l); }, solve_x,
                                   cfg.x_true);
        } else {
          const Matrix g = spec.map_through(m);
          Vector e1 = Vector::Zero(m.rows());
          e1[0] = beta1;
          lambda = selector.select(
              [&](double l) { return (g * spec.filtered_coefficients(l) - e1).norm(); }, {},
              solve_x, cfg.x_true);
        }
      } else {
        lambda = selector.select({}, {}, {}, cfg.x_true);
      }
    }

    const TikhonovSolution sol = tikhonov_projected(p, lambda);
    const Vector s = state.combine(sol.y);
    Vector e1 = Vector::Zero(m.rows());
    e1[0] = beta1;
    const Vector fit = m * sol.y - e1;
    const double res = fit.norm();
    const double ne = (state.t_matrix() * fit).norm();
    const double change = rec.record(to_x(s), lambda, res, ne, counter->total_count());
    s_prev = s;

    if (bd != Breakdown::none) {
      run.stop_reason = StopReason::breakdown;
      run.diagnostic = bd == Breakdown::residual_space ? "A z_k in span(U_k)" : "A^T u_{k+1} in span(V_k)";
      break;
    }
    if (cfg.stop.discrepancy && eta_eps > 0.0 && res <= eta_eps * (1.0 + 1e-8)) {
      run.stop_reason = StopReason::discrepancy;
      break;
    }
    if (stagnation.update(cfg.stop, change)) {
      run.stop_reason = StopReason::stagnation;
      break;
    }
  }
  if (run.x.size() == 0) run.x = Vector::Zero(a->cols());
  finalize(run);
  return run;
}

// --- Arnoldi family ---------------------------------------------------------

SolverRun run_gat(OperatorPtr a, const Vector& b, const SolverConfig& cfg) {
  if (!a) throw ConfigError("run_gat: null operator");
  const MethodTraits t = traits(cfg.method);
  if (t.golub_kahan) throw ConfigError("run_gat: " + to_string(cfg.method) + " is a Golub-Kahan method");
  cfg.validate(*a);
  if (b.size() != a->rows()) throw ConfigError("run_gat: right-hand side length mismatch");

  SolverRun run;
  run.method = to_string(cfg.method);
  auto counter = std::make_shared<CountingOperator>(a);
  const TransformPtr data_psi = cfg.data_transform ? cfg.data_transform : cfg.transform;
  OperatorPtr op = cfg.transform ? conjugate_by_transform(counter, cfg.transform, data_psi) : counter;
  const Vector d = (cfg.transform && data_psi) ? data_psi->forward(b) : b;
  auto to_x = [&](const Vector& s) { return cfg.transform ? cfg.transform->inverse(s) : s; };

  detail::RunRecorder rec(run, &cfg.x_true, cfg.record_wall_time, cfg.keep_iterates);
  ArnoldiState state = ArnoldiState::init(op, d);
  const double r0 = state.r0_norm();
  LambdaSelector selector(cfg.param, t.hybrid, r0);
  Stagnation stagnation;
  Vector s_prev = Vector::Zero(op->cols());
  const double eta_eps = cfg.param.discrepancy_target();

  for (int k = 1; k <= cfg.stop.max_iterations; ++k) {
    const DiagonalOperator l_inverse = next_l_inverse(cfg, t.flexible, k, s_prev);
    const bool happy = state.expand(l_inverse);

    ProjectedProblem p;
    p.coeff = state.h_matrix();
    p.beta = r0;

    double lambda = 0.0;
    if (t.hybrid) {
      if (selector.needs_spectrum()) {
        const SpectralTikhonov spec(p);
        auto solve_x = [&](double l) { return to_x(state.combine(spec.solve(l))); };
        lambda = selector.select([&](double l) { return spec.residual(l); },
                                 [&](double l) { return spec.residual_derivative(l); }, solve_x,
                                 cfg.x_true);
      } else {
        lambda = selector.select({}, {}, {}, cfg.x_true);
      }
    }

    const TikhonovSolution sol = tikhonov_projected(p, lambda);
    const Vector s = state.combine(sol.y);
    const double change = rec.record(to_x(s), lambda, sol.residual,
                                     std::numeric_limits<double>::quiet_NaN(),
                                     counter->total_count());
    s_prev = s;

    if (happy) {
      run.stop_reason = StopReason::breakdown;
      run.diagnostic = "happy breakdown";
      break;
    }
    if (cfg.stop.discrepancy && eta_eps > 0.0 && sol.residual <= eta_eps * (1.0 + 1e-8)) {
      run.stop_reason = StopReason::discrepancy;
      break;
    }
    if (stagnation.update(cfg.stop, change)) {
      run.stop_reason = StopReason::stagnation;
      break;
    }
  }
  finalize(run);
  return run;
}

SolverRun run_krylov(OperatorPtr a, const Vector& b, const SolverConfig& cfg) {
  return traits(cfg.method).golub_kahan ? run_flexible(std::move(a), b, cfg)
                                        : run_gat(std::move(a), b, cfg);
}

double verify_flsmr_fgmres_equivalence(OperatorPtr a, const Vector& b,
                                       const std::vector<DiagonalOperator>& preconditioners,
                                       int k) {
  if (!a) throw ConfigError("verify_flsmr_fgmres_equivalence: null operator");
  if (k < 1) throw ConfigError("verify_flsmr_fgmres_equivalence: k must be >= 1");
  if (preconditioners.empty()) {
    throw ConfigError("verify_flsmr_fgmres_equivalence: empty preconditioner sequence");
  }
  SolverConfig cfg;
  cfg.stop.max_iterations = k;
  cfg.stop.stagnation_tol = 0.0;
  cfg.keep_iterates = true;
  cfg.fixed_preconditioners = preconditioners;

  cfg.method = Method::flsmr;
  const SolverRun lsmr = run_flexible(a, b, cfg);

  cfg.method = Method::fgmres;
  const OperatorPtr normal = compose({adjoint(a), a});
  const SolverRun gmres = run_gat(normal, a->apply_adjoint(b), cfg);

  const std::size_t common = std::min(lsmr.iterates.size(), gmres.iterates.size());
  double worst = 0.0;
  for (std::size_t j = 0; j < common; ++j) {
    const double nx = lsmr.iterates[j].norm();
    const double diff = (lsmr.iterates[j] - gmres.iterates[j]).norm();
    worst = std::max(worst, nx > 0.0 ? diff / nx : diff);
  }
  return worst;
}

}  // namespace flexkrylov
