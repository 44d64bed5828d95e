#include "aeg/solvers.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "aeg/analysis.hpp"

namespace aeg {

Method parse_method(std::string_view name) {
  if (name == "geag") return Method::GEAG;
  if (name == "eg") return Method::EG;
  if (name == "eag-c") return Method::EAG_C;
  if (name == "eag-v") return Method::EAG_V;
  if (name == "feg") return Method::FEG;
  if (name == "apv") return Method::APV;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::GEAG: return "geag";
    case Method::EG: return "eg";
    case Method::EAG_C: return "eag-c";
    case Method::EAG_V: return "eag-v";
    case Method::FEG: return "feg";
    case Method::APV: return "apv";
  }
  return "?";
}

double default_theta(Method m, double L) {
  if (!(L > 0.0)) return 1.0;
  switch (m) {
    case Method::GEAG:
    case Method::EG: return 0.99 / L;
    case Method::EAG_C: return 1.0 / (8.0 * L);
    case Method::EAG_V: return 0.5 / L;
    case Method::FEG: return 1.0 / L;
    case Method::APV: return 0.9 / (2.0 * L * std::sqrt(3.0));
  }
  return 1.0;
}

std::string stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::Budget: return "budget";
    case StopReason::ResidualThreshold: return "residual-threshold";
    case StopReason::Nonfinite: return "nonfinite";
  }
  return "?";
}

double method_eps(const SolverConfig& cfg, long long k) {
  switch (cfg.method) {
    case Method::GEAG: return eps_at(cfg.schedule, k, cfg.theta);
    case Method::EG: return 0.0;
    case Method::EAG_C:
    case Method::EAG_V:
    case Method::APV: return 1.0 / static_cast<double>(k + 2);
    case Method::FEG: return 1.0 / static_cast<double>(k + 1);
  }
  return 0.0;
}

SolverState step_geag(const SolverState& state, const ProblemInstance& problem,
                      const SolverConfig& cfg) {
  const double theta = cfg.theta;
  const double a0 = theta * eps_at(cfg.schedule, state.k, theta);      // theta eps^k
  const double a1 = theta * eps_at(cfg.schedule, state.k + 1, theta);  // theta eps^{k+1}

  SolverState next = state;
  const Vector Mx = problem.evaluator(state.x);
  // With eps = 0 both lines reduce to the plain extra-gradient update; take
  // the same arithmetic path so the two methods agree exactly.
  const Vector y = (a0 == 0.0) ? Vector(state.x - theta * Mx)
                               : Vector(state.x - a0 * (state.x - cfg.anchor) - theta * Mx);
  const Vector My = problem.evaluator(y);
  next.x = (a1 == 0.0)
               ? Vector(state.x - theta * My)
               : Vector((state.x + a1 * cfg.anchor - theta * My) / (1.0 + a1));
  next.k = state.k + 1;
  next.operator_evals = state.operator_evals + 2;
  return next;
}

SolverState step_eg(const SolverState& state, const ProblemInstance& problem,
                    const SolverConfig& cfg) {
  const double theta = cfg.theta;
  SolverState next = state;
  const Vector Mx = problem.evaluator(state.x);
  const Vector y = state.x - theta * Mx;
  const Vector My = problem.evaluator(y);
  next.x = state.x - theta * My;
  next.k = state.k + 1;
  next.operator_evals = state.operator_evals + 2;
  return next;
}

SolverState step_eag(const SolverState& state, const ProblemInstance& problem,
                     const SolverConfig& cfg, EagPolicy policy) {
  const double e = 1.0 / static_cast<double>(state.k + 2);
  const double theta = state.step;

  SolverState next = state;
  const Vector anchored = state.x - e * (state.x - cfg.anchor);
  const Vector Mx = problem.evaluator(state.x);
  const Vector y = anchored - theta * Mx;
  const Vector My = problem.evaluator(y);
  next.x = anchored - theta * My;
  next.k = state.k + 1;
  next.operator_evals = state.operator_evals + 2;

  if (policy == EagPolicy::Variable) {
    const double tl2 = theta * theta * problem.lipschitz * problem.lipschitz;
    const double denom = 1.0 - tl2;
    if (!(denom > 0.0)) {
      std::ostringstream msg;
      msg << "eag-v: step recursion denominator 1 - (theta^k L)^2 <= 0 at k = " << state.k;
      throw std::invalid_argument(msg.str());
    }
    const double kd = static_cast<double>(state.k);
    next.step = theta * (1.0 - tl2 / ((kd + 1.0) * (kd + 2.0) * denom));
  }
  return next;
}

SolverState step_feg(const SolverState& state, const ProblemInstance& problem,
                     const SolverConfig& cfg) {
  const double L = problem.lipschitz;
  if (!(L > 0.0)) throw std::invalid_argument("feg: problem must declare a positive Lipschitz constant");
  const double kd = static_cast<double>(state.k);
  const double e = 1.0 / (kd + 1.0);
  const double eta = (1.0 - 1.0 / (kd + 1.0)) / L;  // 0 at k = 0

  SolverState next = state;
  const Vector anchored = state.x - e * (state.x - cfg.anchor);
  const Vector Mx = problem.evaluator(state.x);
  const Vector y = anchored - eta * Mx;
  const Vector My = problem.evaluator(y);
  next.x = anchored - (1.0 / L) * My;
  next.k = state.k + 1;
  next.operator_evals = state.operator_evals + 2;
  return next;
}

SolverState step_apv(const SolverState& state, const ProblemInstance& problem,
                     const SolverConfig& cfg) {
  if (!state.aux || !state.aux_m)
    throw std::logic_error("apv: state not initialized (missing warm-up y^0 / M(y^0))");
  const double e = 1.0 / static_cast<double>(state.k + 2);
  const double e1 = 1.0 / static_cast<double>(state.k + 3);
  const double theta = state.step;

  SolverState next = state;
  const Vector anchored = state.x - e * (state.x - cfg.anchor);
  const Vector y = anchored - theta * (*state.aux_m);  // reuses M(y^k)
  const Vector My = problem.evaluator(y);              // the one fresh evaluation
  next.x = anchored - theta * My;
  next.aux = y;
  next.aux_m = My;
  next.k = state.k + 1;
  next.operator_evals = state.operator_evals + 1;

  const double Kc = 4.0 * problem.lipschitz * problem.lipschitz;
  const double kt2 = Kc * theta * theta;
  const double denom = (1.0 - kt2) * (1.0 - e) * e;
  const double numer = (1.0 - e * e - kt2) * e1 * theta;
  if (!(denom > 0.0) || !(numer > 0.0)) {
    std::ostringstream msg;
    msg << "apv: step recursion became nonpositive at k = " << state.k;
    throw std::invalid_argument(msg.str());
  }
  next.step = numer / denom;
  return next;
}

void validate_config(const SolverConfig& cfg, const ProblemInstance& problem) {
  if (cfg.x0.size() != problem.dim || cfg.anchor.size() != problem.dim)
    throw std::invalid_argument("solver config: x0/anchor dimension does not match the problem");
  if (!cfg.x0.allFinite() || !cfg.anchor.allFinite())
    throw std::invalid_argument("solver config: x0/anchor must be finite");
  if (cfg.max_iters < 0) throw std::invalid_argument("solver config: max_iters must be >= 0");
  if (cfg.record_stride < 1) throw std::invalid_argument("solver config: record_stride must be >= 1");
  if (cfg.stop_residual < 0.0)
    throw std::invalid_argument("solver config: stop_residual must be nonnegative");

  const double L = problem.lipschitz;
  const double theta = cfg.theta;
  switch (cfg.method) {
    case Method::GEAG:
    case Method::EG:
    case Method::EAG_V:
      if (!(theta > 0.0) || !(theta * L < 1.0))
        throw std::invalid_argument(method_name(cfg.method) +
                                    ": step size must satisfy 0 < theta L < 1");
      break;
    case Method::EAG_C:
      if (!(theta > 0.0) || (L > 0.0 && theta > 1.0 / (8.0 * L)))
        throw std::invalid_argument("eag-c: step size must satisfy 0 < theta <= 1/(8L)");
      break;
    case Method::APV:
      if (!(theta > 0.0) || (L > 0.0 && !(theta < 1.0 / (2.0 * L * std::sqrt(3.0)))))
        throw std::invalid_argument("apv: step size must satisfy 0 < theta < 1/(2 L sqrt(3))");
      break;
    case Method::FEG:
      if (!(L > 0.0)) throw std::invalid_argument("feg: problem must declare a positive Lipschitz constant");
      break;
  }
}

SolverState init_state(const SolverConfig& cfg, const ProblemInstance& problem) {
  SolverState s;
  s.x = cfg.x0;
  s.step = (cfg.method == Method::FEG && problem.lipschitz > 0.0) ? 1.0 / problem.lipschitz
                                                                  : cfg.theta;
  if (cfg.method == Method::APV) {
    s.aux = cfg.x0;  // warm-up y^0 = x^0
    s.aux_m = problem.evaluator(cfg.x0);
    s.operator_evals = 1;
  }
  return s;
}

namespace {

SolverState step_dispatch(const SolverState& state, const ProblemInstance& problem,
                          const SolverConfig& cfg) {
  switch (cfg.method) {
    case Method::GEAG: return step_geag(state, problem, cfg);
    case Method::EG: return step_eg(state, problem, cfg);
    case Method::EAG_C: return step_eag(state, problem, cfg, EagPolicy::Constant);
    case Method::EAG_V: return step_eag(state, problem, cfg, EagPolicy::Variable);
    case Method::FEG: return step_feg(state, problem, cfg);
    case Method::APV: return step_apv(state, problem, cfg);
  }
  throw std::logic_error("unreachable method");
}

}  // namespace

Trace run(const SolverConfig& cfg, const ProblemInstance& problem) {
  validate_config(cfg, problem);
  const std::optional<Vector> target = min_norm_target(problem, cfg.anchor);

  SolverState state = init_state(cfg, problem);
  Trace trace;
  trace.rows.reserve(static_cast<std::size_t>(cfg.max_iters / cfg.record_stride) + 2);

  // Diagnostic row for the iterate x^k; evaluations here do not enter the
  // method's operator_evals counter.
  auto record = [&](const SolverState& s) -> double {
    const Vector Mx = problem.evaluator(s.x);
    const double e = method_eps(cfg, s.k);
    TraceRow row;
    row.k = static_cast<double>(s.k);
    row.eps = e;
    row.residual = Mx.norm();
    row.psi = 0.5 * (Mx + e * (s.x - cfg.anchor)).squaredNorm();
    if (target) row.dist = (s.x - *target).norm();
    row.step = s.step;
    trace.rows.push_back(std::move(row));
    return trace.rows.back().residual;
  };

  const double r0 = record(state);
  if (cfg.stop_residual > 0.0 && r0 <= cfg.stop_residual) {
    trace.reason = StopReason::ResidualThreshold;
    trace.iterations = 0;
    trace.final_x = state.x;
    return trace;
  }

  trace.reason = StopReason::Budget;
  for (long long k = 0; k < cfg.max_iters; ++k) {
    state = step_dispatch(state, problem, cfg);
    if (!state.x.allFinite()) {
      record(state);  // flagged row; values may be nonfinite
      trace.reason = StopReason::Nonfinite;
      break;
    }
    const bool at_stride = (state.k % cfg.record_stride) == 0;
    const bool at_end = (state.k == cfg.max_iters);
    if (at_stride || at_end) {
      const double res = record(state);
      // Residuals are only sampled at recorded rows; no extra evaluations
      // between strides.
      if (cfg.stop_residual > 0.0 && res <= cfg.stop_residual) {
        trace.reason = StopReason::ResidualThreshold;
        break;
      }
    }
  }

  trace.iterations = state.k;
  trace.final_x = state.x;
  return trace;
}

}  // namespace aeg
