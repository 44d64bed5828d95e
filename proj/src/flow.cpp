#include "aeg/flow.hpp"

#include <cmath>
#include <stdexcept>

#include "aeg/analysis.hpp"

namespace aeg {

Trace integrate_flow(const FlowConfig& cfg, const ProblemInstance& problem) {
  if (cfg.x0.size() != problem.dim || cfg.anchor.size() != problem.dim)
    throw std::invalid_argument("flow config: x0/anchor dimension does not match the problem");
  if (!cfg.x0.allFinite() || !cfg.anchor.allFinite())
    throw std::invalid_argument("flow config: x0/anchor must be finite");
  if (!(cfg.t0 > 0.0) || !(cfg.t_end > cfg.t0))
    throw std::invalid_argument("flow config: need 0 < t0 < t_end");
  const double eps0 = eps_time(cfg.eps, cfg.t0);
  const double h_max = 0.1 / (problem.lipschitz + eps0);
  if (!(cfg.step_h > 0.0) || cfg.step_h > h_max)
    throw std::invalid_argument("flow config: step_h must lie in (0, 0.1/(L + eps(t0))]");

  const double span = cfg.t_end - cfg.t0;
  const long long total_steps =
      static_cast<long long>(std::ceil(span / cfg.step_h - 1e-12));
  // Target roughly 10^3 rows, never more than 10^4.
  long long stride = static_cast<long long>(std::ceil(span / (cfg.step_h * 1e3)));
  stride = std::max<long long>(stride, (total_steps + 9999) / 10000);
  stride = std::max<long long>(stride, 1);

  const auto rhs = [&](double t, const Vector& x) -> Vector {
    return -problem.evaluator(x) - eps_time(cfg.eps, t) * (x - cfg.anchor);
  };

  const std::optional<Vector> target = min_norm_target(problem, cfg.anchor);
  Trace trace;
  trace.key = "t";

  auto record = [&](double t, const Vector& x) {
    const Vector Mx = problem.evaluator(x);
    const double e = eps_time(cfg.eps, t);
    TraceRow row;
    row.k = t;
    row.eps = e;
    row.residual = Mx.norm();
    row.psi = 0.5 * (Mx + e * (x - cfg.anchor)).squaredNorm();
    if (target) row.dist = (x - *target).norm();
    row.step = cfg.step_h;
    trace.rows.push_back(std::move(row));
  };

  Vector x = cfg.x0;
  double t = cfg.t0;
  record(t, x);
  trace.reason = StopReason::Budget;

  for (long long step = 0; step < total_steps; ++step) {
    const double h = std::min(cfg.step_h, cfg.t_end - t);
    const Vector k1 = rhs(t, x);
    const Vector k2 = rhs(t + 0.5 * h, x + (0.5 * h) * k1);
    const Vector k3 = rhs(t + 0.5 * h, x + (0.5 * h) * k2);
    const Vector k4 = rhs(t + h, x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = (step + 1 == total_steps) ? cfg.t_end : cfg.t0 + (step + 1) * cfg.step_h;

    if (!x.allFinite()) {
      record(t, x);
      trace.reason = StopReason::Nonfinite;
      break;
    }
    if ((step + 1) % stride == 0 || step + 1 == total_steps) record(t, x);
  }

  trace.iterations = total_steps;
  trace.final_x = x;
  return trace;
}

}  // namespace aeg
