#pragma once

#include "aeg/operators.hpp"
#include "aeg/schedules.hpp"
#include "aeg/solvers.hpp"

// Continuous-time cross-check: integrates the regularized flow
//     x'(t) = -M(x(t)) - eps(t) (x(t) - v),   t in [t0, t_end],
// with fixed-step classical Runge-Kutta (RK4). Fixed steps keep the
// trajectory deterministic and bit-reproducible across runs.

namespace aeg {

struct FlowConfig {
  Schedule eps;   // read in continuous time, see eps_time()
  Vector x0;
  Vector anchor;  // v
  double t0 = 1.0;
  double t_end = 10.0;
  double step_h = 1e-2;  // must satisfy step_h <= 0.1 / (L + eps(t0))
};

// Trace rows are keyed by t; columns are eps(t), ||M(x(t))||,
// psi(t) = 0.5 ||M + eps (x - v)||^2, distance to the anchored projection
// target, and the step size. Row count is capped at 10^4.
Trace integrate_flow(const FlowConfig& cfg, const ProblemInstance& problem);

}  // namespace aeg
