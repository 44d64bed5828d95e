#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aeg/operators.hpp"
#include "aeg/schedules.hpp"

// Iteration engines for M(x) = 0 with an L-Lipschitz monotone M.
//
// All methods instantiate the two-step template
//     y^{k+1} = x^k - a^k (x^k - v) - eta^k M(z^{k+1})
//     x^{k+1} = x^k - b^k (x^k - v) - theta^k M(y^{k+1})
// GEAG is the general-schedule variant (anchor coefficients theta*eps^k,
// implicit second line solved in closed form); EG drops the anchor; EAG-C/V,
// FEG and APV fix their own classic schedules internally. APV is the Popov
// variant: it extrapolates through the previous y and needs only one fresh
// operator evaluation per iteration at the cost of one stored vector.

namespace aeg {

enum class Method { GEAG, EG, EAG_C, EAG_V, FEG, APV };

Method parse_method(std::string_view name);  // "geag", "eg", "eag-c", "eag-v", "feg", "apv"
std::string method_name(Method method);

// Step-size defaults: the largest admissible step with a safety margin.
//   GEAG/EG: 0.99/L   EAG-C: 1/(8L)   EAG-V: 0.5/L   FEG: 1/L   APV: 0.9/(2L sqrt(3))
// For L = 0 any positive step is admissible; 1.0 is returned.
double default_theta(Method method, double lipschitz);

struct SolverConfig {
  Method method = Method::GEAG;
  double theta = 0.0;  // validated per method; ignored by FEG (which uses 1/L)
  Vector anchor;       // v
  Vector x0;
  Schedule schedule;   // GEAG only; the other methods fix their own
  long long max_iters = 1000;
  double stop_residual = 0.0;  // 0 disables residual-based stopping
  long long record_stride = 1;
};

struct SolverState {
  long long k = 0;
  Vector x;
  std::optional<Vector> aux;    // APV: stored y^k
  std::optional<Vector> aux_m;  // APV: cached M(y^k), the reused evaluation
  double step = 0.0;            // theta^k (varies for EAG-V / APV)
  // Evaluations performed by the update rules themselves: 2 per iteration
  // for GEAG/EG/EAG/FEG, 1 per iteration for APV after its warm-up call.
  // Diagnostic evaluations made by run() are not counted here.
  long long operator_evals = 0;
};

// One iteration each; pure functions of (state, problem, cfg).
SolverState step_geag(const SolverState& state, const ProblemInstance& problem,
                      const SolverConfig& cfg);
SolverState step_eg(const SolverState& state, const ProblemInstance& problem,
                    const SolverConfig& cfg);

enum class EagPolicy { Constant, Variable };
SolverState step_eag(const SolverState& state, const ProblemInstance& problem,
                     const SolverConfig& cfg, EagPolicy policy);

SolverState step_feg(const SolverState& state, const ProblemInstance& problem,
                     const SolverConfig& cfg);
SolverState step_apv(const SolverState& state, const ProblemInstance& problem,
                     const SolverConfig& cfg);

// Throws std::invalid_argument when the config violates its method's step
// constraint (theta L < 1 for GEAG/EG/EAG-V, theta <= 1/(8L) for EAG-C,
// theta < 1/(2L sqrt(3)) for APV) or the dimensions disagree.
void validate_config(const SolverConfig& cfg, const ProblemInstance& problem);

// Ready-to-step state; performs APV's warm-up evaluation M(y^0) with y^0 = x^0.
SolverState init_state(const SolverConfig& cfg, const ProblemInstance& problem);

enum class StopReason { Budget, ResidualThreshold, Nonfinite };
std::string stop_reason_name(StopReason reason);

struct TraceRow {
  double k = 0.0;  // iteration index (or time for flow traces)
  double eps = 0.0;
  double residual = 0.0;
  double psi = 0.0;
  std::optional<double> dist;  // to the anchored projection target, when known
  double step = 0.0;
};

struct Trace {
  std::vector<TraceRow> rows;
  long long iterations = 0;
  StopReason reason = StopReason::Budget;
  Vector final_x;
  std::string key = "k";  // "t" for flow traces
};

// Drives the configured method until the budget, the residual threshold, or
// a nonfinite iterate. Rows are recorded at k = 0, every record_stride
// iterations, and at the final iterate; the dist column is filled when the
// problem carries solution metadata (distance to the projection of the
// anchor onto the solution set).
Trace run(const SolverConfig& cfg, const ProblemInstance& problem);

// The method's own regularization value at index k (the eps column of the
// trace): the schedule for GEAG, 1/(k+2) for EAG/APV, 1/(k+1) for FEG, 0
// for EG.
double method_eps(const SolverConfig& cfg, long long k);

}  // namespace aeg
