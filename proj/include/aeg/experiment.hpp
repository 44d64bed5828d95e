#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aeg/analysis.hpp"
#include "aeg/flow.hpp"
#include "aeg/schedules.hpp"
#include "aeg/solvers.hpp"

// Batch experiment harness behind the CLI verbs. Configs are flat
// key = value files with repeated [method] (or [schedule]) blocks; the full
// schema is documented in the README. Method entries run independently and
// may fan out to a worker pool; every output file is written atomically
// under its own label, so parallel and serial execution produce identical
// bytes.

namespace aeg {

// Configuration problems (bad files, bad specs, violated method
// constraints). The CLI maps these to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MethodEntry {
  std::string name;                  // geag | eg | eag-c | eag-v | feg | apv
  std::string label;
  std::optional<double> theta;       // absent = per-method default
  std::optional<std::string> schedule_spec;  // geag only
};

enum class AnchorMode { Zero, KnownZero, Literal };
enum class X0Mode { Random, RandomSpan, Literal };

struct ExperimentConfig {
  std::string problem_spec;
  std::vector<MethodEntry> methods;
  AnchorMode anchor_mode = AnchorMode::Zero;
  std::vector<double> anchor_literal;
  X0Mode x0_mode = X0Mode::Random;
  int x0_span = 0;
  std::vector<double> x0_literal;
  long long iters = 1000;
  long long record_stride = 1;
  double stop_residual = 0.0;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  bool plots = true;
  int workers = 0;  // 0 = hardware concurrency
};

ExperimentConfig load_experiment_config(const std::string& path);

struct RunOverrides {
  std::optional<std::string> out_dir;
  std::optional<int> workers;
  bool no_plots = false;
};

// Runs every method entry, writes <label>.csv per entry plus summary.csv
// (and comparison.svg unless plots are off). Nonfinite runs are recorded in
// the summary's status column, not fatal. `shared_plot` forces the single
// overlaid comparison plot (the `compare` verb); x0 and the anchor are
// resolved once and shared across entries either way.
void run_experiment(const ExperimentConfig& cfg, const RunOverrides& overrides,
                    bool shared_plot = false);

struct RatesScheduleEntry {
  std::string spec;
  std::string label;
};

struct RatesConfig {
  double delta = 0.1;
  double theta = 0.5;
  std::optional<double> c_delta;  // absent = estimate from the reference run
  std::optional<double> r0;       // absent = psi^0 of the reference run
  long long k0 = 0;
  long long iters = 100000;
  std::string problem_spec;       // needed when c_delta or r0 are estimated
  long long reference_iters = 10000;
  std::uint64_t seed = 0;
  std::vector<RatesScheduleEntry> schedules;
  std::string out_dir = "out";
  bool plots = true;
};

RatesConfig load_rates_config(const std::string& path);

// Emits rates.csv (columns k, then eps_<label>, r_<label> per schedule, with
// per-schedule slope footers) and rates.svg (schedules on top, r^k below).
void rates_figure(const RatesConfig& cfg, const RunOverrides& overrides);

struct FlowRunConfig {
  std::string problem_spec;
  std::string schedule_spec;
  double t0 = 1.0;
  double t_end = 100.0;
  double step_h = 1e-2;
  X0Mode x0_mode = X0Mode::Random;
  int x0_span = 0;
  std::vector<double> x0_literal;
  AnchorMode anchor_mode = AnchorMode::Zero;
  std::vector<double> anchor_literal;
  std::uint64_t seed = 0;
  std::string label = "flow";
  std::string out_dir = "out";
};

FlowRunConfig load_flow_config(const std::string& path);
void run_flow(const FlowRunConfig& cfg, const RunOverrides& overrides);

// Shared helpers (also used by tests and the acceptance suite).
Vector resolve_x0(X0Mode mode, int span, const std::vector<double>& literal, Eigen::Index dim,
                  std::uint64_t seed);
Vector resolve_anchor(AnchorMode mode, const std::vector<double>& literal,
                      const ProblemInstance& problem);
SolverConfig build_solver_config(const MethodEntry& entry, const ProblemInstance& problem,
                                 const Vector& x0, const Vector& anchor, long long iters,
                                 long long record_stride, double stop_residual);

}  // namespace aeg
