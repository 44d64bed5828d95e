// aeg: benchmark harness for anchored extra-gradient methods on monotone
// operator equations M(x) = 0.
//
// Verbs:
//   run <config>                 run every method entry, write CSV traces + summary
//   compare <config>             same, forcing a single overlaid comparison plot
//   rates <config>               worst-case majorant figure (schedules + r^k)
//   validate-schedule <spec>     probe the three schedule conditions at a horizon
//   audit <problem-spec>         sampling audit of monotonicity / Lipschitz bound
//   flow <config>                integrate the regularized flow, write a trace
//
// Exit codes: 0 success, 1 config error, 2 runtime failure.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>

#include "aeg/experiment.hpp"
#include "aeg/trace_io.hpp"

namespace {

int guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const aeg::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const aeg::ParseError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime failure: %s\n", e.what());
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anchored extra-gradient solvers for monotone operator equations"};
  app.require_subcommand(1);
  app.fallthrough();  // global --out/--workers/--no-plots may follow the verb

  std::string out_override;
  int workers_override = -1;
  bool no_plots = false;
  app.add_option("--out", out_override, "output directory (overrides the config)");
  app.add_option("--workers", workers_override, "worker threads for independent runs");
  app.add_flag("--no-plots", no_plots, "skip SVG emission");

  auto overrides = [&]() {
    aeg::RunOverrides o;
    if (!out_override.empty()) o.out_dir = out_override;
    if (workers_override >= 0) o.workers = workers_override;
    o.no_plots = no_plots;
    return o;
  };

  std::string run_config;
  CLI::App* run_cmd = app.add_subcommand("run", "run an experiment config");
  run_cmd->add_option("config", run_config, "config file")->required();

  std::string compare_config;
  CLI::App* compare_cmd = app.add_subcommand("compare", "run methods with a shared overlay plot");
  compare_cmd->add_option("config", compare_config, "config file")->required();

  std::string rates_config;
  CLI::App* rates_cmd = app.add_subcommand("rates", "worst-case majorant figure");
  rates_cmd->add_option("config", rates_config, "config file")->required();

  std::string schedule_spec;
  long long horizon = 10000;
  double val_theta = 1.0;
  CLI::App* validate_cmd = app.add_subcommand("validate-schedule", "probe schedule conditions");
  validate_cmd->add_option("spec", schedule_spec, "schedule spec string")->required();
  validate_cmd->add_option("--horizon", horizon, "probe horizon (>= 100)");
  validate_cmd->add_option("--theta", val_theta, "step size for theta-coupled kinds");

  std::string problem_spec;
  int audit_samples = 1000;
  std::uint64_t audit_seed = 0;
  double pair_scale = 5.0;
  CLI::App* audit_cmd = app.add_subcommand("audit", "sampling audit of an operator");
  audit_cmd->add_option("problem", problem_spec, "problem spec string")->required();
  audit_cmd->add_option("--samples", audit_samples, "number of sampled pairs");
  audit_cmd->add_option("--seed", audit_seed, "audit seed");
  audit_cmd->add_option("--pair-scale", pair_scale, "coordinate range of sampled pairs");

  std::string flow_config;
  CLI::App* flow_cmd = app.add_subcommand("flow", "integrate the regularized flow");
  flow_cmd->add_option("config", flow_config, "config file")->required();

  CLI11_PARSE(app, argc, argv);

  if (run_cmd->parsed())
    return guarded([&] { aeg::run_experiment(aeg::load_experiment_config(run_config), overrides()); });

  if (compare_cmd->parsed())
    return guarded([&] {
      aeg::run_experiment(aeg::load_experiment_config(compare_config), overrides(), true);
    });

  if (rates_cmd->parsed())
    return guarded([&] { aeg::rates_figure(aeg::load_rates_config(rates_config), overrides()); });

  if (validate_cmd->parsed())
    return guarded([&] {
      const aeg::Schedule s = aeg::parse_schedule(schedule_spec);
      const aeg::ScheduleValidation v = aeg::validate(s, horizon, val_theta);
      std::printf("horizon:          %lld\n", v.horizon);
      std::printf("eps_tail:         %s\n", aeg::format_double(v.eps_tail).c_str());
      std::printf("partial_sum:      %s\n", aeg::format_double(v.partial_sum).c_str());
      std::printf("relchange_tail:   %s\n", aeg::format_double(v.relchange_tail).c_str());
      std::printf("decay:            %s\n", v.decay_pass ? "pass" : "fail");
      std::printf("divergence proxy: %s\n", v.divergence_pass ? "pass" : "fail");
      std::printf("rel-change:       %s\n", v.relchange_pass ? "pass" : "fail");
    });

  if (audit_cmd->parsed())
    return guarded([&] {
      const aeg::ProblemInstance p = aeg::parse_problem(problem_spec);
      const aeg::OperatorAudit a = aeg::audit_operator(p, audit_samples, pair_scale, audit_seed);
      std::printf("dim:                 %lld\n", static_cast<long long>(p.dim));
      std::printf("declared lipschitz:  %s\n", aeg::format_double(p.lipschitz).c_str());
      std::printf("samples:             %d (seed %llu)\n", a.samples,
                  static_cast<unsigned long long>(a.seed));
      std::printf("lipschitz estimate:  %s\n", aeg::format_double(a.lipschitz_estimate).c_str());
      std::printf("worst inner product: %s\n", aeg::format_double(a.worst_inner).c_str());
      std::printf("violations (<-1e-10): %d\n", a.monotone_violations);
    });

  if (flow_cmd->parsed())
    return guarded([&] { aeg::run_flow(aeg::load_flow_config(flow_config), overrides()); });

  return 0;
}
