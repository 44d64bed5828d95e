#include "aeg/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "aeg/rng.hpp"
#include "aeg/svg_plot.hpp"
#include "aeg/trace_io.hpp"

namespace aeg {

namespace {

// ---- flat key = value config files with [section] blocks ----

struct KvEntry {
  std::string key, value;
  int line = 0;
};

struct KvSection {
  std::string name;  // "" for the global section
  int line = 0;
  std::vector<KvEntry> entries;
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<KvSection> parse_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::vector<KvSection> sections(1);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError(path + ":" + std::to_string(lineno) + ": malformed section header");
      sections.push_back({trim(t.substr(1, t.size() - 2)), lineno, {}});
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    KvEntry e{trim(t.substr(0, eq)), trim(t.substr(eq + 1)), lineno};
    if (e.key.empty() || e.value.empty())
      throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key or value");
    sections.back().entries.push_back(std::move(e));
  }
  return sections;
}

class KvView {
 public:
  KvView(const KvSection& s, std::string file) : s_(s), file_(std::move(file)) {}

  const std::string* find(const std::string& key) const {
    for (const auto& e : s_.entries)
      if (e.key == key) return &e.value;
    return nullptr;
  }

  std::string require(const std::string& key) const {
    const std::string* v = find(key);
    if (!v) throw ConfigError(file_ + ": missing required key '" + key + "'" + where());
    return *v;
  }

  std::string get_or(const std::string& key, const std::string& fallback) const {
    const std::string* v = find(key);
    return v ? *v : fallback;
  }

  double number(const std::string& key) const { return to_number(key, require(key)); }

  double number_or(const std::string& key, double fallback) const {
    const std::string* v = find(key);
    return v ? to_number(key, *v) : fallback;
  }

  long long integer_or(const std::string& key, long long fallback) const {
    const double v = number_or(key, static_cast<double>(fallback));
    return static_cast<long long>(v);
  }

  bool flag_or(const std::string& key, bool fallback) const {
    const std::string* v = find(key);
    if (!v) return fallback;
    if (*v == "on" || *v == "true" || *v == "1") return true;
    if (*v == "off" || *v == "false" || *v == "0") return false;
    throw ConfigError(file_ + ": key '" + key + "' expects on/off" + where());
  }

 private:
  double to_number(const std::string& key, const std::string& raw) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(raw, &used);
      if (used != raw.size()) throw std::invalid_argument(raw);
      return v;
    } catch (const std::exception&) {
      throw ConfigError(file_ + ": key '" + key + "' has non-numeric value '" + raw + "'" +
                        where());
    }
  }

  std::string where() const {
    return s_.name.empty() ? "" : (" in [" + s_.name + "] block at line " + std::to_string(s_.line));
  }

  const KvSection& s_;
  std::string file_;
};

std::vector<double> parse_literal_vector(const std::string& text, const std::string& context) {
  std::istringstream is(text);
  std::vector<double> out;
  double v;
  while (is >> v) out.push_back(v);
  if (out.empty() || !is.eof())
    throw ConfigError(context + ": literal vector must be space-separated numbers");
  return out;
}

void parse_point_mode(const std::string& value, const std::string& context, X0Mode& mode,
                      int& span, std::vector<double>& literal) {
  if (value == "random") {
    mode = X0Mode::Random;
  } else if (value.rfind("random-span:", 0) == 0) {
    mode = X0Mode::RandomSpan;
    span = std::stoi(value.substr(12));
    if (span < 1) throw ConfigError(context + ": random-span needs a positive span");
  } else if (value.rfind("literal:", 0) == 0) {
    mode = X0Mode::Literal;
    literal = parse_literal_vector(value.substr(8), context);
  } else {
    throw ConfigError(context + ": expected random | random-span:<n> | literal:<coords>");
  }
}

void parse_anchor_mode(const std::string& value, const std::string& context, AnchorMode& mode,
                       std::vector<double>& literal) {
  if (value == "zero") {
    mode = AnchorMode::Zero;
  } else if (value == "known-zero") {
    mode = AnchorMode::KnownZero;
  } else if (value.rfind("literal:", 0) == 0) {
    mode = AnchorMode::Literal;
    literal = parse_literal_vector(value.substr(8), context);
  } else {
    throw ConfigError(context + ": expected zero | known-zero | literal:<coords>");
  }
}

}  // namespace

Vector resolve_x0(X0Mode mode, int span, const std::vector<double>& literal, Eigen::Index dim,
                  std::uint64_t seed) {
  Vector x0 = Vector::Zero(dim);
  switch (mode) {
    case X0Mode::Random: {
      Rng rng(seed, RngStream::InitialPoint);
      for (Eigen::Index i = 0; i < dim; ++i) x0[i] = rng.normal();
      break;
    }
    case X0Mode::RandomSpan: {
      Rng rng(seed, RngStream::InitialPoint);
      const Eigen::Index n = std::min<Eigen::Index>(span, dim);
      for (Eigen::Index i = 0; i < n; ++i) x0[i] = rng.normal();
      break;
    }
    case X0Mode::Literal: {
      if (static_cast<Eigen::Index>(literal.size()) != dim)
        throw ConfigError("x0 literal has dimension " + std::to_string(literal.size()) +
                          ", problem has " + std::to_string(dim));
      for (Eigen::Index i = 0; i < dim; ++i) x0[i] = literal[static_cast<std::size_t>(i)];
      break;
    }
  }
  return x0;
}

Vector resolve_anchor(AnchorMode mode, const std::vector<double>& literal,
                      const ProblemInstance& problem) {
  switch (mode) {
    case AnchorMode::Zero:
      return Vector::Zero(problem.dim);
    case AnchorMode::KnownZero:
      if (!problem.known_zero)
        throw ConfigError("anchor = known-zero, but the problem has no known zero");
      return *problem.known_zero;
    case AnchorMode::Literal: {
      if (static_cast<Eigen::Index>(literal.size()) != problem.dim)
        throw ConfigError("anchor literal has dimension " + std::to_string(literal.size()) +
                          ", problem has " + std::to_string(problem.dim));
      Vector v(problem.dim);
      for (Eigen::Index i = 0; i < problem.dim; ++i) v[i] = literal[static_cast<std::size_t>(i)];
      return v;
    }
  }
  throw ConfigError("unreachable anchor mode");
}

SolverConfig build_solver_config(const MethodEntry& entry, const ProblemInstance& problem,
                                 const Vector& x0, const Vector& anchor, long long iters,
                                 long long record_stride, double stop_residual) {
  SolverConfig cfg;
  try {
    cfg.method = parse_method(entry.name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(e.what()) + " (method entry '" + entry.label + "')");
  }
  if (entry.schedule_spec) {
    if (cfg.method != Method::GEAG)
      throw ConfigError("method entry '" + entry.label +
                        "': only geag accepts a schedule spec");
    try {
      cfg.schedule = parse_schedule(*entry.schedule_spec);
    } catch (const ParseError& e) {
      throw ConfigError("method entry '" + entry.label + "': " + e.what());
    }
  } else if (cfg.method == Method::GEAG) {
    throw ConfigError("method entry '" + entry.label + "': geag requires a schedule spec");
  }
  cfg.theta = entry.theta ? *entry.theta : default_theta(cfg.method, problem.lipschitz);
  cfg.anchor = anchor;
  cfg.x0 = x0;
  cfg.max_iters = iters;
  cfg.record_stride = record_stride;
  cfg.stop_residual = stop_residual;
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  const auto sections = parse_kv_file(path);
  ExperimentConfig cfg;
  {
    KvView g(sections[0], path);
    cfg.problem_spec = g.require("problem");
    cfg.iters = g.integer_or("iters", 1000);
    cfg.record_stride = g.integer_or("record_stride", 1);
    cfg.stop_residual = g.number_or("stop_residual", 0.0);
    cfg.seed = static_cast<std::uint64_t>(g.integer_or("seed", 0));
    cfg.out_dir = g.get_or("out", "out");
    cfg.plots = g.flag_or("plots", true);
    cfg.workers = static_cast<int>(g.integer_or("workers", 0));
    parse_anchor_mode(g.get_or("anchor", "zero"), path, cfg.anchor_mode, cfg.anchor_literal);
    parse_point_mode(g.get_or("x0", "random"), path, cfg.x0_mode, cfg.x0_span, cfg.x0_literal);
    if (cfg.iters < 0) throw ConfigError(path + ": iters must be nonnegative");
    if (cfg.record_stride < 1) throw ConfigError(path + ": record_stride must be >= 1");
  }

  std::set<std::string> labels;
  for (std::size_t i = 1; i < sections.size(); ++i) {
    if (sections[i].name != "method")
      throw ConfigError(path + ": unexpected section [" + sections[i].name + "]");
    KvView m(sections[i], path);
    MethodEntry e;
    e.name = m.require("name");
    e.label = m.get_or("label", e.name);
    const std::string theta = m.get_or("theta", "auto");
    if (theta != "auto") e.theta = m.number("theta");
    if (const std::string* s = m.find("schedule")) e.schedule_spec = *s;
    if (!labels.insert(e.label).second)
      throw ConfigError(path + ": duplicate method label '" + e.label + "'");
    cfg.methods.push_back(std::move(e));
  }
  if (cfg.methods.empty()) throw ConfigError(path + ": config declares no [method] blocks");
  return cfg;
}

namespace {

struct RunOutcome {
  std::string label;
  std::string status = "ok";  // ok | nonfinite | error
  double final_residual = std::numeric_limits<double>::quiet_NaN();
  std::optional<RateReport> fit;
  long long iterations = 0;
  double wall_ms = 0.0;
  Trace trace;
  std::string message;
};

std::optional<RateReport> fit_trace_residual(const Trace& trace, double k_lo, double k_hi) {
  std::vector<SamplePoint> pts;
  pts.reserve(trace.rows.size());
  for (const TraceRow& r : trace.rows) pts.push_back({r.k, r.residual});
  try {
    return fit_slope(pts, k_lo, k_hi);
  } catch (const std::invalid_argument&) {
    return std::nullopt;  // too few positive samples; slope simply unreported
  }
}

std::string summary_csv(const std::vector<RunOutcome>& outcomes) {
  std::string out = "label,status,final_residual,slope,window_lo,window_hi,r2,iterations,wall_ms\n";
  for (const RunOutcome& o : outcomes) {
    out += o.label;
    out += ',';
    out += o.status;
    out += ',';
    if (std::isfinite(o.final_residual)) out += format_double(o.final_residual);
    out += ',';
    if (o.fit) out += format_double(o.fit->slope);
    out += ',';
    if (o.fit) out += format_double(o.fit->k_lo);
    out += ',';
    if (o.fit) out += format_double(o.fit->k_hi);
    out += ',';
    if (o.fit) out += format_double(o.fit->r_squared);
    out += ',';
    out += std::to_string(o.iterations);
    out += ',';
    out += format_double(o.wall_ms);
    out += '\n';
  }
  return out;
}

void parallel_for_entries(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  const int count = std::max(1, std::min<int>(workers > 0 ? workers : hw, static_cast<int>(n)));
  if (count == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(count));
  for (int t = 0; t < count; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) break;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

void run_experiment(const ExperimentConfig& cfg, const RunOverrides& overrides,
                    bool shared_plot) {
  const std::string out_dir = overrides.out_dir.value_or(cfg.out_dir);
  const bool plots = cfg.plots && !overrides.no_plots;
  const int workers = overrides.workers.value_or(cfg.workers);

  ProblemInstance problem;
  try {
    problem = parse_problem(cfg.problem_spec);
  } catch (const ParseError& e) {
    throw ConfigError(std::string("problem spec: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("problem spec: ") + e.what());
  }

  // x0 and the anchor are resolved once and shared by every method entry.
  const Vector x0 = resolve_x0(cfg.x0_mode, cfg.x0_span, cfg.x0_literal, problem.dim, cfg.seed);
  const Vector anchor = resolve_anchor(cfg.anchor_mode, cfg.anchor_literal, problem);

  // Validate every entry before running anything.
  std::vector<SolverConfig> solver_cfgs;
  solver_cfgs.reserve(cfg.methods.size());
  for (const MethodEntry& e : cfg.methods) {
    SolverConfig sc = build_solver_config(e, problem, x0, anchor, cfg.iters, cfg.record_stride,
                                          cfg.stop_residual);
    try {
      validate_config(sc, problem);
    } catch (const std::invalid_argument& err) {
      throw ConfigError("method entry '" + e.label + "': " + err.what());
    }
    solver_cfgs.push_back(std::move(sc));
  }

  const double window_lo = std::max(1.0, static_cast<double>(cfg.iters) / 10.0);
  const double window_hi = static_cast<double>(cfg.iters);

  std::vector<RunOutcome> outcomes(cfg.methods.size());
  parallel_for_entries(cfg.methods.size(), workers, [&](std::size_t i) {
    RunOutcome& o = outcomes[i];
    o.label = cfg.methods[i].label;
    const auto start = std::chrono::steady_clock::now();
    try {
      o.trace = run(solver_cfgs[i], problem);
      o.iterations = o.trace.iterations;
      if (!o.trace.rows.empty()) o.final_residual = o.trace.rows.back().residual;
      if (o.trace.reason == StopReason::Nonfinite) o.status = "nonfinite";
      o.fit = fit_trace_residual(o.trace, window_lo, window_hi);
      write_file_atomic(out_dir + "/" + o.label + ".csv", trace_to_csv(o.trace, o.fit));
    } catch (const std::exception& e) {
      o.status = "error";
      o.message = e.what();
    }
    o.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                    .count();
  });

  write_file_atomic(out_dir + "/summary.csv", summary_csv(outcomes));

  if (plots || shared_plot) {
    PlotPanel panel;
    panel.title = "residual vs iteration (" + cfg.problem_spec + ")";
    panel.y_label = "residual";
    for (const RunOutcome& o : outcomes) {
      PlotSeries s;
      s.label = o.label;
      for (const TraceRow& r : o.trace.rows)
        if (r.k > 0.0 && r.residual > 0.0) s.points.push_back({r.k, r.residual});
      panel.series.push_back(std::move(s));
    }
    write_file_atomic(out_dir + "/comparison.svg", render_loglog_svg({panel}));
  }

  for (const RunOutcome& o : outcomes)
    if (o.status == "error")
      throw std::runtime_error("method entry '" + o.label + "' failed: " + o.message);
}

RatesConfig load_rates_config(const std::string& path) {
  const auto sections = parse_kv_file(path);
  RatesConfig cfg;
  {
    KvView g(sections[0], path);
    cfg.delta = g.number_or("delta", 0.1);
    cfg.theta = g.number_or("theta", 0.5);
    const std::string cd = g.get_or("c_delta", "auto");
    if (cd != "auto") cfg.c_delta = g.number("c_delta");
    const std::string r0 = g.get_or("r0", "auto");
    if (r0 != "auto") cfg.r0 = g.number("r0");
    cfg.k0 = g.integer_or("k0", 0);
    cfg.iters = g.integer_or("iters", 100000);
    cfg.problem_spec = g.get_or("problem", "");
    cfg.reference_iters = g.integer_or("reference_iters", 10000);
    cfg.seed = static_cast<std::uint64_t>(g.integer_or("seed", 0));
    cfg.out_dir = g.get_or("out", "out");
    cfg.plots = g.flag_or("plots", true);
  }
  for (std::size_t i = 1; i < sections.size(); ++i) {
    if (sections[i].name != "schedule")
      throw ConfigError(path + ": unexpected section [" + sections[i].name + "]");
    KvView s(sections[i], path);
    RatesScheduleEntry e;
    e.spec = s.require("spec");
    e.label = s.get_or("label", "schedule" + std::to_string(i));
    cfg.schedules.push_back(std::move(e));
  }
  if (cfg.schedules.empty()) throw ConfigError(path + ": config declares no [schedule] blocks");
  return cfg;
}

void rates_figure(const RatesConfig& cfg, const RunOverrides& overrides) {
  const std::string out_dir = overrides.out_dir.value_or(cfg.out_dir);
  const bool plots = cfg.plots && !overrides.no_plots;

  std::vector<Schedule> schedules;
  for (const auto& e : cfg.schedules) {
    try {
      schedules.push_back(parse_schedule(e.spec));
    } catch (const ParseError& err) {
      throw ConfigError("schedule '" + e.label + "': " + err.what());
    }
  }

  WorstCaseParams params;
  params.delta = cfg.delta;
  params.theta = cfg.theta;
  params.k0 = cfg.k0;

  // Estimate the constants from a reference run when not pinned: c_delta
  // mirrors (1/(4 delta)) sup ||x^k||^2 and r0 stands in for psi at k0.
  if (cfg.c_delta && cfg.r0) {
    params.c_delta = *cfg.c_delta;
    params.r0 = *cfg.r0;
  } else {
    if (cfg.problem_spec.empty())
      throw ConfigError("rates config: c_delta/r0 = auto requires a problem spec");
    ProblemInstance problem;
    try {
      problem = parse_problem(cfg.problem_spec);
    } catch (const ParseError& e) {
      throw ConfigError(std::string("problem spec: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("problem spec: ") + e.what());
    }
    SolverConfig ref;
    ref.method = Method::GEAG;
    ref.schedule = schedules.front();
    ref.theta = default_theta(Method::GEAG, problem.lipschitz);
    ref.x0 = resolve_x0(X0Mode::Random, 0, {}, problem.dim, cfg.seed);
    ref.anchor = Vector::Zero(problem.dim);
    ref.max_iters = cfg.reference_iters;
    ref.record_stride = 1;
    const Trace ref_trace = run(ref, problem);

    double sup_norm2 = 0.0;
    {
      // re-walk the trajectory to track sup ||x^k||^2 exactly
      SolverState st = init_state(ref, problem);
      sup_norm2 = st.x.squaredNorm();
      for (long long k = 0; k < ref.max_iters; ++k) {
        st = step_geag(st, problem, ref);
        if (!st.x.allFinite()) break;
        sup_norm2 = std::max(sup_norm2, st.x.squaredNorm());
      }
    }
    params.c_delta = cfg.c_delta.value_or(sup_norm2 / (4.0 * cfg.delta));
    params.r0 = cfg.r0.value_or(ref_trace.rows.front().psi);
  }

  std::vector<std::vector<double>> r_series;
  for (std::size_t i = 0; i < schedules.size(); ++i) {
    try {
      r_series.push_back(worst_case_sequence(params, schedules[i], cfg.iters));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("schedule '" + cfg.schedules[i].label + "': " + e.what());
    }
  }

  // CSV: strided to at most 10^4 rows; slope fits use the full arrays.
  const long long n = cfg.iters - cfg.k0 + 1;
  const long long stride = std::max<long long>(1, (n + 9999) / 10000);

  std::string csv = "k";
  for (const auto& e : cfg.schedules) csv += ",eps_" + e.label + ",r_" + e.label;
  csv += '\n';
  for (long long j = 0; j < n; j += stride) {
    const long long k = cfg.k0 + j;
    csv += std::to_string(k);
    for (std::size_t i = 0; i < schedules.size(); ++i) {
      csv += ',';
      csv += format_double(eps_at(schedules[i], k, cfg.theta));
      csv += ',';
      csv += format_double(r_series[i][static_cast<std::size_t>(j)]);
    }
    csv += '\n';
  }

  std::vector<RateReport> fits;
  for (std::size_t i = 0; i < schedules.size(); ++i) {
    std::vector<SamplePoint> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (long long j = 0; j < n; ++j)
      pts.push_back({static_cast<double>(cfg.k0 + j), r_series[i][static_cast<std::size_t>(j)]});
    const double lo = std::max(1.0, static_cast<double>(cfg.iters) / 10.0);
    fits.push_back(fit_slope(pts, lo, static_cast<double>(cfg.iters)));
    csv += "# " + cfg.schedules[i].label + ": " + slope_footer(fits.back()).substr(2) + '\n';
  }
  write_file_atomic(out_dir + "/rates.csv", csv);

  if (plots) {
    PlotPanel top, bottom;
    top.title = "regularization schedules eps^k";
    bottom.title = "worst-case majorant r^k";
    for (std::size_t i = 0; i < schedules.size(); ++i) {
      PlotSeries es, rs;
      es.label = cfg.schedules[i].label;
      rs.label = cfg.schedules[i].label;
      for (long long j = 0; j < n; j += stride) {
        const long long k = cfg.k0 + j;
        es.points.push_back({static_cast<double>(k), eps_at(schedules[i], k, cfg.theta)});
        rs.points.push_back(
            {static_cast<double>(k), r_series[i][static_cast<std::size_t>(j)]});
      }
      top.series.push_back(std::move(es));
      bottom.series.push_back(std::move(rs));
    }
    write_file_atomic(out_dir + "/rates.svg", render_loglog_svg({top, bottom}));
  }
}

FlowRunConfig load_flow_config(const std::string& path) {
  const auto sections = parse_kv_file(path);
  if (sections.size() > 1) throw ConfigError(path + ": flow configs have no sections");
  KvView g(sections[0], path);
  FlowRunConfig cfg;
  cfg.problem_spec = g.require("problem");
  cfg.schedule_spec = g.require("schedule");
  cfg.t0 = g.number_or("t0", 1.0);
  cfg.t_end = g.number("t_end");
  cfg.step_h = g.number("step_h");
  cfg.seed = static_cast<std::uint64_t>(g.integer_or("seed", 0));
  cfg.label = g.get_or("label", "flow");
  cfg.out_dir = g.get_or("out", "out");
  parse_point_mode(g.get_or("x0", "random"), path, cfg.x0_mode, cfg.x0_span, cfg.x0_literal);
  parse_anchor_mode(g.get_or("anchor", "zero"), path, cfg.anchor_mode, cfg.anchor_literal);
  return cfg;
}

void run_flow(const FlowRunConfig& cfg, const RunOverrides& overrides) {
  const std::string out_dir = overrides.out_dir.value_or(cfg.out_dir);

  ProblemInstance problem;
  try {
    problem = parse_problem(cfg.problem_spec);
  } catch (const ParseError& e) {
    throw ConfigError(std::string("problem spec: ") + e.what());
  }

  FlowConfig fc;
  try {
    fc.eps = parse_schedule(cfg.schedule_spec);
  } catch (const ParseError& e) {
    throw ConfigError(std::string("schedule spec: ") + e.what());
  }
  fc.x0 = resolve_x0(cfg.x0_mode, cfg.x0_span, cfg.x0_literal, problem.dim, cfg.seed);
  fc.anchor = resolve_anchor(cfg.anchor_mode, cfg.anchor_literal, problem);
  fc.t0 = cfg.t0;
  fc.t_end = cfg.t_end;
  fc.step_h = cfg.step_h;

  Trace trace;
  try {
    trace = integrate_flow(fc, problem);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  std::vector<SamplePoint> pts;
  for (const TraceRow& r : trace.rows) pts.push_back({r.k, r.residual});
  std::optional<RateReport> fit;
  try {
    fit = fit_slope(pts, cfg.t_end / 10.0, cfg.t_end);
  } catch (const std::invalid_argument&) {
  }
  write_file_atomic(out_dir + "/" + cfg.label + ".csv", trace_to_csv(trace, fit));
}

}  // namespace aeg
