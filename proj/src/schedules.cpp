#include "aeg/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "aeg/rng.hpp"

namespace aeg {

namespace {

constexpr double kTwoOverPi = 2.0 / M_PI;

double arctan_multiplier(double alpha, double slope, double k) {
  return alpha * kTwoOverPi * std::atan(slope * k);
}

void check_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::invalid_argument(std::string(name) + " must be positive and finite");
}

}  // namespace

bool Schedule::theta_coupled() const {
  switch (kind) {
    case ScheduleKind::Linear:
    case ScheduleKind::Arctan:
    case ScheduleKind::NoisyArctan:
      return true;
    default:
      return false;
  }
}

double eps_at(const Schedule& s, long long k, double theta) {
  check_positive(theta, "theta");
  if (k < 0) throw std::invalid_argument("schedule index k must be nonnegative");
  const double kd = static_cast<double>(k);
  switch (s.kind) {
    case ScheduleKind::Zero:
      return 0.0;
    case ScheduleKind::Linear:
      return s.alpha / (theta * (kd + s.beta));
    case ScheduleKind::Power:
      return s.alpha / std::pow(kd + s.beta, s.eta);
    case ScheduleKind::Arctan:
      return arctan_multiplier(s.alpha, s.slope, kd) / (theta * (kd + s.beta));
    case ScheduleKind::NoisyArctan: {
      // Gaussian corruption with standard deviation 1/k (1 at k = 0); the
      // multiplier is clamped to [0, 2] to keep eps^k >= 0 and O(1/k).
      const double sd = (k >= 1) ? 1.0 / kd : 1.0;
      const double noisy = arctan_multiplier(s.alpha, s.slope, kd) +
                           sd * counter_normal(s.seed, static_cast<std::uint64_t>(k));
      return std::clamp(noisy, 0.0, 2.0) / (theta * (kd + s.beta));
    }
    case ScheduleKind::LogOverK: {
      // Shifted index keeps the value defined and positive at k = 0, 1.
      const double kt = kd + 2.0;
      return s.alpha * std::log(kt) / kt;
    }
    case ScheduleKind::InverseLog:
      return 1.0 / std::log(kd + 2.0);
    case ScheduleKind::Table: {
      if (s.values.empty()) return 0.0;
      const std::size_t i =
          std::min<std::size_t>(static_cast<std::size_t>(k), s.values.size() - 1);
      return s.values[i];
    }
  }
  return 0.0;
}

double eps_time(const Schedule& s, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("flow time t must be positive");
  switch (s.kind) {
    case ScheduleKind::Zero:
      return 0.0;
    case ScheduleKind::Linear:
      return s.alpha / t;
    case ScheduleKind::Power:
      return s.alpha / std::pow(t + s.beta, s.eta);
    case ScheduleKind::Arctan:
      return arctan_multiplier(s.alpha, s.slope, t) / t;
    case ScheduleKind::LogOverK: {
      const double ts = t + 2.0;
      return s.alpha * std::log(ts) / ts;
    }
    case ScheduleKind::InverseLog:
      return 1.0 / std::log(t + 2.0);
    case ScheduleKind::NoisyArctan:
    case ScheduleKind::Table:
      throw std::invalid_argument("schedule kind has no continuous-time reading");
  }
  return 0.0;
}

ScheduleValidation validate(const Schedule& s, long long horizon, double theta) {
  if (horizon < 100) throw std::invalid_argument("validation horizon must be >= 100");
  ScheduleValidation out;
  out.horizon = horizon;

  const long long tail_lo = horizon / 10;
  double sum = 0.0;
  double min_keps = std::numeric_limits<double>::infinity();
  double relmax = 0.0;
  double prev = eps_at(s, 0, theta);
  sum += prev;
  for (long long k = 1; k <= horizon; ++k) {
    const double cur = eps_at(s, k, theta);
    sum += cur;
    if (k > tail_lo) min_keps = std::min(min_keps, static_cast<double>(k) * cur);
    if (k - 1 >= tail_lo) {
      const double d = std::abs(cur - prev);
      const double rel = (prev > 0.0) ? d / prev
                                      : (d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
      relmax = std::max(relmax, rel);
    }
    prev = cur;
  }

  out.eps_tail = prev;
  out.partial_sum = sum;
  out.relchange_tail = relmax;

  const double eps100 = eps_at(s, 100, theta);
  out.decay_pass = (out.eps_tail == 0.0) || (out.eps_tail < 0.5 * eps100);
  out.divergence_pass =
      (min_keps > 0.0) && (sum >= 0.5 * min_keps * std::log(static_cast<double>(horizon)));
  out.relchange_pass = relmax < 0.05;
  return out;
}

namespace {

std::vector<double> read_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open table file '" + path + "'", 0);
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // strip comments and whitespace-only lines
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double v;
    if (ls >> v) {
      if (!std::isfinite(v) || v < 0.0)
        throw ParseError("table value must be finite and nonnegative at line " +
                             std::to_string(lineno),
                         lineno);
      values.push_back(v);
    }
  }
  if (values.empty()) throw ParseError("table file '" + path + "' holds no values", 0);
  return values;
}

void require_positive_param(double v, const SpecString& s, const char* key) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    const SpecParam* p = s.find(key);
    throw ParseError("parameter '" + std::string(key) + "' must be positive",
                     p ? p->position : 0);
  }
}

}  // namespace

Schedule parse_schedule(std::string_view spec) {
  const SpecString s = parse_spec_string(spec);
  Schedule out;
  if (s.kind == "zero") {
    spec_check_keys(s, "");
    out.kind = ScheduleKind::Zero;
  } else if (s.kind == "linear") {
    spec_check_keys(s, "alpha,beta");
    out.kind = ScheduleKind::Linear;
    out.alpha = spec_double(s, "alpha");
    out.beta = spec_double(s, "beta");
    require_positive_param(out.alpha, s, "alpha");
    require_positive_param(out.beta, s, "beta");
  } else if (s.kind == "power") {
    spec_check_keys(s, "alpha,beta,eta");
    out.kind = ScheduleKind::Power;
    out.alpha = spec_double(s, "alpha");
    out.beta = spec_double(s, "beta");
    out.eta = spec_double(s, "eta");
    require_positive_param(out.alpha, s, "alpha");
    require_positive_param(out.beta, s, "beta");
    if (!(out.eta > 0.0 && out.eta < 1.0)) {
      const SpecParam* p = s.find("eta");
      throw ParseError("parameter 'eta' must lie in (0,1)", p ? p->position : 0);
    }
  } else if (s.kind == "arctan" || s.kind == "noisy-arctan") {
    out.kind = (s.kind == "arctan") ? ScheduleKind::Arctan : ScheduleKind::NoisyArctan;
    spec_check_keys(s, (s.kind == "arctan") ? "alpha,slope,beta" : "alpha,slope,beta,seed");
    out.alpha = spec_double(s, "alpha");
    out.beta = spec_double(s, "beta");
    out.slope = spec_double_or(s, "slope", 1e-3);
    require_positive_param(out.alpha, s, "alpha");
    require_positive_param(out.beta, s, "beta");
    require_positive_param(out.slope, s, "slope");
    if (out.kind == ScheduleKind::NoisyArctan) out.seed = spec_uint(s, "seed");
  } else if (s.kind == "logk") {
    spec_check_keys(s, "alpha");
    out.kind = ScheduleKind::LogOverK;
    out.alpha = spec_double(s, "alpha");
    require_positive_param(out.alpha, s, "alpha");
  } else if (s.kind == "invlog") {
    spec_check_keys(s, "");
    out.kind = ScheduleKind::InverseLog;
  } else if (s.kind == "table") {
    spec_check_keys(s, "file");
    out.kind = ScheduleKind::Table;
    out.values = read_table_file(spec_path(s, "file"));
  } else {
    throw ParseError("unknown schedule kind '" + s.kind + "'", 0);
  }
  return out;
}

std::string schedule_to_string(const Schedule& s) {
  std::ostringstream os;
  switch (s.kind) {
    case ScheduleKind::Zero:
      return "zero";
    case ScheduleKind::Linear:
      os << "linear:alpha=" << s.alpha << ",beta=" << s.beta;
      break;
    case ScheduleKind::Power:
      os << "power:alpha=" << s.alpha << ",beta=" << s.beta << ",eta=" << s.eta;
      break;
    case ScheduleKind::Arctan:
      os << "arctan:alpha=" << s.alpha << ",slope=" << s.slope << ",beta=" << s.beta;
      break;
    case ScheduleKind::NoisyArctan:
      os << "noisy-arctan:alpha=" << s.alpha << ",slope=" << s.slope << ",beta=" << s.beta
         << ",seed=" << s.seed;
      break;
    case ScheduleKind::LogOverK:
      os << "logk:alpha=" << s.alpha;
      break;
    case ScheduleKind::InverseLog:
      return "invlog";
    case ScheduleKind::Table:
      os << "table:n=" << s.values.size();
      break;
  }
  return os.str();
}

}  // namespace aeg
