#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "aeg/parse_util.hpp"

// Regularization schedules: the nonnegative sequences eps^k that control the
// anchor strength of the anchored extra-gradient iteration, plus their
// continuous-time counterparts eps(t) for the flow integrator.
//
// A useful schedule vanishes, is non-summable, and has vanishing relative
// increments |eps^{k+1}-eps^k|/eps^k; validate() probes all three at a finite
// horizon.

namespace aeg {

enum class ScheduleKind {
  Zero,         // identically 0 (plain extra-gradient)
  Linear,       // alpha / (theta (k + beta))
  Power,        // alpha / (k + beta)^eta, eta in (0,1)
  Arctan,       // alpha (2/pi) atan(slope k) / (theta (k + beta))
  NoisyArctan,  // Arctan multiplier corrupted by seeded Gaussian noise
  LogOverK,     // alpha log(k~) / k~ with shifted index k~ = k + 2
  InverseLog,   // 1 / log(k~) with shifted index k~ = k + 2
  Table,        // user-supplied values, extended by holding the last one
};

struct Schedule {
  ScheduleKind kind = ScheduleKind::Zero;
  double alpha = 1.0;
  double beta = 2.0;
  double eta = 0.5;     // Power only
  double slope = 1e-3;  // Arctan/NoisyArctan ramp speed
  std::uint64_t seed = 0;
  std::vector<double> values;  // Table only

  // True for kinds whose formula divides by theta (Linear, Arctan,
  // NoisyArctan); those cancel theta in the update's theta*eps^k product.
  bool theta_coupled() const;
};

// Value of eps^k. theta must be positive; it only enters theta-coupled kinds.
// NoisyArctan draws its per-index noise from a counter-based generator, so
// the value depends on (seed, k) alone.
double eps_at(const Schedule& schedule, long long k, double theta);

// Continuous-time reading used by the flow integrator: Linear becomes
// alpha/t, Arctan ramps in t, Power keeps its shift. Noisy and Table kinds
// have no continuous meaning and are rejected.
double eps_time(const Schedule& schedule, double t);

struct ScheduleValidation {
  long long horizon = 0;
  double eps_tail = 0.0;        // eps at the horizon
  double partial_sum = 0.0;     // sum of eps^k for k <= horizon
  double relchange_tail = 0.0;  // max |eps^{k+1}-eps^k|/eps^k over the last decade
  bool decay_pass = false;
  bool divergence_pass = false;  // finite-horizon proxy, see below
  bool relchange_pass = false;

  bool all_pass() const { return decay_pass && divergence_pass && relchange_pass; }
};

// Empirically probes the three schedule conditions at a finite horizon
// (>= 100). Divergence of the series cannot be decided at any finite horizon;
// the proxy checks that k*eps^k stays positive over the last decade and that
// the partial sum is consistent with the implied logarithmic lower bound.
ScheduleValidation validate(const Schedule& schedule, long long horizon, double theta);

// Grammar:
//   zero
//   linear:alpha=<f>,beta=<f>
//   power:alpha=<f>,beta=<f>,eta=<f>          (eta in (0,1))
//   arctan:alpha=<f>,slope=<f>,beta=<f>       (slope defaults to 1e-3)
//   noisy-arctan:alpha=<f>,slope=<f>,beta=<f>,seed=<u>
//   logk:alpha=<f>
//   invlog
//   table:file=<path>                         (one value per line)
// Throws ParseError naming the offending token.
Schedule parse_schedule(std::string_view spec);

// Round-trip helper used when labeling outputs.
std::string schedule_to_string(const Schedule& schedule);

}  // namespace aeg
