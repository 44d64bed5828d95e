#pragma once

#include <optional>
#include <span>
#include <vector>

#include "aeg/operators.hpp"
#include "aeg/schedules.hpp"

// Rate diagnostics: the Lyapunov quantities psi and phi, the scalar
// worst-case recursion that majorizes psi, the discrete Gronwall expansion,
// asymptotic predictions for the two Chung recursions, and empirical log-log
// slope fits. Everything here is a pure function of its inputs.

namespace aeg {

// psi = 0.5 ||M(x) + eps (x - v)||^2; the default anchor is the origin.
double psi_value(const ProblemInstance& problem, const Vector& x, double eps);
double psi_value(const ProblemInstance& problem, const Vector& x, double eps, const Vector& anchor);

// phi = 0.5 ||x - target||^2
double phi_value(const Vector& x, const Vector& target);

// Orthogonal projection of the anchor onto the problem's solution set: the
// strong limit of the anchored methods. Empty when the problem carries no
// solution metadata.
std::optional<Vector> min_norm_target(const ProblemInstance& problem, const Vector& anchor);

struct WorstCaseParams {
  double delta = 0.1;    // in (0,1)
  double c_delta = 1.0;  // >= 0
  double theta = 0.5;    // > 0
  long long k0 = 0;
  double r0 = 1.0;       // value at k0, standing in for psi^{k0}
};

// Majorant recursion
//   r^{k+1} = (1 - 2(1-delta) theta eps^k) r^k
//             + c_delta theta eps^k ((eps^{k+1} - eps^k) / (theta eps^k))^2
// over k in [k0, K]; requires eps^k > 0 and 2(1-delta) theta eps^k < 1 on the
// whole range (error names the first offending index). Returns r^{k0..K}.
std::vector<double> worst_case_sequence(const WorstCaseParams& params, const Schedule& schedule,
                                        long long K);

// Explicit expansion of f^{k+1} <= (1 - eps^k) f^k + eps^k h^k:
//   bound[k] = f0 / gamma^k + (1/gamma^k) sum_{j<=k} gamma^j eps^j h^j,
// gamma^k = prod_{l<=k} (1 - eps^l)^{-1}, computed with rescaling so the
// products stay representable when gamma exceeds 1e300. Requires every
// eps^k in [0, 1).
std::vector<double> gronwall_expand(double f0, std::span<const double> eps,
                                    std::span<const double> h);

enum class ChungKind { Polynomial, PowerGap };

struct ChungPrediction {
  // psi^k = O(k^{-exponent}); the log_factor flag marks the critical
  // polynomial case psi^k = O(k^{-c} log k).
  double exponent = 0.0;
  std::optional<double> leading_constant;
  bool log_factor = false;
};

// Asymptotics of the scalar recursions
//   Polynomial: psi^{k+1} <= (1 - c/k)   psi^k + C/k^{p+1}   (c, p, C > 0)
//   PowerGap:   psi^{k+1} <= (1 - c/k^s) psi^k + C/k^t       (0 < s < 1 < ... , s < t)
// For Polynomial, p_or_s is p and t is ignored; for PowerGap, p_or_s is s
// and t is required.
ChungPrediction chung_prediction(ChungKind kind, double c, double p_or_s,
                                 std::optional<double> t, double C);

struct SamplePoint {
  double k = 0.0;
  double value = 0.0;
};

struct RateReport {
  double slope = 0.0;      // fitted exponent p in value ~ C k^p
  double intercept = 0.0;  // log C (natural log)
  double k_lo = 0.0;
  double k_hi = 0.0;
  double r_squared = 0.0;
};

// Least-squares fit of log(value) against log(k) over [k_lo, k_hi], using
// only strictly positive samples; requires at least 10 of them.
RateReport fit_slope(std::span<const SamplePoint> series, double k_lo, double k_hi);

}  // namespace aeg
