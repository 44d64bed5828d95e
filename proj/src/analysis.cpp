#include "aeg/analysis.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace aeg {

double psi_value(const ProblemInstance& problem, const Vector& x, double eps) {
  return 0.5 * (eval(problem, x) + eps * x).squaredNorm();
}

double psi_value(const ProblemInstance& problem, const Vector& x, double eps,
                 const Vector& anchor) {
  if (anchor.size() != x.size()) throw std::invalid_argument("psi_value: dimension mismatch");
  return 0.5 * (eval(problem, x) + eps * (x - anchor)).squaredNorm();
}

double phi_value(const Vector& x, const Vector& target) {
  if (x.size() != target.size()) throw std::invalid_argument("phi_value: dimension mismatch");
  return 0.5 * (x - target).squaredNorm();
}

std::optional<Vector> min_norm_target(const ProblemInstance& problem, const Vector& anchor) {
  if (problem.solution_set) {
    const SolutionSet& s = *problem.solution_set;
    if (s.kind == SolutionSet::Kind::Point) return s.basepoint;
    Vector proj = s.basepoint;
    const Vector rel = anchor - s.basepoint;
    for (const Vector& d : s.directions) proj += rel.dot(d) * d;
    return proj;
  }
  if (problem.known_zero) return *problem.known_zero;
  return std::nullopt;
}

std::vector<double> worst_case_sequence(const WorstCaseParams& params, const Schedule& schedule,
                                        long long K) {
  if (!(params.delta > 0.0 && params.delta < 1.0))
    throw std::invalid_argument("worst_case_sequence: delta must lie in (0,1)");
  if (params.c_delta < 0.0)
    throw std::invalid_argument("worst_case_sequence: c_delta must be nonnegative");
  if (!(params.theta > 0.0)) throw std::invalid_argument("worst_case_sequence: theta must be > 0");
  if (params.k0 < 0 || K < params.k0)
    throw std::invalid_argument("worst_case_sequence: need 0 <= k0 <= K");

  const double contraction_gain = 2.0 * (1.0 - params.delta) * params.theta;
  for (long long k = params.k0; k <= K; ++k) {
    const double e = eps_at(schedule, k, params.theta);
    if (!(e > 0.0)) {
      std::ostringstream msg;
      msg << "worst_case_sequence: schedule value is not positive at k = " << k
          << "; the recursion divides by eps^k";
      throw std::invalid_argument(msg.str());
    }
    if (!(contraction_gain * e < 1.0)) {
      std::ostringstream msg;
      msg << "worst_case_sequence: contraction factor 2(1-delta) theta eps^k >= 1 at k = " << k;
      throw std::invalid_argument(msg.str());
    }
  }

  std::vector<double> r;
  r.reserve(static_cast<std::size_t>(K - params.k0 + 1));
  r.push_back(params.r0);
  double eps_k = eps_at(schedule, params.k0, params.theta);
  for (long long k = params.k0; k < K; ++k) {
    const double eps_k1 = eps_at(schedule, k + 1, params.theta);
    const double rel = (eps_k1 - eps_k) / (params.theta * eps_k);
    const double next = (1.0 - contraction_gain * eps_k) * r.back() +
                        params.c_delta * params.theta * eps_k * rel * rel;
    r.push_back(next);
    eps_k = eps_k1;
  }
  return r;
}

std::vector<double> gronwall_expand(double f0, std::span<const double> eps,
                                    std::span<const double> h) {
  if (eps.size() != h.size())
    throw std::invalid_argument("gronwall_expand: eps and h must have the same length");
  std::vector<double> bound(eps.size());

  // gamma and the forcing sum are kept rescaled by exp(-shift) so the
  // running product never overflows.
  double gamma = 1.0;
  double sum = 0.0;
  double shift = 0.0;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    const double e = eps[k];
    if (!(e >= 0.0 && e < 1.0))
      throw std::invalid_argument("gronwall_expand: eps^k must lie in [0, 1) at k = " +
                                  std::to_string(k));
    gamma /= (1.0 - e);
    sum += gamma * e * h[k];
    bound[k] = (f0 * std::exp(-shift) + sum) / gamma;
    if (gamma > 1e300) {
      shift += std::log(gamma);
      sum /= gamma;
      gamma = 1.0;
    }
  }
  return bound;
}

ChungPrediction chung_prediction(ChungKind kind, double c, double p_or_s,
                                 std::optional<double> t, double C) {
  ChungPrediction out;
  if (kind == ChungKind::Polynomial) {
    const double p = p_or_s;
    if (!(c > 0.0 && p > 0.0 && C > 0.0))
      throw std::invalid_argument("chung_prediction: polynomial kind needs c, p, C > 0");
    if (c > p) {
      out.exponent = p;
      out.leading_constant = C / (c - p);
    } else if (c == p) {
      out.exponent = c;
      out.log_factor = true;
    } else {
      out.exponent = c;
    }
    return out;
  }
  const double s = p_or_s;
  if (!t) throw std::invalid_argument("chung_prediction: power-gap kind needs t");
  if (!(s > 0.0 && s < 1.0 && *t > s && c > 0.0 && C > 0.0))
    throw std::invalid_argument("chung_prediction: power-gap kind needs 0 < s < 1, t > s, c, C > 0");
  out.exponent = *t - s;
  out.leading_constant = C / c;
  return out;
}

RateReport fit_slope(std::span<const SamplePoint> series, double k_lo, double k_hi) {
  if (!(k_lo < k_hi)) throw std::invalid_argument("fit_slope: need k_lo < k_hi");

  std::vector<double> xs, ys;
  for (const SamplePoint& p : series) {
    if (p.k < k_lo || p.k > k_hi) continue;
    if (!(p.k > 0.0) || !(p.value > 0.0) || !std::isfinite(p.value)) continue;
    xs.push_back(std::log(p.k));
    ys.push_back(std::log(p.value));
  }
  if (xs.size() < 10)
    throw std::invalid_argument("fit_slope: need at least 10 positive samples in the window, got " +
                                std::to_string(xs.size()));

  const std::size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_slope: window holds a single distinct k");

  RateReport out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  out.k_lo = k_lo;
  out.k_hi = k_hi;
  out.r_squared = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
  return out;
}

}  // namespace aeg
