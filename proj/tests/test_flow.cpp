#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "aeg/analysis.hpp"
#include "aeg/flow.hpp"
#include "aeg/rng.hpp"

using namespace aeg;

namespace {

ProblemInstance identity_1d() {
  ProblemInstance p;
  p.dim = 1;
  p.lipschitz = 1.0;
  p.evaluator = [](const Vector& x) -> Vector { return x; };
  Vector z = Vector::Zero(1);
  p.known_zero = z;
  p.solution_set = SolutionSet{SolutionSet::Kind::Point, z, {}};
  return p;
}

Schedule linear_schedule(double alpha) {
  Schedule s;
  s.kind = ScheduleKind::Linear;
  s.alpha = alpha;
  s.beta = 1.0;
  return s;
}

// x' = -x - (1/t) x from x(1) = 1 solves to x(t) = (1/t) e^{-(t-1)}.
double closed_form(double t) { return std::exp(-(t - 1.0)) / t; }

double integrate_identity_to_2(double step_h) {
  const ProblemInstance p = identity_1d();
  FlowConfig cfg;
  cfg.eps = linear_schedule(1.0);
  cfg.x0 = Vector::Ones(1);
  cfg.anchor = Vector::Zero(1);
  cfg.t0 = 1.0;
  cfg.t_end = 2.0;
  cfg.step_h = step_h;
  const Trace t = integrate_flow(cfg, p);
  return t.final_x[0];
}

}  // namespace

TEST_CASE("rk4 reproduces the closed-form 1-D trajectory to 1e-6") {
  const double got = integrate_identity_to_2(1e-3);
  CHECK(std::abs(got - 0.5 * std::exp(-1.0)) <= 1e-6);
  CHECK(std::abs(got - closed_form(2.0)) <= 1e-6);
}

TEST_CASE("step halving shows fourth-order convergence") {
  const double exact = closed_form(2.0);
  const double e1 = std::abs(integrate_identity_to_2(2e-2) - exact);
  const double e2 = std::abs(integrate_identity_to_2(1e-2) - exact);
  // halving the step must cut the error by about 2^4; allow a factor-2 band
  CHECK(e1 / e2 >= 8.0);
  CHECK(e1 / e2 <= 32.0);
}

TEST_CASE("zero operator and zero schedule freeze the trajectory") {
  ProblemInstance p;
  p.dim = 2;
  p.lipschitz = 0.0;
  p.evaluator = [](const Vector& x) -> Vector { return Vector::Zero(x.size()); };
  FlowConfig cfg;
  cfg.eps = Schedule{};  // zero
  cfg.x0 = Vector::Ones(2) * 1.5;
  cfg.anchor = Vector::Zero(2);
  cfg.t0 = 1.0;
  cfg.t_end = 5.0;
  cfg.step_h = 0.05;
  const Trace t = integrate_flow(cfg, p);
  CHECK((t.final_x - cfg.x0).norm() == 0.0);
  for (const TraceRow& row : t.rows) CHECK(row.residual == 0.0);
}

TEST_CASE("unregularized flow on a strongly monotone problem contracts monotonically") {
  Matrix B = Matrix::Identity(2, 2);
  const ProblemInstance p = make_affine(B, Vector::Zero(2));
  FlowConfig cfg;
  cfg.eps = Schedule{};  // zero
  cfg.x0 = Vector(2);
  cfg.x0 << 2.0, -1.0;
  cfg.anchor = Vector::Zero(2);
  cfg.t0 = 1.0;
  cfg.t_end = 20.0;
  cfg.step_h = 0.05;
  const Trace t = integrate_flow(cfg, p);
  REQUIRE(t.rows.size() > 10);
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    REQUIRE(t.rows[i].dist.has_value());
    CHECK(*t.rows[i].dist <= *t.rows[i - 1].dist * (1.0 + 1e-12));
  }
}

TEST_CASE("flow residual slope on rotation-projection with eps = 2/t is about -1") {
  const ProblemInstance p = make_rotation_projection(5, 0);
  FlowConfig cfg;
  cfg.eps = linear_schedule(2.0);
  Rng rng(1, RngStream::InitialPoint);
  cfg.x0 = Vector(p.dim);
  for (Eigen::Index i = 0; i < p.dim; ++i) cfg.x0[i] = rng.normal();
  cfg.anchor = Vector::Zero(p.dim);
  cfg.t0 = 1.0;
  cfg.t_end = 1000.0;
  cfg.step_h = 0.02;
  const Trace t = integrate_flow(cfg, p);

  std::vector<SamplePoint> pts;
  for (const TraceRow& r : t.rows) pts.push_back({r.k, r.residual});
  const RateReport fit = fit_slope(pts, 100.0, 1000.0);
  CHECK(fit.slope >= -1.15);
  CHECK(fit.slope <= -0.85);
}

TEST_CASE("slow schedule (alpha <= 1) stays within the one-sided rate band") {
  const ProblemInstance p = make_rotation_projection(5, 0);
  FlowConfig cfg;
  cfg.eps = linear_schedule(0.5);
  Rng rng(1, RngStream::InitialPoint);
  cfg.x0 = Vector(p.dim);
  for (Eigen::Index i = 0; i < p.dim; ++i) cfg.x0[i] = rng.normal();
  cfg.anchor = Vector::Zero(p.dim);
  cfg.t0 = 1.0;
  cfg.t_end = 1000.0;
  cfg.step_h = 0.02;
  const Trace t = integrate_flow(cfg, p);

  std::vector<SamplePoint> pts;
  for (const TraceRow& r : t.rows) pts.push_back({r.k, r.residual});
  const RateReport fit = fit_slope(pts, 100.0, 1000.0);
  // upper bound O(t^{-alpha(1-delta)}) with delta = 0.1; faster decay is fine
  CHECK(fit.slope >= -1.0 - 0.05);
  CHECK(fit.slope <= -0.5 * (1.0 - 0.1) + 0.1);
}

TEST_CASE("flow config validation") {
  const ProblemInstance p = identity_1d();
  FlowConfig cfg;
  cfg.eps = linear_schedule(1.0);
  cfg.x0 = Vector::Ones(1);
  cfg.anchor = Vector::Zero(1);
  cfg.t0 = 1.0;
  cfg.t_end = 2.0;
  cfg.step_h = 0.2;  // above the 0.1/(L + eps(t0)) = 0.05 stability guard
  CHECK_THROWS_AS(integrate_flow(cfg, p), std::invalid_argument);
  cfg.step_h = 0.01;
  cfg.t_end = 0.5;  // before t0
  CHECK_THROWS_AS(integrate_flow(cfg, p), std::invalid_argument);
}

TEST_CASE("row cap keeps long integrations bounded") {
  const ProblemInstance p = identity_1d();
  FlowConfig cfg;
  cfg.eps = linear_schedule(1.0);
  cfg.x0 = Vector::Ones(1);
  cfg.anchor = Vector::Zero(1);
  cfg.t0 = 1.0;
  cfg.t_end = 500.0;
  cfg.step_h = 0.01;  // 49900 steps
  const Trace t = integrate_flow(cfg, p);
  CHECK(t.rows.size() <= 10001);
  CHECK(t.rows.size() >= 500);
  CHECK(t.rows.back().k == doctest::Approx(500.0));
}
