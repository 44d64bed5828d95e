#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "aeg/analysis.hpp"
#include "aeg/operators.hpp"
#include "aeg/rng.hpp"
#include "aeg/solvers.hpp"

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

ProblemInstance zero_operator_1d() {
  ProblemInstance p;
  p.dim = 1;
  p.lipschitz = 0.0;
  p.evaluator = [](const Vector& x) -> Vector { return Vector::Zero(x.size()); };
  return p;
}

ProblemInstance skew_2d() {
  Matrix B(2, 2);
  B << 0, 1, -1, 0;  // M(x) = (x2, -x1)
  return make_affine(B, Vector::Zero(2));
}

Schedule const_schedule(double value) {
  Schedule s;
  s.kind = ScheduleKind::Table;
  s.values = {value};
  return s;
}

Schedule linear_schedule(double alpha, double beta) {
  Schedule s;
  s.kind = ScheduleKind::Linear;
  s.alpha = alpha;
  s.beta = beta;
  return s;
}

SolverConfig base_config(Method m, const ProblemInstance& p, double theta) {
  SolverConfig cfg;
  cfg.method = m;
  cfg.theta = theta;
  cfg.anchor = Vector::Zero(p.dim);
  cfg.x0 = Vector::Zero(p.dim);
  return cfg;
}

Vector random_x0(const ProblemInstance& p, std::uint64_t seed) {
  Rng rng(seed, RngStream::InitialPoint);
  Vector x0(p.dim);
  for (Eigen::Index i = 0; i < p.dim; ++i) x0[i] = rng.normal();
  return x0;
}

}  // namespace

TEST_CASE("geag step on the 1-D identity, eps = 1") {
  const ProblemInstance p = identity_1d();
  SolverConfig cfg = base_config(Method::GEAG, p, 0.5);
  cfg.schedule = const_schedule(1.0);
  cfg.x0 << 1.0;

  SolverState s = init_state(cfg, p);
  s = step_geag(s, p, cfg);
  // y1 = (1 - 0.5)*1 - 0.5*1 = 0; x1 = (1 - 0.5*M(0)) / (1 + 0.5) = 2/3
  CHECK(s.x[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(s.k == 1);
  CHECK(s.operator_evals == 2);
}

TEST_CASE("geag with zero operator halves the iterate when theta*eps = 1") {
  const ProblemInstance p = zero_operator_1d();
  SolverConfig cfg = base_config(Method::GEAG, p, 0.5);
  cfg.schedule = const_schedule(2.0);  // theta*eps = 1
  cfg.x0 << 8.0;
  SolverState s = init_state(cfg, p);
  s = step_geag(s, p, cfg);
  CHECK(s.x[0] == doctest::Approx(4.0).epsilon(1e-15));
  s = step_geag(s, p, cfg);
  CHECK(s.x[0] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("eg step on the 1-D identity") {
  const ProblemInstance p = identity_1d();
  SolverConfig cfg = base_config(Method::EG, p, 0.5);
  cfg.x0 << 1.0;
  SolverState s = init_state(cfg, p);
  s = step_eg(s, p, cfg);
  // y1 = 1 - 0.5 = 0.5; x1 = 1 - 0.5*0.5 = 0.75
  CHECK(s.x[0] == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("eg step on the 2-D skew rotation, hand-evaluated") {
  // x0 = (1,0): M(x0) = (0,-1); y1 = (1, 0.5); M(y1) = (0.5, -1);
  // x1 = (1,0) - 0.5*(0.5,-1) = (0.75, 0.5)
  const ProblemInstance p = skew_2d();
  SolverConfig cfg = base_config(Method::EG, p, 0.5);
  cfg.x0 << 1.0, 0.0;
  SolverState s = init_state(cfg, p);
  s = step_eg(s, p, cfg);
  CHECK(s.x[0] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(s.x[1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("geag with the zero schedule matches eg bit for bit") {
  const ProblemInstance p = make_rotation_projection(4, 7);
  SolverConfig geag = base_config(Method::GEAG, p, 0.99 / p.lipschitz);
  geag.schedule = Schedule{};  // Zero
  geag.x0 = random_x0(p, 3);
  SolverConfig eg = geag;
  eg.method = Method::EG;

  SolverState sg = init_state(geag, p);
  SolverState se = init_state(eg, p);
  for (int k = 0; k < 50; ++k) {
    sg = step_geag(sg, p, geag);
    se = step_eg(se, p, eg);
    for (Eigen::Index i = 0; i < p.dim; ++i) CHECK(sg.x[i] == se.x[i]);
  }
}

TEST_CASE("eag constant policy keeps its step; anchor enters at eps0 = 1/2") {
  const ProblemInstance p = identity_1d();
  SolverConfig cfg = base_config(Method::EAG_C, p, 1.0 / 8.0);
  cfg.anchor << 3.0;
  cfg.x0 << 1.0;
  SolverState s = init_state(cfg, p);
  const double theta0 = s.step;
  s = step_eag(s, p, cfg, EagPolicy::Constant);
  CHECK(s.step == theta0);
  // y1 = (x0+v)/2 - theta M(x0) = (1+3)/2 - 1/8 = 1.875,
  // x1 = (x0+v)/2 - theta M(y1) = 2 - 1.875/8 = 1.765625
  CHECK(s.x[0] == doctest::Approx(2.0 - 1.875 / 8.0).epsilon(1e-15));
}

TEST_CASE("eag variable step recursion, first update by hand") {
  // theta0 L = 0.5: theta1 = theta0 (1 - 0.25 / (1*2*(1-0.25))) = theta0 * 5/6
  const ProblemInstance p = identity_1d();
  SolverConfig cfg = base_config(Method::EAG_V, p, 0.5);
  cfg.x0 << 1.0;
  SolverState s = init_state(cfg, p);
  s = step_eag(s, p, cfg, EagPolicy::Variable);
  CHECK(s.step == doctest::Approx(0.5 * 5.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("feg first step lands on the anchor and then on v - M(v)/L") {
  const ProblemInstance p = make_rotation_projection(3, 1);
  SolverConfig cfg = base_config(Method::FEG, p, 0.0);
  cfg.anchor = random_x0(p, 5);
  cfg.x0 = random_x0(p, 6);
  SolverState s = init_state(cfg, p);
  s = step_feg(s, p, cfg);
  // eps0 = 1, eta0 = 0: y1 = v, x1 = v - (1/L) M(v)
  const Vector expected = cfg.anchor - (1.0 / p.lipschitz) * eval(p, cfg.anchor);
  CHECK((s.x - expected).norm() <= 1e-14 * (1.0 + expected.norm()));
}

TEST_CASE("feg with the anchor at the solution jumps there in one step") {
  const ProblemInstance p = make_rotation_projection(3, 2);
  SolverConfig cfg = base_config(Method::FEG, p, 0.0);
  cfg.anchor = *p.known_zero;
  cfg.x0 = random_x0(p, 8);
  SolverState s = init_state(cfg, p);
  s = step_feg(s, p, cfg);
  CHECK((s.x - *p.known_zero).norm() <= 1e-12 * (1.0 + p.known_zero->norm()));
}

TEST_CASE("feg 1-D identity at k = 1: extrapolation annihilates the iterate") {
  const ProblemInstance p = identity_1d();
  SolverConfig cfg = base_config(Method::FEG, p, 0.0);
  cfg.x0 << 1.0;
  SolverState s = init_state(cfg, p);
  s = step_feg(s, p, cfg);  // x1 = v - M(v)/L = 0... with v=0: x1 = 0
  // restart from a nonzero x1 to exercise k = 1
  s.x[0] = 0.8;
  const double x1 = s.x[0];
  s = step_feg(s, p, cfg);
  // eps1 = 1/2, eta1 = 1/2: y2 = x1 - x1/2 - x1/2 = 0; x2 = x1/2 - M(0) = x1/2
  CHECK(s.x[0] == doctest::Approx(x1 / 2.0).epsilon(1e-15));
}

TEST_CASE("apv step-size recursion, first update by hand") {
  // L=1, K=4, theta0=0.2, eps0=1/2, eps1=1/3:
  // theta1 = ((1-0.25-0.16)*(1/3)*0.2) / ((1-0.16)*0.5*0.5) = 0.0393.../0.21
  const ProblemInstance p = identity_1d();
  SolverConfig cfg = base_config(Method::APV, p, 0.2);
  cfg.x0 << 1.0;
  SolverState s = init_state(cfg, p);
  s = step_apv(s, p, cfg);
  const double expected = ((1.0 - 0.25 - 0.16) * (1.0 / 3.0) * 0.2) / ((1.0 - 0.16) * 0.5 * 0.5);
  CHECK(s.step == doctest::Approx(expected).epsilon(1e-14));
  CHECK(s.step == doctest::Approx(0.18730158730158730).epsilon(1e-12));
}

TEST_CASE("apv spends one fresh evaluation per iteration after warm-up") {
  const ProblemInstance p = make_rotation_projection(3, 3);
  SolverConfig cfg = base_config(Method::APV, p, default_theta(Method::APV, p.lipschitz));
  cfg.x0 = random_x0(p, 4);
  SolverState s = init_state(cfg, p);
  CHECK(s.operator_evals == 1);  // warm-up M(y^0)
  for (int k = 1; k <= 20; ++k) {
    s = step_apv(s, p, cfg);
    CHECK(s.operator_evals == k + 1);
  }
}

TEST_CASE("two-call methods spend exactly two evaluations per iteration") {
  const ProblemInstance p = make_rotation_projection(3, 3);
  for (Method m : {Method::GEAG, Method::EG, Method::EAG_C, Method::EAG_V, Method::FEG}) {
    SolverConfig cfg = base_config(m, p, default_theta(m, p.lipschitz));
    cfg.schedule = linear_schedule(1.0, 2.0);
    cfg.x0 = random_x0(p, 4);
    cfg.max_iters = 7;
    SolverState s = init_state(cfg, p);
    for (int k = 1; k <= 7; ++k) {
      switch (m) {
        case Method::GEAG: s = step_geag(s, p, cfg); break;
        case Method::EG: s = step_eg(s, p, cfg); break;
        case Method::EAG_C: s = step_eag(s, p, cfg, EagPolicy::Constant); break;
        case Method::EAG_V: s = step_eag(s, p, cfg, EagPolicy::Variable); break;
        case Method::FEG: s = step_feg(s, p, cfg); break;
        default: break;
      }
      CHECK(s.operator_evals == 2 * k);
    }
  }
}

TEST_CASE("fixed-point preservation: starting at the solution stays there") {
  const ProblemInstance p = make_rotation_projection(4, 9);
  for (Method m : {Method::GEAG, Method::EG, Method::EAG_C, Method::EAG_V, Method::FEG,
                   Method::APV}) {
    SolverConfig cfg = base_config(m, p, default_theta(m, p.lipschitz));
    cfg.schedule = linear_schedule(2.0, 2.0);
    cfg.anchor = *p.known_zero;
    cfg.x0 = *p.known_zero;
    cfg.max_iters = 30;
    const Trace t = run(cfg, p);
    CHECK((t.final_x - *p.known_zero).norm() <= 1e-10 * (1.0 + p.known_zero->norm()));
  }
}

TEST_CASE("geag explicit form satisfies the implicit update relation") {
  const ProblemInstance p = make_rotation_projection(5, 11);
  SolverConfig cfg = base_config(Method::GEAG, p, 0.99 / p.lipschitz);
  cfg.schedule = linear_schedule(2.0, 2.0);
  cfg.x0 = random_x0(p, 12);

  SolverState s = init_state(cfg, p);
  for (int k = 0; k < 200; ++k) {
    const Vector x_prev = s.x;
    const double eps_k = eps_at(cfg.schedule, s.k, cfg.theta);
    const double eps_k1 = eps_at(cfg.schedule, s.k + 1, cfg.theta);
    const Vector y = x_prev - cfg.theta * eps_k * (x_prev - cfg.anchor) -
                     cfg.theta * eval(p, x_prev);
    s = step_geag(s, p, cfg);
    // x^{k+1} = x^k - theta eps^{k+1} (x^{k+1} - v) - theta M(y^{k+1})
    const Vector residual = s.x - (x_prev - cfg.theta * eps_k1 * (s.x - cfg.anchor) -
                                   cfg.theta * eval(p, y));
    CHECK(residual.norm() <= 1e-10 * (1.0 + s.x.norm()));
  }
}

TEST_CASE("eg residual is monotone on the rotation-projection problem") {
  const ProblemInstance p = make_rotation_projection(5, 0);
  SolverConfig cfg = base_config(Method::EG, p, 0.99 / p.lipschitz);
  cfg.x0 = random_x0(p, 1);
  cfg.max_iters = 10000;
  cfg.record_stride = 1;
  const Trace t = run(cfg, p);
  for (std::size_t i = 1; i < t.rows.size(); ++i)
    CHECK(t.rows[i].residual <= t.rows[i - 1].residual * (1.0 + 1e-12));
}

TEST_CASE("anchor-shift equivalence") {
  // Running on M with anchor v matches v + (run on w -> M(w+v) with anchor 0).
  const ProblemInstance p = make_rotation_projection(5, 21);
  Vector v = random_x0(p, 22);

  ProblemInstance shifted;
  shifted.dim = p.dim;
  shifted.lipschitz = p.lipschitz;
  const auto inner = p.evaluator;
  shifted.evaluator = [inner, v](const Vector& w) -> Vector { return inner(w + v); };

  SolverConfig anchored = base_config(Method::GEAG, p, 0.99 / p.lipschitz);
  anchored.schedule = linear_schedule(2.0, 2.0);
  anchored.anchor = v;
  anchored.x0 = random_x0(p, 23);

  SolverConfig moved = anchored;
  moved.anchor = Vector::Zero(p.dim);
  moved.x0 = anchored.x0 - v;

  SolverState sa = init_state(anchored, p);
  SolverState sm = init_state(moved, shifted);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    sa = step_geag(sa, p, anchored);
    sm = step_geag(sm, shifted, moved);
    worst = std::max(worst, (sa.x - (v + sm.x)).norm());
  }
  CHECK(worst <= 1e-10 * (1.0 + v.norm()));
}

TEST_CASE("run stops immediately when x0 already meets the residual threshold") {
  const ProblemInstance p = identity_1d();
  SolverConfig cfg = base_config(Method::EG, p, 0.5);
  cfg.x0 = *p.known_zero;
  cfg.stop_residual = 1e-12;
  cfg.max_iters = 100;
  const Trace t = run(cfg, p);
  CHECK(t.reason == StopReason::ResidualThreshold);
  CHECK(t.iterations == 0);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0].k == 0.0);
}

TEST_CASE("run records k = 0, stride rows and the final iterate") {
  const ProblemInstance p = make_rotation_projection(3, 2);
  SolverConfig cfg = base_config(Method::EG, p, 0.99 / p.lipschitz);
  cfg.x0 = random_x0(p, 2);
  cfg.max_iters = 25;
  cfg.record_stride = 10;
  const Trace t = run(cfg, p);
  REQUIRE(t.rows.size() == 4);
  CHECK(t.rows[0].k == 0.0);
  CHECK(t.rows[1].k == 10.0);
  CHECK(t.rows[2].k == 20.0);
  CHECK(t.rows[3].k == 25.0);
  for (std::size_t i = 1; i < t.rows.size(); ++i) CHECK(t.rows[i].k > t.rows[i - 1].k);
}

TEST_CASE("run is deterministic") {
  const ProblemInstance p = make_rotation_projection(4, 5);
  SolverConfig cfg = base_config(Method::GEAG, p, 0.99 / p.lipschitz);
  cfg.schedule = linear_schedule(1.0, 2.0);
  cfg.x0 = random_x0(p, 5);
  cfg.max_iters = 300;
  const Trace a = run(cfg, p);
  const Trace b = run(cfg, p);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].residual == b.rows[i].residual);
    CHECK(a.rows[i].psi == b.rows[i].psi);
  }
}

TEST_CASE("run populates the dist column from the solution metadata") {
  Matrix B(2, 2);
  B << 0, 0, 0, 1;
  const ProblemInstance p = make_affine(B, Vector::Zero(2));
  SolverConfig cfg = base_config(Method::GEAG, p, 0.5);
  cfg.schedule = linear_schedule(2.0, 2.0);
  cfg.anchor << 3.0, 4.0;
  cfg.x0 << 1.0, 1.0;
  cfg.max_iters = 50;
  const Trace t = run(cfg, p);
  // target is the projection of (3,4) onto the x-axis, i.e. (3,0)
  REQUIRE(t.rows[0].dist.has_value());
  Vector target(2);
  target << 3.0, 0.0;
  CHECK(*t.rows[0].dist == doctest::Approx((cfg.x0 - target).norm()).epsilon(1e-12));
}

TEST_CASE("geag on the shift problem: residual drops by 50x between k=10 and k=1000") {
  const ProblemInstance p = make_shift_problem(1000);
  SolverConfig cfg = base_config(Method::GEAG, p, 0.99 / p.lipschitz);
  cfg.schedule = linear_schedule(2.0, 2.0);
  // start in span{e0, e1}, so the truncation is exact
  Rng rng(0, RngStream::InitialPoint);
  cfg.x0 = Vector::Zero(p.dim);
  cfg.x0[0] = rng.normal();
  cfg.x0[1] = rng.normal();
  cfg.max_iters = 1000;
  cfg.record_stride = 1;
  const Trace t = run(cfg, p);
  const double res10 = t.rows[10].residual;
  const double res1000 = t.rows[1000].residual;
  CHECK(res1000 * 50.0 <= res10);
}

TEST_CASE("validation rejects inadmissible step sizes") {
  const ProblemInstance p = identity_1d();  // L = 1
  {
    SolverConfig cfg = base_config(Method::GEAG, p, 1.0);
    cfg.schedule = linear_schedule(1.0, 2.0);
    CHECK_THROWS_AS(run(cfg, p), std::invalid_argument);  // theta L = 1 not < 1
  }
  {
    SolverConfig cfg = base_config(Method::EG, p, 1.5);
    CHECK_THROWS_AS(run(cfg, p), std::invalid_argument);
  }
  {
    SolverConfig cfg = base_config(Method::EAG_C, p, 0.2);  // > 1/(8L)
    CHECK_THROWS_AS(run(cfg, p), std::invalid_argument);
  }
  {
    SolverConfig cfg = base_config(Method::APV, p, 0.5);  // >= 1/(2 sqrt 3)
    CHECK_THROWS_AS(run(cfg, p), std::invalid_argument);
  }
  {
    SolverConfig cfg = base_config(Method::EG, p, 0.5);
    cfg.x0 = Vector::Zero(2);  // wrong dimension
    CHECK_THROWS_AS(run(cfg, p), std::invalid_argument);
  }
}

TEST_CASE("nonfinite iterates end the run gracefully") {
  // an operator with a wildly understated Lipschitz constant blows FEG up
  ProblemInstance p;
  p.dim = 1;
  p.lipschitz = 1e-3;  // true constant is 1e6
  p.evaluator = [](const Vector& x) -> Vector {
    return 1e6 * x - 1e6 * Vector::Ones(x.size());
  };
  SolverConfig cfg = base_config(Method::FEG, p, 0.0);
  cfg.x0 << 1.0;
  cfg.max_iters = 2000;
  const Trace t = run(cfg, p);
  CHECK(t.reason == StopReason::Nonfinite);
  CHECK(t.iterations < 2000);
}
