#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

// Monotone operator instances M : R^n -> R^n for the solver benchmarks,
// together with a sampling audit of their claimed monotonicity and Lipschitz
// constants. Instances are immutable after construction and safe to share
// read-only across concurrent runs; evaluators are pure and re-entrant.

namespace aeg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Solution metadata: either a single known zero or an affine subspace of
// zeros (basepoint plus an orthonormal set of directions). Anchored methods
// converge to the projection of the anchor onto this set.
struct SolutionSet {
  enum class Kind { Point, Affine };
  Kind kind = Kind::Point;
  Vector basepoint;
  std::vector<Vector> directions;
};

struct ProblemInstance {
  std::function<Vector(const Vector&)> evaluator;
  double lipschitz = 0.0;
  Eigen::Index dim = 0;
  std::optional<Vector> known_zero;
  std::optional<SolutionSet> solution_set;
};

// Applies the operator; throws std::invalid_argument on dimension mismatch.
Vector eval(const ProblemInstance& problem, const Vector& x);

// Skew rotation plus projection onto the unit ball centered at a seeded
// random x*:  M(x) = Nx - b + P(x)  with N = [[0, I], [-I, 0]] on R^{2d} and
// b chosen so that M(x*) = 0 exactly. Monotone with Lipschitz constant
// ||N||_2 + 1 = 2.
ProblemInstance make_rotation_projection(int d, std::uint64_t seed);

// Right-shift difference operator M(x) = x - Sx - b with b = (1,-1,0,...),
// truncated to dimension 2(K+1): starting in span{e0, e1}, K iterations of
// any of the shipped two-call methods cannot reach past that span. Monotone
// and 2-Lipschitz; the unique zero is e0.
ProblemInstance make_shift_problem(long long horizon);

// Generic affine instance M(x) = Bx - b. Rejects B whose symmetric part has
// an eigenvalue below -1e-10 (non-monotone). The Lipschitz constant is a
// 100-step power-iteration estimate of ||B||_2. When the system Bx = b is
// solvable, solution metadata is attached: a point for nonsingular B, an
// affine subspace (min-norm basepoint + orthonormal kernel basis) otherwise.
ProblemInstance make_affine(const Matrix& B, const Vector& b);

// Saddle operator of the bilinear Lagrangian L(x,y) = x'Ay + c'x - d'y:
//   G(x, y) = (Ay + c, -A'x + d)  on R^{m+n},
// monotone (skew linear part) with Lipschitz constant ||A||_2.
ProblemInstance make_bilinear_saddle(const Matrix& A, const Vector& c, const Vector& d);

// Euclidean projection onto the closed ball; the identity inside the ball.
Vector project_ball(const Vector& x, const Vector& center, double radius);

struct OperatorAudit {
  int monotone_violations = 0;     // pairs with inner product below -1e-10
  double worst_inner = 0.0;        // signed minimum of <M(x)-M(x'), x-x'>
  double lipschitz_estimate = 0.0; // max observed ||M(x)-M(x')|| / ||x-x'||
  int samples = 0;
  std::uint64_t seed = 0;
};

// Draws seeded pairs with coordinates uniform in [-pair_scale, pair_scale]
// and records the worst monotonicity inner product and the largest observed
// difference quotient. Deterministic for a fixed seed.
OperatorAudit audit_operator(const ProblemInstance& problem, int samples, double pair_scale,
                             std::uint64_t seed);

// CLI problem specs:
//   rotproj:d=<int>,seed=<int> | shift:k=<int> | affine:file=<path> |
//   saddle:file=<path>
// Matrix files: first line "rows cols", one whitespace-separated row per
// line, then the vector(s) each on one line (b for affine; c then d for
// saddle).
ProblemInstance parse_problem(std::string_view spec);

}  // namespace aeg
