#include "aeg/operators.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "aeg/parse_util.hpp"
#include "aeg/rng.hpp"

namespace aeg {

namespace {

constexpr double kMonotoneTol = -1e-10;   // audit violation threshold and PSD slack
constexpr double kZeroResidualTol = 1e-12;

void check_finite(const Vector& v, const char* name) {
  if (!v.allFinite()) throw std::invalid_argument(std::string(name) + " has nonfinite entries");
}

// Spectral norm estimate by power iteration on B'B; converges from below.
double power_iteration_norm(const Matrix& B, int iters = 100) {
  if (B.size() == 0) return 0.0;
  Rng rng(0x5eed, RngStream::Internal);
  Vector v(B.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.uniform(-1.0, 1.0);
  double norm = v.norm();
  if (norm == 0.0) return 0.0;
  v /= norm;
  double sigma = 0.0;
  for (int it = 0; it < iters; ++it) {
    Vector w = B * v;
    sigma = w.norm();
    if (sigma == 0.0) return 0.0;
    v = B.transpose() * w;
    const double n = v.norm();
    if (n == 0.0) return sigma;
    v /= n;
  }
  return (B * v).norm();
}

void assert_known_zero(const ProblemInstance& p) {
  if (!p.known_zero) return;
  const double res = p.evaluator(*p.known_zero).norm();
  const double tol = kZeroResidualTol * (1.0 + p.known_zero->norm());
  if (!(res <= tol))
    throw std::logic_error("constructed known zero fails its residual bound: " +
                           std::to_string(res));
}

// Solution structure of Bx = b via SVD: least-squares basepoint plus an
// orthonormal kernel basis. Returns nothing when the system is inconsistent.
std::optional<SolutionSet> affine_solutions(const Matrix& B, const Vector& b) {
  Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv[0] : 0.0;
  const double rank_tol = smax * 1e-12;

  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > rank_tol) ++rank;

  // min-norm least-squares solution
  Vector utb = svd.matrixU().transpose() * b;
  Vector z = Vector::Zero(B.cols());
  for (Eigen::Index i = 0; i < rank; ++i) z[i] = utb[i] / sv[i];
  Vector xhat = svd.matrixV() * z;

  if ((B * xhat - b).norm() > 1e-10 * (1.0 + b.norm())) return std::nullopt;

  SolutionSet out;
  out.basepoint = xhat;
  if (rank == B.cols()) {
    out.kind = SolutionSet::Kind::Point;
  } else {
    out.kind = SolutionSet::Kind::Affine;
    for (Eigen::Index i = rank; i < B.cols(); ++i)
      out.directions.push_back(svd.matrixV().col(i));
  }
  return out;
}

ProblemInstance make_affine_core(const Matrix& B, const Vector& b, double lipschitz) {
  ProblemInstance p;
  p.dim = B.rows();
  p.lipschitz = lipschitz;
  p.evaluator = [B, b](const Vector& x) -> Vector { return B * x - b; };
  if (auto sol = affine_solutions(B, b)) {
    p.known_zero = sol->basepoint;
    p.solution_set = std::move(*sol);
  }
  assert_known_zero(p);
  return p;
}

}  // namespace

Vector eval(const ProblemInstance& problem, const Vector& x) {
  if (x.size() != problem.dim)
    throw std::invalid_argument("eval: dimension mismatch (" + std::to_string(x.size()) +
                                " vs " + std::to_string(problem.dim) + ")");
  return problem.evaluator(x);
}

Vector project_ball(const Vector& x, const Vector& center, double radius) {
  if (x.size() != center.size()) throw std::invalid_argument("project_ball: dimension mismatch");
  if (!(radius > 0.0)) throw std::invalid_argument("project_ball: radius must be positive");
  const Vector diff = x - center;
  const double n = diff.norm();
  if (n <= radius) return x;  // identity on the ball, exact
  return center + (radius / n) * diff;
}

ProblemInstance make_rotation_projection(int d, std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("make_rotation_projection: d must be >= 1");
  const Eigen::Index n = 2 * static_cast<Eigen::Index>(d);

  Rng rng(seed, RngStream::Problem);
  Vector xstar(n);
  for (Eigen::Index i = 0; i < n; ++i) xstar[i] = rng.normal();

  // N = [[0, I], [-I, 0]] applied matrix-free.
  auto applyN = [d](const Vector& x) -> Vector {
    Vector out(x.size());
    out.head(d) = x.tail(d);
    out.tail(d) = -x.head(d);
    return out;
  };

  // b = N x* + x* makes M(x*) = Nx* - b + P(x*) vanish, since P(x*) = x*.
  const Vector b = applyN(xstar) + xstar;

  ProblemInstance p;
  p.dim = n;
  p.lipschitz = 2.0;  // ||N||_2 + Lip(P) = 1 + 1
  p.known_zero = xstar;
  p.solution_set = SolutionSet{SolutionSet::Kind::Point, xstar, {}};
  p.evaluator = [applyN, b, xstar](const Vector& x) -> Vector {
    return applyN(x) - b + project_ball(x, xstar, 1.0);
  };
  assert_known_zero(p);
  return p;
}

ProblemInstance make_shift_problem(long long horizon) {
  if (horizon < 1) throw std::invalid_argument("make_shift_problem: horizon must be >= 1");
  const Eigen::Index n = 2 * (static_cast<Eigen::Index>(horizon) + 1);

  ProblemInstance p;
  p.dim = n;
  p.lipschitz = 2.0;  // ||I - S||_2 <= 2 since the shift S is nonexpansive
  Vector xstar = Vector::Zero(n);
  xstar[0] = 1.0;
  p.known_zero = xstar;
  p.solution_set = SolutionSet{SolutionSet::Kind::Point, xstar, {}};
  p.evaluator = [](const Vector& x) -> Vector {
    Vector out(x.size());
    out[0] = x[0] - 1.0;  // b0 = 1
    if (x.size() > 1) out[1] = x[1] - x[0] + 1.0;  // b1 = -1
    for (Eigen::Index i = 2; i < x.size(); ++i) out[i] = x[i] - x[i - 1];
    return out;
  };
  assert_known_zero(p);
  return p;
}

ProblemInstance make_affine(const Matrix& B, const Vector& b) {
  if (B.rows() != B.cols()) throw std::invalid_argument("make_affine: B must be square");
  if (b.size() != B.rows()) throw std::invalid_argument("make_affine: b dimension mismatch");
  if (!B.allFinite()) throw std::invalid_argument("make_affine: B has nonfinite entries");
  check_finite(b, "b");

  const Matrix sym = 0.5 * (B + B.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const double lambda_min = es.eigenvalues().minCoeff();
  if (lambda_min < kMonotoneTol) {
    std::ostringstream msg;
    msg << "make_affine: B is not monotone; symmetric part has eigenvalue " << lambda_min;
    throw std::invalid_argument(msg.str());
  }

  return make_affine_core(B, b, power_iteration_norm(B));
}

ProblemInstance make_bilinear_saddle(const Matrix& A, const Vector& c, const Vector& d) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  if (c.size() != m || d.size() != n)
    throw std::invalid_argument("make_bilinear_saddle: c/d dimensions must match A");
  if (!A.allFinite()) throw std::invalid_argument("make_bilinear_saddle: A has nonfinite entries");
  check_finite(c, "c");
  check_finite(d, "d");

  // G(x,y) = (Ay + c, -A'x + d) is the affine map Bz - rhs with skew B.
  Matrix B = Matrix::Zero(m + n, m + n);
  B.topRightCorner(m, n) = A;
  B.bottomLeftCorner(n, m) = -A.transpose();
  Vector rhs(m + n);
  rhs.head(m) = -c;
  rhs.tail(n) = -d;

  ProblemInstance p = make_affine_core(B, rhs, power_iteration_norm(A));
  p.evaluator = [A, c, d, m, n](const Vector& z) -> Vector {
    Vector out(m + n);
    out.head(m) = A * z.tail(n) + c;
    out.tail(n) = -A.transpose() * z.head(m) + d;
    return out;
  };
  assert_known_zero(p);
  return p;
}

OperatorAudit audit_operator(const ProblemInstance& problem, int samples, double pair_scale,
                             std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("audit_operator: samples must be >= 1");
  if (!(pair_scale > 0.0)) throw std::invalid_argument("audit_operator: pair_scale must be > 0");

  Rng rng(seed, RngStream::Audit);
  OperatorAudit out;
  out.samples = samples;
  out.seed = seed;
  out.worst_inner = std::numeric_limits<double>::infinity();

  Vector x(problem.dim), xp(problem.dim);
  for (int s = 0; s < samples; ++s) {
    for (Eigen::Index i = 0; i < problem.dim; ++i) x[i] = rng.uniform(-pair_scale, pair_scale);
    for (Eigen::Index i = 0; i < problem.dim; ++i) xp[i] = rng.uniform(-pair_scale, pair_scale);
    const Vector dm = problem.evaluator(x) - problem.evaluator(xp);
    const Vector dx = x - xp;
    const double inner = dm.dot(dx);
    out.worst_inner = std::min(out.worst_inner, inner);
    if (inner < kMonotoneTol) ++out.monotone_violations;
    const double dist = dx.norm();
    if (dist > 0.0) out.lipschitz_estimate = std::max(out.lipschitz_estimate, dm.norm() / dist);
  }
  return out;
}

namespace {

Matrix read_matrix_block(std::istream& in, Eigen::Index rows, Eigen::Index cols,
                         const std::string& path) {
  Matrix M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      if (!(in >> M(r, c)))
        throw ParseError("matrix file '" + path + "' ended before row " + std::to_string(r + 1),
                         0);
  return M;
}

Vector read_vector_block(std::istream& in, Eigen::Index n, const std::string& path,
                         const char* name) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(in >> v[i]))
      throw ParseError("matrix file '" + path + "' is missing vector " + name, 0);
  return v;
}

}  // namespace

ProblemInstance parse_problem(std::string_view spec) {
  const SpecString s = parse_spec_string(spec);
  if (s.kind == "rotproj") {
    spec_check_keys(s, "d,seed");
    const long long d = spec_int(s, "d");
    if (d < 1) throw ParseError("rotproj: d must be >= 1", 0);
    return make_rotation_projection(static_cast<int>(d), spec_uint(s, "seed"));
  }
  if (s.kind == "shift") {
    spec_check_keys(s, "k");
    const long long K = spec_int(s, "k");
    if (K < 1) throw ParseError("shift: K must be >= 1", 0);
    return make_shift_problem(K);
  }
  if (s.kind == "affine" || s.kind == "saddle") {
    spec_check_keys(s, "file");
    const std::string path = spec_path(s, "file");
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open matrix file '" + path + "'", 0);
    Eigen::Index rows = 0, cols = 0;
    if (!(in >> rows >> cols) || rows < 1 || cols < 1)
      throw ParseError("matrix file '" + path + "' must start with 'rows cols'", 0);
    const Matrix M = read_matrix_block(in, rows, cols, path);
    if (s.kind == "affine") {
      if (rows != cols) throw ParseError("affine: matrix must be square", 0);
      return make_affine(M, read_vector_block(in, rows, path, "b"));
    }
    const Vector c = read_vector_block(in, rows, path, "c");
    const Vector d = read_vector_block(in, cols, path, "d");
    return make_bilinear_saddle(M, c, d);
  }
  throw ParseError("unknown problem kind '" + s.kind + "'", 0);
}

}  // namespace aeg
