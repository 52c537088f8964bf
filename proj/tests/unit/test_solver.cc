#include <cmath>

#include <gtest/gtest.h>

#include "dcs/error.h"
#include "dcs/model.h"
#include "dcs/networks.h"
#include "dcs/random.h"
#include "dcs/solver.h"

namespace dcs {
namespace {

Matrix RandomMatrix(int rows, int cols, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = scale * rng.Normal();
  return m;
}

double SumNorm1(const Sequence& u) {
  double s = 0.0;
  for (const Vector& v : u) s += v.lpNorm<1>();
  return s;
}

double SummedError(const Sequence& a, const Sequence& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]).norm();
  return s;
}

// One step, A = 0, C = I: r0 = y0 and the program reduces to
// min ||u||_1 s.t. B u = y1. Optimum from an LP solver: 2.75 at (0, 2.5, 0.25).
RecoveryProblem HandProblem() {
  Matrix b(2, 3);
  b << 1.0, 0.5, -1.0, 0.0, 1.0, 2.0;
  const SystemModel sys = SystemModel::Create(Matrix::Zero(2, 2), b, Matrix::Identity(2, 2));
  Vector y0(2), y1(2);
  y0 << 0.3, -0.2;
  y1 << 1.0, 3.0;
  return RecoveryProblem{sys, {y0, y1}};
}

TEST(Solver, HandInstanceMatchesLinearProgram) {
  const RecoverySolution sol = Solve(HandProblem());
  EXPECT_TRUE(sol.converged);
  EXPECT_NEAR(sol.objective, 2.75, 1e-7);
  EXPECT_NEAR(sol.inputs[0](0), 0.0, 1e-6);
  EXPECT_NEAR(sol.inputs[0](1), 2.5, 1e-6);
  EXPECT_NEAR(sol.inputs[0](2), 0.25, 1e-6);
  EXPECT_NEAR(sol.states[0](0), 0.3, 1e-8);
  EXPECT_LE(sol.dual_bound, sol.objective + 1e-9);
}

TEST(Solver, VertexOracleAgreesOnHandInstance) {
  const RecoverySolution sol = L1OracleSmall(HandProblem());
  EXPECT_NEAR(sol.objective, 2.75, 1e-10);
}

TEST(Solver, MatchesVertexOracleOnRandomInstances) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const SystemModel sys = SystemModel::Create(RandomMatrix(3, 3, seed, 0.4),
                                                RandomMatrix(3, 5, seed + 100),
                                                RandomMatrix(2, 3, seed + 200));
    const SparseInputs u = GenerateSparseInputs(5, 2, 1, ValueDistribution{}, seed);
    const Trajectory t = Simulate(sys, u.inputs, RandomMatrix(3, 1, seed + 300));
    const RecoveryProblem problem{sys, t.outputs};
    const RecoverySolution oracle = L1OracleSmall(problem);
    const RecoverySolution sol = Solve(problem);
    EXPECT_LE(std::abs(sol.objective - oracle.objective), 1e-6 * std::max(1.0, oracle.objective))
        << "seed " << seed;
  }
}

TEST(Solver, NoiselessRecoveryWithInvertibleC) {
  GaussianOptions opts;
  opts.a_scale = 1.0 / std::sqrt(10.0);
  const SystemModel sys = GaussianSystem(10, 20, 10, 5, opts).sys;
  const SparseInputs u = GenerateSparseInputs(20, 4, 1, ValueDistribution{}, 6);
  const Trajectory t = Simulate(sys, u.inputs, Vector::Zero(10));
  const RecoverySolution sol = Solve(RecoveryProblem{sys, t.outputs});
  EXPECT_LT(SummedError(sol.inputs, u.inputs), 1e-6);
  EXPECT_EQ(sol.status, SolveStatus::kConverged);
  EXPECT_LT(sol.dynamics_residual, 1e-8);
  EXPECT_EQ(sol.supports[0], u.pattern.supports[0]);
}

TEST(Solver, SequentialRecoversWhenCIsInvertible) {
  GaussianOptions opts;
  opts.a_scale = 1.0 / std::sqrt(10.0);
  const SystemModel sys = GaussianSystem(10, 20, 10, 7, opts).sys;
  const SparseInputs u = GenerateSparseInputs(20, 4, 1, ValueDistribution{}, 8);
  const Trajectory t = Simulate(sys, u.inputs, Vector::Zero(10));
  RecoveryProblem problem{sys, t.outputs};
  problem.strategy = RecoveryStrategy::kSequential;
  const RecoverySolution sol = Solve(problem);
  EXPECT_LT(SummedError(sol.inputs, u.inputs), 1e-5);
}

TEST(Solver, NoisyProgramStaysInsideTheBalls) {
  GaussianOptions opts;
  opts.a_scale = 1.0 / std::sqrt(10.0);
  const SystemModel sys = GaussianSystem(10, 20, 10, 9, opts).sys;
  const SparseInputs u = GenerateSparseInputs(20, 2, 3, ValueDistribution{}, 10);
  Sequence noise;
  Rng rng(11);
  for (int k = 0; k <= 2; ++k) {
    Vector e(10);
    for (int i = 0; i < 10; ++i) e(i) = rng.Uniform(-0.02, 0.02);
    noise.push_back(e);
  }
  const Trajectory t = Simulate(sys, u.inputs, Vector::Zero(10), nullptr, &noise);
  RecoveryProblem problem{sys, t.outputs, RecoveryMode::kNoisy, 0.1};
  const RecoverySolution sol = Solve(problem);
  for (double r : sol.output_residuals) EXPECT_LE(r, 0.1 + 1e-6);
  // The true inputs are feasible, so the optimum cannot exceed their norm.
  EXPECT_LE(sol.objective, SumNorm1(u.inputs) + 1e-6);
  EXPECT_LE(sol.dual_bound, sol.objective + 1e-9);
}

TEST(Solver, BruteForceFindsSparsestInputs) {
  const SystemModel sys = SystemModel::Create(RandomMatrix(3, 3, 1, 0.4), RandomMatrix(3, 5, 2),
                                              Matrix::Identity(3, 3));
  const SparseInputs u = GenerateSparseInputs(5, 2, 1, ValueDistribution{}, 3);
  const Trajectory t = Simulate(sys, u.inputs, Vector::Zero(3));
  const RecoverySolution sol = SolveP0BruteForce(RecoveryProblem{sys, t.outputs}, 2);
  EXPECT_EQ(sol.l0_norm, 2);
  EXPECT_LT(SummedError(sol.inputs, u.inputs), 1e-8);
  EXPECT_THROW(SolveP0BruteForce(RecoveryProblem{sys, t.outputs}, 2, 10), BudgetError);
}

TEST(Solver, DeterministicAcrossCalls) {
  GaussianOptions opts;
  opts.a_scale = 1.0 / std::sqrt(8.0);
  const SystemModel sys = GaussianSystem(8, 16, 8, 21, opts).sys;
  const SparseInputs u = GenerateSparseInputs(16, 3, 2, ValueDistribution{}, 22);
  const Trajectory t = Simulate(sys, u.inputs, Vector::Zero(8));
  const RecoverySolution a = Solve(RecoveryProblem{sys, t.outputs});
  const RecoverySolution b = Solve(RecoveryProblem{sys, t.outputs});
  EXPECT_EQ(a.iterations, b.iterations);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(a.inputs[k], b.inputs[k]);
}

TEST(Solver, RejectsMalformedProblems) {
  RecoveryProblem p = HandProblem();
  p.mode = RecoveryMode::kNoisy;
  p.eps_dprime = 0.0;
  EXPECT_THROW(Solve(p), ContractError);
  RecoveryProblem q = HandProblem();
  q.outputs[1] = Vector::Zero(3);
  EXPECT_THROW(Solve(q), DimensionError);
  SolverConfig bad;
  bad.optimality_tol = -1.0;
  EXPECT_THROW(Solve(HandProblem(), bad), ContractError);
}

TEST(Solver, BallProgramHonoursFreeVariables) {
  // min |x1| s.t. x0 + x1 = 1, x0 free and penalised by nothing: x1 = 0.
  L1BallProgram prog;
  prog.matrix = Matrix(1, 2);
  prog.matrix << 1.0, 1.0;
  prog.target = Vector::Ones(1);
  prog.block_sizes = {1};
  prog.radius = {0.0};
  prog.weights = Vector(2);
  prog.weights << 0.0, 1.0;
  const L1BallResult r = SolveL1BallProgram(prog, SolverConfig{});
  EXPECT_NEAR(r.x(0), 1.0, 1e-7);
  EXPECT_NEAR(r.x(1), 0.0, 1e-7);
  EXPECT_NEAR(r.objective, 0.0, 1e-7);
}

TEST(Solver, DefaultRadiusFormula) {
  const SystemModel sys = SystemModel::Create(Matrix::Zero(2, 2), Matrix::Ones(2, 3),
                                              2.0 * Matrix::Identity(2, 2));
  EXPECT_EQ(DefaultEpsDoublePrime(sys, NoiseSpec{0.5, 0.0, 0.0}, 4), 0.5);
  EXPECT_NEAR(DefaultEpsDoublePrime(sys, NoiseSpec{0.5, 0.25, 0.0}, 4), 0.5 + 2.0 * 0.25 * 4, 1e-12);
}

}  // namespace
}  // namespace dcs
