#pragma once

#include <string>
#include <vector>

#include "dcs/model.h"

namespace dcs {

// P1: equality-constrained outputs. P2: ||y_k - C r_k|| <= eps_dprime.
enum class RecoveryMode { kNoiseless, kNoisy };

enum class RecoveryStrategy { kOneStep, kSequential };

struct RecoveryProblem {
  SystemModel sys;
  Sequence outputs;  // y_0..y_K
  RecoveryMode mode = RecoveryMode::kNoiseless;
  double eps_dprime = 0.0;
  RecoveryStrategy strategy = RecoveryStrategy::kOneStep;

  int horizon() const { return static_cast<int>(outputs.size()) - 1; }
  // Throws DimensionError / ContractError.
  void Validate() const;
};

struct SolverConfig {
  double feasibility_tol = 1e-8;
  double optimality_tol = 1e-7;  // relative duality gap
  int max_iterations = 50000;
  double rho = 1.0;            // initial ADMM penalty
  bool adaptive_rho = true;
  int check_interval = 25;     // iterations between certificate checks
  int equilibration_passes = 12;
  bool polish = true;          // support-restricted least-squares refinement
  double support_threshold = 1e-6;

  void Validate() const;
};

enum class SolveStatus { kConverged, kMaxIterations, kInfeasible };

std::string ToString(SolveStatus status);

struct RecoverySolution {
  Sequence states;  // r*_0..r*_K
  Sequence inputs;  // u*_0..u*_{K-1}
  double objective = 0.0;               // sum_k ||u*_k||_1
  double dual_bound = 0.0;              // certified lower bound on the optimum
  double dynamics_residual = 0.0;       // max_k ||r_{k+1} - A r_k - B u_k||
  std::vector<double> output_residuals; // ||y_k - C r*_k||, k = 0..K
  int iterations = 0;
  bool converged = false;
  SolveStatus status = SolveStatus::kMaxIterations;
  // Largest constraint violation of the returned point (0 when feasible).
  double best_residual = 0.0;
  bool polished = false;
  int l0_norm = 0;  // entries with |u_i| > support_threshold
  std::vector<std::vector<int>> supports;
};

// One-step recovery over the whole horizon. The states r_1..r_K are
// eliminated, so the program is over (r_0, u_0..u_{K-1}) with
// y = O_K r_0 + J u (P1) or per-step balls around y_k (P2). Dispatches to
// SolveSequential when problem.strategy is kSequential.
RecoverySolution Solve(const RecoveryProblem& problem,
                       const SolverConfig& config = {});

// Per-step recovery: r_0 is estimated as the least-squares (minimum-norm)
// solution of C r_0 = y_0, then for each k a single-step program over u_k
// is solved against y_{k+1} - C A r_k and the estimate is propagated as
// r_{k+1} = A r_k + B u_k.
RecoverySolution SolveSequential(const RecoveryProblem& problem,
                                 const SolverConfig& config = {});

// Exhaustive l0 search over per-step supports of size <= s_max. Noiseless
// problems only; throws BudgetError when (sum_{j<=s_max} C(m, j))^K exceeds
// `budget`.
RecoverySolution SolveP0BruteForce(const RecoveryProblem& problem, int s_max,
                                   long long budget = 1000000);

// Exact l1 minimum of a small noiseless problem by enumerating the basic
// feasible solutions of its linear-programming form. Throws BudgetError
// when n + K m exceeds `max_variables` or the vertex count exceeds
// `budget`.
RecoverySolution L1OracleSmall(const RecoveryProblem& problem,
                               int max_variables = 30,
                               long long budget = 1000000);

// eps'' = eps without disturbance, eps + sqrt(sigma_max(C^T C)) eps' K with.
double DefaultEpsDoublePrime(const SystemModel& sys, const NoiseSpec& noise,
                             int horizon);

// Indices with |u_i| > threshold.
std::vector<int> SupportOf(const Vector& u, double threshold);

// --- Generic engine -------------------------------------------------------

// minimize  sum_i weights_i |x_i|
// s.t.      ||M_b x - y_b||_2 <= radius_b   for each row block b
// A zero weight marks a free variable; a zero radius an equality block.
struct L1BallProgram {
  Matrix matrix;
  Vector target;
  std::vector<int> block_sizes;
  std::vector<double> radius;
  Vector weights;
};

struct L1BallResult {
  Vector x;
  double objective = 0.0;
  double dual_bound = 0.0;
  double max_violation = 0.0;
  int iterations = 0;
  bool polished = false;
  SolveStatus status = SolveStatus::kMaxIterations;
};

// Graph-form ADMM with Ruiz-style equilibration, residual-balanced penalty,
// support polishing and a duality-gap stopping certificate.
L1BallResult SolveL1BallProgram(const L1BallProgram& program,
                                const SolverConfig& config);

}  // namespace dcs
