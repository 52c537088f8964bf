#include "dcs/solver.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "combinatorics.h"
#include "dcs/error.h"

namespace dcs {
namespace {

using detail::Binomial;
using detail::NextCombination;

constexpr double kInf = std::numeric_limits<double>::infinity();

double WeightedL1(const Vector& x, const Vector& w) {
  return (x.cwiseAbs().array() * w.array()).sum();
}

// Row offsets of each block.
std::vector<Eigen::Index> BlockStarts(const std::vector<int>& sizes) {
  std::vector<Eigen::Index> starts(sizes.size() + 1, 0);
  for (std::size_t b = 0; b < sizes.size(); ++b) starts[b + 1] = starts[b] + sizes[b];
  return starts;
}

class BallProgramSolver {
 public:
  BallProgramSolver(const L1BallProgram& prog, const SolverConfig& cfg)
      : prog_(prog), cfg_(cfg), starts_(BlockStarts(prog.block_sizes)) {}

  L1BallResult Run();

 private:
  void Prepare();
  void Equilibrate();
  void Factor();
  void ProjectGraph(const Vector& c, const Vector& d, Vector* x, Vector* z) const;
  void ProjectBalls(Vector* z) const;
  // Per-block violation max_b(||M_b x - y_b|| - r_b), clamped at 0.
  double Violation(const Vector& mx_minus_y) const;
  Vector Restore(const Vector& x, double* violation) const;
  double DualValue(Vector mu) const;
  void Consider(const Vector& x, double violation, bool polished);
  bool TryPolish(const Vector& x_orig);
  bool Certified() const;

  const L1BallProgram& prog_;
  const SolverConfig& cfg_;
  std::vector<Eigen::Index> starts_;
  Eigen::Index rows_ = 0, cols_ = 0;
  bool all_equality_ = true;
  bool any_equality_ = false;

  std::vector<int> free_cols_;
  Matrix free_basis_;  // orthonormal basis of range(M_F)
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod_;
  Vector x_ls_;
  double ls_violation_ = 0.0;

  // Equilibrated data: scaled = diag(E) M diag(D).
  Vector col_scale_;
  Vector row_scale_;  // per row, constant within a block
  Matrix scaled_;
  Vector scaled_target_;
  std::vector<double> scaled_radius_;
  Vector scaled_weights_;
  bool skinny_ = true;
  Eigen::LLT<Matrix> llt_;

  // Best point seen so far.
  bool have_feasible_ = false;
  Vector best_x_;
  double best_objective_ = kInf;
  double best_violation_ = kInf;
  bool best_polished_ = false;
  double best_bound_ = 0.0;
  std::vector<int> last_support_;
};

void BallProgramSolver::Prepare() {
  rows_ = prog_.matrix.rows();
  cols_ = prog_.matrix.cols();
  if (starts_.back() != rows_) {
    throw DimensionError("block sizes do not add up to the matrix row count");
  }
  if (prog_.target.size() != rows_ || prog_.weights.size() != cols_ ||
      prog_.radius.size() != prog_.block_sizes.size()) {
    throw DimensionError("program target/weights/radius sizes are inconsistent");
  }
  for (double r : prog_.radius) {
    if (!(r >= 0.0)) throw ContractError("block radius must be nonnegative");
    if (r > 0.0) all_equality_ = false;
    if (r == 0.0) any_equality_ = true;
  }
  for (Eigen::Index i = 0; i < cols_; ++i) {
    if (!(prog_.weights(i) >= 0.0)) throw ContractError("weights must be nonnegative");
    if (prog_.weights(i) == 0.0) free_cols_.push_back(static_cast<int>(i));
  }
  if (!free_cols_.empty()) {
    Matrix mf(rows_, static_cast<Eigen::Index>(free_cols_.size()));
    for (std::size_t k = 0; k < free_cols_.size(); ++k) mf.col(k) = prog_.matrix.col(free_cols_[k]);
    free_basis_ = RangeBasis(mf);
  }
  cod_.compute(prog_.matrix);
  x_ls_ = cod_.solve(prog_.target);
  ls_violation_ = Violation(prog_.matrix * x_ls_ - prog_.target);
}

void BallProgramSolver::Equilibrate() {
  scaled_ = prog_.matrix;
  col_scale_ = Vector::Ones(cols_);
  row_scale_ = Vector::Ones(rows_);
  const std::size_t nb = prog_.block_sizes.size();
  for (int pass = 0; pass < cfg_.equilibration_passes; ++pass) {
    for (Eigen::Index j = 0; j < cols_; ++j) {
      const double c = scaled_.col(j).cwiseAbs().maxCoeff();
      if (c > 0.0) {
        const double f = 1.0 / std::sqrt(c);
        scaled_.col(j) *= f;
        col_scale_(j) *= f;
      }
    }
    for (std::size_t b = 0; b < nb; ++b) {
      const Eigen::Index len = starts_[b + 1] - starts_[b];
      if (len == 0) continue;
      const double c = scaled_.middleRows(starts_[b], len).cwiseAbs().maxCoeff();
      if (c > 0.0) {
        const double f = 1.0 / std::sqrt(c);
        scaled_.middleRows(starts_[b], len) *= f;
        row_scale_.segment(starts_[b], len) *= f;
      }
    }
  }
  scaled_target_ = row_scale_.cwiseProduct(prog_.target);
  scaled_radius_.resize(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    const double e = prog_.block_sizes[b] > 0 ? row_scale_(starts_[b]) : 1.0;
    scaled_radius_[b] = e * prog_.radius[b];
  }
  scaled_weights_ = prog_.weights.cwiseProduct(col_scale_);
}

void BallProgramSolver::Factor() {
  skinny_ = cols_ <= rows_;
  if (skinny_) {
    Matrix k = scaled_.transpose() * scaled_;
    k.diagonal().array() += 1.0;
    llt_.compute(k);
  } else {
    Matrix k = scaled_ * scaled_.transpose();
    k.diagonal().array() += 1.0;
    llt_.compute(k);
  }
}

// argmin ||x - c||^2 + ||z - d||^2 subject to z = M x.
void BallProgramSolver::ProjectGraph(const Vector& c, const Vector& d, Vector* x,
                                     Vector* z) const {
  Vector g = c + scaled_.transpose() * d;
  if (skinny_) {
    *x = llt_.solve(g);
  } else {
    *x = g - scaled_.transpose() * llt_.solve(scaled_ * g);
  }
  *z = scaled_ * *x;
}

void BallProgramSolver::ProjectBalls(Vector* z) const {
  for (std::size_t b = 0; b < prog_.block_sizes.size(); ++b) {
    const Eigen::Index len = starts_[b + 1] - starts_[b];
    auto zb = z->segment(starts_[b], len);
    const auto yb = scaled_target_.segment(starts_[b], len);
    const double r = scaled_radius_[b];
    if (r == 0.0) {
      zb = yb;
      continue;
    }
    const double dist = (zb - yb).norm();
    if (dist > r) zb = yb + (r / dist) * (zb - yb);
  }
}

double BallProgramSolver::Violation(const Vector& residual) const {
  double worst = 0.0;
  for (std::size_t b = 0; b < prog_.block_sizes.size(); ++b) {
    const Eigen::Index len = starts_[b + 1] - starts_[b];
    worst = std::max(worst, residual.segment(starts_[b], len).norm() - prog_.radius[b]);
  }
  return worst;
}

// Moves x onto the feasible set along a direction that keeps the change
// small: the minimum-norm affine correction for equality programs, or the
// shortest step toward the least-squares point (which is feasible whenever
// ls_violation_ == 0) for ball programs.
Vector BallProgramSolver::Restore(const Vector& x, double* violation) const {
  Vector residual = prog_.matrix * x - prog_.target;
  double viol = Violation(residual);
  if (viol <= 0.0) {
    *violation = 0.0;
    return x;
  }
  Vector out = x;
  if (any_equality_) {
    out = x - cod_.solve(residual);
  } else if (ls_violation_ <= 0.0) {
    const Vector ls_residual = prog_.matrix * x_ls_ - prog_.target;
    double t = 0.0;
    for (std::size_t b = 0; b < prog_.block_sizes.size(); ++b) {
      const Eigen::Index len = starts_[b + 1] - starts_[b];
      const Vector a = residual.segment(starts_[b], len);
      const double r = prog_.radius[b];
      if (a.norm() <= r) continue;
      const Vector d = ls_residual.segment(starts_[b], len) - a;
      const double dd = d.squaredNorm();
      const double ad = a.dot(d);
      const double disc = std::max(0.0, ad * ad - dd * (a.squaredNorm() - r * r));
      const double tb = dd > 0.0 ? (-ad - std::sqrt(disc)) / dd : 1.0;
      t = std::max(t, std::clamp(tb, 0.0, 1.0));
    }
    t = std::min(1.0, t * (1.0 + 1e-12) + 1e-15);
    out = x + t * (x_ls_ - x);
  } else {
    *violation = viol;
    return x;
  }
  *violation = Violation(prog_.matrix * out - prog_.target);
  return out;
}

// Lower bound from a dual candidate mu: project onto M_F^T mu = 0, scale to
// satisfy |M_i^T mu| <= w_i, evaluate sum_b (mu_b^T y_b - r_b ||mu_b||).
double BallProgramSolver::DualValue(Vector mu) const {
  if (free_basis_.cols() > 0) mu -= free_basis_ * (free_basis_.transpose() * mu);
  const Vector q = prog_.matrix.transpose() * mu;
  double t = kInf;
  for (Eigen::Index i = 0; i < cols_; ++i) {
    const double w = prog_.weights(i);
    if (w > 0.0 && std::abs(q(i)) > 0.0) t = std::min(t, w / std::abs(q(i)));
  }
  double d = 0.0;
  for (std::size_t b = 0; b < prog_.block_sizes.size(); ++b) {
    const Eigen::Index len = starts_[b + 1] - starts_[b];
    const auto mb = mu.segment(starts_[b], len);
    d += mb.dot(prog_.target.segment(starts_[b], len)) - prog_.radius[b] * mb.norm();
  }
  if (!(d > 0.0) || !std::isfinite(t)) return 0.0;
  // Free-column consistency after projection is only approximate.
  double free_err = 0.0;
  for (int i : free_cols_) free_err = std::max(free_err, std::abs(q(i)));
  if (free_err * t > 1e-9 * std::max(1.0, prog_.weights.maxCoeff())) return 0.0;
  return t * d;
}

void BallProgramSolver::Consider(const Vector& x, double violation, bool polished) {
  const double obj = WeightedL1(x, prog_.weights);
  const bool feasible = violation <= cfg_.feasibility_tol;
  if (feasible) {
    if (!have_feasible_ || obj < best_objective_) {
      have_feasible_ = true;
      best_x_ = x;
      best_objective_ = obj;
      best_violation_ = violation;
      best_polished_ = polished;
    }
  } else if (!have_feasible_ && violation < best_violation_) {
    best_x_ = x;
    best_objective_ = obj;
    best_violation_ = violation;
    best_polished_ = polished;
  }
}

bool BallProgramSolver::Certified() const {
  return have_feasible_ &&
         best_objective_ - best_bound_ <=
             cfg_.optimality_tol * std::max(1.0, best_objective_);
}

// Least squares on the identified support plus the free columns, with the
// matching KKT multiplier as a dual certificate. Equality programs only.
bool BallProgramSolver::TryPolish(const Vector& x_orig) {
  std::vector<int> cols = free_cols_;
  for (Eigen::Index i = 0; i < cols_; ++i) {
    if (prog_.weights(i) > 0.0 && std::abs(x_orig(i)) > cfg_.support_threshold) {
      cols.push_back(static_cast<int>(i));
    }
  }
  std::sort(cols.begin(), cols.end());
  if (cols == last_support_) return false;
  last_support_ = cols;
  if (static_cast<Eigen::Index>(cols.size()) > rows_) return false;
  Matrix sub(rows_, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) sub.col(k) = prog_.matrix.col(cols[k]);
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(sub);
  const Vector xs = cod.solve(prog_.target);
  Vector x = Vector::Zero(cols_);
  for (std::size_t k = 0; k < cols.size(); ++k) x(cols[k]) = xs(k);
  const double viol = Violation(prog_.matrix * x - prog_.target);
  if (viol > cfg_.feasibility_tol) return false;
  Consider(x, viol, true);

  // KKT multiplier: M_F^T mu = 0, M_i^T mu = w_i sign(x_i) on the support.
  Vector g(static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const double w = prog_.weights(cols[k]);
    g(k) = w > 0.0 ? w * ((xs(k) > 0.0) - (xs(k) < 0.0)) : 0.0;
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod_t(sub.transpose());
  const Vector mu = cod_t.solve(g);
  best_bound_ = std::max(best_bound_, DualValue(mu));
  return true;
}

L1BallResult BallProgramSolver::Run() {
  Prepare();
  L1BallResult result;
  if (all_equality_ && ls_violation_ > cfg_.feasibility_tol) {
    result.x = x_ls_;
    result.objective = WeightedL1(x_ls_, prog_.weights);
    result.max_violation = ls_violation_;
    result.status = SolveStatus::kInfeasible;
    return result;
  }
  Equilibrate();
  Factor();

  Vector x = Vector::Zero(cols_), z = Vector::Zero(rows_);
  Vector lx = Vector::Zero(cols_), lz = Vector::Zero(rows_);
  Vector xh(cols_), zh(rows_), xn(cols_), zn(rows_);
  double rho = cfg_.rho;
  int it = 0;
  for (it = 1; it <= cfg_.max_iterations; ++it) {
    // Proximal steps: weighted soft-thresholding and ball projection.
    xh = x - lx;
    for (Eigen::Index i = 0; i < cols_; ++i) {
      const double k = scaled_weights_(i) / rho;
      const double v = xh(i);
      xh(i) = v > k ? v - k : (v < -k ? v + k : 0.0);
    }
    zh = z - lz;
    ProjectBalls(&zh);
    ProjectGraph(xh + lx, zh + lz, &xn, &zn);
    lx += xh - xn;
    lz += zh - zn;

    if (it % cfg_.check_interval == 0 || it == cfg_.max_iterations) {
      const double prim = std::sqrt((xh - xn).squaredNorm() + (zh - zn).squaredNorm());
      const double dual = rho * std::sqrt((xn - x).squaredNorm() + (zn - z).squaredNorm());

      const Vector cand = col_scale_.cwiseProduct(xh);
      double viol = 0.0;
      const Vector restored = Restore(cand, &viol);
      Consider(restored, viol, false);
      const Vector mu = rho * row_scale_.cwiseProduct(lz);
      best_bound_ = std::max({best_bound_, DualValue(mu), DualValue(-mu)});
      if (cfg_.polish && all_equality_) TryPolish(cand);
      if (Certified()) {
        x = xn;
        z = zn;
        break;
      }

      if (cfg_.adaptive_rho) {
        const double prim_rel = prim / (1e-300 + std::max(xn.norm(), zn.norm()));
        const double dual_rel =
            dual / (1e-300 + rho * std::sqrt(lx.squaredNorm() + lz.squaredNorm()));
        if (prim_rel > 10.0 * dual_rel) {
          rho *= 2.0;
          lx /= 2.0;
          lz /= 2.0;
        } else if (dual_rel > 10.0 * prim_rel) {
          rho /= 2.0;
          lx *= 2.0;
          lz *= 2.0;
        }
      }
    }
    x = xn;
    z = zn;
  }
  result.iterations = std::min(it, cfg_.max_iterations);
  result.x = best_x_.size() == cols_ ? best_x_ : x_ls_;
  result.objective = WeightedL1(result.x, prog_.weights);
  result.dual_bound = std::min(best_bound_, result.objective);
  result.max_violation = have_feasible_ ? best_violation_ : best_violation_;
  result.polished = best_polished_;
  if (Certified()) {
    result.status = SolveStatus::kConverged;
  } else if (!have_feasible_ && ls_violation_ > cfg_.feasibility_tol) {
    result.status = SolveStatus::kInfeasible;
  } else {
    result.status = SolveStatus::kMaxIterations;
  }
  return result;
}

// Assembles a solution from the stacked variable (r_0, u_0..u_{K-1}).
RecoverySolution FromStacked(const RecoveryProblem& problem, const Vector& x) {
  const SystemModel& sys = problem.sys;
  const int horizon = problem.horizon();
  RecoverySolution sol;
  const Vector r0 = x.head(sys.n());
  sol.inputs = Unstack(x.tail(static_cast<Eigen::Index>(horizon) * sys.m()), horizon, sys.m());
  sol.states = PropagateStates(sys, r0, sol.inputs);
  return sol;
}

void FillDiagnostics(const RecoveryProblem& problem, double support_threshold,
                     RecoverySolution* sol) {
  const SystemModel& sys = problem.sys;
  sol->objective = 0.0;
  sol->l0_norm = 0;
  sol->supports.clear();
  for (const Vector& u : sol->inputs) {
    sol->objective += u.lpNorm<1>();
    sol->supports.push_back(SupportOf(u, support_threshold));
    sol->l0_norm += static_cast<int>(sol->supports.back().size());
  }
  sol->dynamics_residual = 0.0;
  for (std::size_t k = 0; k + 1 < sol->states.size(); ++k) {
    const Vector next = sys.A() * sol->states[k] + sys.B() * sol->inputs[k];
    sol->dynamics_residual = std::max(sol->dynamics_residual, (sol->states[k + 1] - next).norm());
  }
  sol->output_residuals.clear();
  double violation = 0.0;
  const double radius = problem.mode == RecoveryMode::kNoisy ? problem.eps_dprime : 0.0;
  for (std::size_t k = 0; k < sol->states.size(); ++k) {
    const double r = (problem.outputs[k] - sys.C() * sol->states[k]).norm();
    sol->output_residuals.push_back(r);
    violation = std::max(violation, r - radius);
  }
  sol->best_residual = std::max(0.0, violation);
}

double ProblemRadius(const RecoveryProblem& problem) {
  return problem.mode == RecoveryMode::kNoisy ? problem.eps_dprime : 0.0;
}

}  // namespace

std::string ToString(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged:
      return "converged";
    case SolveStatus::kMaxIterations:
      return "max_iterations";
    case SolveStatus::kInfeasible:
      return "infeasible";
  }
  return "unknown";
}

void RecoveryProblem::Validate() const {
  if (outputs.size() < 2) {
    throw DimensionError("outputs must cover y_0..y_K with K >= 1");
  }
  for (std::size_t k = 0; k < outputs.size(); ++k) {
    if (outputs[k].size() != sys.p()) {
      std::ostringstream msg;
      msg << "outputs[" << k << "] has length " << outputs[k].size()
          << ", expected p=" << sys.p();
      throw DimensionError(msg.str());
    }
    if (!outputs[k].allFinite()) throw ContractError("outputs contain non-finite values");
  }
  if (mode == RecoveryMode::kNoisy && !(eps_dprime > 0.0)) {
    throw ContractError("P2 requires eps_dprime > 0");
  }
  if (mode == RecoveryMode::kNoiseless && eps_dprime != 0.0 && !(eps_dprime >= 0.0)) {
    throw ContractError("eps_dprime must be nonnegative");
  }
}

void SolverConfig::Validate() const {
  if (!(feasibility_tol > 0.0) || !(optimality_tol > 0.0) || !(support_threshold > 0.0)) {
    throw ContractError("solver tolerances must be positive");
  }
  if (max_iterations < 1 || check_interval < 1) {
    throw ContractError("max_iterations and check_interval must be positive");
  }
  if (!(rho > 0.0)) throw ContractError("rho must be positive");
}

std::vector<int> SupportOf(const Vector& u, double threshold) {
  std::vector<int> s;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (std::abs(u(i)) > threshold) s.push_back(static_cast<int>(i));
  }
  return s;
}

double DefaultEpsDoublePrime(const SystemModel& sys, const NoiseSpec& noise, int horizon) {
  noise.Validate();
  if (noise.eps_prime == 0.0) return noise.eps;
  return noise.eps + std::sqrt(GramSigmaMax(sys.C())) * noise.eps_prime * horizon;
}

L1BallResult SolveL1BallProgram(const L1BallProgram& program, const SolverConfig& config) {
  config.Validate();
  BallProgramSolver solver(program, config);
  return solver.Run();
}

RecoverySolution Solve(const RecoveryProblem& problem, const SolverConfig& config) {
  if (problem.strategy == RecoveryStrategy::kSequential) {
    return SolveSequential(problem, config);
  }
  problem.Validate();
  config.Validate();
  const SystemModel& sys = problem.sys;
  const int horizon = problem.horizon();
  const StackedMaps maps = BuildStackedMaps(sys, horizon);

  L1BallProgram prog;
  prog.matrix.resize(maps.observability.rows(), sys.n() + maps.input_full.cols());
  prog.matrix << maps.observability, maps.input_full;
  prog.target = Stack(problem.outputs);
  prog.block_sizes.assign(horizon + 1, sys.p());
  prog.radius.assign(horizon + 1, ProblemRadius(problem));
  prog.weights = Vector::Ones(prog.matrix.cols());
  prog.weights.head(sys.n()).setZero();

  const L1BallResult res = SolveL1BallProgram(prog, config);
  RecoverySolution sol = FromStacked(problem, res.x);
  FillDiagnostics(problem, config.support_threshold, &sol);
  sol.iterations = res.iterations;
  sol.status = res.status;
  sol.converged = res.status == SolveStatus::kConverged;
  sol.dual_bound = res.dual_bound;
  sol.polished = res.polished;
  if (res.status == SolveStatus::kInfeasible) sol.best_residual = res.max_violation;
  return sol;
}

RecoverySolution SolveSequential(const RecoveryProblem& problem, const SolverConfig& config) {
  problem.Validate();
  config.Validate();
  const SystemModel& sys = problem.sys;
  const int horizon = problem.horizon();
  const Matrix cb = sys.C() * sys.B();
  const Matrix ca = sys.C() * sys.A();

  RecoverySolution sol;
  Eigen::CompleteOrthogonalDecomposition<Matrix> c_cod(sys.C());
  sol.states.push_back(c_cod.solve(problem.outputs[0]));

  L1BallProgram step;
  step.matrix = cb;
  step.block_sizes = {sys.p()};
  step.radius = {ProblemRadius(problem)};
  step.weights = Vector::Ones(sys.m());

  bool all_converged = true;
  bool any_infeasible = false;
  double bound = 0.0;
  for (int k = 0; k < horizon; ++k) {
    step.target = problem.outputs[k + 1] - ca * sol.states[k];
    const L1BallResult res = SolveL1BallProgram(step, config);
    sol.iterations += res.iterations;
    all_converged = all_converged && res.status == SolveStatus::kConverged;
    any_infeasible = any_infeasible || res.status == SolveStatus::kInfeasible;
    bound += res.dual_bound;
    sol.inputs.push_back(res.x);
    sol.states.push_back(sys.A() * sol.states[k] + sys.B() * res.x);
  }
  FillDiagnostics(problem, config.support_threshold, &sol);
  sol.dual_bound = bound;
  sol.status = any_infeasible ? SolveStatus::kInfeasible
               : all_converged ? SolveStatus::kConverged
                               : SolveStatus::kMaxIterations;
  sol.converged = sol.status == SolveStatus::kConverged;
  return sol;
}

RecoverySolution SolveP0BruteForce(const RecoveryProblem& problem, int s_max, long long budget) {
  problem.Validate();
  if (problem.mode != RecoveryMode::kNoiseless) {
    throw ContractError("the l0 search handles noiseless problems only");
  }
  const SystemModel& sys = problem.sys;
  const int horizon = problem.horizon();
  const int m = sys.m();
  if (s_max < 0 || s_max > m) throw ContractError("s_max must lie in [0, m]");

  double per_step = 0.0;
  for (int j = 0; j <= s_max; ++j) per_step += Binomial(m, j);
  const double total = std::pow(per_step, horizon);
  if (total > static_cast<double>(budget)) {
    std::ostringstream msg;
    msg << "l0 enumeration needs " << total << " support sequences, budget is " << budget;
    throw BudgetError(msg.str());
  }

  // Candidate supports for one step, ordered by size then lexicographically.
  std::vector<std::vector<int>> subsets;
  for (int size = 0; size <= s_max; ++size) {
    std::vector<int> c(size);
    std::iota(c.begin(), c.end(), 0);
    do {
      subsets.push_back(c);
    } while (size > 0 && NextCombination(c, m));
  }

  const StackedMaps maps = BuildStackedMaps(sys, horizon);
  const Vector y = Stack(problem.outputs);
  const double tol = 1e-8 * std::max(1.0, y.norm());
  std::vector<std::size_t> idx(horizon, 0);
  int best_size = std::numeric_limits<int>::max();
  Vector best_x;
  double best_res = kInf;
  Vector best_res_x;
  while (true) {
    int size = 0;
    for (int k = 0; k < horizon; ++k) size += static_cast<int>(subsets[idx[k]].size());
    if (size < best_size) {
      Matrix sub(y.size(), sys.n() + size);
      sub.leftCols(sys.n()) = maps.observability;
      std::vector<int> cols;
      Eigen::Index c = sys.n();
      for (int k = 0; k < horizon; ++k) {
        for (int i : subsets[idx[k]]) {
          const int col = k * m + i;
          sub.col(c++) = maps.input_full.col(col);
          cols.push_back(col);
        }
      }
      Eigen::CompleteOrthogonalDecomposition<Matrix> cod(sub);
      const Vector xs = cod.solve(y);
      const double res = (sub * xs - y).norm();
      Vector x = Vector::Zero(sys.n() + static_cast<Eigen::Index>(horizon) * m);
      x.head(sys.n()) = xs.head(sys.n());
      for (std::size_t j = 0; j < cols.size(); ++j) x(sys.n() + cols[j]) = xs(sys.n() + j);
      if (res <= tol) {
        best_size = size;
        best_x = x;
      } else if (res < best_res) {
        best_res = res;
        best_res_x = x;
      }
    }
    int k = horizon - 1;
    while (k >= 0 && ++idx[k] == subsets.size()) {
      idx[k] = 0;
      --k;
    }
    if (k < 0) break;
  }

  const bool found = best_x.size() > 0;
  RecoverySolution sol = FromStacked(problem, found ? best_x : best_res_x);
  FillDiagnostics(problem, 1e-12, &sol);
  sol.status = found ? SolveStatus::kConverged : SolveStatus::kInfeasible;
  sol.converged = found;
  if (found) sol.l0_norm = best_size;
  sol.iterations = static_cast<int>(total);
  return sol;
}

RecoverySolution L1OracleSmall(const RecoveryProblem& problem, int max_variables,
                               long long budget) {
  problem.Validate();
  if (problem.mode != RecoveryMode::kNoiseless) {
    throw ContractError("the vertex oracle handles noiseless problems only");
  }
  const SystemModel& sys = problem.sys;
  const int horizon = problem.horizon();
  const int n = sys.n();
  const int nu = horizon * sys.m();
  if (n + nu > max_variables) {
    std::ostringstream msg;
    msg << "vertex oracle limited to " << max_variables << " variables, problem has "
        << n + nu;
    throw BudgetError(msg.str());
  }
  const StackedMaps maps = BuildStackedMaps(sys, horizon);
  const Vector y = Stack(problem.outputs);
  const double tol = 1e-10 * std::max(1.0, y.norm());

  // Restrict r_0 to the row space of O so the polyhedron has vertices.
  Eigen::JacobiSVD<Matrix> svd(maps.observability, Eigen::ComputeFullV);
  const double thr = RankThreshold(maps.observability, svd.singularValues()(0));
  int q = 0;
  while (q < svd.singularValues().size() && svd.singularValues()(q) > thr) ++q;
  const Matrix v = svd.matrixV().leftCols(q);
  const Matrix ov = maps.observability * v;

  Matrix full(y.size(), q + nu);
  full << ov, maps.input_full;
  const int cap = std::max(0, NumericalRank(full) - q);
  double count = 0.0;
  for (int j = 0; j <= std::min(cap, nu); ++j) count += Binomial(nu, j);
  if (count > static_cast<double>(budget)) {
    std::ostringstream msg;
    msg << "vertex enumeration needs " << count << " supports, budget is " << budget;
    throw BudgetError(msg.str());
  }

  double best = kInf;
  Vector best_x;
  for (int size = 0; size <= std::min(cap, nu); ++size) {
    std::vector<int> c(size);
    std::iota(c.begin(), c.end(), 0);
    do {
      Matrix sub(y.size(), q + size);
      sub.leftCols(q) = ov;
      for (int j = 0; j < size; ++j) sub.col(q + j) = maps.input_full.col(c[j]);
      Eigen::ColPivHouseholderQR<Matrix> qr(sub);
      qr.setThreshold(kRankRelTol * static_cast<double>(std::max(sub.rows(), sub.cols())));
      if (qr.rank() != q + size) continue;
      const Vector xs = qr.solve(y);
      if ((sub * xs - y).norm() > tol) continue;
      const double obj = xs.tail(size).lpNorm<1>();
      if (obj < best - 1e-14) {
        best = obj;
        best_x = Vector::Zero(n + nu);
        best_x.head(n) = v * xs.head(q);
        for (int j = 0; j < size; ++j) best_x(n + c[j]) = xs(q + j);
      }
    } while (size > 0 && NextCombination(c, nu));
  }

  RecoverySolution sol;
  const bool found = best_x.size() > 0;
  if (!found) {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(full);
    Vector xs = cod.solve(y);
    best_x = Vector::Zero(n + nu);
    best_x.head(n) = v * xs.head(q);
    best_x.tail(nu) = xs.tail(nu);
  }
  sol = FromStacked(problem, best_x);
  FillDiagnostics(problem, 1e-10, &sol);
  sol.status = found ? SolveStatus::kConverged : SolveStatus::kInfeasible;
  sol.converged = found;
  sol.dual_bound = found ? best : 0.0;
  sol.iterations = static_cast<int>(count);
  return sol;
}

}  // namespace dcs
