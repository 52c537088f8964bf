#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dcs/model.h"

namespace dcs {

enum class CheckMode { kExact, kSampled };

std::string ToString(CheckMode mode);

// Default sample counts for the sampled checks.
inline constexpr long long kDefaultRipSamples = 10000;
inline constexpr long long kDefaultRankSamples = 2000;

// Restricted isometry threshold sqrt(2) - 1 below which the recovery
// guarantees (and the closed-form bounds) apply.
inline const double kRipThreshold = 0.41421356237309504880;

struct RipEstimate {
  int s = 0;
  double delta = 0.0;
  CheckMode mode = CheckMode::kExact;
  long long supports_examined = 0;
  bool certified_upper = false;  // true only for exact enumeration
  std::vector<int> worst_support;
};

// delta_s = max over column supports T (|T| = s) of
//   max(lambda_max(B_T^T B_T) - 1, 1 - lambda_min(B_T^T B_T)).
// Exact mode enumerates all C(m, s) supports and fails with BudgetError
// when that count exceeds `budget`; sampled mode draws `budget` uniform
// supports and returns a lower estimate.
RipEstimate RipConstant(const Matrix& b, int s, CheckMode mode, long long budget,
                        std::uint64_t seed = 0);

struct RankConditionReport {
  int s = 0;
  int horizon = 0;
  bool observable = false;      // rank(O_K) = n
  bool condition_holds = false;
  CheckMode mode = CheckMode::kExact;
  long long combinations_checked = 0;
  // Support sequence (one index set of size 2s per step) that failed.
  std::optional<std::vector<std::vector<int>>> first_failure;
};

// Verifies rank([O_K J]) = n + rank(J) for the input maps J built from
// support sequences of size 2s (all C(m, 2s)^K of them in exact mode,
// `budget` uniformly drawn ones in sampled mode).
RankConditionReport CheckRankCondition(const SystemModel& sys, int horizon, int s,
                                       CheckMode mode, long long budget,
                                       std::uint64_t seed = 0);

// Error-bound constants. `sigma_choice` in the open interval
// (sigma_min(C^T C), sigma_max(C^T C)) is evaluated at an endpoint; the
// report carries the bound at both endpoints.
struct BoundReport {
  double delta2s = 0.0;
  int horizon = 0;
  double eps = 0.0;
  double eps_prime = 0.0;
  double sigma_choice = 0.0;
  double gram_c_min = 0.0;  // sigma_min(C^T C)
  double gram_c_max = 0.0;  // sigma_max(C^T C)
  double gram_a_max = 0.0;  // sigma_max(A^T A)
  double C0 = 0.0;
  double alpha = 0.0;
  double rho = 0.0;
  double Cs = 0.0;
  double bound_value = 0.0;          // Cs * eps
  double bound_value_sigma_max = 0.0;  // same with sigma at the upper endpoint
  // Static network, A treated as zero.
  std::optional<double> Cs_static;
  std::optional<double> sigma_prime;
  std::optional<double> static_bound;
  std::optional<double> static_bound_sigma_max;
  // Symmetric A: disturbance attenuated through (I + A)^{-2}. A heuristic
  // approximation, not a certified bound.
  std::optional<double> sigma_dprime;
  std::optional<double> attenuation;  // (1/n) sum_i (1 + lambda_i)^{-2}
  std::optional<double> dynamic_bound;
  std::optional<double> dynamic_bound_sigma_min;
  bool dynamic_bound_heuristic = true;
};

// C0 = (1/sqrt(sigma)) (1 + sqrt(sigma_max(C^T C) sigma_max(A^T A) / sigma_min(C^T C)))
// alpha = 2 sqrt(1 + delta) / (1 - delta),  rho = sqrt(2) delta / (1 - delta)
// Cs = 2 alpha C0 K / (1 - rho),  bound = Cs eps.
// sigma defaults to sigma_min(C^T C). Throws BoundInapplicableError when
// delta2s >= sqrt(2) - 1 or C has a numerical nullspace.
BoundReport RecoveryBound(const SystemModel& sys, double delta2s, int horizon, double eps,
                          std::optional<double> sigma_choice = std::nullopt);

// Cs' = (2 / sqrt(sigma)) alpha K / (1 - rho);
// static_bound = Cs' (sqrt(sigma') eps' + eps), sigma' = sigma_max(C^T C).
BoundReport StaticTradeoffBound(const SystemModel& sys, double delta2s, int horizon,
                                double eps, double eps_prime);

// dynamic_bound = Cs ((sqrt(sigma'') / n) sum_i (1 + lambda_i(A))^{-2} eps' + eps),
// sigma'' = sigma_max(C^T C). Requires symmetric A (ContractError) without an
// eigenvalue at -1 (SingularError).
BoundReport DynamicTradeoffBound(const SystemModel& sys, double delta2s, int horizon,
                                 double eps, double eps_prime);

struct AttenuationReport {
  double omega = 0.0;
  std::vector<double> eigenvalues;       // of A, ascending
  std::vector<double> per_mode_factors;  // 1 / |e^{j omega} - lambda_i|^2
  double trace_value = 0.0;              // sum of the factors
  double resolvent_trace = 0.0;          // Tr{(e^{jw}I - A)^{-1}(e^{-jw}I - A)^{-1}}
};

// Trace of the disturbance filter density (unit input density) at omega,
// evaluated both through the eigenvalues of symmetric A and by forming the
// complex resolvent product directly.
AttenuationReport SpectralAttenuation(const Matrix& a, double omega);

// Searches A = a I over `grid` points on [0, 0.95] for the smallest
// dynamic tradeoff bound (ties toward smaller a).
struct DesignResult {
  Matrix a;
  double scale = 0.0;
  double objective = 0.0;
  std::vector<double> grid;
  std::vector<double> objectives;
};
DesignResult DesignRecurrence(const Matrix& c, double delta2s, int horizon, double eps,
                              double eps_prime, int grid);

}  // namespace dcs
