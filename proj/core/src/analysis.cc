#include "dcs/analysis.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "combinatorics.h"
#include "dcs/error.h"
#include "dcs/random.h"

namespace dcs {
namespace {

using detail::Binomial;
using detail::FirstCombination;
using detail::NextCombination;

// Extreme eigenvalues of the principal submatrix G(T, T).
std::pair<double, double> GramExtremes(const Matrix& gram, const std::vector<int>& t) {
  const int s = static_cast<int>(t.size());
  if (s == 1) {
    const double g = gram(t[0], t[0]);
    return {g, g};
  }
  Matrix sub(s, s);
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) sub(i, j) = gram(t[i], t[j]);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(sub, Eigen::EigenvaluesOnly);
  return {es.eigenvalues()(0), es.eigenvalues()(s - 1)};
}

double Deviation(const std::pair<double, double>& ext) {
  return std::max(0.0, std::max(ext.second - 1.0, 1.0 - ext.first));
}

// Blocks C A^d B for d = 0..K-1.
std::vector<Matrix> MarkovBlocks(const SystemModel& sys, int horizon) {
  std::vector<Matrix> blocks;
  Matrix ca = sys.C();
  for (int d = 0; d < horizon; ++d) {
    blocks.push_back(ca * sys.B());
    ca = ca * sys.A();
  }
  return blocks;
}

Matrix SupportInputMap(const std::vector<Matrix>& blocks, int p, int horizon,
                       const std::vector<std::vector<int>>& supports) {
  const int w = supports.empty() ? 0 : static_cast<int>(supports[0].size());
  Matrix j_map = Matrix::Zero(static_cast<Eigen::Index>(horizon + 1) * p,
                              static_cast<Eigen::Index>(horizon) * w);
  for (int col = 0; col < horizon; ++col) {
    for (int c = 0; c < w; ++c) {
      const int idx = supports[col][c];
      for (int row = col + 1; row <= horizon; ++row) {
        j_map.block(static_cast<Eigen::Index>(row) * p, col * w + c, p, 1) =
            blocks[row - 1 - col].col(idx);
      }
    }
  }
  return j_map;
}

bool RankIdentityHolds(const Matrix& obs, const Matrix& j_map) {
  const int n = static_cast<int>(obs.cols());
  if (j_map.cols() == 0) return NumericalRank(obs) == n;
  Matrix joint(obs.rows(), obs.cols() + j_map.cols());
  joint << obs, j_map;
  return NumericalRank(joint) == n + NumericalRank(j_map);
}

struct GramData {
  int n = 0;
  double c_min = 0.0;
  double c_max = 0.0;
  double a_max = 0.0;
};

GramData Grams(const Matrix& a, const Matrix& c) {
  if (NumericalRank(c) < c.cols()) {
    throw BoundInapplicableError(
        "C has a nontrivial nullspace (sigma_min(C^T C) below the rank threshold)");
  }
  GramData g;
  g.n = static_cast<int>(c.cols());
  g.c_min = GramSigmaMin(c);
  g.c_max = GramSigmaMax(c);
  g.a_max = GramSigmaMax(a);
  return g;
}

void CheckBoundArgs(double delta2s, int horizon, double eps, double eps_prime) {
  if (!(delta2s >= 0.0)) throw ContractError("delta2s must be nonnegative");
  if (!(delta2s < kRipThreshold)) {
    std::ostringstream msg;
    msg << "delta2s=" << delta2s << " is not below sqrt(2)-1; rho >= 1 and the bound does not apply";
    throw BoundInapplicableError(msg.str());
  }
  if (horizon < 1) throw ContractError("horizon must be at least 1");
  if (!(eps >= 0.0) || !(eps_prime >= 0.0)) {
    throw ContractError("noise bounds must be nonnegative");
  }
}

double C0At(const GramData& g, double sigma) {
  return (1.0 / std::sqrt(sigma)) * (1.0 + std::sqrt(g.c_max * g.a_max / g.c_min));
}

BoundReport BaseReport(const GramData& g, double delta2s, int horizon, double eps,
                       std::optional<double> sigma_choice) {
  BoundReport r;
  r.delta2s = delta2s;
  r.horizon = horizon;
  r.eps = eps;
  r.gram_c_min = g.c_min;
  r.gram_c_max = g.c_max;
  r.gram_a_max = g.a_max;
  r.sigma_choice = sigma_choice.value_or(g.c_min);
  if (sigma_choice && !(*sigma_choice >= g.c_min && *sigma_choice <= g.c_max)) {
    std::ostringstream msg;
    msg << "sigma_choice=" << *sigma_choice << " outside [" << g.c_min << ", " << g.c_max << "]";
    throw ContractError(msg.str());
  }
  r.alpha = 2.0 * std::sqrt(1.0 + delta2s) / (1.0 - delta2s);
  r.rho = std::sqrt(2.0) * delta2s / (1.0 - delta2s);
  r.C0 = C0At(g, r.sigma_choice);
  r.Cs = 2.0 * r.alpha * r.C0 * horizon / (1.0 - r.rho);
  r.bound_value = r.Cs * eps;
  const double cs_upper = 2.0 * r.alpha * C0At(g, g.c_max) * horizon / (1.0 - r.rho);
  r.bound_value_sigma_max = cs_upper * eps;
  return r;
}

BoundReport DynamicFromGrams(const GramData& g, const std::vector<double>& eigenvalues,
                             double delta2s, int horizon, double eps, double eps_prime) {
  BoundReport r = BaseReport(g, delta2s, horizon, eps, std::nullopt);
  r.eps_prime = eps_prime;
  double sum = 0.0;
  for (double lambda : eigenvalues) {
    const double d = 1.0 + lambda;
    if (std::abs(d) < 1e-12) {
      std::ostringstream msg;
      msg << "eigenvalue " << lambda << " of A makes (I + A) singular";
      throw SingularError(msg.str());
    }
    sum += 1.0 / (d * d);
  }
  r.attenuation = sum / static_cast<double>(eigenvalues.size());
  r.sigma_dprime = g.c_max;
  r.dynamic_bound = r.Cs * (std::sqrt(g.c_max) * *r.attenuation * eps_prime + eps);
  r.dynamic_bound_sigma_min = r.Cs * (std::sqrt(g.c_min) * *r.attenuation * eps_prime + eps);
  r.dynamic_bound_heuristic = true;
  return r;
}

}  // namespace

std::string ToString(CheckMode mode) {
  return mode == CheckMode::kExact ? "exact" : "sampled";
}

RipEstimate RipConstant(const Matrix& b, int s, CheckMode mode, long long budget,
                        std::uint64_t seed) {
  ValidateMatrix(b, "B");
  const int m = static_cast<int>(b.cols());
  if (s < 0 || s > m) {
    std::ostringstream msg;
    msg << "s=" << s << " must lie in [0, " << m << "]";
    throw ContractError(msg.str());
  }
  if (budget < 1) throw ContractError("budget must be positive");
  RipEstimate est;
  est.s = s;
  est.mode = mode;
  if (s == 0) {
    est.supports_examined = 1;
    est.certified_upper = mode == CheckMode::kExact;
    return est;
  }
  const Matrix gram = b.transpose() * b;
  auto consider = [&](const std::vector<int>& t) {
    const double dev = Deviation(GramExtremes(gram, t));
    if (est.worst_support.empty() || dev > est.delta) {
      est.delta = dev;
      est.worst_support = t;
    }
    ++est.supports_examined;
  };
  if (mode == CheckMode::kExact) {
    const double count = Binomial(m, s);
    if (count > static_cast<double>(budget)) {
      std::ostringstream msg;
      msg << "exact RIP enumeration needs C(" << m << ", " << s << ") = " << count
          << " supports, above the budget of " << budget << "; use sampled mode";
      throw BudgetError(msg.str());
    }
    std::vector<int> t = FirstCombination(s);
    do {
      consider(t);
    } while (NextCombination(t, m));
    est.certified_upper = true;
  } else {
    Rng rng(seed);
    for (long long i = 0; i < budget; ++i) consider(rng.Subset(m, s));
  }
  return est;
}

RankConditionReport CheckRankCondition(const SystemModel& sys, int horizon, int s,
                                       CheckMode mode, long long budget,
                                       std::uint64_t seed) {
  const int m = sys.m();
  if (s < 0 || 2 * s > m) {
    std::ostringstream msg;
    msg << "2s=" << 2 * s << " must lie in [0, m=" << m << "]";
    throw ContractError(msg.str());
  }
  if (horizon < 0) throw ContractError("horizon must be nonnegative");
  if (budget < 1) throw ContractError("budget must be positive");

  RankConditionReport report;
  report.s = s;
  report.horizon = horizon;
  report.mode = mode;
  const Matrix obs = ObservabilityMatrix(sys, horizon);
  report.observable = NumericalRank(obs) == sys.n();
  if (!report.observable) return report;

  const int width = 2 * s;
  const std::vector<Matrix> blocks = MarkovBlocks(sys, horizon);
  std::vector<std::vector<int>> supports(horizon, FirstCombination(width));
  auto check = [&]() {
    ++report.combinations_checked;
    if (!RankIdentityHolds(obs, SupportInputMap(blocks, sys.p(), horizon, supports))) {
      report.first_failure = supports;
      return false;
    }
    return true;
  };

  if (mode == CheckMode::kExact) {
    const double total = std::pow(Binomial(m, width), horizon);
    if (total > static_cast<double>(budget)) {
      std::ostringstream msg;
      msg << "exact rank check needs C(" << m << ", " << width << ")^" << horizon << " = "
          << total << " support sequences, above the budget of " << budget
          << "; use sampled mode";
      throw BudgetError(msg.str());
    }
    while (true) {
      if (!check()) return report;
      int k = horizon - 1;
      while (k >= 0 && !NextCombination(supports[k], m)) {
        supports[k] = FirstCombination(width);
        --k;
      }
      if (k < 0) break;
    }
  } else {
    Rng rng(seed);
    for (long long i = 0; i < budget; ++i) {
      for (auto& t : supports) t = rng.Subset(m, width);
      if (!check()) return report;
    }
  }
  report.condition_holds = true;
  return report;
}

BoundReport RecoveryBound(const SystemModel& sys, double delta2s, int horizon, double eps,
                          std::optional<double> sigma_choice) {
  CheckBoundArgs(delta2s, horizon, eps, 0.0);
  return BaseReport(Grams(sys.A(), sys.C()), delta2s, horizon, eps, sigma_choice);
}

BoundReport StaticTradeoffBound(const SystemModel& sys, double delta2s, int horizon,
                                double eps, double eps_prime) {
  CheckBoundArgs(delta2s, horizon, eps, eps_prime);
  GramData g = Grams(sys.A(), sys.C());
  g.a_max = 0.0;
  BoundReport r = BaseReport(g, delta2s, horizon, eps, std::nullopt);
  r.eps_prime = eps_prime;
  const double factor = 2.0 * r.alpha * horizon / (1.0 - r.rho);
  r.Cs_static = factor / std::sqrt(g.c_min);
  r.sigma_prime = g.c_max;
  r.static_bound = *r.Cs_static * (std::sqrt(g.c_max) * eps_prime + eps);
  r.static_bound_sigma_max = factor / std::sqrt(g.c_max) * (std::sqrt(g.c_max) * eps_prime + eps);
  return r;
}

BoundReport DynamicTradeoffBound(const SystemModel& sys, double delta2s, int horizon,
                                 double eps, double eps_prime) {
  CheckBoundArgs(delta2s, horizon, eps, eps_prime);
  if (!IsSymmetric(sys.A())) {
    throw ContractError("the dynamic tradeoff bound requires a symmetric A");
  }
  const SpectralSummary summary = ComputeSpectralSummary(sys.A(), true);
  return DynamicFromGrams(Grams(sys.A(), sys.C()), *summary.eigenvalues_symmetric, delta2s,
                          horizon, eps, eps_prime);
}

AttenuationReport SpectralAttenuation(const Matrix& a, double omega) {
  ValidateMatrix(a, "A");
  if (a.rows() != a.cols()) throw DimensionError("A must be square");
  if (!IsSymmetric(a)) throw ContractError("spectral attenuation requires a symmetric A");
  if (!(omega >= 0.0 && omega <= M_PI)) throw ContractError("omega must lie in [0, pi]");

  AttenuationReport r;
  r.omega = omega;
  const SpectralSummary summary = ComputeSpectralSummary(a, true);
  r.eigenvalues = *summary.eigenvalues_symmetric;
  const double cw = std::cos(omega);
  for (double lambda : r.eigenvalues) {
    const double d = 1.0 - 2.0 * lambda * cw + lambda * lambda;
    if (d < 1e-24 * std::max(1.0, lambda * lambda)) {
      std::ostringstream msg;
      msg << "eigenvalue " << lambda << " lies on e^{j omega} for omega=" << omega
          << "; the resolvent is singular";
      throw SingularError(msg.str());
    }
    r.per_mode_factors.push_back(1.0 / d);
    r.trace_value += 1.0 / d;
  }

  using Complex = std::complex<double>;
  using CMatrix = Eigen::MatrixXcd;
  const Eigen::Index n = a.rows();
  const Complex z = std::polar(1.0, omega);
  const CMatrix ac = a.cast<Complex>();
  const CMatrix eye = CMatrix::Identity(n, n);
  const CMatrix r1 = Eigen::PartialPivLU<CMatrix>(z * eye - ac).solve(eye);
  const CMatrix r2 = Eigen::PartialPivLU<CMatrix>(std::conj(z) * eye - ac).solve(eye);
  r.resolvent_trace = (r1 * r2).trace().real();
  return r;
}

DesignResult DesignRecurrence(const Matrix& c, double delta2s, int horizon, double eps,
                              double eps_prime, int grid) {
  ValidateMatrix(c, "C");
  if (grid < 2) throw ContractError("grid must have at least 2 points");
  CheckBoundArgs(delta2s, horizon, eps, eps_prime);
  const int n = static_cast<int>(c.cols());
  GramData g = Grams(Matrix::Zero(n, n), c);

  DesignResult result;
  for (int i = 0; i < grid; ++i) {
    const double a = 0.95 * static_cast<double>(i) / static_cast<double>(grid - 1);
    g.a_max = a * a;
    const std::vector<double> eig(n, a);
    const double value =
        *DynamicFromGrams(g, eig, delta2s, horizon, eps, eps_prime).dynamic_bound;
    result.grid.push_back(a);
    result.objectives.push_back(value);
    if (i == 0 || value < result.objective) {
      result.objective = value;
      result.scale = a;
    }
  }
  result.a = result.scale * Matrix::Identity(n, n);
  return result;
}

}  // namespace dcs
