#include "dcs/networks.h"

#include <cmath>
#include <sstream>

#include "dcs/error.h"
#include "dcs/random.h"

namespace dcs {
namespace {

Matrix NormalMatrix(Rng& rng, int rows, int cols, double scale) {
  Matrix out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) out(i, j) = scale * rng.Normal();
  }
  return out;
}

SystemModel MakeSystem(Matrix a, Matrix b, Matrix c, bool allow_narrow) {
  if (b.cols() > a.rows()) return SystemModel::Create(std::move(a), std::move(b), std::move(c));
  if (!allow_narrow) {
    std::ostringstream msg;
    msg << "m=" << b.cols() << " must exceed n=" << a.rows() << " for a standard system";
    throw ContractError(msg.str());
  }
  return SystemModel::CreateRelaxed(std::move(a), std::move(b), std::move(c));
}

void RequirePositive(int v, const char* name) {
  if (v < 1) {
    std::ostringstream msg;
    msg << name << " must be positive, got " << v;
    throw ContractError(msg.str());
  }
}

}  // namespace

GeneratedSystem GaussianSystem(int n, int m, int p, std::uint64_t seed,
                               const GaussianOptions& options) {
  RequirePositive(n, "n");
  RequirePositive(m, "m");
  RequirePositive(p, "p");
  if (!(options.a_scale >= 0.0) || !std::isfinite(options.a_scale)) {
    throw ContractError("a_scale must be finite and nonnegative");
  }
  Rng rng(seed);
  Matrix a = NormalMatrix(rng, n, n, options.a_scale);
  Matrix b = NormalMatrix(rng, n, m, options.scale_b_columns ? 1.0 / std::sqrt(n) : 1.0);
  Matrix c = NormalMatrix(rng, p, n, 1.0);
  nlohmann::json prov = {{"generator", "gaussian"},
                         {"n", n},
                         {"m", m},
                         {"p", p},
                         {"seed", seed},
                         {"scale_b_columns", options.scale_b_columns},
                         {"a_scale", options.a_scale}};
  return GeneratedSystem{MakeSystem(std::move(a), std::move(b), std::move(c), options.allow_narrow),
                         std::move(prov), std::nullopt, std::nullopt, std::nullopt};
}

Matrix WattsStrogatz(int n, int k, double q, std::uint64_t seed) {
  RequirePositive(n, "n");
  if (k < 0 || k % 2 != 0 || k >= n) {
    std::ostringstream msg;
    msg << "degree k=" << k << " must be even and in [0, n=" << n << ")";
    throw ContractError(msg.str());
  }
  if (!(q >= 0.0 && q <= 1.0)) throw ContractError("rewiring probability must lie in [0, 1]");

  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  std::vector<int> degree(n, 0);
  auto connect = [&](int u, int v, char on) {
    adj[u][v] = adj[v][u] = on;
    degree[u] += on ? 1 : -1;
    degree[v] += on ? 1 : -1;
  };
  for (int u = 0; u < n; ++u) {
    for (int j = 1; j <= k / 2; ++j) connect(u, (u + j) % n, 1);
  }
  Rng rng(seed);
  for (int j = 1; j <= k / 2; ++j) {
    for (int u = 0; u < n; ++u) {
      const int v = (u + j) % n;
      if (!adj[u][v] || !(rng.Uniform01() < q)) continue;
      if (degree[u] >= n - 1) continue;
      int w = static_cast<int>(rng.Index(n));
      while (w == u || adj[u][w]) w = static_cast<int>(rng.Index(n));
      connect(u, v, 0);
      connect(u, w, 1);
    }
  }
  Matrix out = Matrix::Zero(n, n);
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) out(u, v) = adj[u][v] ? 1.0 : 0.0;
  }
  return out;
}

void RateNetworkParams::Validate() const {
  RequirePositive(n, "n");
  RequirePositive(m, "m");
  RequirePositive(p, "p");
  if (!(dt > 0.0)) throw ContractError("dt must be positive");
  if (!(tau_min > 0.0 && tau_min <= tau_max)) {
    throw ContractError("time-constant range must satisfy 0 < tau_min <= tau_max");
  }
  if (!(dt < tau_min)) throw ContractError("dt must be smaller than tau_min");
  if (!(inhibitory_fraction >= 0.0 && inhibitory_fraction <= 1.0)) {
    throw ContractError("inhibitory_fraction must lie in [0, 1]");
  }
  if (ws_degree < 0 || ws_degree % 2 != 0 || ws_degree >= n) {
    throw ContractError("ws_degree must be even and smaller than n");
  }
  if (!(ws_rewire >= 0.0 && ws_rewire <= 1.0)) {
    throw ContractError("ws_rewire must lie in [0, 1]");
  }
  if (!(excitatory.sigma >= 0.0) || !(inhibitory.sigma >= 0.0)) {
    throw ContractError("lognormal sigma must be nonnegative");
  }
}

GeneratedSystem RateNetwork(const RateNetworkParams& params) {
  params.Validate();
  const int n = params.n;
  const Matrix skeleton =
      WattsStrogatz(n, params.ws_degree, params.ws_rewire, Rng::DeriveSeed(params.seed, 0));
  Rng rng(Rng::DeriveSeed(params.seed, 1));

  Vector tau(n);
  for (int i = 0; i < n; ++i) tau(i) = rng.Uniform(params.tau_min, params.tau_max);

  std::vector<int> signs(n, 1);
  const std::vector<int> perm = rng.Permutation(n);
  const int inhibitory = static_cast<int>(std::ceil(params.inhibitory_fraction * n - 1e-9));
  for (int i = 0; i < inhibitory; ++i) signs[perm[i]] = -1;

  Matrix m_rec = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (skeleton(i, j) == 0.0) continue;
      const LogNormalParams& ln = signs[j] > 0 ? params.excitatory : params.inhibitory;
      m_rec(i, j) = signs[j] * rng.LogNormal(ln.mu, ln.sigma);
    }
  }
  const Matrix w = NormalMatrix(rng, n, params.m, 1.0);
  Matrix c = NormalMatrix(rng, params.p, n, 1.0);

  const Vector gain = (params.dt / tau.array()).matrix();
  Matrix a = Matrix::Identity(n, n);
  a.diagonal() -= gain;
  a += gain.asDiagonal() * m_rec;
  Matrix b = gain.asDiagonal() * w;

  nlohmann::json prov = {{"generator", "rate_network"},
                         {"n", n},
                         {"m", params.m},
                         {"p", params.p},
                         {"dt", params.dt},
                         {"tau_range", {params.tau_min, params.tau_max}},
                         {"inhibitory_fraction", params.inhibitory_fraction},
                         {"ws_degree", params.ws_degree},
                         {"ws_rewire", params.ws_rewire},
                         {"excitatory_lognormal", {params.excitatory.mu, params.excitatory.sigma}},
                         {"inhibitory_lognormal", {params.inhibitory.mu, params.inhibitory.sigma}},
                         {"seed", params.seed}};
  return GeneratedSystem{MakeSystem(std::move(a), std::move(b), std::move(c), true),
                         std::move(prov), std::move(signs), std::move(tau), std::move(m_rec)};
}

}  // namespace dcs
