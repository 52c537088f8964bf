#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "dcs/model.h"

namespace dcs {

struct GeneratedSystem {
  SystemModel sys;
  nlohmann::json provenance;  // generator name, parameters and seed
  // +1 excitatory / -1 inhibitory per recurrent neuron (rate networks only).
  std::optional<std::vector<int>> neuron_signs;
  std::optional<Vector> time_constants;  // diagonal of T_r
  std::optional<Matrix> recurrent;       // M
};

struct GaussianOptions {
  bool scale_b_columns = true;  // B entries N(0, 1/n)
  double a_scale = 1.0;         // A entries N(0, a_scale^2)
  bool allow_narrow = false;    // permit m <= n (relaxed system)
};

// A, B, C with independent normal entries drawn row by row in that order
// from one seeded stream.
GeneratedSystem GaussianSystem(int n, int m, int p, std::uint64_t seed,
                               const GaussianOptions& options = {});

// Symmetric 0/1 adjacency of a Watts-Strogatz graph: ring lattice where
// every node links to its k/2 nearest neighbours on each side, then each
// lattice edge (u, u + j) is rewired with probability q to a uniformly
// chosen node avoiding self-loops and duplicates.
Matrix WattsStrogatz(int n, int k, double q, std::uint64_t seed);

struct LogNormalParams {
  double mu = 0.0;
  double sigma = 1.0;  // standard deviation of the log
};

struct RateNetworkParams {
  int n = 50;
  int m = 100;
  int p = 50;
  double dt = 1e-4;  // seconds
  double tau_min = 0.1;
  double tau_max = 0.2;
  double inhibitory_fraction = 0.2;
  int ws_degree = 10;
  double ws_rewire = 0.2;
  LogNormalParams excitatory{0.0, 1.0};
  LogNormalParams inhibitory{0.0, 0.1};
  std::uint64_t seed = 0;

  void Validate() const;
};

// Discretized firing-rate network
//   A = I - dt T^{-1} + dt T^{-1} M,  B = dt T^{-1} W,  C ~ N(0, 1)
// with tau_i ~ U(tau_min, tau_max), W ~ N(0, 1) and M supported on a
// Watts-Strogatz skeleton whose edges are used in both directions. Column j
// of M is nonnegative for excitatory neuron j and nonpositive for
// inhibitory j, with magnitudes exp(N(mu, sigma)).
GeneratedSystem RateNetwork(const RateNetworkParams& params);

}  // namespace dcs
