#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace dcs {

// Seeded pseudo-random source with platform-independent output.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. The standard library distributions are not (their algorithms are
// implementation-defined), so every transform is implemented here:
//   Uniform01   (x >> 11) * 2^-53
//   Normal      Marsaglia polar method, spare value cached
//   Index(n)    rejection sampling on the top bits
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }
  double Uniform01();
  double Uniform(double lo, double hi);
  double Normal(double mean = 0.0, double stddev = 1.0);
  // exp(N(mu, sigma)); sigma is the standard deviation of the log.
  double LogNormal(double mu, double sigma);
  bool Bernoulli(double p) { return Uniform01() < p; }
  // Uniform integer in [0, n).
  std::size_t Index(std::size_t n);
  std::vector<int> Permutation(int n);
  // `k` distinct indices from [0, n), sorted ascending.
  std::vector<int> Subset(int n, int k);

  // Derives an independent child seed; used to give every Monte Carlo trial
  // its own stream so results do not depend on evaluation order.
  static std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t index);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dcs
