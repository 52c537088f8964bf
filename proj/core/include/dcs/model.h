#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dcs/linalg.h"

namespace dcs {

class Rng;

// Per-step sequence of vectors, indexed by time.
using Sequence = std::vector<Vector>;

// The linear network
//   r_{k+1} = A r_k + B u_k + d_k,   y_k = C r_k + e_k
// with A (n x n), B (n x m), C (p x n).
class SystemModel {
 public:
  // Standard construction: requires the over-actuated shape m > n.
  static SystemModel Create(Matrix a, Matrix b, Matrix c);
  // Same validation without the m > n requirement.
  static SystemModel CreateRelaxed(Matrix a, Matrix b, Matrix c);

  const Matrix& A() const { return a_; }
  const Matrix& B() const { return b_; }
  const Matrix& C() const { return c_; }
  int n() const { return static_cast<int>(a_.rows()); }
  int m() const { return static_cast<int>(b_.cols()); }
  int p() const { return static_cast<int>(c_.rows()); }
  bool relaxed() const { return relaxed_; }

 private:
  SystemModel(Matrix a, Matrix b, Matrix c, bool relaxed)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), relaxed_(relaxed) {}

  Matrix a_, b_, c_;
  bool relaxed_ = false;
};

// Per-step 2-norm bounds: eps on e_k, eps_prime on d_k, eps_dprime the P2
// surrogate radius.
struct NoiseSpec {
  double eps = 0.0;
  double eps_prime = 0.0;
  double eps_dprime = 0.0;

  void Validate() const;
};

// States r_0..r_K, inputs u_0..u_{K-1}, outputs y_0..y_K. Disturbances
// (length K) and noises (length K+1) are empty when absent.
struct Trajectory {
  Sequence states;
  Sequence inputs;
  Sequence outputs;
  Sequence disturbances;
  Sequence noises;

  int horizon() const { return static_cast<int>(inputs.size()); }
};

// Per-step active input sets, each of size <= s.
struct SparsityPattern {
  int s = 0;
  std::vector<std::vector<int>> supports;

  // Throws ContractError when a support exceeds s or leaves [0, m).
  void Validate(int m) const;
};

// Simulates the network forward from r0. Throws DimensionError naming the
// offending sequence and step on any shape mismatch.
Trajectory Simulate(const SystemModel& sys, const Sequence& inputs,
                    const Vector& r0, const Sequence* disturbance = nullptr,
                    const Sequence* noise = nullptr);

// Max over steps of ||r_{k+1} - (A r_k + B u_k + d_k)|| and
// ||y_k - (C r_k + e_k)||.
double TrajectoryResidual(const SystemModel& sys, const Trajectory& traj);

struct ValueDistribution {
  enum class Kind { kUniform, kGaussian, kConstant };
  Kind kind = Kind::kUniform;
  // Uniform: [a, b]. Gaussian: mean a, stddev b. Constant: value a.
  double a = 0.5;
  double b = 1.5;

  double Draw(Rng& rng) const;
  std::string Name() const;
};

struct SparseInputs {
  Sequence inputs;
  SparsityPattern pattern;
};

// Inputs with the given supports; nonzero values drawn from `dist`.
SparseInputs GenerateSparseInputs(int m, int horizon,
                                  const SparsityPattern& pattern,
                                  const ValueDistribution& dist,
                                  std::uint64_t seed);

// Inputs whose per-step supports are uniformly random subsets of size s.
SparseInputs GenerateSparseInputs(int m, int horizon, int s,
                                  const ValueDistribution& dist,
                                  std::uint64_t seed);

// O_K = [C; CA; ...; CA^K], (K+1)p x n.
Matrix ObservabilityMatrix(const SystemModel& sys, int horizon);

// Block lower-triangular input map with (K+1) block rows and K block
// columns; block (i, j), i > j, is C A^{i-1-j} B_j where B_j is B or its
// columns listed in supports[j]. The first block row is zero.
Matrix StackedInputMap(
    const SystemModel& sys, int horizon,
    const std::optional<std::vector<std::vector<int>>>& supports = std::nullopt);

struct StackedMaps {
  Matrix observability;  // O_K
  Matrix input_full;     // J built from all columns of B
  Matrix input_support;  // J built from the per-step supports (empty if none)
};

StackedMaps BuildStackedMaps(
    const SystemModel& sys, int horizon,
    const std::optional<std::vector<std::vector<int>>>& supports = std::nullopt);

// Stacks a sequence into one column vector.
Vector Stack(const Sequence& seq);
// Splits a stacked vector into `steps` blocks of `block` entries.
Sequence Unstack(const Vector& v, int steps, int block);

// r_k = A^k r_0 + sum_{j<k} A^{k-1-j} B u_j, k = 0..K.
Sequence PropagateStates(const SystemModel& sys, const Vector& r0,
                         const Sequence& inputs);

}  // namespace dcs
