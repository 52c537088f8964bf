#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dcs/filter.h"
#include "dcs/model.h"
#include "dcs/networks.h"
#include "dcs/solver.h"
#include "dcs/stats.h"

namespace dcs {

struct Metrics {
  double mse = 0.0;
  double psnr = 0.0;  // +inf when mse == 0
  bool exact_recovery = false;
};

// Mean squared entry-wise error over every input of the horizon.
double MeanSquaredError(const Sequence& truth, const Sequence& estimate);
double Psnr(double mse);
// Exact when the supports (|u| > support_threshold) agree and every entry
// is within value_tol.
Metrics ComputeMetrics(const Sequence& truth, const Sequence& estimate,
                       double value_tol = 1e-5, double support_threshold = 1e-6);
// Sum over steps of ||truth_k - estimate_k||_2.
double SummedError(const Sequence& truth, const Sequence& estimate);

// Plot-ready table written as one CSV file.
struct Curve {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct ExperimentResult {
  std::string name;
  nlohmann::json config;
  std::vector<nlohmann::json> records;  // one per trial and level, each with its seed
  nlohmann::json aggregates = nlohmann::json::object();
  std::vector<Curve> curves;
  std::map<std::string, Matrix> images;  // values in [0, 1]
};

nlohmann::json ToJson(const ExperimentResult& result);
// result.json, <curve>.csv, and <image>.csv plus <image>.pgm under `dir`.
void WriteExperimentResult(const ExperimentResult& result, const std::string& dir);

struct RunOptions {
  int threads = 1;
  SolverConfig solver;
};

// Runs body(i) for i in [0, count) on up to `threads` workers. Results must
// be stored by index; the first exception is rethrown.
void ParallelFor(int count, int threads, const std::function<void(int)>& body);

// Per-level mean of `metric` over records, ordered by level.
struct LevelSummary {
  std::vector<double> levels;
  std::vector<double> means;
  std::vector<double> stddevs;
};
LevelSummary SummarizeByLevel(const std::vector<nlohmann::json>& records, const std::string& level_key,
                              const std::string& metric);

// --- Perturbation model and P2 radius ------------------------------------

// Output noise e_k ~ U(-a, a) entry-wise; disturbance d_k = h * w_k with
// w ~ N(0, sd^2) entry-wise and h an optional causal filter.
struct PerturbationModel {
  double noise_amplitude = 0.0;
  double disturbance_stddev = 0.0;
  std::optional<IirFilter> disturbance_filter;
};

struct Perturbations {
  Sequence disturbances;  // K entries of length n
  Sequence noises;        // K + 1 entries of length p
};

Perturbations DrawPerturbations(const PerturbationModel& model, int n, int p, int horizon,
                                std::uint64_t seed);

// sqrt(max_k E||C D_k||^2 + E||e_k||^2), D_k = sum_{j<k} A^{k-1-j} d_j: the
// root-mean-square size of the output perturbation the true inputs leave
// unexplained, computed from the perturbation statistics.
double ExpectedRadius(const SystemModel& sys, int horizon, const PerturbationModel& model);

// --- Example 1 -----------------------------------------------------------

// Anti-aliased ring-shaped glyph ("0"), values in [0, 1].
Matrix SyntheticGlyph(int rows, int cols);

// Simulates the image (column k = input at step k) from r_0 = 0 without
// noise and recovers it with the given strategy.
ExperimentResult Example1Digit(const Matrix& image, const SystemModel& sys,
                               RecoveryStrategy strategy, const RunOptions& options = {});

struct Example1Config {
  int n = 45;
  int m = 68;
  int p_observable = 35;
  int horizon = 16;  // glyph width when no image is supplied
  double a_scale = -1.0;  // < 0 selects 1/sqrt(n)
  std::uint64_t seed = 1;
  std::optional<Matrix> image;
};

// Both the p = n and the p < n configuration, one-step and sequential.
ExperimentResult Example1(const Example1Config& config, const RunOptions& options = {});

// --- Example 2 -----------------------------------------------------------

enum class SweepKind { kSigmaMax, kNoisePower, kDisturbancePower };
std::string ToString(SweepKind kind);
SweepKind ParseSweepKind(const std::string& s);

struct Example2SweepConfig {
  SweepKind sweep = SweepKind::kSigmaMax;
  int n = 20;
  int m = 40;
  int p = 20;
  int horizon = 5;
  int s = 2;
  int trials = 30;
  std::uint64_t seed = 1;
  // sigma_max: gains g of A; noise_power: noise amplitudes; disturbance_power:
  // disturbance standard deviations. Empty selects the sweep's defaults.
  std::vector<double> levels;
  bool diagonal_a = false;       // A = diag(U(-g, g)) instead of g G / sqrt(n)
  double a_gain = 0.5;           // gain used by the power sweeps
  double noise_amplitude = 0.5;  // U(-a, a)
  double disturbance_stddev = 0.0;
  double radius_scale = 1.0;     // eps'' = radius_scale * ExpectedRadius

  nlohmann::json ToJson() const;
};

ExperimentResult Example2Sweep(const Example2SweepConfig& config, const RunOptions& options = {});

struct Example2MovieConfig {
  int side = 10;  // frames are side x side, m = side^2
  int n = 50;
  int p = 50;
  int frames = 17;  // K + 1 frames, the first one known
  double disturbance_stddev = 0.2;
  double noise_amplitude = 0.0;
  int filter_order = 5;
  double filter_ripple_db = 1.0;
  double filter_cutoff = 0.7;
  int design_grid = 20;
  std::optional<double> fixed_scale;  // A = scale * I instead of the designed value
  double radius_scale = 1.0;
  std::uint64_t seed = 1;

  nlohmann::json ToJson() const;
};

// Smoothly moving bright blob on a dark background, values in [0, 1].
std::vector<Matrix> SyntheticMovie(int side, int frames);

ExperimentResult Example2Movie(const Example2MovieConfig& config, const RunOptions& options = {});

// --- Example 3 -----------------------------------------------------------

enum class NeuronalSweep { kInhibition, kSparsity };
std::string ToString(NeuronalSweep kind);
NeuronalSweep ParseNeuronalSweep(const std::string& s);

struct Example3Config {
  NeuronalSweep sweep = NeuronalSweep::kInhibition;
  RateNetworkParams network;  // seed is replaced per trial
  int horizon = 10;
  int trials = 30;
  std::uint64_t seed = 1;
  std::vector<double> levels;  // inhibitory fractions or sparsity levels s
  int s = 5;                   // sparsity for the inhibition sweep
  int p_sparsity = 30;         // output dimension for the sparsity sweep
  // Sized against dt / tau ~ 1e-3, which keeps B u_k small.
  double noise_amplitude = 0.002;
  double disturbance_stddev = 1e-4;
  double radius_scale = 1.0;
  long long rank_samples = 20;  // sampled support sequences per trial and level
  // Iteration cap for sparsity-sweep solves. Success is judged against the true
  // inputs, and the polished support solution is exact well before the gap closes.
  int sparsity_max_iterations = 1000;

  nlohmann::json ToJson() const;
};

// Requires at least 20 trials.
ExperimentResult Example3Neuronal(const Example3Config& config, const RunOptions& options = {});

}  // namespace dcs
