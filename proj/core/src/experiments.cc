#include "dcs/experiments.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "dcs/analysis.h"
#include "dcs/error.h"
#include "dcs/io.h"
#include "dcs/random.h"

namespace dcs {
namespace {

using nlohmann::json;

const ValueDistribution kInputValues{ValueDistribution::Kind::kUniform, 0.5, 1.5};

json CorrelationJson(const Correlation& c) {
  return {{"rho", c.rho}, {"p_value", c.p_value}, {"n", c.n}};
}

json SolveDiagnostics(const RecoverySolution& sol) {
  return {{"converged", sol.converged},
          {"status", ToString(sol.status)},
          {"iterations", sol.iterations},
          {"objective", sol.objective}};
}

RecoveryProblem MakeProblem(const SystemModel& sys, const Sequence& outputs, double radius,
                            RecoveryStrategy strategy = RecoveryStrategy::kOneStep) {
  RecoveryProblem problem{sys, outputs};
  problem.strategy = strategy;
  if (radius > 0.0) {
    problem.mode = RecoveryMode::kNoisy;
    problem.eps_dprime = radius;
  }
  return problem;
}

Sequence Scaled(const Sequence& seq, double factor) {
  Sequence out = seq;
  for (Vector& v : out) v *= factor;
  return out;
}

double SigmaMax(const Matrix& a) { return OperatorNorm(a); }

// Perturbation draws with unit amplitude; levels rescale them so every level
// of a trial sees the same random numbers.
Perturbations UnitPerturbations(std::optional<IirFilter> filter, int n, int p, int horizon,
                                std::uint64_t seed) {
  PerturbationModel unit;
  unit.noise_amplitude = 1.0;
  unit.disturbance_stddev = 1.0;
  unit.disturbance_filter = std::move(filter);
  return DrawPerturbations(unit, n, p, horizon, seed);
}

Trajectory SimulatePerturbed(const SystemModel& sys, const Sequence& inputs, const Perturbations& unit,
                             double noise_amplitude, double disturbance_stddev) {
  const Vector r0 = Vector::Zero(sys.n());
  const Sequence d = Scaled(unit.disturbances, disturbance_stddev);
  const Sequence e = Scaled(unit.noises, noise_amplitude);
  return Simulate(sys, inputs, r0, disturbance_stddev > 0.0 ? &d : nullptr,
                  noise_amplitude > 0.0 ? &e : nullptr);
}

void AddLevelAggregates(ExperimentResult* result, const std::string& metric,
                        const std::string& x_key, bool log_inverse_x) {
  const LevelSummary summary = SummarizeByLevel(result->records, "level", metric);
  std::vector<double> xs, ys;
  for (const json& r : result->records) {
    const double x = r[x_key].get<double>();
    xs.push_back(log_inverse_x ? std::log(1.0 / x) : x);
    ys.push_back(r[metric].get<double>());
  }
  std::vector<double> level_x = summary.levels;
  if (log_inverse_x) {
    for (double& x : level_x) x = std::log(1.0 / x);
  }
  std::size_t argmin = 0;
  for (std::size_t i = 1; i < summary.means.size(); ++i) {
    if (summary.means[i] < summary.means[argmin]) argmin = i;
  }
  result->aggregates[metric] = {{"levels", summary.levels},
                                {"mean", summary.means},
                                {"stddev", summary.stddevs},
                                {"argmin_level_index", argmin},
                                {"spearman_records", CorrelationJson(Spearman(xs, ys))},
                                {"spearman_means", CorrelationJson(Spearman(level_x, summary.means))}};
}

}  // namespace

// --- Metrics ----------------------------------------------------------------

double MeanSquaredError(const Sequence& truth, const Sequence& estimate) {
  if (truth.size() != estimate.size()) throw DimensionError("sequences differ in length");
  double sum = 0.0;
  long long count = 0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    if (truth[k].size() != estimate[k].size()) throw DimensionError("sequence entries differ in length");
    sum += (truth[k] - estimate[k]).squaredNorm();
    count += truth[k].size();
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

double Psnr(double mse) {
  if (mse <= 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

Metrics ComputeMetrics(const Sequence& truth, const Sequence& estimate, double value_tol,
                       double support_threshold) {
  Metrics m;
  m.mse = MeanSquaredError(truth, estimate);
  m.psnr = Psnr(m.mse);
  m.exact_recovery = true;
  for (std::size_t k = 0; k < truth.size() && m.exact_recovery; ++k) {
    if (SupportOf(truth[k], support_threshold) != SupportOf(estimate[k], support_threshold) ||
        (truth[k] - estimate[k]).lpNorm<Eigen::Infinity>() > value_tol) {
      m.exact_recovery = false;
    }
  }
  return m;
}

double SummedError(const Sequence& truth, const Sequence& estimate) {
  if (truth.size() != estimate.size()) throw DimensionError("sequences differ in length");
  double sum = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) sum += (truth[k] - estimate[k]).norm();
  return sum;
}

// --- Results --------------------------------------------------------------

json ToJson(const ExperimentResult& result) {
  return {{"name", result.name},
          {"config", result.config},
          {"records", result.records},
          {"aggregates", result.aggregates}};
}

void WriteExperimentResult(const ExperimentResult& result, const std::string& dir) {
  WriteJsonFile(dir + "/result.json", ToJson(result));
  for (const Curve& curve : result.curves) {
    std::string text;
    for (std::size_t i = 0; i < curve.columns.size(); ++i) {
      if (i) text += ',';
      text += curve.columns[i];
    }
    text += '\n';
    for (const auto& row : curve.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) text += ',';
        text += FormatNumber(row[i]);
      }
      text += '\n';
    }
    WriteFile(dir + "/" + curve.name + ".csv", text);
  }
  for (const auto& [name, image] : result.images) {
    WriteMatrixCsv(dir + "/" + name + ".csv", image);
    WriteFile(dir + "/" + name + ".pgm", MatrixToPgm(image));
  }
}

void ParallelFor(int count, int threads, const std::function<void(int)>& body) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::mutex mu;
  int next = 0;
  std::exception_ptr error;
  auto worker = [&]() {
    while (true) {
      int i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= count || error) return;
        i = next++;
      }
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min(threads, count); ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

LevelSummary SummarizeByLevel(const std::vector<json>& records, const std::string& level_key,
                              const std::string& metric) {
  std::map<double, std::vector<double>> groups;
  for (const json& r : records) groups[r[level_key].get<double>()].push_back(r[metric].get<double>());
  LevelSummary s;
  for (const auto& [level, values] : groups) {
    s.levels.push_back(level);
    s.means.push_back(Mean(values));
    s.stddevs.push_back(StdDev(values));
  }
  return s;
}

// --- Perturbations ----------------------------------------------------------

Perturbations DrawPerturbations(const PerturbationModel& model, int n, int p, int horizon,
                                std::uint64_t seed) {
  Rng noise_rng(Rng::DeriveSeed(seed, 0));
  Rng dist_rng(Rng::DeriveSeed(seed, 1));
  Perturbations out;
  for (int k = 0; k < horizon; ++k) {
    Vector d(n);
    for (int i = 0; i < n; ++i) d(i) = model.disturbance_stddev * dist_rng.Normal();
    out.disturbances.push_back(std::move(d));
  }
  if (model.disturbance_filter) out.disturbances = ApplyFilter(*model.disturbance_filter, out.disturbances);
  for (int k = 0; k <= horizon; ++k) {
    Vector e(p);
    for (int i = 0; i < p; ++i) e(i) = noise_rng.Uniform(-model.noise_amplitude, model.noise_amplitude);
    out.noises.push_back(std::move(e));
  }
  return out;
}

double ExpectedRadius(const SystemModel& sys, int horizon, const PerturbationModel& model) {
  const int n = sys.n();
  const double noise_power = sys.p() * model.noise_amplitude * model.noise_amplitude / 3.0;
  double worst = 0.0;
  if (model.disturbance_stddev > 0.0) {
    std::vector<double> h(horizon, 0.0);
    if (model.disturbance_filter) {
      std::vector<double> impulse(horizon, 0.0);
      impulse[0] = 1.0;
      h = ApplyFilter(*model.disturbance_filter, impulse);
    } else {
      h[0] = 1.0;
    }
    // D_k = sum_t G_{k,t} w_t with G_{t+1,t} = h_0 I, G_{k,t} = A G_{k-1,t} + h_{k-1-t} I.
    std::vector<Matrix> g(horizon);
    std::vector<double> power(horizon + 1, 0.0);
    const Matrix eye = Matrix::Identity(n, n);
    for (int k = 1; k <= horizon; ++k) {
      g[k - 1] = Matrix::Zero(n, n);
      for (int t = 0; t < k; ++t) {
        g[t] = sys.A() * g[t] + h[k - 1 - t] * eye;
        power[k] += (sys.C() * g[t]).squaredNorm();
      }
    }
    for (double v : power) worst = std::max(worst, v);
    worst *= model.disturbance_stddev * model.disturbance_stddev;
  }
  return std::sqrt(worst + noise_power);
}

// --- Example 1 ----------------------------------------------------------------

Matrix SyntheticGlyph(int rows, int cols) {
  if (rows < 1 || cols < 1) throw DimensionError("glyph dimensions must be positive");
  Matrix img(rows, cols);
  const double cy = 0.5 * (rows - 1), cx = 0.5 * (cols - 1);
  const double ry = 0.36 * rows, rx = 0.34 * cols;
  const double width = 0.06;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double dy = (i - cy) / ry, dx = (j - cx) / rx;
      const double dist = std::abs(std::sqrt(dx * dx + dy * dy) - 1.0);
      const double v = 1.0 - dist / width;
      img(i, j) = v > 0.0 ? std::min(1.0, 1.5 * v) : 0.0;
    }
  }
  return img;
}

ExperimentResult Example1Digit(const Matrix& image, const SystemModel& sys, RecoveryStrategy strategy,
                               const RunOptions& options) {
  ValidateMatrix(image, "image");
  if (image.rows() != sys.m()) {
    std::ostringstream msg;
    msg << "image has " << image.rows() << " rows, expected m=" << sys.m();
    throw DimensionError(msg.str());
  }
  Sequence inputs;
  for (Eigen::Index k = 0; k < image.cols(); ++k) inputs.push_back(image.col(k));
  const Trajectory traj = Simulate(sys, inputs, Vector::Zero(sys.n()));
  const RecoverySolution sol = Solve(MakeProblem(sys, traj.outputs, 0.0, strategy), options.solver);

  ExperimentResult result;
  result.name = "example1_digit";
  result.config = {{"n", sys.n()}, {"m", sys.m()}, {"p", sys.p()}, {"K", image.cols()},
                   {"strategy", strategy == RecoveryStrategy::kOneStep ? "one-step" : "sequential"},
                   {"r0", "zero"}};
  Matrix recovered(image.rows(), image.cols());
  std::vector<double> column_error;
  for (Eigen::Index k = 0; k < image.cols(); ++k) {
    recovered.col(k) = sol.inputs[k];
    column_error.push_back((sol.inputs[k] - inputs[k]).norm());
  }
  const Metrics metrics = ComputeMetrics(inputs, sol.inputs);
  result.records.push_back({{"seed", nullptr},
                            {"mse", metrics.mse},
                            {"psnr", metrics.psnr},
                            {"max_abs_error", (recovered - image).lpNorm<Eigen::Infinity>()},
                            {"column_error", column_error},
                            {"solver", SolveDiagnostics(sol)}});
  result.aggregates = {{"mse", metrics.mse},
                       {"max_abs_error", (recovered - image).lpNorm<Eigen::Infinity>()}};
  Curve curve{"column_error", {"k", "error"}, {}};
  for (std::size_t k = 0; k < column_error.size(); ++k) {
    curve.rows.push_back({static_cast<double>(k), column_error[k]});
  }
  result.curves.push_back(std::move(curve));
  result.images["input"] = image;
  result.images["recovered"] = recovered;
  return result;
}

ExperimentResult Example1(const Example1Config& config, const RunOptions& options) {
  if (config.p_observable < 1 || config.p_observable > config.n) {
    throw ContractError("p_observable must lie in [1, n]");
  }
  const Matrix image = config.image ? *config.image : SyntheticGlyph(config.m, config.horizon);
  GaussianOptions gopts;
  gopts.a_scale = config.a_scale < 0.0 ? 1.0 / std::sqrt(config.n) : config.a_scale;
  const GeneratedSystem gen = GaussianSystem(config.n, config.m, config.n, config.seed, gopts);
  const SystemModel full = gen.sys;
  const SystemModel observable =
      SystemModel::Create(full.A(), full.B(), full.C().topRows(config.p_observable));

  ExperimentResult result;
  result.name = "example1";
  result.config = {{"n", config.n},
                   {"m", config.m},
                   {"p_observable", config.p_observable},
                   {"K", image.cols()},
                   {"a_scale", gopts.a_scale},
                   {"seed", config.seed},
                   {"image", config.image ? "user" : "synthetic_glyph"},
                   {"r0", "zero"}};
  result.images["input"] = image;
  const std::vector<std::pair<std::string, const SystemModel*>> cases = {{"full", &full},
                                                                         {"observable", &observable}};
  const std::vector<RecoveryStrategy> strategies = {RecoveryStrategy::kOneStep,
                                                    RecoveryStrategy::kSequential};
  std::vector<ExperimentResult> runs(4);
  ParallelFor(4, options.threads, [&](int i) {
    runs[i] = Example1Digit(image, *cases[i / 2].second, strategies[i % 2], options);
  });
  for (int i = 0; i < 4; ++i) {
    const std::string strategy = i % 2 == 0 ? "one-step" : "sequential";
    const std::string key = cases[i / 2].first + "_" + strategy;
    json record = runs[i].records[0];
    record["seed"] = config.seed;
    record["case"] = cases[i / 2].first;
    record["p"] = cases[i / 2].second->p();
    record["strategy"] = strategy;
    result.records.push_back(record);
    result.aggregates[key] = runs[i].aggregates;
    result.images["recovered_" + key] = runs[i].images["recovered"];
    Curve curve = runs[i].curves[0];
    curve.name = "column_error_" + key;
    result.curves.push_back(std::move(curve));
  }
  return result;
}

// --- Example 2 ----------------------------------------------------------------

std::string ToString(SweepKind kind) {
  switch (kind) {
    case SweepKind::kSigmaMax:
      return "sigma_max";
    case SweepKind::kNoisePower:
      return "noise_power";
    case SweepKind::kDisturbancePower:
      return "disturbance_power";
  }
  return "";
}

SweepKind ParseSweepKind(const std::string& s) {
  if (s == "sigma_max") return SweepKind::kSigmaMax;
  if (s == "noise_power") return SweepKind::kNoisePower;
  if (s == "disturbance_power") return SweepKind::kDisturbancePower;
  throw FormatError("unknown sweep \"" + s + "\" (expected sigma_max, noise_power or disturbance_power)");
}

json Example2SweepConfig::ToJson() const {
  return {{"sweep", dcs::ToString(sweep)},
          {"n", n},
          {"m", m},
          {"p", p},
          {"horizon", horizon},
          {"s", s},
          {"trials", trials},
          {"seed", seed},
          {"levels", levels},
          {"diagonal_a", diagonal_a},
          {"a_gain", a_gain},
          {"noise_amplitude", noise_amplitude},
          {"disturbance_stddev", disturbance_stddev},
          {"radius_scale", radius_scale}};
}

ExperimentResult Example2Sweep(const Example2SweepConfig& config_in, const RunOptions& options) {
  Example2SweepConfig config = config_in;
  if (config.trials < 1) throw ContractError("trials must be positive");
  if (config.levels.empty()) {
    switch (config.sweep) {
      case SweepKind::kSigmaMax:
        config.levels = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2};
        break;
      case SweepKind::kNoisePower:
      case SweepKind::kDisturbancePower:
        config.levels = {1.0, 0.3, 0.1, 0.03, 0.01};
        break;
    }
  }
  const bool power_sweep = config.sweep != SweepKind::kSigmaMax;
  for (double level : config.levels) {
    if (!(level >= 0.0) || (power_sweep && !(level > 0.0))) {
      throw ContractError("sweep levels must be positive (nonnegative for gains)");
    }
  }
  const int levels = static_cast<int>(config.levels.size());
  std::vector<json> records(static_cast<std::size_t>(config.trials) * levels);

  ParallelFor(config.trials, options.threads, [&](int trial) {
    const std::uint64_t seed = Rng::DeriveSeed(config.seed, trial);
    GaussianOptions gopts;
    const GeneratedSystem base = GaussianSystem(config.n, config.m, config.p, Rng::DeriveSeed(seed, 0), gopts);
    Matrix a_unit;
    if (config.diagonal_a) {
      Rng rng(Rng::DeriveSeed(seed, 3));
      Vector diag(config.n);
      for (int i = 0; i < config.n; ++i) diag(i) = rng.Uniform(-1.0, 1.0);
      a_unit = diag.asDiagonal();
    } else {
      a_unit = base.sys.A() / std::sqrt(static_cast<double>(config.n));
    }
    const SparseInputs u = GenerateSparseInputs(config.m, config.horizon, config.s, kInputValues,
                                                Rng::DeriveSeed(seed, 1));
    const Perturbations unit =
        UnitPerturbations(std::nullopt, config.n, config.p, config.horizon, Rng::DeriveSeed(seed, 2));
    for (int l = 0; l < levels; ++l) {
      const double level = config.levels[l];
      const double gain = config.sweep == SweepKind::kSigmaMax ? level : config.a_gain;
      PerturbationModel pert;
      pert.noise_amplitude = config.sweep == SweepKind::kNoisePower ? level : config.noise_amplitude;
      pert.disturbance_stddev =
          config.sweep == SweepKind::kDisturbancePower ? level : config.disturbance_stddev;
      const SystemModel sys = SystemModel::CreateRelaxed(gain * a_unit, base.sys.B(), base.sys.C());
      const Trajectory traj =
          SimulatePerturbed(sys, u.inputs, unit, pert.noise_amplitude, pert.disturbance_stddev);
      const double radius = config.radius_scale * ExpectedRadius(sys, config.horizon, pert);
      const RecoverySolution sol = Solve(MakeProblem(sys, traj.outputs, radius), options.solver);
      const Metrics metrics = ComputeMetrics(u.inputs, sol.inputs);
      records[static_cast<std::size_t>(trial) * levels + l] = {
          {"trial", trial},
          {"seed", seed},
          {"level", level},
          {"sigma_max_A", SigmaMax(sys.A())},
          {"noise_amplitude", pert.noise_amplitude},
          {"disturbance_stddev", pert.disturbance_stddev},
          {"eps_dprime", radius},
          {"mse", metrics.mse},
          {"solver", SolveDiagnostics(sol)}};
    }
  });

  ExperimentResult result;
  result.name = "example2_" + ToString(config.sweep);
  result.config = config.ToJson();
  result.config["r0"] = "zero";
  result.records = std::move(records);
  switch (config.sweep) {
    case SweepKind::kSigmaMax:
      AddLevelAggregates(&result, "mse", "sigma_max_A", false);
      break;
    case SweepKind::kNoisePower:
    case SweepKind::kDisturbancePower:
      AddLevelAggregates(&result, "mse", "level", true);
      break;
  }
  const LevelSummary sigma = SummarizeByLevel(result.records, "level", "sigma_max_A");
  result.aggregates["sigma_max_A"] = {{"levels", sigma.levels}, {"mean", sigma.means}};
  const json& mse = result.aggregates["mse"];
  Curve curve{"mse_vs_level", {"level", "sigma_max_A_mean", "mse_mean", "mse_stddev"}, {}};
  for (std::size_t i = 0; i < sigma.levels.size(); ++i) {
    curve.rows.push_back({sigma.levels[i], sigma.means[i], mse["mean"][i].get<double>(),
                          mse["stddev"][i].get<double>()});
  }
  result.curves.push_back(std::move(curve));
  Curve scatter{"mse_records", {"trial", "level", "sigma_max_A", "mse"}, {}};
  for (const json& r : result.records) {
    scatter.rows.push_back({r["trial"].get<double>(), r["level"].get<double>(),
                            r["sigma_max_A"].get<double>(), r["mse"].get<double>()});
  }
  result.curves.push_back(std::move(scatter));
  return result;
}

json Example2MovieConfig::ToJson() const {
  return {{"side", side},
          {"n", n},
          {"p", p},
          {"frames", frames},
          {"disturbance_stddev", disturbance_stddev},
          {"noise_amplitude", noise_amplitude},
          {"filter_order", filter_order},
          {"filter_ripple_db", filter_ripple_db},
          {"filter_cutoff", filter_cutoff},
          {"design_grid", design_grid},
          {"fixed_scale", fixed_scale ? json(*fixed_scale) : json(nullptr)},
          {"radius_scale", radius_scale},
          {"seed", seed}};
}

std::vector<Matrix> SyntheticMovie(int side, int frames) {
  if (side < 4 || frames < 2) throw ContractError("movie needs side >= 4 and at least 2 frames");
  std::vector<Matrix> out;
  const int span = side - 3;
  auto bounce = [](int t, int span) {
    const int period = 2 * span;
    const int r = period > 0 ? t % period : 0;
    return r <= span ? r : period - r;
  };
  for (int f = 0; f < frames; ++f) {
    Matrix frame = Matrix::Zero(side, side);
    const int x = bounce(f, span);
    const int y = bounce(f / 2 + span / 3, span);
    frame.block(y, x, 3, 3).setConstant(1.0);
    const int x2 = bounce(f / 3 + span / 2, side - 2);
    const int y2 = side - 2 - bounce(f / 2, side - 2);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) frame(y2 + i, x2 + j) = std::max(frame(y2 + i, x2 + j), 0.5);
    }
    out.push_back(std::move(frame));
  }
  return out;
}

ExperimentResult Example2Movie(const Example2MovieConfig& config, const RunOptions& options) {
  const std::vector<Matrix> frames = SyntheticMovie(config.side, config.frames);
  const int m = config.side * config.side;
  const int horizon = config.frames - 1;
  auto vec = [](const Matrix& f) { return Eigen::Map<const Vector>(f.data(), f.size()).eval(); };
  Sequence inputs;
  for (int k = 0; k < horizon; ++k) inputs.push_back(vec(frames[k + 1]) - vec(frames[k]));

  GaussianOptions gopts;
  gopts.a_scale = 0.0;
  gopts.allow_narrow = true;
  const GeneratedSystem gen = GaussianSystem(config.n, m, config.p, config.seed, gopts);
  const SystemModel sys_static = gen.sys;

  PerturbationModel pert;
  pert.noise_amplitude = config.noise_amplitude;
  pert.disturbance_stddev = config.disturbance_stddev;
  if (config.disturbance_stddev > 0.0) {
    pert.disturbance_filter =
        ChebyshevHighpass(config.filter_order, config.filter_ripple_db, config.filter_cutoff);
  }
  // Per-step norm scales of the perturbations, used only to weigh the design.
  double filter_gain = 1.0;
  if (pert.disturbance_filter) {
    std::vector<double> impulse(256, 0.0);
    impulse[0] = 1.0;
    const std::vector<double> h = ApplyFilter(*pert.disturbance_filter, impulse);
    filter_gain = 0.0;
    for (double v : h) filter_gain += v * v;
    filter_gain = std::sqrt(filter_gain);
  }
  const double eps = config.noise_amplitude * std::sqrt(config.p / 3.0);
  const double eps_prime = config.disturbance_stddev * std::sqrt(static_cast<double>(config.n)) * filter_gain;
  const DesignResult design = DesignRecurrence(sys_static.C(), 0.0, horizon, eps, eps_prime,
                                               config.design_grid);
  const double scale = config.fixed_scale.value_or(design.scale);
  const SystemModel sys_designed = SystemModel::CreateRelaxed(
      scale * Matrix::Identity(config.n, config.n), sys_static.B(), sys_static.C());

  const Perturbations draws =
      DrawPerturbations(pert, config.n, config.p, horizon, Rng::DeriveSeed(config.seed, 1));
  const std::vector<std::pair<std::string, const SystemModel*>> cases = {{"static", &sys_static},
                                                                         {"designed", &sys_designed}};
  std::vector<RecoverySolution> sols(2, RecoverySolution{});
  std::vector<double> radii(2, 0.0);
  ParallelFor(2, options.threads, [&](int i) {
    const SystemModel& sys = *cases[i].second;
    const Trajectory traj = Simulate(sys, inputs, Vector::Zero(config.n),
                                     config.disturbance_stddev > 0.0 ? &draws.disturbances : nullptr,
                                     config.noise_amplitude > 0.0 ? &draws.noises : nullptr);
    radii[i] = config.radius_scale * ExpectedRadius(sys, horizon, pert);
    sols[i] = Solve(MakeProblem(sys, traj.outputs, radii[i]), options.solver);
  });

  ExperimentResult result;
  result.name = "example2_movie";
  result.config = config.ToJson();
  result.config["m"] = m;
  result.config["K"] = horizon;
  result.config["first_frame_known"] = true;
  result.config["r0"] = "zero";
  result.aggregates["design"] = {{"scale", scale},
                                 {"designed_scale", design.scale},
                                 {"objective", design.objective},
                                 {"grid", design.grid},
                                 {"objectives", design.objectives},
                                 {"eps", eps},
                                 {"eps_prime", eps_prime}};
  std::vector<std::vector<double>> psnr(2);
  for (int i = 0; i < 2; ++i) {
    Vector current = vec(frames[0]);
    psnr[i].push_back(std::numeric_limits<double>::infinity());
    for (int k = 0; k < horizon; ++k) {
      current += sols[i].inputs[k];
      const Vector truth = vec(frames[k + 1]);
      psnr[i].push_back(Psnr((current - truth).squaredNorm() / static_cast<double>(m)));
      if (k == horizon - 1 || k % std::max(1, horizon / 4) == 0) {
        result.images[cases[i].first + "_frame_" + std::to_string(k + 1)] =
            Eigen::Map<const Matrix>(current.data(), config.side, config.side);
      }
    }
    result.aggregates[cases[i].first] = {{"psnr", psnr[i]},
                                         {"eps_dprime", radii[i]},
                                         {"solver", SolveDiagnostics(sols[i])}};
  }
  for (int k = 0; k <= horizon; ++k) {
    result.records.push_back({{"seed", config.seed},
                              {"frame", k},
                              {"psnr_static", psnr[0][k]},
                              {"psnr_designed", psnr[1][k]}});
  }
  const int start = horizon - horizon / 4;
  double static_late = 0.0, designed_late = 0.0;
  for (int k = start + 1; k <= horizon; ++k) {
    static_late += psnr[0][k];
    designed_late += psnr[1][k];
  }
  const int late = horizon - start;
  result.aggregates["final_quartile"] = {{"first_frame", start + 1},
                                         {"psnr_static_mean", static_late / late},
                                         {"psnr_designed_mean", designed_late / late}};
  Curve curve{"psnr_vs_frame", {"frame", "psnr_static", "psnr_designed"}, {}};
  for (int k = 1; k <= horizon; ++k) curve.rows.push_back({static_cast<double>(k), psnr[0][k], psnr[1][k]});
  result.curves.push_back(std::move(curve));
  for (int k = 0; k < config.frames; k += std::max(1, horizon / 4)) {
    result.images["truth_frame_" + std::to_string(k)] = frames[k];
  }
  return result;
}

// --- Example 3 ----------------------------------------------------------------

std::string ToString(NeuronalSweep kind) {
  return kind == NeuronalSweep::kInhibition ? "inhibition" : "sparsity";
}

NeuronalSweep ParseNeuronalSweep(const std::string& s) {
  if (s == "inhibition") return NeuronalSweep::kInhibition;
  if (s == "sparsity") return NeuronalSweep::kSparsity;
  throw FormatError("unknown sweep \"" + s + "\" (expected inhibition or sparsity)");
}

json Example3Config::ToJson() const {
  return {{"sweep", dcs::ToString(sweep)},
          {"network",
           {{"n", network.n},
            {"m", network.m},
            {"p", network.p},
            {"dt", network.dt},
            {"tau_range", {network.tau_min, network.tau_max}},
            {"inhibitory_fraction", network.inhibitory_fraction},
            {"ws_degree", network.ws_degree},
            {"ws_rewire", network.ws_rewire},
            {"excitatory_lognormal", {network.excitatory.mu, network.excitatory.sigma}},
            {"inhibitory_lognormal", {network.inhibitory.mu, network.inhibitory.sigma}}}},
          {"horizon", horizon},
          {"trials", trials},
          {"seed", seed},
          {"levels", levels},
          {"s", s},
          {"p_sparsity", p_sparsity},
          {"sparsity_max_iterations", sparsity_max_iterations},
          {"noise_amplitude", noise_amplitude},
          {"disturbance_stddev", disturbance_stddev},
          {"radius_scale", radius_scale},
          {"rank_samples", rank_samples}};
}

ExperimentResult Example3Neuronal(const Example3Config& config_in, const RunOptions& options) {
  Example3Config config = config_in;
  if (config.trials < 20) throw ContractError("example 3 needs at least 20 trials");
  const bool inhibition = config.sweep == NeuronalSweep::kInhibition;
  if (config.levels.empty()) {
    config.levels = inhibition ? std::vector<double>{0.0, 0.2, 0.4, 0.6, 0.8, 1.0}
                               : std::vector<double>{1, 2, 3, 4, 6, 8, 10, 12};
  }
  if (!inhibition) config.network.p = config.p_sparsity;
  config.network.Validate();
  const int levels = static_cast<int>(config.levels.size());
  const int n = config.network.n, m = config.network.m, p = config.network.p;
  std::vector<json> records(static_cast<std::size_t>(config.trials) * levels);

  ParallelFor(config.trials, options.threads, [&](int trial) {
    const std::uint64_t seed = Rng::DeriveSeed(config.seed, trial);
    RateNetworkParams params = config.network;
    params.seed = Rng::DeriveSeed(seed, 0);
    if (inhibition) {
      const SparseInputs u =
          GenerateSparseInputs(m, config.horizon, config.s, kInputValues, Rng::DeriveSeed(seed, 1));
      const Perturbations unit = UnitPerturbations(std::nullopt, n, p, config.horizon, Rng::DeriveSeed(seed, 2));
      for (int l = 0; l < levels; ++l) {
        params.inhibitory_fraction = config.levels[l];
        const SystemModel sys = RateNetwork(params).sys;
        json record = {{"trial", trial},
                       {"seed", seed},
                       {"network_seed", params.seed},
                       {"level", config.levels[l]},
                       {"sigma_max_A", SigmaMax(sys.A())}};
        for (int c = 0; c < 2; ++c) {
          PerturbationModel pert;
          if (c == 0) {
            pert.noise_amplitude = config.noise_amplitude;
          } else {
            pert.disturbance_stddev = config.disturbance_stddev;
          }
          const Trajectory traj =
              SimulatePerturbed(sys, u.inputs, unit, pert.noise_amplitude, pert.disturbance_stddev);
          const double radius = config.radius_scale * ExpectedRadius(sys, config.horizon, pert);
          const RecoverySolution sol = Solve(MakeProblem(sys, traj.outputs, radius), options.solver);
          const std::string tag = c == 0 ? "noise" : "disturbance";
          record["mse_" + tag] = ComputeMetrics(u.inputs, sol.inputs).mse;
          record["eps_dprime_" + tag] = radius;
          record["solver_" + tag] = SolveDiagnostics(sol);
        }
        records[static_cast<std::size_t>(trial) * levels + l] = std::move(record);
      }
    } else {
      const SystemModel sys = RateNetwork(params).sys;
      for (int l = 0; l < levels; ++l) {
        const int s = static_cast<int>(config.levels[l]);
        const SparseInputs u = GenerateSparseInputs(m, config.horizon, s, kInputValues,
                                                    Rng::DeriveSeed(seed, 100 + s));
        const Trajectory traj = Simulate(sys, u.inputs, Vector::Zero(n));
        SolverConfig solver = options.solver;
        solver.max_iterations = std::min(solver.max_iterations, config.sparsity_max_iterations);
        const RecoverySolution sol = Solve(MakeProblem(sys, traj.outputs, 0.0), solver);
        const Metrics metrics = ComputeMetrics(u.inputs, sol.inputs);
        bool rank_ok = false;
        if (2 * s <= m) {
          rank_ok = CheckRankCondition(sys, config.horizon, s, CheckMode::kSampled, config.rank_samples,
                                       Rng::DeriveSeed(seed, 200 + s))
                        .condition_holds;
        }
        records[static_cast<std::size_t>(trial) * levels + l] = {
            {"trial", trial},
            {"seed", seed},
            {"network_seed", params.seed},
            {"level", config.levels[l]},
            {"exact_recovery", metrics.exact_recovery ? 1.0 : 0.0},
            {"mse", metrics.mse},
            {"rank_condition", rank_ok ? 1.0 : 0.0},
            {"solver", SolveDiagnostics(sol)}};
      }
    }
  });

  ExperimentResult result;
  result.name = "example3_" + ToString(config.sweep);
  result.config = config.ToJson();
  result.records = std::move(records);
  if (inhibition) {
    for (const char* metric : {"sigma_max_A", "mse_noise", "mse_disturbance"}) {
      AddLevelAggregates(&result, metric, "level", false);
    }
    Curve curve{"inhibition_curves",
                {"inhibitory_fraction", "sigma_max_A_mean", "mse_noise_mean", "mse_disturbance_mean"},
                {}};
    const json& agg = result.aggregates;
    for (int l = 0; l < levels; ++l) {
      curve.rows.push_back({agg["sigma_max_A"]["levels"][l].get<double>(),
                            agg["sigma_max_A"]["mean"][l].get<double>(),
                            agg["mse_noise"]["mean"][l].get<double>(),
                            agg["mse_disturbance"]["mean"][l].get<double>()});
    }
    result.curves.push_back(std::move(curve));
  } else {
    const LevelSummary exact = SummarizeByLevel(result.records, "level", "exact_recovery");
    const LevelSummary rank = SummarizeByLevel(result.records, "level", "rank_condition");
    result.aggregates["exact_recovery_probability"] = {{"levels", exact.levels}, {"mean", exact.means}};
    result.aggregates["rank_condition_fraction"] = {{"levels", rank.levels}, {"mean", rank.means}};
    Curve curve{"sparsity_curves", {"s", "exact_recovery_probability", "rank_condition_fraction"}, {}};
    for (std::size_t l = 0; l < exact.levels.size(); ++l) {
      curve.rows.push_back({exact.levels[l], exact.means[l], rank.means[l]});
    }
    result.curves.push_back(std::move(curve));
  }
  return result;
}

}  // namespace dcs
