#include "cli.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dcs/analysis.h"
#include "dcs/error.h"
#include "dcs/experiments.h"
#include "dcs/io.h"
#include "dcs/linalg.h"
#include "dcs/networks.h"
#include "dcs/serialize.h"
#include "dcs/solver.h"
#include "params.h"

namespace dcs::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kOutputDirEnv = "DCS_OUTPUT_DIR";

struct Globals {
  int threads = 1;
  std::string out;
  SolverConfig solver;
};

// Removes the keys shared by every subcommand from `params`.
Globals TakeGlobals(json* params, const std::string& command) {
  Globals g;
  json shared = json::object();
  for (const char* key : {"threads", "out", "solver"}) {
    if (params->contains(key)) {
      shared[key] = (*params)[key];
      params->erase(key);
    }
  }
  Params p(shared, command);
  p.Read("threads", &g.threads);
  p.Read("out", &g.out);
  if (!p.Raw("solver").is_null()) g.solver = SolverConfigFromJson(shared["solver"]);
  if (g.threads < 1) throw ContractError("threads must be at least 1");
  return g;
}

std::string EnvOutputDir() {
  const char* dir = std::getenv(kOutputDirEnv);
  return dir && *dir ? std::string(dir) : std::string();
}

// Output file for single-document commands; empty means `out` stream.
std::string ResolveFile(const Globals& g, const std::string& default_name) {
  if (!g.out.empty()) return g.out;
  const std::string dir = EnvOutputDir();
  return dir.empty() ? std::string() : (fs::path(dir) / default_name).string();
}

std::string ResolveDir(const Globals& g, const std::string& default_name) {
  if (!g.out.empty()) return g.out;
  const std::string dir = EnvOutputDir();
  return (fs::path(dir.empty() ? "dcs_output" : dir) / default_name).string();
}

void RequireInputFile(const std::string& path, const std::string& key) {
  std::error_code ec;
  if (path.empty()) throw ContractError("missing required input \"" + key + "\"");
  if (!fs::is_regular_file(path, ec)) throw IoError(key + ": no such file " + path);
}

void PrepareOutputFile(const std::string& path) {
  if (path.empty()) return;
  const fs::path parent = fs::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) fs::create_directories(parent, ec);
  if (ec) throw IoError("cannot create " + parent.string() + ": " + ec.message());
  if (fs::is_directory(path, ec)) throw IoError("output path is a directory: " + path);
}

void PrepareOutputDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir);
}

void Emit(const json& doc, const std::string& path, std::ostream& out) {
  const std::string text = DumpJson(doc);
  if (path.empty()) {
    out << text;
  } else {
    WriteFile(path, text);
  }
}

Sequence SequenceFromCsv(const std::string& path) {
  const Matrix rows = ReadMatrixCsv(path);
  Sequence seq;
  for (Eigen::Index k = 0; k < rows.rows(); ++k) seq.push_back(rows.row(k).transpose());
  return seq;
}

Vector VectorFromCsv(const std::string& path) {
  const Matrix m = ReadMatrixCsv(path);
  if (m.rows() != 1 && m.cols() != 1) throw DimensionError(path + " must hold a single row or column");
  return Eigen::Map<const Vector>(m.data(), m.size());
}

// A matrix given directly as CSV, or one block of a system JSON file. The
// keys are read first so that unknown keys are reported before any file I/O.
struct MatrixSource {
  std::string matrix_key, block, matrix_path, system_path;

  Matrix Load() const {
    if (matrix_path.empty() == system_path.empty()) {
      throw ContractError("give exactly one of \"" + matrix_key + "\" and \"system\"");
    }
    if (!matrix_path.empty()) {
      RequireInputFile(matrix_path, matrix_key);
      return ReadMatrixCsv(matrix_path);
    }
    RequireInputFile(system_path, "system");
    const json sys = ReadJsonFile(system_path);
    if (!sys.is_object() || !sys.contains(block)) {
      throw FormatError(system_path + " has no \"" + block + "\" block");
    }
    return MatrixFromJson(sys[block], block.c_str());
  }
};

MatrixSource MatrixArgument(Params& p, const char* matrix_key, const char* block) {
  MatrixSource src{matrix_key, block, {}, {}};
  p.Read(matrix_key, &src.matrix_path);
  p.Read("system", &src.system_path);
  return src;
}

SystemModel LoadSystem(const std::string& path) {
  RequireInputFile(path, "system");
  return SystemFromJson(ReadJsonFile(path));
}

CheckMode ModeArgument(Params& p) {
  std::string mode = "exact";
  p.Read("mode", &mode);
  return ParseCheckMode(mode);
}

// --- subcommands ------------------------------------------------------------

void RunSimulate(Params& p, const Globals& g, std::ostream& out) {
  std::string system, inputs, r0, disturbances, noises;
  p.Read("system", &system);
  p.Read("inputs", &inputs);
  p.Read("r0", &r0);
  p.Read("disturbances", &disturbances);
  p.Read("noises", &noises);
  p.Finish();
  RequireInputFile(system, "system");
  RequireInputFile(inputs, "inputs");
  if (!r0.empty()) RequireInputFile(r0, "r0");
  if (!disturbances.empty()) RequireInputFile(disturbances, "disturbances");
  if (!noises.empty()) RequireInputFile(noises, "noises");
  const std::string target = ResolveFile(g, "trajectory.json");
  PrepareOutputFile(target);

  const SystemModel sys = SystemFromJson(ReadJsonFile(system));
  const Sequence u = SequenceFromCsv(inputs);
  const Vector start = r0.empty() ? Vector::Zero(sys.n()).eval() : VectorFromCsv(r0);
  Sequence d, e;
  if (!disturbances.empty()) d = SequenceFromCsv(disturbances);
  if (!noises.empty()) e = SequenceFromCsv(noises);
  const Trajectory traj =
      Simulate(sys, u, start, disturbances.empty() ? nullptr : &d, noises.empty() ? nullptr : &e);
  Emit(ToJson(traj), target, out);
}

struct ProblemSource {
  std::string path, mode, strategy;
  std::optional<double> eps;

  RecoveryProblem Load() const {
    RequireInputFile(path, "problem");
    RecoveryProblem problem = ProblemFromJson(ReadJsonFile(path));
    if (!mode.empty()) problem.mode = ParseRecoveryMode(mode);
    if (!strategy.empty()) problem.strategy = ParseRecoveryStrategy(strategy);
    if (eps) problem.eps_dprime = *eps;
    return problem;
  }
};

ProblemSource ProblemArgument(Params& p) {
  ProblemSource src;
  p.Read("problem", &src.path);
  p.Read("mode", &src.mode);
  p.Read("strategy", &src.strategy);
  p.Read("eps", &src.eps);
  return src;
}

void RunRecover(Params& p, const Globals& g, std::ostream& out) {
  const ProblemSource problem = ProblemArgument(p);
  p.Finish();
  const std::string target = ResolveFile(g, "solution.json");
  PrepareOutputFile(target);
  Emit(ToJson(Solve(problem.Load(), g.solver)), target, out);
}

void RunP0Oracle(Params& p, const Globals& g, std::ostream& out) {
  const ProblemSource problem = ProblemArgument(p);
  int s_max = 1;
  long long budget = 1000000;
  p.Read("s_max", &s_max);
  p.Read("budget", &budget);
  p.Finish();
  const std::string target = ResolveFile(g, "p0_solution.json");
  PrepareOutputFile(target);
  Emit(ToJson(SolveP0BruteForce(problem.Load(), s_max, budget)), target, out);
}

void RunRip(Params& p, const Globals& g, std::ostream& out) {
  const MatrixSource b = MatrixArgument(p, "matrix", "B");
  int s = 1;
  std::uint64_t seed = 0;
  p.Read("s", &s);
  const CheckMode mode = ModeArgument(p);
  long long budget = mode == CheckMode::kExact ? 1000000 : kDefaultRipSamples;
  p.Read("budget", &budget);
  p.Read("seed", &seed);
  p.Finish();
  const std::string target = ResolveFile(g, "rip.json");
  PrepareOutputFile(target);
  Emit(ToJson(RipConstant(b.Load(), s, mode, budget, seed)), target, out);
}

void RunRankCheck(Params& p, const Globals& g, std::ostream& out) {
  std::string system_path;
  p.Read("system", &system_path);
  int horizon = 1, s = 1;
  std::uint64_t seed = 0;
  p.Read("horizon", &horizon);
  p.Read("s", &s);
  const CheckMode mode = ModeArgument(p);
  long long budget = mode == CheckMode::kExact ? 1000000 : kDefaultRankSamples;
  p.Read("budget", &budget);
  p.Read("seed", &seed);
  p.Finish();
  const SystemModel sys = LoadSystem(system_path);
  const std::string target = ResolveFile(g, "rank_check.json");
  PrepareOutputFile(target);
  Emit(ToJson(CheckRankCondition(sys, horizon, s, mode, budget, seed)), target, out);
}

void RunBounds(Params& p, const Globals& g, std::ostream& out) {
  std::string system_path;
  p.Read("system", &system_path);
  double delta2s = 0.0, eps = 0.0, eps_prime = 0.0;
  int horizon = 1;
  std::optional<double> sigma;
  std::string kind = "all";
  p.Read("delta2s", &delta2s);
  p.Read("horizon", &horizon);
  p.Read("eps", &eps);
  p.Read("eps_prime", &eps_prime);
  p.Read("sigma", &sigma);
  p.Read("kind", &kind);
  p.Finish();
  const SystemModel sys = LoadSystem(system_path);
  if (kind != "all" && kind != "recovery" && kind != "static" && kind != "dynamic") {
    throw ContractError("kind must be one of all, recovery, static, dynamic");
  }
  const std::string target = ResolveFile(g, "bounds.json");
  PrepareOutputFile(target);
  json doc;
  if (kind == "recovery") {
    doc = ToJson(RecoveryBound(sys, delta2s, horizon, eps, sigma));
  } else if (kind == "static") {
    doc = ToJson(StaticTradeoffBound(sys, delta2s, horizon, eps, eps_prime));
  } else if (kind == "dynamic") {
    doc = ToJson(DynamicTradeoffBound(sys, delta2s, horizon, eps, eps_prime));
  } else {
    doc = {{"recovery", ToJson(RecoveryBound(sys, delta2s, horizon, eps, sigma))},
           {"static", ToJson(StaticTradeoffBound(sys, delta2s, horizon, eps, eps_prime))},
           {"dynamic", IsSymmetric(sys.A())
                           ? ToJson(DynamicTradeoffBound(sys, delta2s, horizon, eps, eps_prime))
                           : json(nullptr)}};
  }
  Emit(doc, target, out);
}

void RunAttenuation(Params& p, const Globals& g, std::ostream& out) {
  const MatrixSource a = MatrixArgument(p, "matrix", "A");
  double omega = std::numbers::pi;
  p.Read("omega", &omega);
  p.Finish();
  const std::string target = ResolveFile(g, "attenuation.json");
  PrepareOutputFile(target);
  Emit(ToJson(SpectralAttenuation(a.Load(), omega)), target, out);
}

void RunDesign(Params& p, const Globals& g, std::ostream& out) {
  const MatrixSource c = MatrixArgument(p, "matrix", "C");
  double delta2s = 0.0, eps = 0.0, eps_prime = 0.0;
  int horizon = 1, grid = 20;
  p.Read("delta2s", &delta2s);
  p.Read("horizon", &horizon);
  p.Read("eps", &eps);
  p.Read("eps_prime", &eps_prime);
  p.Read("grid", &grid);
  p.Finish();
  const std::string target = ResolveFile(g, "design.json");
  PrepareOutputFile(target);
  Emit(ToJson(DesignRecurrence(c.Load(), delta2s, horizon, eps, eps_prime, grid)), target, out);
}

void WriteGenerated(const GeneratedSystem& gen, const std::string& dir) {
  const fs::path root(dir);
  WriteMatrixCsv((root / "A.csv").string(), gen.sys.A());
  WriteMatrixCsv((root / "B.csv").string(), gen.sys.B());
  WriteMatrixCsv((root / "C.csv").string(), gen.sys.C());
  WriteJsonFile((root / "system.json").string(), ToJson(gen.sys));
  WriteJsonFile((root / "provenance.json").string(), gen.provenance);
  if (gen.neuron_signs) {
    Matrix signs(1, gen.neuron_signs->size());
    for (std::size_t i = 0; i < gen.neuron_signs->size(); ++i) signs(0, i) = (*gen.neuron_signs)[i];
    WriteMatrixCsv((root / "neuron_signs.csv").string(), signs);
  }
  if (gen.time_constants) {
    WriteMatrixCsv((root / "time_constants.csv").string(), gen.time_constants->transpose());
  }
  if (gen.recurrent) WriteMatrixCsv((root / "recurrent.csv").string(), *gen.recurrent);
}

void RunGenerate(const std::string& generator, Params& p, const Globals& g) {
  GeneratedSystem gen = [&] {
    if (generator == "gaussian") {
      int n = 20, m = 40, pp = 20;
      std::uint64_t seed = 0;
      GaussianOptions options;
      p.Read("n", &n);
      p.Read("m", &m);
      p.Read("p", &pp);
      p.Read("seed", &seed);
      p.Read("a_scale", &options.a_scale);
      p.Read("scale_b_columns", &options.scale_b_columns);
      p.Read("allow_narrow", &options.allow_narrow);
      p.Finish();
      return GaussianSystem(n, m, pp, seed, options);
    }
    RateNetworkParams params;
    ReadRateNetwork(p, &params);
    p.Finish();
    return RateNetwork(params);
  }();
  const std::string dir = ResolveDir(g, generator);
  PrepareOutputDir(dir);
  WriteGenerated(gen, dir);
}

void RunExperiment(const std::string& name, Params& p, const Globals& g) {
  RunOptions options{g.threads, g.solver};
  const std::string dir = ResolveDir(g, name);
  // The experiment parsers do their own key checking.
  const json rest = p.TakeAll();
  if (rest.contains("image")) RequireInputFile(rest["image"].get<std::string>(), "image");
  ExperimentResult result;
  if (name == "example1") {
    const Example1Config config = Example1FromJson(rest);
    PrepareOutputDir(dir);
    result = Example1(config, options);
  } else if (name == "example2-sweeps") {
    const Example2SweepConfig config = Example2SweepFromJson(rest);
    PrepareOutputDir(dir);
    result = Example2Sweep(config, options);
  } else if (name == "example2-movie") {
    const Example2MovieConfig config = Example2MovieFromJson(rest);
    PrepareOutputDir(dir);
    result = Example2Movie(config, options);
  } else {
    const Example3Config config = Example3FromJson(rest);
    PrepareOutputDir(dir);
    result = Example3Neuronal(config, options);
  }
  WriteExperimentResult(result, dir);
}

// --- argument grammar --------------------------------------------------------

class Builder {
 public:
  explicit Builder(json* overrides) : overrides_(overrides) {}

  template <typename T>
  CLI::Option* Value(CLI::App* app, const std::string& flag, const std::string& key,
                     const std::string& help) {
    json* target = overrides_;
    return app->add_option_function<T>(
        flag, [target, key](const T& v) { (*target)[key] = v; }, help);
  }

  CLI::Option* Switch(CLI::App* app, const std::string& flag, const std::string& key,
                      const std::string& help) {
    json* target = overrides_;
    return app->add_flag_function(
        flag, [target, key](std::int64_t) { (*target)[key] = true; }, help);
  }

  CLI::Option* Choice(CLI::App* app, const std::string& flag, const std::string& key,
                      const std::vector<std::string>& choices, const std::string& help) {
    return Value<std::string>(app, flag, key, help)->check(CLI::IsMember(choices));
  }

 private:
  json* overrides_;
};

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse-input recovery for linear recurrent networks", "dcs"};
  app.require_subcommand(1);
  app.fallthrough();

  json overrides = json::object();
  json solver_overrides = json::object();
  std::string config_path;
  Builder b(&overrides);
  Builder solver(&solver_overrides);

  app.add_option("--config", config_path, "JSON parameter file; flags override its values")
      ->check(CLI::ExistingFile);
  b.Value<std::uint64_t>(&app, "--seed", "seed", "Seed for every stochastic step");
  b.Value<int>(&app, "--threads", "threads", "Worker cap for Monte Carlo trials (default 1)")
      ->check(CLI::PositiveNumber);
  b.Value<std::string>(&app, "--out", "out",
                       std::string("Output file or directory (default: $") + kOutputDirEnv + ")");
  solver.Value<double>(&app, "--feasibility-tol", "feasibility_tol", "Solver feasibility tolerance");
  solver.Value<double>(&app, "--optimality-tol", "optimality_tol", "Solver relative gap tolerance");
  solver.Value<int>(&app, "--max-iterations", "max_iterations", "Solver iteration cap");

  std::map<std::string, std::function<void(Params&, const Globals&)>> handlers;
  std::string chosen;
  auto command = [&](CLI::App* parent, const std::string& name, const std::string& help,
                     std::function<void(Params&, const Globals&)> run) {
    CLI::App* sub = parent->add_subcommand(name, help);
    sub->fallthrough();
    const std::string key = parent == &app ? name : parent->get_name() + " " + name;
    sub->parse_complete_callback([&chosen, key] { chosen = key; });
    handlers[key] = std::move(run);
    return sub;
  };

  CLI::App* sim = command(&app, "simulate", "Simulate a system from r0 (default zero)",
                          [&](Params& p, const Globals& g) { RunSimulate(p, g, out); });
  b.Value<std::string>(sim, "--system", "system", "System JSON {A, B, C}");
  b.Value<std::string>(sim, "--inputs", "inputs", "CSV, one row per step");
  b.Value<std::string>(sim, "--r0", "r0", "Initial state CSV");
  b.Value<std::string>(sim, "--disturbances", "disturbances", "CSV, one row per step");
  b.Value<std::string>(sim, "--noises", "noises", "CSV, one row per output step");

  auto problem_flags = [&](CLI::App* sub) {
    b.Value<std::string>(sub, "--problem", "problem", "Problem JSON {system, outputs, ...}");
    b.Choice(sub, "--mode", "mode", {"p1", "p2", "noiseless", "noisy"}, "Recovery program");
    b.Value<double>(sub, "--eps", "eps", "P2 per-step output radius");
    b.Choice(sub, "--strategy", "strategy", {"one-step", "sequential"}, "Recovery strategy");
  };
  CLI::App* rec = command(&app, "recover", "Recover sparse inputs by l1 minimization",
                          [&](Params& p, const Globals& g) { RunRecover(p, g, out); });
  problem_flags(rec);
  CLI::App* p0 = command(&app, "p0-oracle", "Exhaustive l0 recovery of a small noiseless problem",
                         [&](Params& p, const Globals& g) { RunP0Oracle(p, g, out); });
  problem_flags(p0);
  b.Value<int>(p0, "--s-max", "s_max", "Largest per-step support size");
  b.Value<long long>(p0, "--budget", "budget", "Enumeration budget");

  CLI::App* rip = command(&app, "rip", "Restricted isometry constant of B",
                          [&](Params& p, const Globals& g) { RunRip(p, g, out); });
  b.Value<std::string>(rip, "--matrix", "matrix", "Matrix CSV");
  b.Value<std::string>(rip, "--system", "system", "System JSON (its B is used)");
  b.Value<int>(rip, "--s", "s", "Sparsity level");
  b.Choice(rip, "--mode", "mode", {"exact", "sampled"}, "Exhaustive or sampled supports");
  b.Value<long long>(rip, "--budget", "budget", "Support budget (exact) or sample count");

  CLI::App* rank = command(&app, "rank-check", "Rank condition for non-invertible C",
                           [&](Params& p, const Globals& g) { RunRankCheck(p, g, out); });
  b.Value<std::string>(rank, "--system", "system", "System JSON");
  b.Value<int>(rank, "--horizon", "horizon", "Horizon K");
  b.Value<int>(rank, "--s", "s", "Sparsity level");
  b.Choice(rank, "--mode", "mode", {"exact", "sampled"}, "Exhaustive or sampled supports");
  b.Value<long long>(rank, "--budget", "budget", "Combination budget or sample count");

  CLI::App* bounds = command(&app, "bounds", "Recovery error bounds",
                             [&](Params& p, const Globals& g) { RunBounds(p, g, out); });
  b.Value<std::string>(bounds, "--system", "system", "System JSON");
  b.Value<double>(bounds, "--delta2s", "delta2s", "Restricted isometry constant of order 2s");
  b.Value<int>(bounds, "--horizon", "horizon", "Horizon K");
  b.Value<double>(bounds, "--eps", "eps", "Per-step noise bound");
  b.Value<double>(bounds, "--eps-prime", "eps_prime", "Per-step disturbance bound");
  b.Value<double>(bounds, "--sigma", "sigma", "Point in the sigma interval for C0");
  b.Choice(bounds, "--kind", "kind", {"all", "recovery", "static", "dynamic"}, "Which bound");

  CLI::App* att = command(&app, "attenuation", "Disturbance attenuation of symmetric A",
                          [&](Params& p, const Globals& g) { RunAttenuation(p, g, out); });
  b.Value<std::string>(att, "--matrix", "matrix", "Matrix CSV");
  b.Value<std::string>(att, "--system", "system", "System JSON (its A is used)");
  b.Value<double>(att, "--omega", "omega", "Frequency in [0, pi] (default pi)");

  CLI::App* design = command(&app, "design-a", "Grid design of A = a I for a given C",
                             [&](Params& p, const Globals& g) { RunDesign(p, g, out); });
  b.Value<std::string>(design, "--matrix", "matrix", "C as CSV");
  b.Value<std::string>(design, "--system", "system", "System JSON (its C is used)");
  b.Value<double>(design, "--delta2s", "delta2s", "Restricted isometry constant of order 2s");
  b.Value<int>(design, "--horizon", "horizon", "Horizon K");
  b.Value<double>(design, "--eps", "eps", "Per-step noise bound");
  b.Value<double>(design, "--eps-prime", "eps_prime", "Per-step disturbance bound");
  b.Value<int>(design, "--grid", "grid", "Grid points on [0, 0.95]");

  CLI::App* gen = app.add_subcommand("generate", "Generate a system");
  gen->require_subcommand(1);
  gen->fallthrough();
  CLI::App* gauss = command(gen, "gaussian", "Gaussian A, B, C",
                            [&](Params& p, const Globals& g) { RunGenerate("gaussian", p, g); });
  b.Value<int>(gauss, "--n", "n", "State dimension");
  b.Value<int>(gauss, "--m", "m", "Input dimension");
  b.Value<int>(gauss, "--p", "p", "Output dimension");
  b.Value<double>(gauss, "--a-scale", "a_scale", "Standard deviation of A entries");
  b.Switch(gauss, "--allow-narrow", "allow_narrow", "Permit m <= n");
  gauss->add_flag_function(
      "--unscaled-b", [&overrides](std::int64_t) { overrides["scale_b_columns"] = false; },
      "B entries N(0, 1) instead of N(0, 1/n)");
  CLI::App* rate = command(gen, "rate-network", "Discretized excitatory/inhibitory rate network",
                           [&](Params& p, const Globals& g) { RunGenerate("rate-network", p, g); });
  b.Value<int>(rate, "--n", "n", "Recurrent neurons");
  b.Value<int>(rate, "--m", "m", "Afferent inputs");
  b.Value<int>(rate, "--p", "p", "Observed neurons");
  b.Value<double>(rate, "--dt", "dt", "Step in seconds");
  b.Value<double>(rate, "--inhibitory-fraction", "inhibitory_fraction", "Fraction of inhibitory neurons");
  b.Value<int>(rate, "--ws-degree", "ws_degree", "Small-world lattice degree");
  b.Value<double>(rate, "--ws-rewire", "ws_rewire", "Small-world rewiring probability");

  CLI::App* exp = app.add_subcommand("experiment", "Reproduce an experiment");
  exp->require_subcommand(1);
  exp->fallthrough();
  auto experiment = [&](const std::string& name, const std::string& help) {
    return command(exp, name, help,
                   [&, name](Params& p, const Globals& g) { RunExperiment(name, p, g); });
  };
  CLI::App* ex1 = experiment("example1", "Image recovery, full and partial observation");
  b.Value<std::string>(ex1, "--image", "image", "Grayscale CSV, column k is the input at step k");
  b.Value<int>(ex1, "--p-observable", "p_observable", "Output dimension of the partial case");
  CLI::App* ex2 = experiment("example2-sweeps", "MSE versus sigma_max(A) and perturbation power");
  b.Choice(ex2, "--sweep", "sweep", {"sigma_max", "noise_power", "disturbance_power"}, "Sweep");
  b.Value<int>(ex2, "--trials", "trials", "Monte Carlo trials");
  b.Value<std::vector<double>>(ex2, "--levels", "levels", "Sweep levels")->delimiter(',');
  b.Switch(ex2, "--diagonal-a", "diagonal_a", "Diagonal A = diag(U(-g, g))");
  b.Value<double>(ex2, "--noise-amplitude", "noise_amplitude", "Output noise U(-a, a)");
  b.Value<double>(ex2, "--disturbance-stddev", "disturbance_stddev", "Disturbance N(0, sd^2)");
  CLI::App* movie = experiment("example2-movie", "Movie recovery, static versus designed A");
  b.Switch(movie, "--full-scale", "full_scale", "20x20 frames, n = p = 200, 65 frames");
  b.Value<double>(movie, "--fixed-scale", "fixed_scale", "Use A = scale I instead of the design");
  CLI::App* ex3 = experiment("example3", "Rate-network inhibition and sparsity sweeps");
  b.Choice(ex3, "--sweep", "sweep", {"inhibition", "sparsity"}, "Sweep");
  b.Value<int>(ex3, "--trials", "trials", "Monte Carlo trials (at least 20)");
  b.Value<std::vector<double>>(ex3, "--levels", "levels", "Fractions or sparsity levels")
      ->delimiter(',');
  b.Switch(ex3, "--full-scale", "full_scale", "100 trials");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    json params = config_path.empty() ? json::object() : ReadJsonFile(config_path);
    if (!params.is_object()) throw FormatError(config_path + " must hold a JSON object");
    for (auto it = overrides.begin(); it != overrides.end(); ++it) params[it.key()] = it.value();
    if (!solver_overrides.empty()) {
      json& s = params["solver"];
      if (s.is_null()) s = json::object();
      for (auto it = solver_overrides.begin(); it != solver_overrides.end(); ++it) {
        s[it.key()] = it.value();
      }
    }
    const Globals globals = TakeGlobals(&params, chosen);
    Params p(params, chosen);
    handlers.at(chosen)(p, globals);
  } catch (const Error& e) {
    err << DumpJson({{"kind", e.kind()}, {"message", e.what()}});
    return 1;
  } catch (const std::exception& e) {
    err << DumpJson({{"kind", "internal"}, {"message", e.what()}});
    return 1;
  }
  return 0;
}

}  // namespace dcs::cli
