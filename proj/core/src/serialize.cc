#include "dcs/serialize.h"

#include <set>
#include <sstream>

#include "dcs/error.h"

namespace dcs {
namespace {

using nlohmann::json;

[[noreturn]] void Bad(const std::string& what) { throw FormatError(what); }

const json& Field(const json& j, const char* key, const char* where) {
  if (!j.is_object()) Bad(std::string(where) + " must be a JSON object");
  auto it = j.find(key);
  if (it == j.end()) Bad(std::string(where) + " is missing \"" + key + "\"");
  return *it;
}

double Number(const json& j, const char* name) {
  if (!j.is_number()) Bad(std::string(name) + " must be a number");
  return j.get<double>();
}

void RejectUnknown(const json& j, const std::set<std::string>& known, const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) Bad(std::string(where) + ": unknown key \"" + it.key() + "\"");
  }
}

template <typename T>
json Optional(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

json ToJson(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json ToJson(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json ToJson(const Sequence& seq) {
  json out = json::array();
  for (const Vector& v : seq) out.push_back(ToJson(v));
  return out;
}

Vector VectorFromJson(const json& j, const char* name) {
  if (!j.is_array()) Bad(std::string(name) + " must be an array of numbers");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = Number(j[i], name);
  return v;
}

Matrix MatrixFromJson(const json& j, const char* name) {
  if (!j.is_array() || j.empty()) Bad(std::string(name) + " must be a nonempty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      std::ostringstream msg;
      msg << name << " row " << i << " is ragged or not an array";
      Bad(msg.str());
    }
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = Number(j[i][c], name);
  }
  return m;
}

Sequence SequenceFromJson(const json& j, const char* name) {
  if (!j.is_array()) Bad(std::string(name) + " must be an array of per-step arrays");
  Sequence seq;
  for (const json& v : j) seq.push_back(VectorFromJson(v, name));
  return seq;
}

json ToJson(const SystemModel& sys) {
  json j = {{"A", ToJson(sys.A())}, {"B", ToJson(sys.B())}, {"C", ToJson(sys.C())}};
  if (sys.relaxed()) j["relaxed"] = true;
  return j;
}

SystemModel SystemFromJson(const json& j) {
  if (!j.is_object()) Bad("system must be a JSON object");
  RejectUnknown(j, {"A", "B", "C", "relaxed"}, "system");
  Matrix a = MatrixFromJson(Field(j, "A", "system"), "A");
  Matrix b = MatrixFromJson(Field(j, "B", "system"), "B");
  Matrix c = MatrixFromJson(Field(j, "C", "system"), "C");
  const bool relaxed = j.value("relaxed", false);
  return relaxed ? SystemModel::CreateRelaxed(std::move(a), std::move(b), std::move(c))
                 : SystemModel::Create(std::move(a), std::move(b), std::move(c));
}

json ToJson(const Trajectory& traj) {
  json j = {{"states", ToJson(traj.states)},
            {"inputs", ToJson(traj.inputs)},
            {"outputs", ToJson(traj.outputs)}};
  if (!traj.disturbances.empty()) j["disturbances"] = ToJson(traj.disturbances);
  if (!traj.noises.empty()) j["noises"] = ToJson(traj.noises);
  return j;
}

Trajectory TrajectoryFromJson(const json& j) {
  if (!j.is_object()) Bad("trajectory must be a JSON object");
  RejectUnknown(j, {"states", "inputs", "outputs", "disturbances", "noises"}, "trajectory");
  Trajectory t;
  t.states = SequenceFromJson(Field(j, "states", "trajectory"), "states");
  t.inputs = SequenceFromJson(Field(j, "inputs", "trajectory"), "inputs");
  t.outputs = SequenceFromJson(Field(j, "outputs", "trajectory"), "outputs");
  if (j.contains("disturbances")) t.disturbances = SequenceFromJson(j["disturbances"], "disturbances");
  if (j.contains("noises")) t.noises = SequenceFromJson(j["noises"], "noises");
  return t;
}

json ToJson(const SparsityPattern& pattern) {
  return {{"s", pattern.s}, {"supports", pattern.supports}};
}

std::string ToString(RecoveryMode mode) { return mode == RecoveryMode::kNoiseless ? "p1" : "p2"; }

std::string ToString(RecoveryStrategy strategy) {
  return strategy == RecoveryStrategy::kOneStep ? "one-step" : "sequential";
}

RecoveryMode ParseRecoveryMode(const std::string& s) {
  if (s == "p1" || s == "noiseless") return RecoveryMode::kNoiseless;
  if (s == "p2" || s == "noisy") return RecoveryMode::kNoisy;
  Bad("unknown recovery mode \"" + s + "\" (expected p1 or p2)");
}

RecoveryStrategy ParseRecoveryStrategy(const std::string& s) {
  if (s == "one-step") return RecoveryStrategy::kOneStep;
  if (s == "sequential") return RecoveryStrategy::kSequential;
  Bad("unknown strategy \"" + s + "\" (expected one-step or sequential)");
}

CheckMode ParseCheckMode(const std::string& s) {
  if (s == "exact") return CheckMode::kExact;
  if (s == "sampled") return CheckMode::kSampled;
  Bad("unknown check mode \"" + s + "\" (expected exact or sampled)");
}

json ToJson(const RecoveryProblem& problem) {
  return {{"system", ToJson(problem.sys)},
          {"outputs", ToJson(problem.outputs)},
          {"mode", ToString(problem.mode)},
          {"eps_dprime", problem.eps_dprime},
          {"strategy", ToString(problem.strategy)}};
}

RecoveryProblem ProblemFromJson(const json& j) {
  if (!j.is_object()) Bad("problem must be a JSON object");
  RejectUnknown(j, {"system", "outputs", "mode", "eps_dprime", "strategy"}, "problem");
  RecoveryProblem p{SystemFromJson(Field(j, "system", "problem")),
                    SequenceFromJson(Field(j, "outputs", "problem"), "outputs")};
  if (j.contains("mode")) p.mode = ParseRecoveryMode(j["mode"].get<std::string>());
  if (j.contains("eps_dprime")) p.eps_dprime = Number(j["eps_dprime"], "eps_dprime");
  if (j.contains("strategy")) p.strategy = ParseRecoveryStrategy(j["strategy"].get<std::string>());
  return p;
}

json ToJson(const SolverConfig& c) {
  return {{"feasibility_tol", c.feasibility_tol},
          {"optimality_tol", c.optimality_tol},
          {"max_iterations", c.max_iterations},
          {"rho", c.rho},
          {"adaptive_rho", c.adaptive_rho},
          {"check_interval", c.check_interval},
          {"equilibration_passes", c.equilibration_passes},
          {"polish", c.polish},
          {"support_threshold", c.support_threshold}};
}

SolverConfig SolverConfigFromJson(const json& j, SolverConfig c) {
  if (!j.is_object()) Bad("solver config must be a JSON object");
  RejectUnknown(j,
                {"feasibility_tol", "optimality_tol", "max_iterations", "rho", "adaptive_rho",
                 "check_interval", "equilibration_passes", "polish", "support_threshold"},
                "solver");
  try {
    if (j.contains("feasibility_tol")) c.feasibility_tol = j["feasibility_tol"].get<double>();
    if (j.contains("optimality_tol")) c.optimality_tol = j["optimality_tol"].get<double>();
    if (j.contains("max_iterations")) c.max_iterations = j["max_iterations"].get<int>();
    if (j.contains("rho")) c.rho = j["rho"].get<double>();
    if (j.contains("adaptive_rho")) c.adaptive_rho = j["adaptive_rho"].get<bool>();
    if (j.contains("check_interval")) c.check_interval = j["check_interval"].get<int>();
    if (j.contains("equilibration_passes")) c.equilibration_passes = j["equilibration_passes"].get<int>();
    if (j.contains("polish")) c.polish = j["polish"].get<bool>();
    if (j.contains("support_threshold")) c.support_threshold = j["support_threshold"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    Bad(std::string("solver config: ") + e.what());
  }
  c.Validate();
  return c;
}

json ToJson(const RecoverySolution& s) {
  return {{"states", ToJson(s.states)},
          {"inputs", ToJson(s.inputs)},
          {"objective", s.objective},
          {"dual_bound", s.dual_bound},
          {"dynamics_residual", s.dynamics_residual},
          {"output_residuals", s.output_residuals},
          {"iterations", s.iterations},
          {"converged", s.converged},
          {"status", ToString(s.status)},
          {"best_residual", s.best_residual},
          {"polished", s.polished},
          {"l0_norm", s.l0_norm},
          {"supports", s.supports}};
}

json ToJson(const RipEstimate& e) {
  return {{"s", e.s},
          {"delta", e.delta},
          {"mode", ToString(e.mode)},
          {"supports_examined", e.supports_examined},
          {"certified_upper", e.certified_upper},
          {"worst_support", e.worst_support}};
}

json ToJson(const RankConditionReport& r) {
  return {{"s", r.s},
          {"K", r.horizon},
          {"observable", r.observable},
          {"condition_holds", r.condition_holds},
          {"mode", ToString(r.mode)},
          {"combinations_checked", r.combinations_checked},
          {"first_failure", r.first_failure ? json(*r.first_failure) : json(nullptr)}};
}

json ToJson(const BoundReport& r) {
  return {{"delta2s", r.delta2s},
          {"K", r.horizon},
          {"eps", r.eps},
          {"eps_prime", r.eps_prime},
          {"sigma_choice", r.sigma_choice},
          {"sigma_min_CtC", r.gram_c_min},
          {"sigma_max_CtC", r.gram_c_max},
          {"sigma_max_AtA", r.gram_a_max},
          {"C0", r.C0},
          {"alpha", r.alpha},
          {"rho", r.rho},
          {"Cs", r.Cs},
          {"bound_value", r.bound_value},
          {"bound_value_sigma_max", r.bound_value_sigma_max},
          {"Cs_static", Optional(r.Cs_static)},
          {"sigma_prime", Optional(r.sigma_prime)},
          {"static_bound", Optional(r.static_bound)},
          {"static_bound_sigma_max", Optional(r.static_bound_sigma_max)},
          {"sigma_dprime", Optional(r.sigma_dprime)},
          {"attenuation", Optional(r.attenuation)},
          {"dynamic_bound", Optional(r.dynamic_bound)},
          {"dynamic_bound_sigma_min", Optional(r.dynamic_bound_sigma_min)},
          {"dynamic_bound_heuristic", r.dynamic_bound.has_value() && r.dynamic_bound_heuristic}};
}

json ToJson(const AttenuationReport& r) {
  return {{"omega", r.omega},
          {"eigenvalues", r.eigenvalues},
          {"per_mode_factors", r.per_mode_factors},
          {"trace_value", r.trace_value},
          {"resolvent_trace", r.resolvent_trace}};
}

json ToJson(const DesignResult& r) {
  return {{"A", ToJson(r.a)},
          {"scale", r.scale},
          {"objective", r.objective},
          {"grid", r.grid},
          {"objectives", r.objectives}};
}

}  // namespace dcs
