#pragma once

#include <nlohmann/json.hpp>

#include "dcs/analysis.h"
#include "dcs/model.h"
#include "dcs/networks.h"
#include "dcs/solver.h"

namespace dcs {

// Matrices are arrays of rows; sequences arrays of per-step arrays.
nlohmann::json ToJson(const Matrix& m);
nlohmann::json ToJson(const Vector& v);
nlohmann::json ToJson(const Sequence& seq);
Matrix MatrixFromJson(const nlohmann::json& j, const char* name);
Vector VectorFromJson(const nlohmann::json& j, const char* name);
Sequence SequenceFromJson(const nlohmann::json& j, const char* name);

// {"A": ..., "B": ..., "C": ...}; "relaxed": true permits m <= n.
nlohmann::json ToJson(const SystemModel& sys);
SystemModel SystemFromJson(const nlohmann::json& j);

nlohmann::json ToJson(const Trajectory& traj);
Trajectory TrajectoryFromJson(const nlohmann::json& j);

nlohmann::json ToJson(const SparsityPattern& pattern);

std::string ToString(RecoveryMode mode);      // "p1" / "p2"
std::string ToString(RecoveryStrategy strategy);  // "one-step" / "sequential"
RecoveryMode ParseRecoveryMode(const std::string& s);
RecoveryStrategy ParseRecoveryStrategy(const std::string& s);
CheckMode ParseCheckMode(const std::string& s);

nlohmann::json ToJson(const RecoveryProblem& problem);
RecoveryProblem ProblemFromJson(const nlohmann::json& j);

nlohmann::json ToJson(const SolverConfig& config);
// Overrides the fields present in `j`; unknown keys are rejected.
SolverConfig SolverConfigFromJson(const nlohmann::json& j, SolverConfig base = {});

nlohmann::json ToJson(const RecoverySolution& sol);
nlohmann::json ToJson(const RipEstimate& est);
nlohmann::json ToJson(const RankConditionReport& report);
nlohmann::json ToJson(const BoundReport& report);
nlohmann::json ToJson(const AttenuationReport& report);
nlohmann::json ToJson(const DesignResult& result);

}  // namespace dcs
