#include "dcs/model.h"

#include <sstream>

#include "dcs/error.h"
#include "dcs/random.h"

namespace dcs {
namespace {

void CheckShapes(const Matrix& a, const Matrix& b, const Matrix& c) {
  ValidateMatrix(a, "A");
  ValidateMatrix(b, "B");
  ValidateMatrix(c, "C");
  std::ostringstream msg;
  if (a.rows() != a.cols()) {
    msg << "A must be square, got " << a.rows() << "x" << a.cols();
  } else if (b.rows() != a.rows()) {
    msg << "B has " << b.rows() << " rows, expected n=" << a.rows();
  } else if (c.cols() != a.rows()) {
    msg << "C has " << c.cols() << " columns, expected n=" << a.rows();
  }
  if (!msg.str().empty()) throw DimensionError(msg.str());
}

void CheckLength(const Vector& v, Eigen::Index expected, const char* seq,
                 std::size_t step) {
  if (v.size() != expected) {
    std::ostringstream msg;
    msg << seq << "[" << step << "] has length " << v.size() << ", expected "
        << expected;
    throw DimensionError(msg.str());
  }
}

}  // namespace

SystemModel SystemModel::Create(Matrix a, Matrix b, Matrix c) {
  CheckShapes(a, b, c);
  if (b.cols() <= a.rows()) {
    std::ostringstream msg;
    msg << "B must be wide (m > n), got m=" << b.cols() << " n=" << a.rows()
        << "; use CreateRelaxed for narrow input maps";
    throw ContractError(msg.str());
  }
  return SystemModel(std::move(a), std::move(b), std::move(c), false);
}

SystemModel SystemModel::CreateRelaxed(Matrix a, Matrix b, Matrix c) {
  CheckShapes(a, b, c);
  return SystemModel(std::move(a), std::move(b), std::move(c), true);
}

void NoiseSpec::Validate() const {
  if (!(eps >= 0.0) || !(eps_prime >= 0.0) || !(eps_dprime >= 0.0)) {
    throw ContractError("noise bounds must be nonnegative");
  }
}

void SparsityPattern::Validate(int m) const {
  for (std::size_t k = 0; k < supports.size(); ++k) {
    if (static_cast<int>(supports[k].size()) > s) {
      std::ostringstream msg;
      msg << "support[" << k << "] has " << supports[k].size()
          << " entries, exceeds s=" << s;
      throw ContractError(msg.str());
    }
    for (int i : supports[k]) {
      if (i < 0 || i >= m) {
        std::ostringstream msg;
        msg << "support[" << k << "] index " << i << " outside [0, " << m
            << ")";
        throw ContractError(msg.str());
      }
    }
  }
}

Trajectory Simulate(const SystemModel& sys, const Sequence& inputs,
                    const Vector& r0, const Sequence* disturbance,
                    const Sequence* noise) {
  const std::size_t horizon = inputs.size();
  if (horizon == 0) throw DimensionError("inputs: horizon must be positive");
  CheckLength(r0, sys.n(), "r0", 0);
  for (std::size_t k = 0; k < horizon; ++k) CheckLength(inputs[k], sys.m(), "inputs", k);
  const bool has_d = disturbance != nullptr && !disturbance->empty();
  const bool has_e = noise != nullptr && !noise->empty();
  if (has_d) {
    if (disturbance->size() != horizon) {
      std::ostringstream msg;
      msg << "disturbance has " << disturbance->size() << " steps, expected "
          << horizon;
      throw DimensionError(msg.str());
    }
    for (std::size_t k = 0; k < horizon; ++k) {
      CheckLength((*disturbance)[k], sys.n(), "disturbance", k);
    }
  }
  if (has_e) {
    if (noise->size() != horizon + 1) {
      std::ostringstream msg;
      msg << "noise has " << noise->size() << " steps, expected " << horizon + 1;
      throw DimensionError(msg.str());
    }
    for (std::size_t k = 0; k <= horizon; ++k) CheckLength((*noise)[k], sys.p(), "noise", k);
  }

  Trajectory traj;
  traj.inputs = inputs;
  if (has_d) traj.disturbances = *disturbance;
  if (has_e) traj.noises = *noise;
  traj.states.reserve(horizon + 1);
  traj.outputs.reserve(horizon + 1);
  traj.states.push_back(r0);
  for (std::size_t k = 0; k < horizon; ++k) {
    Vector next = sys.A() * traj.states[k] + sys.B() * inputs[k];
    if (has_d) next += (*disturbance)[k];
    traj.states.push_back(std::move(next));
  }
  for (std::size_t k = 0; k <= horizon; ++k) {
    Vector y = sys.C() * traj.states[k];
    if (has_e) y += (*noise)[k];
    traj.outputs.push_back(std::move(y));
  }
  return traj;
}

double TrajectoryResidual(const SystemModel& sys, const Trajectory& traj) {
  double worst = 0.0;
  const int horizon = traj.horizon();
  for (int k = 0; k < horizon; ++k) {
    Vector next = sys.A() * traj.states[k] + sys.B() * traj.inputs[k];
    if (!traj.disturbances.empty()) next += traj.disturbances[k];
    worst = std::max(worst, (traj.states[k + 1] - next).norm());
  }
  for (int k = 0; k <= horizon; ++k) {
    Vector y = sys.C() * traj.states[k];
    if (!traj.noises.empty()) y += traj.noises[k];
    worst = std::max(worst, (traj.outputs[k] - y).norm());
  }
  return worst;
}

double ValueDistribution::Draw(Rng& rng) const {
  switch (kind) {
    case Kind::kUniform:
      return rng.Uniform(a, b);
    case Kind::kGaussian:
      return rng.Normal(a, b);
    case Kind::kConstant:
      return a;
  }
  return a;
}

std::string ValueDistribution::Name() const {
  switch (kind) {
    case Kind::kUniform:
      return "uniform";
    case Kind::kGaussian:
      return "gaussian";
    case Kind::kConstant:
      return "constant";
  }
  return "uniform";
}

SparseInputs GenerateSparseInputs(int m, int horizon,
                                  const SparsityPattern& pattern,
                                  const ValueDistribution& dist,
                                  std::uint64_t seed) {
  if (pattern.s > m) throw ContractError("sparsity s exceeds input dimension m");
  if (static_cast<int>(pattern.supports.size()) != horizon) {
    throw DimensionError("sparsity pattern length does not match horizon");
  }
  pattern.Validate(m);
  Rng rng(seed);
  SparseInputs out;
  out.pattern = pattern;
  out.inputs.assign(horizon, Vector::Zero(m));
  for (int k = 0; k < horizon; ++k) {
    for (int i : pattern.supports[k]) out.inputs[k](i) = dist.Draw(rng);
  }
  return out;
}

SparseInputs GenerateSparseInputs(int m, int horizon, int s,
                                  const ValueDistribution& dist,
                                  std::uint64_t seed) {
  if (s < 0 || s > m) {
    std::ostringstream msg;
    msg << "sparsity s=" << s << " must lie in [0, m=" << m << "]";
    throw ContractError(msg.str());
  }
  Rng rng(seed);
  SparseInputs out;
  out.pattern.s = s;
  out.inputs.assign(horizon, Vector::Zero(m));
  for (int k = 0; k < horizon; ++k) {
    std::vector<int> support = rng.Subset(m, s);
    for (int i : support) out.inputs[k](i) = dist.Draw(rng);
    out.pattern.supports.push_back(std::move(support));
  }
  return out;
}

Matrix ObservabilityMatrix(const SystemModel& sys, int horizon) {
  if (horizon < 0) throw DimensionError("horizon must be nonnegative");
  const int p = sys.p();
  Matrix obs(static_cast<Eigen::Index>(horizon + 1) * p, sys.n());
  Matrix block = sys.C();
  for (int i = 0; i <= horizon; ++i) {
    obs.middleRows(static_cast<Eigen::Index>(i) * p, p) = block;
    if (i < horizon) block = block * sys.A();
  }
  return obs;
}

Matrix StackedInputMap(
    const SystemModel& sys, int horizon,
    const std::optional<std::vector<std::vector<int>>>& supports) {
  if (horizon < 0) throw DimensionError("horizon must be nonnegative");
  const int p = sys.p();
  std::vector<Matrix> b_blocks;
  b_blocks.reserve(horizon);
  int width = sys.m();
  if (supports) {
    if (static_cast<int>(supports->size()) != horizon) {
      throw DimensionError("supports must list one index set per step");
    }
    width = horizon > 0 ? static_cast<int>((*supports)[0].size()) : 0;
    for (int j = 0; j < horizon; ++j) {
      const auto& t = (*supports)[j];
      if (static_cast<int>(t.size()) != width) {
        throw ContractError("supports must have equal size at every step");
      }
      Matrix bj(sys.n(), width);
      for (int c = 0; c < width; ++c) {
        if (t[c] < 0 || t[c] >= sys.m()) {
          std::ostringstream msg;
          msg << "support index " << t[c] << " at step " << j
              << " outside [0, " << sys.m() << ")";
          throw DimensionError(msg.str());
        }
        bj.col(c) = sys.B().col(t[c]);
      }
      b_blocks.push_back(std::move(bj));
    }
  }

  // C A^k for k = 0..K-1.
  std::vector<Matrix> ca;
  ca.reserve(horizon);
  Matrix block = sys.C();
  for (int k = 0; k < horizon; ++k) {
    ca.push_back(block);
    block = block * sys.A();
  }

  Matrix j_map = Matrix::Zero(static_cast<Eigen::Index>(horizon + 1) * p,
                              static_cast<Eigen::Index>(horizon) * width);
  for (int col = 0; col < horizon; ++col) {
    const Matrix& bj = supports ? b_blocks[col] : sys.B();
    for (int row = col + 1; row <= horizon; ++row) {
      j_map.block(static_cast<Eigen::Index>(row) * p,
                  static_cast<Eigen::Index>(col) * width, p, width) =
          ca[row - 1 - col] * bj;
    }
  }
  return j_map;
}

StackedMaps BuildStackedMaps(
    const SystemModel& sys, int horizon,
    const std::optional<std::vector<std::vector<int>>>& supports) {
  StackedMaps maps;
  maps.observability = ObservabilityMatrix(sys, horizon);
  maps.input_full = StackedInputMap(sys, horizon);
  if (supports) maps.input_support = StackedInputMap(sys, horizon, supports);
  return maps;
}

Vector Stack(const Sequence& seq) {
  Eigen::Index total = 0;
  for (const Vector& v : seq) total += v.size();
  Vector out(total);
  Eigen::Index off = 0;
  for (const Vector& v : seq) {
    out.segment(off, v.size()) = v;
    off += v.size();
  }
  return out;
}

Sequence Unstack(const Vector& v, int steps, int block) {
  if (v.size() != static_cast<Eigen::Index>(steps) * block) {
    throw DimensionError("stacked vector length does not match steps*block");
  }
  Sequence out;
  out.reserve(steps);
  for (int k = 0; k < steps; ++k) {
    out.push_back(v.segment(static_cast<Eigen::Index>(k) * block, block));
  }
  return out;
}

Sequence PropagateStates(const SystemModel& sys, const Vector& r0,
                         const Sequence& inputs) {
  Sequence states;
  states.reserve(inputs.size() + 1);
  states.push_back(r0);
  for (const Vector& u : inputs) states.push_back(sys.A() * states.back() + sys.B() * u);
  return states;
}

}  // namespace dcs
