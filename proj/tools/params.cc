#include "params.h"

#include <limits>

#include "dcs/error.h"
#include "dcs/io.h"

namespace dcs::cli {

using nlohmann::json;

Params::Params(json j, std::string where) : j_(std::move(j)), where_(std::move(where)) {
  if (j_.is_null()) j_ = json::object();
  if (!j_.is_object()) throw FormatError(where_ + " must be a JSON object");
}

const json* Params::Lookup(const std::string& key) {
  auto it = j_.find(key);
  if (it == j_.end()) return nullptr;
  used_.insert(key);
  return &*it;
}

namespace {

[[noreturn]] void WrongType(const std::string& where, const std::string& key, const char* type) {
  throw FormatError(where + ": \"" + key + "\" must be " + type);
}

}  // namespace

void Params::Read(const std::string& key, double* out) {
  const json* v = Lookup(key);
  if (!v) return;
  if (!v->is_number()) WrongType(where_, key, "a number");
  *out = v->get<double>();
}

void Params::Read(const std::string& key, int* out) {
  const json* v = Lookup(key);
  if (!v) return;
  if (!v->is_number_integer()) WrongType(where_, key, "an integer");
  const long long x = v->get<long long>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    WrongType(where_, key, "an integer in int range");
  }
  *out = static_cast<int>(x);
}

void Params::Read(const std::string& key, long long* out) {
  const json* v = Lookup(key);
  if (!v) return;
  if (!v->is_number_integer()) WrongType(where_, key, "an integer");
  *out = v->get<long long>();
}

void Params::Read(const std::string& key, std::uint64_t* out) {
  const json* v = Lookup(key);
  if (!v) return;
  if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
    WrongType(where_, key, "a nonnegative integer");
  }
  *out = v->get<std::uint64_t>();
}

void Params::Read(const std::string& key, bool* out) {
  const json* v = Lookup(key);
  if (!v) return;
  if (!v->is_boolean()) WrongType(where_, key, "a boolean");
  *out = v->get<bool>();
}

void Params::Read(const std::string& key, std::string* out) {
  const json* v = Lookup(key);
  if (!v) return;
  if (!v->is_string()) WrongType(where_, key, "a string");
  *out = v->get<std::string>();
}

void Params::Read(const std::string& key, std::vector<double>* out) {
  const json* v = Lookup(key);
  if (!v) return;
  if (!v->is_array()) WrongType(where_, key, "an array of numbers");
  out->clear();
  for (const json& x : *v) {
    if (!x.is_number()) WrongType(where_, key, "an array of numbers");
    out->push_back(x.get<double>());
  }
}

void Params::Read(const std::string& key, std::optional<double>* out) {
  const json* v = Lookup(key);
  if (!v) return;
  if (v->is_null()) {
    out->reset();
    return;
  }
  if (!v->is_number()) WrongType(where_, key, "a number or null");
  *out = v->get<double>();
}

const json& Params::Raw(const std::string& key) {
  static const json kNull;
  const json* v = Lookup(key);
  return v ? *v : kNull;
}

json Params::TakeAll() {
  for (auto it = j_.begin(); it != j_.end(); ++it) used_.insert(it.key());
  return j_;
}

void Params::Finish() const {
  for (auto it = j_.begin(); it != j_.end(); ++it) {
    if (!used_.count(it.key())) throw FormatError(where_ + ": unknown key \"" + it.key() + "\"");
  }
}

void ReadRateNetwork(Params& params, RateNetworkParams* out) {
  params.Read("n", &out->n);
  params.Read("m", &out->m);
  params.Read("p", &out->p);
  params.Read("dt", &out->dt);
  params.Read("tau_min", &out->tau_min);
  params.Read("tau_max", &out->tau_max);
  params.Read("inhibitory_fraction", &out->inhibitory_fraction);
  params.Read("ws_degree", &out->ws_degree);
  params.Read("ws_rewire", &out->ws_rewire);
  params.Read("excitatory_mu", &out->excitatory.mu);
  params.Read("excitatory_sigma", &out->excitatory.sigma);
  params.Read("inhibitory_mu", &out->inhibitory.mu);
  params.Read("inhibitory_sigma", &out->inhibitory.sigma);
  params.Read("seed", &out->seed);
}

RateNetworkParams RateNetworkFromJson(const json& j) {
  Params params(j, "network");
  RateNetworkParams out;
  ReadRateNetwork(params, &out);
  params.Finish();
  out.Validate();
  return out;
}

Example1Config Example1FromJson(const json& j) {
  Params params(j, "example1");
  Example1Config c;
  params.Read("n", &c.n);
  params.Read("m", &c.m);
  params.Read("p_observable", &c.p_observable);
  params.Read("horizon", &c.horizon);
  params.Read("a_scale", &c.a_scale);
  params.Read("seed", &c.seed);
  std::string image;
  params.Read("image", &image);
  params.Finish();
  if (!image.empty()) {
    c.image = ReadMatrixCsv(image);
    c.m = static_cast<int>(c.image->rows());
    c.horizon = static_cast<int>(c.image->cols());
  }
  return c;
}

Example2SweepConfig Example2SweepFromJson(const json& j) {
  Params params(j, "example2-sweeps");
  Example2SweepConfig c;
  std::string sweep = ToString(c.sweep);
  params.Read("sweep", &sweep);
  c.sweep = ParseSweepKind(sweep);
  params.Read("n", &c.n);
  params.Read("m", &c.m);
  params.Read("p", &c.p);
  params.Read("horizon", &c.horizon);
  params.Read("s", &c.s);
  params.Read("trials", &c.trials);
  params.Read("seed", &c.seed);
  params.Read("levels", &c.levels);
  params.Read("diagonal_a", &c.diagonal_a);
  params.Read("a_gain", &c.a_gain);
  params.Read("noise_amplitude", &c.noise_amplitude);
  params.Read("disturbance_stddev", &c.disturbance_stddev);
  params.Read("radius_scale", &c.radius_scale);
  params.Finish();
  return c;
}

Example2MovieConfig Example2MovieFromJson(const json& j) {
  Params params(j, "example2-movie");
  Example2MovieConfig c;
  bool full_scale = false;
  params.Read("full_scale", &full_scale);
  if (full_scale) {
    c.side = 20;
    c.n = 200;
    c.p = 200;
    c.frames = 65;
  }
  params.Read("side", &c.side);
  params.Read("n", &c.n);
  params.Read("p", &c.p);
  params.Read("frames", &c.frames);
  params.Read("disturbance_stddev", &c.disturbance_stddev);
  params.Read("noise_amplitude", &c.noise_amplitude);
  params.Read("filter_order", &c.filter_order);
  params.Read("filter_ripple_db", &c.filter_ripple_db);
  params.Read("filter_cutoff", &c.filter_cutoff);
  params.Read("design_grid", &c.design_grid);
  params.Read("fixed_scale", &c.fixed_scale);
  params.Read("radius_scale", &c.radius_scale);
  params.Read("seed", &c.seed);
  params.Finish();
  return c;
}

Example3Config Example3FromJson(const json& j) {
  Params params(j, "example3");
  Example3Config c;
  bool full_scale = false;
  params.Read("full_scale", &full_scale);
  if (full_scale) c.trials = 100;
  std::string sweep = ToString(c.sweep);
  params.Read("sweep", &sweep);
  c.sweep = ParseNeuronalSweep(sweep);
  if (params.Has("network")) {
    Params net(params.Raw("network"), "example3.network");
    ReadRateNetwork(net, &c.network);
    net.Finish();
  }
  params.Read("horizon", &c.horizon);
  params.Read("trials", &c.trials);
  params.Read("seed", &c.seed);
  params.Read("levels", &c.levels);
  params.Read("s", &c.s);
  params.Read("p_sparsity", &c.p_sparsity);
  params.Read("noise_amplitude", &c.noise_amplitude);
  params.Read("disturbance_stddev", &c.disturbance_stddev);
  params.Read("radius_scale", &c.radius_scale);
  params.Read("rank_samples", &c.rank_samples);
  params.Read("sparsity_max_iterations", &c.sparsity_max_iterations);
  params.Finish();
  return c;
}

}  // namespace dcs::cli
