#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dcs/experiments.h"
#include "dcs/networks.h"
#include "dcs/solver.h"

namespace dcs::cli {

// Typed view of a JSON parameter object that remembers which keys were
// read, so leftovers can be rejected.
class Params {
 public:
  Params(nlohmann::json j, std::string where);

  bool Has(const std::string& key) const { return j_.contains(key); }
  void Read(const std::string& key, double* out);
  void Read(const std::string& key, int* out);
  void Read(const std::string& key, long long* out);
  void Read(const std::string& key, std::uint64_t* out);
  void Read(const std::string& key, bool* out);
  void Read(const std::string& key, std::string* out);
  void Read(const std::string& key, std::vector<double>* out);
  void Read(const std::string& key, std::optional<double>* out);
  // The raw value, marked as read; null when absent.
  const nlohmann::json& Raw(const std::string& key);
  // Every value, all marked as read.
  nlohmann::json TakeAll();
  // Throws FormatError naming the first key that was never read.
  void Finish() const;

 private:
  const nlohmann::json* Lookup(const std::string& key);

  nlohmann::json j_;
  std::string where_;
  std::set<std::string> used_;
};

// Flat keys: n, m, p, dt, tau_min, tau_max, inhibitory_fraction, ws_degree,
// ws_rewire, excitatory_mu, excitatory_sigma, inhibitory_mu,
// inhibitory_sigma, seed.
void ReadRateNetwork(Params& params, RateNetworkParams* out);
RateNetworkParams RateNetworkFromJson(const nlohmann::json& j);

Example1Config Example1FromJson(const nlohmann::json& j);
Example2SweepConfig Example2SweepFromJson(const nlohmann::json& j);
// "full_scale": true starts from 20x20 frames, n = p = 200 and 65 frames.
Example2MovieConfig Example2MovieFromJson(const nlohmann::json& j);
// "full_scale": true starts from 100 trials.
Example3Config Example3FromJson(const nlohmann::json& j);

}  // namespace dcs::cli
