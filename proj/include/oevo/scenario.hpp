#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "config.hpp"
#include "holon.hpp"
#include "rng.hpp"

namespace oevo {

// Scenario-owned shared state, fully recomputed from the population each
// generation (env_update must overwrite, never accumulate).
struct Environment {
  std::map<std::string, double> values;

  double get(const std::string& key, double fallback = 0.0) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
  }
  void set(const std::string& key, double v) { values[key] = v; }
};

// A world: initial population, environment dynamics, fitness, and optional
// early-stop goal and per-generation observable. Fitness must be a
// deterministic, non-negative, finite function of (holon, environment).
struct Scenario {
  std::string name;
  std::function<std::vector<Holon>(const EngineConfig&, IdSource&, Rng&)> init;
  std::function<void(Environment&, const std::vector<Holon>&)> env_update;
  std::function<double(const Holon&, const Environment&)> fitness;
  std::function<bool(const std::vector<Holon>&, const Environment&)> goal;          // optional
  std::function<double(const std::vector<Holon>&, const Environment&)> observable;  // optional
  std::function<TraitVector(const std::vector<Holon>&)> fusion_root_traits;         // optional
};

}  // namespace oevo
