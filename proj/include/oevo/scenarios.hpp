#pragma once

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "config.hpp"
#include "errors.hpp"
#include "holon.hpp"
#include "operators.hpp"
#include "scenario.hpp"

namespace oevo {

namespace detail {

inline int param_int(const ScenarioParams& p, const std::string& key, int fallback, int min_v) {
  const double v = p.get(key, static_cast<double>(fallback));
  if (std::round(v) != v) throw ConfigError("scenario." + key + " must be an integer");
  const int i = static_cast<int>(v);
  if (i < min_v) {
    throw ConfigError("scenario." + key + " must be >= " + std::to_string(min_v));
  }
  return i;
}

inline double param_unit(const ScenarioParams& p, const std::string& key, double fallback) {
  const double v = p.get(key, fallback);
  if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("scenario." + key + " must lie in [0,1]");
  return v;
}

inline double param_nonneg(const ScenarioParams& p, const std::string& key, double fallback) {
  const double v = p.get(key, fallback);
  if (!(v >= 0.0)) throw ConfigError("scenario." + key + " must be >= 0");
  return v;
}

// Shared seeding of the heritable machinery. Mixed reproduction alternates
// by index so every other founder blends.
inline Mechanisms init_mechanisms(const EngineConfig& cfg, std::size_t idx, double def_fission,
                                  double def_affinity, double def_enforcement) {
  Mechanisms m;
  if (cfg.scenario.init_repro == "multiparent") m.repro_mode = ReproMode::multiparent;
  else if (cfg.scenario.init_repro == "mixed") {
    m.repro_mode = idx % 2 == 0 ? ReproMode::asexual : ReproMode::multiparent;
  } else {
    m.repro_mode = ReproMode::asexual;
  }
  m.n_parents = param_int(cfg.scenario, "init_n_parents", 2, 2);
  m.fission_rate = param_unit(cfg.scenario, "init_fission_rate", def_fission);
  m.fusion_affinity = param_unit(cfg.scenario, "init_fusion_affinity", def_affinity);
  m.enforcement_strength = param_unit(cfg.scenario, "init_enforcement", def_enforcement);
  m.mutation_rates = cfg.rates;
  return m;
}

inline double leaf_efficiency(const Holon& leaf) {
  return leaf.traits.values.size() > 1 ? std::max(0.0, leaf.traits.values[1]) : 0.0;
}

}  // namespace detail

// Molecules in a replication cycle: each member tag is catalyzed by the
// preceding tag's presence in the shared pool. Parasites draw catalysis from
// the last member but support nobody. Compartments (fused holons) succeed
// only with the full cycle aboard, and parasite parts tax them through
// effective_contribution. Molecule traits: values[0] defection propensity,
// values[1] catalytic efficiency; tags[0] member index (m = parasite).
inline Scenario make_hypercycle(const EngineConfig& cfg0) {
  const ScenarioParams& p = cfg0.scenario;
  const int m = detail::param_int(p, "members", 3, 2);
  const double parasite_fraction = detail::param_unit(p, "parasite_fraction", 0.1);
  const double advantage = detail::param_nonneg(p, "parasite_advantage", 1.5);
  const double init_eff = detail::param_nonneg(p, "init_efficiency", 1.0);

  Scenario s;
  s.name = "hypercycle";
  s.init = [m, parasite_fraction, init_eff](const EngineConfig& cfg, IdSource& ids, Rng&) {
    std::vector<Holon> pop;
    const auto n = static_cast<std::size_t>(cfg.capacity);
    const auto n_parasites = static_cast<std::size_t>(
        std::llround(static_cast<double>(n) * parasite_fraction));
    for (std::size_t i = 0; i < n; ++i) {
      const bool parasite = i >= n - n_parasites;
      Holon h;
      h.id = ids.fresh();
      h.traits.tags = {parasite ? m : static_cast<int>(i % static_cast<std::size_t>(m))};
      h.traits.values = {parasite ? 1.0 : 0.0, init_eff};
      h.mechanisms = detail::init_mechanisms(cfg, i, 0.01, 0.8, 0.8);
      pop.push_back(std::move(h));
    }
    return pop;
  };
  s.env_update = [m](Environment& env, const std::vector<Holon>& pop) {
    std::vector<double> sum(static_cast<std::size_t>(m), 0.0);
    std::int64_t unfused = 0;  // parasites dilute the pool but feed nothing
    for (const Holon& h : pop) {
      if (!h.parts.empty()) continue;
      ++unfused;
      if (!h.traits.tags.empty()) {
        const int t = h.traits.tags[0];
        if (t >= 0 && t < m) sum[static_cast<std::size_t>(t)] += detail::leaf_efficiency(h);
      }
    }
    for (int j = 0; j < m; ++j) {
      env.set("support_" + std::to_string(j),
              unfused > 0 ? sum[static_cast<std::size_t>(j)] / static_cast<double>(unfused) : 0.0);
    }
    env.set("unfused", static_cast<double>(unfused));
  };
  s.fitness = [m, advantage](const Holon& h, const Environment& env) {
    if (h.parts.empty()) {
      if (h.traits.tags.empty()) return 0.0;
      const int t = h.traits.tags[0];
      const double eff = detail::leaf_efficiency(h);
      if (t >= 0 && t < m) {
        const int pred = (t + m - 1) % m;
        return eff * env.get("support_" + std::to_string(pred));
      }
      return eff * env.get("support_" + std::to_string(m - 1)) * advantage;
    }
    std::vector<double> sum(static_cast<std::size_t>(m), 0.0);
    std::vector<std::int64_t> cnt(static_cast<std::size_t>(m), 0);
    for_each_leaf(h, [&](const Holon& leaf) {
      if (leaf.traits.tags.empty()) return;
      const int t = leaf.traits.tags[0];
      if (t >= 0 && t < m) {
        sum[static_cast<std::size_t>(t)] += detail::leaf_efficiency(leaf);
        ++cnt[static_cast<std::size_t>(t)];
      }
    });
    double product = 1.0;
    for (int j = 0; j < m; ++j) {
      if (cnt[static_cast<std::size_t>(j)] == 0) return 0.0;  // incomplete cycle
      product *= sum[static_cast<std::size_t>(j)] / static_cast<double>(cnt[static_cast<std::size_t>(j)]);
    }
    double tax = 0.0;
    for (const Holon& part : h.parts) tax += effective_contribution(part, h);
    tax /= static_cast<double>(h.parts.size());
    return std::max(0.0, product * (1.0 - tax));
  };
  s.observable = [m](const std::vector<Holon>& pop, const Environment&) {
    std::int64_t parasites = 0;
    std::int64_t molecules = 0;
    for (const Holon& h : pop) {
      for_each_leaf(h, [&](const Holon& leaf) {
        if (leaf.traits.tags.empty()) return;
        ++molecules;
        if (leaf.traits.tags[0] == m) ++parasites;
      });
    }
    return molecules > 0 ? static_cast<double>(parasites) / static_cast<double>(molecules) : 0.0;
  };
  s.fusion_root_traits = [](const std::vector<Holon>&) {
    TraitVector tv;
    tv.values = {0.0, 0.0};  // compartments neither defect nor catalyze
    return tv;
  };
  return s;
}

// Genes A and B must meet in a protocell to replicate. An unfused gene's
// fitness is the chance that a protocell assembled around it by uniform
// draws from the unfused pool contains the complementary type; a fused
// composite replicates as a unit, paying a penalty per extra molecule
// aboard. Tags: 0 = A, 1 = B.
inline Scenario make_linkage(const EngineConfig& cfg0) {
  const ScenarioParams& p = cfg0.scenario;
  const int n_proto = detail::param_int(p, "protocell_size", 6, 2);
  const double tau = detail::param_unit(p, "copy_penalty", 0.2);

  Scenario s;
  s.name = "linkage";
  s.init = [](const EngineConfig& cfg, IdSource& ids, Rng&) {
    std::vector<Holon> pop;
    for (std::size_t i = 0; i < static_cast<std::size_t>(cfg.capacity); ++i) {
      Holon h;
      h.id = ids.fresh();
      h.traits.tags = {static_cast<int>(i % 2)};
      h.traits.values = {0.0};
      h.mechanisms = detail::init_mechanisms(cfg, i, 0.0, 0.5, 0.0);
      pop.push_back(std::move(h));
    }
    return pop;
  };
  s.env_update = [](Environment& env, const std::vector<Holon>& pop) {
    std::int64_t a = 0;
    std::int64_t b = 0;
    for (const Holon& h : pop) {
      if (!h.parts.empty() || h.traits.tags.empty()) continue;
      if (h.traits.tags[0] == 0) ++a;
      else ++b;
    }
    env.set("pool_a", static_cast<double>(a));
    env.set("pool_b", static_cast<double>(b));
  };
  s.fitness = [n_proto, tau](const Holon& h, const Environment& env) {
    if (h.parts.empty()) {
      if (h.traits.tags.empty()) return 0.0;
      const double a = env.get("pool_a");
      const double b = env.get("pool_b");
      const double others = a + b - 1.0;
      const double opposite = h.traits.tags[0] == 0 ? b : a;
      const double draws = std::min(static_cast<double>(n_proto - 1), others);
      if (draws < 1.0 || opposite < 1.0) return 0.0;
      double miss = 1.0;  // P(no complementary gene among the draws)
      for (double i = 0.0; i < draws; i += 1.0) {
        const double rest = others - opposite - i;
        if (rest <= 0.0) {
          miss = 0.0;
          break;
        }
        miss *= rest / (others - i);
      }
      return 1.0 - miss;
    }
    std::int64_t a = 0;
    std::int64_t b = 0;
    std::int64_t leaves = 0;
    for_each_leaf(h, [&](const Holon& leaf) {
      ++leaves;
      if (leaf.traits.tags.empty()) return;
      if (leaf.traits.tags[0] == 0) ++a;
      else ++b;
    });
    if (a == 0 || b == 0) return 0.0;
    return std::pow(1.0 - tau, static_cast<double>(leaves - 1));
  };
  s.observable = [](const std::vector<Holon>& pop, const Environment&) {
    std::int64_t linked = 0;
    for (const Holon& h : pop) {
      if (h.parts.empty()) continue;
      std::int64_t a = 0;
      std::int64_t b = 0;
      for_each_leaf(h, [&](const Holon& leaf) {
        if (leaf.traits.tags.empty()) return;
        if (leaf.traits.tags[0] == 0) ++a;
        else ++b;
      });
      if (a > 0 && b > 0) ++linked;
    }
    return static_cast<double>(linked) / static_cast<double>(pop.size());
  };
  s.fusion_root_traits = [](const std::vector<Holon>&) {
    TraitVector tv;
    tv.values = {0.0};
    return tv;
  };
  return s;
}

// Composites earn superadditive returns on the number of distinct roles
// their members play, minus the effective defection of their direct parts.
// Leaf traits: values[0] defection propensity, values[1] role (rounded and
// clamped to the role range).
inline Scenario make_division_of_labor(const EngineConfig& cfg0) {
  const ScenarioParams& p = cfg0.scenario;
  const int role_count = detail::param_int(p, "role_count", 3, 1);
  const double alpha = detail::param_nonneg(p, "role_exponent", 1.5);
  const double defection_max = detail::param_unit(p, "init_defection_max", 0.4);

  Scenario s;
  s.name = "division_of_labor";
  s.init = [role_count, defection_max](const EngineConfig& cfg, IdSource& ids, Rng& rng) {
    std::vector<Holon> pop;
    for (std::size_t i = 0; i < static_cast<std::size_t>(cfg.capacity); ++i) {
      Holon h;
      h.id = ids.fresh();
      h.traits.values = {rng.uniform() * defection_max,
                         static_cast<double>(i % static_cast<std::size_t>(role_count))};
      h.mechanisms = detail::init_mechanisms(cfg, i, 0.05, 0.3, 0.5);
      pop.push_back(std::move(h));
    }
    return pop;
  };
  s.env_update = [](Environment&, const std::vector<Holon>&) {};
  s.fitness = [role_count, alpha](const Holon& h, const Environment&) {
    std::set<int> roles;
    for_each_leaf(h, [&](const Holon& leaf) {
      const double raw = leaf.traits.values.size() > 1 ? leaf.traits.values[1] : 0.0;
      const int role = std::clamp(static_cast<int>(std::llround(raw)), 0, role_count - 1);
      roles.insert(role);
    });
    const double base = std::pow(static_cast<double>(roles.size()), alpha);
    double tax = 0.0;
    for (const Holon& part : h.parts) tax += effective_contribution(part, h);
    return std::max(0.0, base - tax);
  };
  return s;
}

// Two loci, each beneficial past a threshold, with multiplicative fitness.
// The run's goal is the first individual carrying both beneficial alleles;
// blending reproduction can combine progress from different lineages while
// single-parent copying must wait for both changes in one line of descent.
// Leaf traits: values[0] and values[1] are the loci.
inline Scenario make_fisher_muller(const EngineConfig& cfg0) {
  const ScenarioParams& p = cfg0.scenario;
  const double s_coeff = detail::param_nonneg(p, "selection_coefficient", 0.5);
  const double threshold = p.get("allele_threshold", 0.5);
  const double init_allele = p.get("init_allele", 0.15);

  Scenario s;
  s.name = "fisher_muller";
  s.init = [init_allele](const EngineConfig& cfg, IdSource& ids, Rng&) {
    std::vector<Holon> pop;
    for (std::size_t i = 0; i < static_cast<std::size_t>(cfg.capacity); ++i) {
      Holon h;
      h.id = ids.fresh();
      h.traits.values = {init_allele, init_allele};
      h.mechanisms = detail::init_mechanisms(cfg, i, 0.0, 0.0, 0.0);
      pop.push_back(std::move(h));
    }
    return pop;
  };
  s.env_update = [](Environment&, const std::vector<Holon>&) {};
  s.fitness = [s_coeff, threshold](const Holon& h, const Environment&) {
    int beneficial = 0;
    if (!h.traits.values.empty() && h.traits.values[0] > threshold) ++beneficial;
    if (h.traits.values.size() > 1 && h.traits.values[1] > threshold) ++beneficial;
    return std::pow(1.0 + s_coeff, beneficial);
  };
  s.goal = [threshold](const std::vector<Holon>& pop, const Environment&) {
    for (const Holon& h : pop) {
      if (h.traits.values.size() > 1 && h.traits.values[0] > threshold &&
          h.traits.values[1] > threshold) {
        return true;
      }
    }
    return false;
  };
  s.observable = [threshold](const std::vector<Holon>& pop, const Environment&) {
    std::int64_t n = 0;
    for (const Holon& h : pop) {
      if (h.traits.values.size() > 1 && h.traits.values[0] > threshold &&
          h.traits.values[1] > threshold) {
        ++n;
      }
    }
    return static_cast<double>(n) / static_cast<double>(pop.size());
  };
  return s;
}

inline Scenario make_scenario(const EngineConfig& cfg) {
  const std::string& name = cfg.scenario.name;
  if (name == "hypercycle") return make_hypercycle(cfg);
  if (name == "linkage") return make_linkage(cfg);
  if (name == "division_of_labor") return make_division_of_labor(cfg);
  if (name == "fisher_muller") return make_fisher_muller(cfg);
  throw ConfigError("unknown scenario '" + name + "'");
}

}  // namespace oevo
