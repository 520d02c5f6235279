#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"
#include "operators.hpp"
#include "text.hpp"

namespace oevo {

// [scenario] section: which world to build and how to seed its population.
// Numeric keys are whitelisted per scenario; unknown keys fail the parse.
struct ScenarioParams {
  std::string name;
  std::string init_repro = "asexual";  // asexual | multiparent | mixed
  std::map<std::string, double> num;

  double get(const std::string& key, double fallback) const {
    auto it = num.find(key);
    return it == num.end() ? fallback : it->second;
  }
};

struct OutputParams {
  std::string directory;
  std::int64_t snapshot_every = 0;  // 0 = no periodic snapshots
};

struct EngineConfig {
  std::int64_t capacity = 50;
  std::int64_t generations = 500;
  std::uint64_t seed = 1;
  double similarity_threshold = 0.5;
  SelectionScheme selection{};
  std::int64_t max_depth_cap = 16;
  std::int64_t max_parts_cap = 64;
  std::int64_t transition_window = 50;
  bool brandon_mode = false;

  bool asexual_enabled = true;
  bool multiparent_enabled = true;
  bool fission_enabled = true;
  bool fusion_enabled = true;
  bool cooperation_enabled = true;
  std::array<bool, kVariationKindCount> kind_enabled{true, true, true, true, true, true};

  MutationRates rates{};  // seeds every initial holon's heritable rates
  double sigma_trait = 0.1;
  double sigma_mech = 0.05;

  ScenarioParams scenario;
  OutputParams output;

  MutationSettings mutation_settings() const {
    MutationSettings ms;
    ms.kind_enabled = kind_enabled;
    ms.sigma_trait = sigma_trait;
    ms.sigma_mech = sigma_mech;
    ms.max_parts_cap = static_cast<std::size_t>(max_parts_cap);
    return ms;
  }
};

// Restricts the run to blending reproduction, selection, and the three
// structure-preserving variation kinds; everything that could add or remove
// hierarchy levels is switched off.
inline void apply_brandon_preset(EngineConfig& c) {
  c.asexual_enabled = false;
  c.multiparent_enabled = true;
  c.fission_enabled = false;
  c.fusion_enabled = false;
  c.cooperation_enabled = false;
  c.kind_enabled[static_cast<int>(VariationKind::repro_mechanism)] = false;
  c.kind_enabled[static_cast<int>(VariationKind::fission_fusion_mechanism)] = false;
  c.kind_enabled[static_cast<int>(VariationKind::enforcement_mechanism)] = false;
  c.scenario.init_repro = "multiparent";
}

namespace detail {

inline const std::set<std::string>& scenario_numeric_keys(const std::string& name) {
  static const std::map<std::string, std::set<std::string>> table = {
      {"hypercycle",
       {"members", "parasite_fraction", "parasite_advantage", "init_efficiency",
        "init_fission_rate", "init_fusion_affinity", "init_enforcement", "init_n_parents"}},
      {"linkage",
       {"protocell_size", "copy_penalty", "init_fission_rate", "init_fusion_affinity",
        "init_enforcement", "init_n_parents"}},
      {"division_of_labor",
       {"role_count", "role_exponent", "init_defection_max", "init_fission_rate",
        "init_fusion_affinity", "init_enforcement", "init_n_parents"}},
      {"fisher_muller",
       {"selection_coefficient", "allele_threshold", "init_allele", "init_fission_rate",
        "init_fusion_affinity", "init_enforcement", "init_n_parents"}},
  };
  auto it = table.find(name);
  if (it == table.end()) throw ConfigError("unknown scenario '" + name + "'");
  return it->second;
}

inline const char* kind_key(VariationKind k) { return to_string(k); }

inline void check_unit(double v, const std::string& what) {
  if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(what + " must lie in [0,1]");
}

}  // namespace detail

inline void validate_config(const EngineConfig& c) {
  if (c.capacity < 2) throw ConfigError("engine.capacity must be >= 2");
  if (c.generations < 0) throw ConfigError("engine.generations must be >= 0");
  if (!(c.similarity_threshold >= 0.0)) throw ConfigError("engine.similarity_threshold must be >= 0");
  if (c.max_depth_cap < 1) throw ConfigError("engine.max_depth_cap must be >= 1");
  if (c.max_parts_cap < 1) throw ConfigError("engine.max_parts_cap must be >= 1");
  if (c.transition_window < 1) throw ConfigError("engine.transition_window must be >= 1");
  if (c.selection.tournament_k < 1) throw ConfigError("engine.tournament_k must be >= 1");
  for (int k = 0; k < kVariationKindCount; ++k) {
    detail::check_unit(c.rates.of(static_cast<VariationKind>(k)),
                       std::string("rates.") + to_string(static_cast<VariationKind>(k)));
  }
  if (!(c.sigma_trait >= 0.0)) throw ConfigError("rates.sigma_trait must be >= 0");
  if (!(c.sigma_mech >= 0.0)) throw ConfigError("rates.sigma_mech must be >= 0");
  if (c.output.snapshot_every < 0) throw ConfigError("output.snapshot_every must be >= 0");
  if (c.scenario.name.empty()) throw ConfigError("scenario.name is required");
  if (c.scenario.init_repro != "asexual" && c.scenario.init_repro != "multiparent" &&
      c.scenario.init_repro != "mixed") {
    throw ConfigError("scenario.init_repro must be asexual, multiparent, or mixed");
  }
  const auto& allowed = detail::scenario_numeric_keys(c.scenario.name);
  for (const auto& [key, value] : c.scenario.num) {
    if (!allowed.count(key)) {
      throw ConfigError("scenario." + key + " is not a parameter of " + c.scenario.name);
    }
    if (key == "init_fission_rate" || key == "init_fusion_affinity" || key == "init_enforcement") {
      detail::check_unit(value, "scenario." + key);
    }
    if (key == "init_n_parents" && value < 2) {
      throw ConfigError("scenario.init_n_parents must be >= 2");
    }
  }
}

// Strict INI: [section] headers, key = value lines, '#'/';' comment lines.
// Unknown sections or keys, duplicate keys, and malformed values all throw.
inline EngineConfig parse_config(const std::string& text) {
  EngineConfig c;
  std::string section;
  std::set<std::string> seen;
  std::map<std::string, std::string> scenario_raw;

  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    const std::string where = "line " + std::to_string(line_no);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = line.substr(1, line.size() - 2);
      if (section != "scenario" && section != "engine" && section != "operators" &&
          section != "rates" && section != "output") {
        throw ConfigError(where + ": unknown section [" + section + "]");
      }
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    if (section.empty()) throw ConfigError(where + ": key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (!seen.insert(section + "." + key).second) {
      throw ConfigError(where + ": duplicate key " + section + "." + key);
    }
    const std::string what = section + "." + key;

    if (section == "scenario") {
      if (key == "name") {
        c.scenario.name = value;
      } else if (key == "init_repro") {
        c.scenario.init_repro = value;
      } else {
        scenario_raw[key] = value;  // validated against the whitelist below
      }
    } else if (section == "engine") {
      if (key == "capacity") c.capacity = parse_int(value, what);
      else if (key == "generations") c.generations = parse_int(value, what);
      else if (key == "seed") c.seed = parse_uint(value, what);
      else if (key == "similarity_threshold") c.similarity_threshold = parse_double(value, what);
      else if (key == "selection") {
        if (value == "proportional") c.selection.kind = SelectionScheme::Kind::fitness_proportional;
        else if (value == "tournament") c.selection.kind = SelectionScheme::Kind::tournament;
        else throw ConfigError(what + ": must be proportional or tournament");
      }
      else if (key == "tournament_k") c.selection.tournament_k = static_cast<int>(parse_int(value, what));
      else if (key == "max_depth_cap") c.max_depth_cap = parse_int(value, what);
      else if (key == "max_parts_cap") c.max_parts_cap = parse_int(value, what);
      else if (key == "transition_window") c.transition_window = parse_int(value, what);
      else if (key == "brandon_mode") c.brandon_mode = parse_bool(value, what);
      else throw ConfigError(where + ": unknown key " + what);
    } else if (section == "operators") {
      if (key == "asexual") c.asexual_enabled = parse_bool(value, what);
      else if (key == "multiparent") c.multiparent_enabled = parse_bool(value, what);
      else if (key == "fission") c.fission_enabled = parse_bool(value, what);
      else if (key == "fusion") c.fusion_enabled = parse_bool(value, what);
      else if (key == "cooperation") c.cooperation_enabled = parse_bool(value, what);
      else {
        bool matched = false;
        for (int k = 0; k < kVariationKindCount; ++k) {
          if (key == detail::kind_key(static_cast<VariationKind>(k))) {
            c.kind_enabled[k] = parse_bool(value, what);
            matched = true;
            break;
          }
        }
        if (!matched) throw ConfigError(where + ": unknown key " + what);
      }
    } else if (section == "rates") {
      if (key == "trait_change") c.rates.trait_change = parse_double(value, what);
      else if (key == "part_deletion") c.rates.part_deletion = parse_double(value, what);
      else if (key == "part_duplication") c.rates.part_duplication = parse_double(value, what);
      else if (key == "repro_mechanism") c.rates.repro_mechanism = parse_double(value, what);
      else if (key == "fission_fusion_mechanism") c.rates.fission_fusion_mechanism = parse_double(value, what);
      else if (key == "enforcement_mechanism") c.rates.enforcement_mechanism = parse_double(value, what);
      else if (key == "sigma_trait") c.sigma_trait = parse_double(value, what);
      else if (key == "sigma_mech") c.sigma_mech = parse_double(value, what);
      else throw ConfigError(where + ": unknown key " + what);
    } else {  // output
      if (key == "directory") c.output.directory = value;
      else if (key == "snapshot_every") c.output.snapshot_every = parse_int(value, what);
      else throw ConfigError(where + ": unknown key " + what);
    }
  }

  if (c.scenario.name.empty()) throw ConfigError("scenario.name is required");
  const auto& allowed = detail::scenario_numeric_keys(c.scenario.name);
  for (const auto& [key, value] : scenario_raw) {
    if (!allowed.count(key)) throw ConfigError("scenario." + key + " is not a parameter of " + c.scenario.name);
    c.scenario.num[key] = parse_double(value, "scenario." + key);
  }
  if (c.brandon_mode) apply_brandon_preset(c);
  validate_config(c);
  return c;
}

// Canonical form: fixed section and key order, shortest-round-trip numerals.
// parse(serialize(c)) reproduces c exactly.
inline std::string serialize_config(const EngineConfig& c) {
  std::string s;
  auto kv = [&](const std::string& k, const std::string& v) { s += k + " = " + v + "\n"; };
  s += "[scenario]\n";
  kv("name", c.scenario.name);
  kv("init_repro", c.scenario.init_repro);
  for (const auto& [key, value] : c.scenario.num) kv(key, format_double(value));
  s += "\n[engine]\n";
  kv("capacity", std::to_string(c.capacity));
  kv("generations", std::to_string(c.generations));
  kv("seed", std::to_string(c.seed));
  kv("similarity_threshold", format_double(c.similarity_threshold));
  kv("selection", c.selection.kind == SelectionScheme::Kind::fitness_proportional
                      ? "proportional" : "tournament");
  kv("tournament_k", std::to_string(c.selection.tournament_k));
  kv("max_depth_cap", std::to_string(c.max_depth_cap));
  kv("max_parts_cap", std::to_string(c.max_parts_cap));
  kv("transition_window", std::to_string(c.transition_window));
  kv("brandon_mode", c.brandon_mode ? "true" : "false");
  s += "\n[operators]\n";
  kv("asexual", c.asexual_enabled ? "true" : "false");
  kv("multiparent", c.multiparent_enabled ? "true" : "false");
  kv("fission", c.fission_enabled ? "true" : "false");
  kv("fusion", c.fusion_enabled ? "true" : "false");
  kv("cooperation", c.cooperation_enabled ? "true" : "false");
  for (int k = 0; k < kVariationKindCount; ++k) {
    kv(detail::kind_key(static_cast<VariationKind>(k)), c.kind_enabled[k] ? "true" : "false");
  }
  s += "\n[rates]\n";
  kv("trait_change", format_double(c.rates.trait_change));
  kv("part_deletion", format_double(c.rates.part_deletion));
  kv("part_duplication", format_double(c.rates.part_duplication));
  kv("repro_mechanism", format_double(c.rates.repro_mechanism));
  kv("fission_fusion_mechanism", format_double(c.rates.fission_fusion_mechanism));
  kv("enforcement_mechanism", format_double(c.rates.enforcement_mechanism));
  kv("sigma_trait", format_double(c.sigma_trait));
  kv("sigma_mech", format_double(c.sigma_mech));
  s += "\n[output]\n";
  kv("directory", c.output.directory);
  kv("snapshot_every", std::to_string(c.output.snapshot_every));
  return s;
}

inline std::uint64_t config_digest(const EngineConfig& c) { return fnv1a(serialize_config(c)); }

}  // namespace oevo
