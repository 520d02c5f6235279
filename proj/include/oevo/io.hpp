#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "config.hpp"
#include "engine.hpp"
#include "errors.hpp"
#include "events.hpp"
#include "holon.hpp"
#include "metrics.hpp"
#include "text.hpp"

namespace oevo {

namespace detail {

// nlohmann::json keeps object keys sorted, so every dump is canonical and
// byte-stable; doubles round-trip exactly through their shortest decimal.
using Json = nlohmann::json;

template <typename E>
E enum_from_string(const std::string& s, int count, const char* what) {
  for (int i = 0; i < count; ++i) {
    if (s == to_string(static_cast<E>(i))) return static_cast<E>(i);
  }
  throw IoError(std::string("unknown ") + what + " '" + s + "'");
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace detail

inline nlohmann::json json_of_event(const Event& e) {
  nlohmann::json j;
  j["gen"] = e.generation;
  j["type"] = to_string(e.type);
  j["subject"] = e.subject;
  j["related"] = e.related;
  if (e.birth_mode) j["mode"] = to_string(*e.birth_mode);
  if (e.variation) j["kind"] = to_string(*e.variation);
  if (e.node) j["node"] = *e.node;
  if (!e.note.empty()) j["note"] = e.note;
  return j;
}

inline Event event_from_json(const nlohmann::json& j) {
  Event e;
  e.generation = j.at("gen").get<std::int64_t>();
  e.type = detail::enum_from_string<EventType>(j.at("type").get<std::string>(), 7, "event type");
  e.subject = j.at("subject").get<HolonId>();
  e.related = j.at("related").get<std::vector<HolonId>>();
  if (j.contains("mode")) {
    e.birth_mode =
        detail::enum_from_string<BirthMode>(j.at("mode").get<std::string>(), 4, "birth mode");
  }
  if (j.contains("kind")) {
    e.variation = detail::enum_from_string<VariationKind>(j.at("kind").get<std::string>(),
                                                          kVariationKindCount, "variation kind");
  }
  if (j.contains("node")) e.node = j.at("node").get<HolonId>();
  if (j.contains("note")) e.note = j.at("note").get<std::string>();
  return e;
}

inline std::vector<Event> parse_events_text(const std::string& text) {
  std::vector<Event> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& ex) {
      throw IoError(std::string("bad event line: ") + ex.what());
    }
    out.push_back(event_from_json(j));
  }
  return out;
}

inline constexpr const char* kMetricsHeader =
    "generation,pop_size,max_depth,modal_depth,mean_depth,mean_fitness,fitness_variance,"
    "diversity,parasite_freq,mean_enforcement,n_birth,n_death,n_fission,n_fusion,n_mutation,"
    "n_suppression,n_transition";

inline std::string csv_row(const MetricsRow& r) {
  std::string out;
  out += std::to_string(r.generation);
  out += ',';
  out += std::to_string(r.pop_size);
  out += ',';
  out += std::to_string(r.max_depth);
  out += ',';
  out += std::to_string(r.modal_depth);
  out += ',';
  out += format_double(r.mean_depth);
  out += ',';
  out += format_double(r.mean_fitness);
  out += ',';
  out += format_double(r.fitness_variance);
  out += ',';
  out += format_double(r.diversity);
  out += ',';
  if (r.observable) out += format_double(*r.observable);
  out += ',';
  out += format_double(r.mean_enforcement);
  for (std::int64_t n : r.event_counts) {
    out += ',';
    out += std::to_string(n);
  }
  return out;
}

inline MetricsRow row_from_csv(const std::string& line) {
  const std::vector<std::string> f = detail::split(line, ',');
  if (f.size() != 17) throw IoError("metrics row has " + std::to_string(f.size()) + " fields");
  MetricsRow r;
  try {
    r.generation = parse_int(f[0], "generation");
    r.pop_size = parse_int(f[1], "pop_size");
    r.max_depth = static_cast<int>(parse_int(f[2], "max_depth"));
    r.modal_depth = static_cast<int>(parse_int(f[3], "modal_depth"));
    r.mean_depth = parse_double(f[4], "mean_depth");
    r.mean_fitness = parse_double(f[5], "mean_fitness");
    r.fitness_variance = parse_double(f[6], "fitness_variance");
    r.diversity = parse_double(f[7], "diversity");
    if (!f[8].empty()) r.observable = parse_double(f[8], "parasite_freq");
    r.mean_enforcement = parse_double(f[9], "mean_enforcement");
    for (std::size_t i = 0; i < 7; ++i) r.event_counts[i] = parse_int(f[10 + i], "event count");
  } catch (const ConfigError& ex) {
    throw IoError(std::string("bad metrics row: ") + ex.what());
  }
  return r;
}

inline std::vector<MetricsRow> parse_metrics_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) {
    throw IoError("metrics file missing canonical header");
  }
  std::vector<MetricsRow> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(row_from_csv(line));
  }
  return out;
}

inline nlohmann::json json_of_holon(const Holon& h) {
  nlohmann::json j;
  j["id"] = h.id;
  j["origin"] = to_string(h.origin);
  j["values"] = h.traits.values;
  j["tags"] = h.traits.tags;
  nlohmann::json m;
  m["repro_mode"] = to_string(h.mechanisms.repro_mode);
  m["n_parents"] = h.mechanisms.n_parents;
  m["fission_rate"] = h.mechanisms.fission_rate;
  m["fusion_affinity"] = h.mechanisms.fusion_affinity;
  m["enforcement_strength"] = h.mechanisms.enforcement_strength;
  nlohmann::json rates;
  for (int k = 0; k < kVariationKindCount; ++k) {
    const auto kind = static_cast<VariationKind>(k);
    rates[to_string(kind)] = h.mechanisms.mutation_rates.of(kind);
  }
  m["rates"] = std::move(rates);
  j["mechanisms"] = std::move(m);
  j["parent_ids"] = h.parent_ids;
  nlohmann::json parts = nlohmann::json::array();
  for (const Holon& p : h.parts) parts.push_back(json_of_holon(p));
  j["parts"] = std::move(parts);
  return j;
}

inline Holon holon_from_json(const nlohmann::json& j) {
  Holon h;
  h.id = j.at("id").get<HolonId>();
  h.origin = detail::enum_from_string<Origin>(j.at("origin").get<std::string>(), 5, "origin");
  h.traits.values = j.at("values").get<std::vector<double>>();
  h.traits.tags = j.at("tags").get<std::vector<int>>();
  const nlohmann::json& m = j.at("mechanisms");
  h.mechanisms.repro_mode =
      detail::enum_from_string<ReproMode>(m.at("repro_mode").get<std::string>(), 2, "repro mode");
  h.mechanisms.n_parents = m.at("n_parents").get<int>();
  h.mechanisms.fission_rate = m.at("fission_rate").get<double>();
  h.mechanisms.fusion_affinity = m.at("fusion_affinity").get<double>();
  h.mechanisms.enforcement_strength = m.at("enforcement_strength").get<double>();
  const nlohmann::json& rates = m.at("rates");
  h.mechanisms.mutation_rates.trait_change = rates.at("trait_change").get<double>();
  h.mechanisms.mutation_rates.part_deletion = rates.at("part_deletion").get<double>();
  h.mechanisms.mutation_rates.part_duplication = rates.at("part_duplication").get<double>();
  h.mechanisms.mutation_rates.repro_mechanism = rates.at("repro_mechanism").get<double>();
  h.mechanisms.mutation_rates.fission_fusion_mechanism =
      rates.at("fission_fusion_mechanism").get<double>();
  h.mechanisms.mutation_rates.enforcement_mechanism =
      rates.at("enforcement_mechanism").get<double>();
  h.parent_ids = j.at("parent_ids").get<std::vector<HolonId>>();
  for (const nlohmann::json& p : j.at("parts")) h.parts.push_back(holon_from_json(p));
  return h;
}

inline constexpr const char* kSnapshotMagic = "oevo-snapshot";
inline constexpr int kSnapshotVersion = 1;

struct SnapshotData {
  std::string config_digest;
  Engine::ResumeState state;
};

inline std::string snapshot_text(const Engine::ResumeState& rs, const std::string& config_digest) {
  nlohmann::json j;
  j["magic"] = kSnapshotMagic;
  j["version"] = kSnapshotVersion;
  j["config_digest"] = config_digest;
  j["generation"] = rs.generation;
  j["next_id"] = rs.next_id;
  j["rng"] = rs.rng_state;
  j["env"] = rs.env.values;
  nlohmann::json pop = nlohmann::json::array();
  for (const Holon& h : rs.population) pop.push_back(json_of_holon(h));
  j["population"] = std::move(pop);
  j["modal_series"] = rs.modal_series;
  j["skipped_fusions"] = rs.skipped_fusions;
  j["skipped_internal_births"] = rs.skipped_internal_births;
  return j.dump(2) + "\n";
}

inline SnapshotData parse_snapshot_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw IoError(std::string("bad snapshot: ") + ex.what());
  }
  if (!j.contains("magic") || j.at("magic").get<std::string>() != kSnapshotMagic) {
    throw IoError("snapshot magic header missing or wrong");
  }
  if (j.at("version").get<int>() != kSnapshotVersion) {
    throw IoError("unsupported snapshot version " + j.at("version").dump());
  }
  SnapshotData s;
  s.config_digest = j.at("config_digest").get<std::string>();
  s.state.generation = j.at("generation").get<std::int64_t>();
  s.state.next_id = j.at("next_id").get<std::uint64_t>();
  s.state.rng_state = j.at("rng").get<std::string>();
  s.state.env.values = j.at("env").get<std::map<std::string, double>>();
  for (const nlohmann::json& h : j.at("population")) {
    s.state.population.push_back(holon_from_json(h));
  }
  s.state.modal_series = j.at("modal_series").get<std::vector<int>>();
  s.state.skipped_fusions = j.at("skipped_fusions").get<std::int64_t>();
  s.state.skipped_internal_births = j.at("skipped_internal_births").get<std::int64_t>();
  return s;
}

inline std::string audit_json_text(const AuditReport& r) {
  nlohmann::json j;
  j["reproduction_asexual"] = r.reproduction_asexual;
  j["reproduction_multiparent"] = r.reproduction_multiparent;
  j["internal_births"] = r.internal_births;
  j["fission_events"] = r.fission_events;
  j["fusion_events"] = r.fusion_events;
  j["differential_fitness_generations"] = r.differential_fitness_generations;
  j["offspring_variance_generations"] = r.offspring_variance_generations;
  j["enforcement_suppressions"] = r.enforcement_suppressions;
  nlohmann::json muts;
  for (int k = 0; k < kVariationKindCount; ++k) {
    const auto kind = static_cast<VariationKind>(k);
    muts[to_string(kind)] = r.mutation_count(kind);
  }
  j["mutations"] = std::move(muts);
  j["heritable_fusion_composites"] = r.heritable_fusion_composites;
  j["heritable_fission_fragments"] = r.heritable_fission_fragments;
  j["transitions_detected"] = r.transitions_detected;
  nlohmann::json ts = nlohmann::json::array();
  for (const TransitionEvent& t : r.transitions) {
    nlohmann::json tj;
    tj["generation"] = t.generation;
    tj["old_modal"] = t.old_modal;
    tj["new_modal"] = t.new_modal;
    tj["window"] = t.window;
    ts.push_back(std::move(tj));
  }
  j["transitions"] = std::move(ts);
  j["brandon_subset_only"] = r.brandon_subset_only;
  return j.dump(2) + "\n";
}

// Sidecar written by `run` so downstream commands need not replay anything.
struct RunInfo {
  std::string status;
  std::int64_t final_generation = 0;
  std::int64_t generations = 0;
  std::uint64_t seed = 0;
  std::string config_digest;
  std::int64_t skipped_fusions = 0;
  std::int64_t skipped_internal_births = 0;
  std::optional<std::int64_t> goal_generation;
};

inline std::string run_info_text(const RunInfo& r) {
  nlohmann::json j;
  j["status"] = r.status;
  j["final_generation"] = r.final_generation;
  j["generations"] = r.generations;
  j["seed"] = r.seed;
  j["config_digest"] = r.config_digest;
  j["skipped_fusions"] = r.skipped_fusions;
  j["skipped_internal_births"] = r.skipped_internal_births;
  if (r.goal_generation) j["goal_generation"] = *r.goal_generation;
  else j["goal_generation"] = nullptr;
  return j.dump(2) + "\n";
}

inline RunInfo parse_run_info_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw IoError(std::string("bad run info: ") + ex.what());
  }
  RunInfo r;
  r.status = j.at("status").get<std::string>();
  r.final_generation = j.at("final_generation").get<std::int64_t>();
  r.generations = j.at("generations").get<std::int64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.config_digest = j.at("config_digest").get<std::string>();
  r.skipped_fusions = j.at("skipped_fusions").get<std::int64_t>();
  r.skipped_internal_births = j.at("skipped_internal_births").get<std::int64_t>();
  if (!j.at("goal_generation").is_null()) {
    r.goal_generation = j.at("goal_generation").get<std::int64_t>();
  }
  return r;
}

inline std::string config_digest_hex(const EngineConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(config_digest(c)));
  return std::string(buf);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed for " + path.string());
  return buf.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

inline std::string snapshot_filename(std::int64_t generation) {
  return "snapshot_" + std::to_string(generation) + ".json";
}

// Streams one run's artifacts. Fresh mode truncates and writes the CSV
// header; resume mode appends, so a halted run continued in place yields
// files byte-identical to an uninterrupted run.
class RunWriter {
 public:
  RunWriter(std::filesystem::path dir, bool resume) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create " + dir_.string() + ": " + ec.message());
    const auto mode =
        std::ios::binary | (resume ? std::ios::app : std::ios::trunc);
    events_.open(dir_ / "events.jsonl", mode);
    metrics_.open(dir_ / "metrics.csv", mode);
    if (!events_ || !metrics_) throw IoError("cannot open artifact files in " + dir_.string());
    if (!resume) metrics_ << kMetricsHeader << "\n";
  }

  const std::filesystem::path& dir() const { return dir_; }

  void write_config(const std::string& text) { write_file(dir_ / "config.ini", text); }

  void append_event(const Event& e) { events_ << json_of_event(e).dump() << "\n"; }

  void append_row(const MetricsRow& row) {
    metrics_ << csv_row(row) << "\n";
    events_.flush();
    metrics_.flush();
    if (!events_ || !metrics_) throw IoError("write failed in " + dir_.string());
  }

  void write_snapshot(std::int64_t generation, const std::string& text) {
    write_file(dir_ / snapshot_filename(generation), text);
  }

  void write_audit(const std::string& text) { write_file(dir_ / "audit.json", text); }

  void write_run_info(const std::string& text) { write_file(dir_ / "run.json", text); }

  void finalize() {
    events_.close();
    metrics_.close();
    if (events_.fail() || metrics_.fail()) throw IoError("close failed in " + dir_.string());
  }

 private:
  std::filesystem::path dir_;
  std::ofstream events_;
  std::ofstream metrics_;
};

}  // namespace oevo
