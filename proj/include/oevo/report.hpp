#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "config.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "stats.hpp"
#include "text.hpp"

namespace oevo {

// Everything `report` needs from one completed run directory.
struct RunSummary {
  std::string dir;
  EngineConfig config;
  RunInfo info;
  double first_enforcement = 0.0;
  double last_enforcement = 0.0;
  std::optional<double> last_observable;
  std::vector<TransitionEvent> transitions;
};

inline RunSummary load_run_summary(const std::filesystem::path& dir) {
  RunSummary s;
  s.dir = dir.string();
  s.config = parse_config(read_file(dir / "config.ini"));
  s.info = parse_run_info_text(read_file(dir / "run.json"));
  const std::vector<MetricsRow> rows = parse_metrics_text(read_file(dir / "metrics.csv"));
  if (rows.empty()) throw IoError("no metrics rows in " + s.dir);
  s.first_enforcement = rows.front().mean_enforcement;
  s.last_enforcement = rows.back().mean_enforcement;
  s.last_observable = rows.back().observable;
  nlohmann::json audit;
  try {
    audit = nlohmann::json::parse(read_file(dir / "audit.json"));
  } catch (const nlohmann::json::exception& ex) {
    throw IoError("bad audit.json in " + s.dir + ": " + ex.what());
  }
  for (const nlohmann::json& t : audit.at("transitions")) {
    TransitionEvent te;
    te.generation = t.at("generation").get<std::int64_t>();
    te.old_modal = t.at("old_modal").get<int>();
    te.new_modal = t.at("new_modal").get<int>();
    te.window = t.at("window").get<std::int64_t>();
    s.transitions.push_back(te);
  }
  return s;
}

inline constexpr double kFixationThreshold = 0.9;
inline constexpr double kSignificance = 0.05;

// Goal time with censoring: a run that never reached the goal scores one
// past its horizon, which only biases the paired comparison against us.
inline double goal_time(const RunSummary& s) {
  if (s.info.goal_generation) return static_cast<double>(*s.info.goal_generation);
  return static_cast<double>(s.config.generations + 1);
}

inline bool reached_fixation(const RunSummary& s) {
  return s.last_observable && *s.last_observable >= kFixationThreshold;
}

inline bool has_level_rise(const RunSummary& s, int from, int to) {
  for (const TransitionEvent& t : s.transitions) {
    if (t.old_modal == from && t.new_modal == to) return true;
  }
  return false;
}

namespace detail {

struct ReportGroup {
  std::string scenario;
  std::string digest;
  std::vector<const RunSummary*> runs;
};

// Replicates of one experiment differ only in seed, so grouping keys on the
// digest of the config with its seed zeroed.
inline std::string family_digest(const EngineConfig& cfg) {
  EngineConfig keyed = cfg;
  keyed.seed = 0;
  return config_digest_hex(keyed);
}

inline std::vector<ReportGroup> group_runs(const std::vector<RunSummary>& runs) {
  std::map<std::pair<std::string, std::string>, ReportGroup> by_key;
  for (const RunSummary& s : runs) {
    auto key = std::make_pair(s.config.scenario.name, family_digest(s.config));
    ReportGroup& g = by_key[key];
    g.scenario = key.first;
    g.digest = key.second;
    g.runs.push_back(&s);
  }
  std::vector<ReportGroup> out;
  for (auto& [key, g] : by_key) {
    std::sort(g.runs.begin(), g.runs.end(),
              [](const RunSummary* a, const RunSummary* b) { return a->info.seed < b->info.seed; });
    out.push_back(std::move(g));
  }
  return out;
}

inline std::string ratio(std::size_t k, std::size_t n) {
  return std::to_string(k) + "/" + std::to_string(n);
}

inline std::string yes_no(bool b) { return b ? "yes" : "no"; }

// Pairs two arms' runs by seed; seeds present in only one arm are dropped.
inline std::vector<std::pair<const RunSummary*, const RunSummary*>> pair_by_seed(
    const ReportGroup& a, const ReportGroup& b) {
  std::map<std::uint64_t, const RunSummary*> by_seed;
  for (const RunSummary* s : a.runs) by_seed[s->info.seed] = s;
  std::vector<std::pair<const RunSummary*, const RunSummary*>> out;
  for (const RunSummary* s : b.runs) {
    auto it = by_seed.find(s->info.seed);
    if (it != by_seed.end()) out.emplace_back(it->second, s);
  }
  return out;
}

}  // namespace detail

// Plain-text aggregation: one group line per (scenario, config) with its
// replicate tallies, then the directional verdicts the scenarios define.
inline std::string render_report(const std::vector<RunSummary>& runs) {
  std::string out;
  const std::vector<detail::ReportGroup> groups = detail::group_runs(runs);

  for (const detail::ReportGroup& g : groups) {
    std::size_t completed = 0;
    std::size_t extinct = 0;
    std::size_t goal = 0;
    for (const RunSummary* s : g.runs) {
      if (s->info.status == "extinct") ++extinct;
      else if (s->info.status == "goal_reached") ++goal;
      else ++completed;
    }
    out += "group scenario=" + g.scenario + " digest=" + g.digest +
           " runs=" + std::to_string(g.runs.size()) + " completed=" + std::to_string(completed) +
           " extinct=" + std::to_string(extinct) + " goal=" + std::to_string(goal) + "\n";

    if (g.scenario == "hypercycle") {
      std::size_t fixed = 0;
      std::size_t rises = 0;
      for (const RunSummary* s : g.runs) {
        if (reached_fixation(*s)) ++fixed;
        if (has_level_rise(*s, 1, 2)) ++rises;
      }
      out += "metric scenario=hypercycle digest=" + g.digest +
             " parasite_fixation=" + detail::ratio(fixed, g.runs.size()) +
             " modal_rise_1_2=" + detail::ratio(rises, g.runs.size()) + "\n";
    } else if (g.scenario == "linkage") {
      std::size_t majority = 0;
      for (const RunSummary* s : g.runs) {
        if (s->last_observable && *s->last_observable > 0.5) ++majority;
      }
      out += "metric scenario=linkage digest=" + g.digest +
             " linked_majority=" + detail::ratio(majority, g.runs.size()) + "\n";
    } else if (g.scenario == "division_of_labor") {
      std::vector<double> diffs;
      for (const RunSummary* s : g.runs) diffs.push_back(s->last_enforcement - s->first_enforcement);
      const WilcoxonResult w = wilcoxon_signed_rank(diffs);
      out += "verdict scenario=division_of_labor digest=" + g.digest +
             " test=wilcoxon_enforcement_end_gt_start n=" + std::to_string(w.n_used) +
             " z=" + format_double(w.z) + " p=" + format_double(w.p_value) +
             " significant=" + detail::yes_no(w.p_value < kSignificance) + "\n";
    }
  }

  // Cross-arm verdicts need exactly two groups of the scenario.
  std::map<std::string, std::vector<const detail::ReportGroup*>> by_scenario;
  for (const detail::ReportGroup& g : groups) by_scenario[g.scenario].push_back(&g);

  auto it = by_scenario.find("hypercycle");
  if (it != by_scenario.end() && it->second.size() == 2) {
    const detail::ReportGroup* compartments = nullptr;
    const detail::ReportGroup* wellmixed = nullptr;
    for (const detail::ReportGroup* g : it->second) {
      if (!g->runs.empty() && g->runs.front()->config.fusion_enabled) compartments = g;
      else wellmixed = g;
    }
    if (compartments && wellmixed) {
      std::size_t fixed_c = 0;
      std::size_t fixed_w = 0;
      for (const RunSummary* s : compartments->runs) {
        if (reached_fixation(*s)) ++fixed_c;
      }
      for (const RunSummary* s : wellmixed->runs) {
        if (reached_fixation(*s)) ++fixed_w;
      }
      const TwoProportionResult t = two_proportion_test(fixed_w, wellmixed->runs.size(), fixed_c,
                                                        compartments->runs.size());
      out += "verdict scenario=hypercycle test=two_proportion_fixation_wellmixed_gt_compartments";
      out += " wellmixed=" + detail::ratio(fixed_w, wellmixed->runs.size());
      out += " compartments=" + detail::ratio(fixed_c, compartments->runs.size());
      out += " z=" + format_double(t.z) + " p=" + format_double(t.p_value) +
             " significant=" + detail::yes_no(t.p_value < kSignificance) + "\n";
    }
  }

  it = by_scenario.find("fisher_muller");
  if (it != by_scenario.end() && it->second.size() == 2) {
    const detail::ReportGroup* multi = nullptr;
    const detail::ReportGroup* solo = nullptr;
    for (const detail::ReportGroup* g : it->second) {
      if (!g->runs.empty() && g->runs.front()->config.scenario.init_repro == "multiparent") {
        multi = g;
      } else {
        solo = g;
      }
    }
    if (multi && solo) {
      std::vector<double> diffs;  // positive when blending reached the goal sooner
      for (const auto& [a, b] : detail::pair_by_seed(*solo, *multi)) {
        diffs.push_back(goal_time(*a) - goal_time(*b));
      }
      const WilcoxonResult w = wilcoxon_signed_rank(diffs);
      out += "verdict scenario=fisher_muller test=wilcoxon_asexual_goal_time_gt_multiparent";
      out += " pairs=" + std::to_string(diffs.size()) + " n=" + std::to_string(w.n_used);
      out += " z=" + format_double(w.z) + " p=" + format_double(w.p_value) +
             " significant=" + detail::yes_no(w.p_value < kSignificance) + "\n";
    }
  }

  return out;
}

}  // namespace oevo
