#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "events.hpp"
#include "holon.hpp"

namespace oevo {

// One metrics.csv row: the population as it stands after a completed
// generation, plus how many events of each type that generation emitted.
struct MetricsRow {
  std::int64_t generation = 0;
  std::int64_t pop_size = 0;
  int max_depth = 0;
  int modal_depth = 0;
  double mean_depth = 0.0;
  double mean_fitness = 0.0;
  double fitness_variance = 0.0;
  double diversity = 0.0;
  std::optional<double> observable;  // scenario column (parasite_freq); empty when undefined
  double mean_enforcement = 0.0;
  std::array<std::int64_t, 7> event_counts{};  // indexed by EventType

  std::int64_t count(EventType t) const { return event_counts[static_cast<int>(t)]; }
};

// A sustained rise of the population's modal depth: the unit of selection
// moved up a level and stayed there for at least `window` generations.
struct TransitionEvent {
  std::int64_t generation = 0;  // onset
  int old_modal = 0;
  int new_modal = 0;
  std::int64_t window = 0;
};

inline int max_depth(const std::vector<Holon>& pop) {
  int d = 0;
  for (const Holon& h : pop) d = std::max(d, depth(h));
  return d;
}

inline double mean_depth(const std::vector<Holon>& pop) {
  if (pop.empty()) return 0.0;
  double s = 0.0;
  for (const Holon& h : pop) s += depth(h);
  return s / static_cast<double>(pop.size());
}

// Most common root depth; ties go to the smaller depth.
inline int modal_depth(const std::vector<Holon>& pop) {
  std::map<int, std::int64_t> freq;
  for (const Holon& h : pop) ++freq[depth(h)];
  int best = 0;
  std::int64_t best_n = 0;
  for (const auto& [d, n] : freq) {
    if (n > best_n) {
      best = d;
      best_n = n;
    }
  }
  return best;
}

struct DiversityStats {
  double mean = 0.0;
  std::int64_t comparable_pairs = 0;
  std::int64_t incomparable_pairs = 0;
};

// Mean pairwise root trait distance over equal-structure pairs. Pairs that
// cannot be compared are excluded from the mean and counted.
inline DiversityStats diversity_stats(const std::vector<Holon>& pop) {
  DiversityStats out;
  double total = 0.0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    for (std::size_t j = i + 1; j < pop.size(); ++j) {
      if (same_structure(pop[i], pop[j])) {
        total += trait_distance(pop[i], pop[j]);
        ++out.comparable_pairs;
      } else {
        ++out.incomparable_pairs;
      }
    }
  }
  if (out.comparable_pairs > 0) out.mean = total / static_cast<double>(out.comparable_pairs);
  return out;
}

inline double diversity(const std::vector<Holon>& pop) { return diversity_stats(pop).mean; }

// True when the modal series rises at `g` to a value never seen before g and
// holds at or above it for the next `window` generations.
inline bool transition_at(const std::vector<int>& modal_series, std::size_t g, std::int64_t window,
                          int& old_modal, int& new_modal) {
  if (g < 1 || g + static_cast<std::size_t>(window) > modal_series.size()) return false;
  const int v = modal_series[g];
  int prev_max = modal_series[0];
  for (std::size_t i = 1; i < g; ++i) prev_max = std::max(prev_max, modal_series[i]);
  if (v <= prev_max) return false;
  for (std::size_t i = g; i < g + static_cast<std::size_t>(window); ++i) {
    if (modal_series[i] < v) return false;
  }
  old_modal = prev_max;
  new_modal = v;
  return true;
}

inline std::vector<TransitionEvent> detect_transitions(const std::vector<int>& modal_series,
                                                       std::int64_t window = 50) {
  std::vector<TransitionEvent> out;
  for (std::size_t g = 1; g + static_cast<std::size_t>(window) <= modal_series.size(); ++g) {
    int old_modal = 0;
    int new_modal = 0;
    if (transition_at(modal_series, g, window, old_modal, new_modal)) {
      out.push_back({static_cast<std::int64_t>(g), old_modal, new_modal, window});
    }
  }
  return out;
}

// Which of the five conditions a completed run actually exercised, counted
// from the event log and the per-generation metrics.
struct AuditReport {
  std::int64_t reproduction_asexual = 0;       // generational single-parent births
  std::int64_t reproduction_multiparent = 0;   // blend births
  std::int64_t internal_births = 0;            // within-holon part replication
  std::int64_t fission_events = 0;
  std::int64_t fusion_events = 0;
  std::int64_t differential_fitness_generations = 0;  // fitness variance > 0
  std::int64_t offspring_variance_generations = 0;    // realized birth counts uneven
  std::int64_t enforcement_suppressions = 0;
  std::array<std::int64_t, kVariationKindCount> mutations{};
  std::int64_t heritable_fusion_composites = 0;  // composites that later reproduced
  std::int64_t heritable_fission_fragments = 0;  // fragments that later reproduced
  std::int64_t transitions_detected = 0;
  std::vector<TransitionEvent> transitions;
  bool brandon_subset_only = false;

  std::int64_t mutation_count(VariationKind k) const { return mutations[static_cast<int>(k)]; }
};

// The audit is a pure function of (events, rows): re-running it on a stored
// record reproduces the identical report. Heritable-composite and
// heritable-fragment counts join each fusion/fission event with any later
// birth that lists the composite or fragment as a parent.
inline AuditReport condition_audit(const std::vector<Event>& events,
                                   const std::vector<MetricsRow>& rows,
                                   std::int64_t transition_window = 50) {
  AuditReport r;
  std::map<HolonId, std::int64_t> composite_gen;           // fusion subject -> generation
  std::map<HolonId, std::int64_t> fragment_gen;            // fission fragments -> generation
  std::set<HolonId> composites_reproduced;
  std::set<HolonId> fragments_reproduced;

  for (const Event& e : events) {
    switch (e.type) {
      case EventType::birth:
        if (e.birth_mode == BirthMode::asexual) ++r.reproduction_asexual;
        else if (e.birth_mode == BirthMode::multiparent) ++r.reproduction_multiparent;
        else if (e.birth_mode == BirthMode::internal) ++r.internal_births;
        if (e.birth_mode == BirthMode::asexual || e.birth_mode == BirthMode::multiparent) {
          for (HolonId parent : e.related) {
            auto cit = composite_gen.find(parent);
            if (cit != composite_gen.end() && e.generation > cit->second) {
              composites_reproduced.insert(parent);
            }
            auto fit = fragment_gen.find(parent);
            if (fit != fragment_gen.end() && e.generation > fit->second) {
              fragments_reproduced.insert(parent);
            }
          }
        }
        break;
      case EventType::fission:
        ++r.fission_events;
        for (HolonId frag : e.related) fragment_gen.emplace(frag, e.generation);
        break;
      case EventType::fusion:
        ++r.fusion_events;
        composite_gen.emplace(e.subject, e.generation);
        break;
      case EventType::mutation:
        if (e.variation) ++r.mutations[static_cast<int>(*e.variation)];
        break;
      case EventType::suppression:
        ++r.enforcement_suppressions;
        break;
      case EventType::transition:
        break;  // counted from the modal series below
      case EventType::death:
        break;
    }
  }
  r.heritable_fusion_composites = static_cast<std::int64_t>(composites_reproduced.size());
  r.heritable_fission_fragments = static_cast<std::int64_t>(fragments_reproduced.size());

  // Condition 3, two readings: fitness variance (the gate) and realized
  // offspring-count variance over the parent pool of each generation.
  std::map<std::int64_t, std::map<HolonId, std::int64_t>> births_by_parent;
  for (const Event& e : events) {
    if (e.type == EventType::birth &&
        (e.birth_mode == BirthMode::asexual || e.birth_mode == BirthMode::multiparent) &&
        !e.related.empty()) {
      ++births_by_parent[e.generation][e.related.front()];
    }
  }
  std::vector<int> modal_series;
  modal_series.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const MetricsRow& row = rows[i];
    modal_series.push_back(row.modal_depth);
    if (row.fitness_variance > 0.0) ++r.differential_fitness_generations;
    if (i == 0) continue;
    auto it = births_by_parent.find(row.generation);
    if (it == births_by_parent.end()) continue;
    const std::int64_t parents = rows[i - 1].pop_size;
    if (parents <= 1) continue;
    std::int64_t born = 0;
    double sumsq = 0.0;
    for (const auto& [id, n] : it->second) {
      born += n;
      sumsq += static_cast<double>(n) * static_cast<double>(n);
    }
    const double mean = static_cast<double>(born) / static_cast<double>(parents);
    const double var = sumsq / static_cast<double>(parents) - mean * mean;
    if (var > 1e-12) ++r.offspring_variance_generations;
  }

  r.transitions = detect_transitions(modal_series, transition_window);
  r.transitions_detected = static_cast<std::int64_t>(r.transitions.size());

  r.brandon_subset_only =
      r.reproduction_asexual == 0 && r.internal_births == 0 && r.fission_events == 0 &&
      r.fusion_events == 0 && r.enforcement_suppressions == 0 &&
      r.mutation_count(VariationKind::repro_mechanism) == 0 &&
      r.mutation_count(VariationKind::fission_fusion_mechanism) == 0 &&
      r.mutation_count(VariationKind::enforcement_mechanism) == 0 && r.transitions_detected == 0;
  return r;
}

}  // namespace oevo
