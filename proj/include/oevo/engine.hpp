#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "errors.hpp"
#include "events.hpp"
#include "holon.hpp"
#include "metrics.hpp"
#include "operators.hpp"
#include "rng.hpp"
#include "scenario.hpp"

namespace oevo {

enum class RunStatus { running, completed, extinct, goal_reached };

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::running: return "running";
    case RunStatus::completed: return "completed";
    case RunStatus::extinct: return "extinct";
    case RunStatus::goal_reached: return "goal_reached";
  }
  return "?";
}

struct RunRecord {
  EngineConfig config;
  RunStatus status = RunStatus::completed;
  std::int64_t final_generation = 0;  // last generation with a metrics row
  std::vector<Holon> population;
  std::vector<Event> events;
  std::vector<MetricsRow> metrics;
  std::vector<int> modal_series;
  std::int64_t skipped_fusions = 0;
  std::int64_t skipped_internal_births = 0;
};

// Uniform sample, without replacement, of n_parents - 1 candidates similar to
// h (equal structure, root trait distance <= theta), excluding h itself.
// Candidates keep the caller's order; nullopt when too few qualify. A root
// that appears several times in `pool` is proportionally more likely to be
// drawn, which is how mate choice inherits the selection phase's weighting.
inline std::optional<std::vector<const Holon*>> find_partners(const Holon& h,
                                                              const std::vector<const Holon*>& pool,
                                                              double theta, int n_parents,
                                                              Rng& rng) {
  std::vector<const Holon*> cands;
  for (const Holon* c : pool) {
    if (c->id != h.id && same_structure(*c, h) && trait_distance(*c, h) <= theta) {
      cands.push_back(c);
    }
  }
  const std::size_t need = static_cast<std::size_t>(std::max(2, n_parents) - 1);
  if (cands.size() < need) return std::nullopt;
  for (std::size_t t = 0; t < need; ++t) {
    const std::size_t pick = t + rng.index(cands.size() - t);
    std::swap(cands[t], cands[pick]);
  }
  cands.resize(need);
  return cands;
}

// Population-wide variant: every root is one candidate, in ascending-id
// order.
inline std::optional<std::vector<const Holon*>> find_partners(const Holon& h,
                                                              const std::vector<Holon>& pop,
                                                              double theta, int n_parents,
                                                              Rng& rng) {
  std::vector<const Holon*> pool;
  pool.reserve(pop.size());
  for (const Holon& c : pop) pool.push_back(&c);
  return find_partners(h, pool, theta, n_parents, rng);
}

// One run. Each generation executes eight phases in fixed order; every RNG
// draw happens inside a phase with ascending-id iteration, so a (config,
// seed) pair pins the whole trajectory. The population vector is kept in
// ascending-id order throughout: new roots always carry fresh (larger) ids.
class Engine {
 public:
  Engine(EngineConfig cfg, Scenario scenario)
      : cfg_(std::move(cfg)), sc_(std::move(scenario)), ms_(cfg_.mutation_settings()),
        rng_(cfg_.seed) {
    pop_ = sc_.init(cfg_, ids_, rng_);
    if (pop_.empty()) throw SimError("scenario init produced an empty population");
    if (static_cast<std::int64_t>(pop_.size()) > cfg_.capacity) {
      throw SimError("scenario init exceeded capacity");
    }
    for (const Holon& h : pop_) {
      auto violations = validate(h);
      if (!violations.empty()) throw SimError("scenario init invalid: " + violations.front());
      emit(make_event(EventType::birth, h.id, {}, BirthMode::seed));
    }
    close_generation();
  }

  // Continues a snapshotted run; the caller restores every field exactly.
  struct ResumeState {
    std::int64_t generation = 0;
    std::uint64_t next_id = 1;
    std::string rng_state;
    std::vector<Holon> population;
    Environment env;
    std::vector<int> modal_series;
    std::int64_t skipped_fusions = 0;
    std::int64_t skipped_internal_births = 0;
  };

  Engine(EngineConfig cfg, Scenario scenario, const ResumeState& rs)
      : cfg_(std::move(cfg)), sc_(std::move(scenario)), ms_(cfg_.mutation_settings()),
        rng_(0) {
    gen_ = rs.generation;
    ids_.next = rs.next_id;
    rng_.load_state(rs.rng_state);
    pop_ = rs.population;
    env_ = rs.env;
    modal_series_ = rs.modal_series;
    skipped_fusions_ = rs.skipped_fusions;
    skipped_internal_births_ = rs.skipped_internal_births;
    if (gen_ >= cfg_.generations) status_ = RunStatus::completed;
  }

  bool finished() const { return status_ != RunStatus::running; }
  RunStatus status() const { return status_; }
  std::int64_t generation() const { return gen_; }
  const std::vector<Holon>& population() const { return pop_; }
  const Environment& env() const { return env_; }
  const std::vector<Event>& events() const { return events_; }
  const std::vector<MetricsRow>& rows() const { return rows_; }
  const std::vector<int>& modal_series() const { return modal_series_; }
  std::uint64_t next_id() const { return ids_.next; }
  std::string rng_state_text() const { return rng_.save_state(); }
  std::int64_t skipped_fusions() const { return skipped_fusions_; }
  std::int64_t skipped_internal_births() const { return skipped_internal_births_; }

  // Advances one generation, or records the terminal status.
  void step() {
    if (finished()) return;
    if (gen_ >= cfg_.generations) {
      status_ = RunStatus::completed;
      return;
    }
    ++gen_;
    step_counts_.fill(0);

    phase_cooperation();
    sc_.env_update(env_, pop_);
    std::vector<double> fit = evaluate_fitness();
    double total = 0.0;
    for (double f : fit) total += f;
    if (!(total > 0.0)) {  // select() would raise AllZeroFitness
      status_ = RunStatus::extinct;
      return;
    }
    std::vector<std::size_t> parents =
        select(fit, static_cast<std::size_t>(cfg_.capacity), cfg_.selection, rng_);
    std::vector<Holon> children = phase_reproduction(parents);
    std::vector<Holon> published = phase_fission(std::move(children));
    for (Holon& h : published) pop_.push_back(std::move(h));
    phase_fusion();
    phase_cull();
    close_generation();
    if (status_ == RunStatus::running && gen_ >= cfg_.generations) {
      status_ = RunStatus::completed;
    }
  }

  RunRecord finish() {
    while (!finished()) step();
    RunRecord r;
    r.config = cfg_;
    r.status = status_;
    r.final_generation = rows_.empty() ? gen_ : rows_.back().generation;
    r.population = std::move(pop_);
    r.events = std::move(events_);
    r.metrics = std::move(rows_);
    r.modal_series = std::move(modal_series_);
    r.skipped_fusions = skipped_fusions_;
    r.skipped_internal_births = skipped_internal_births_;
    return r;
  }

 private:
  static double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

  Event make_event(EventType t, HolonId subject, std::vector<HolonId> related,
                   std::optional<BirthMode> mode = std::nullopt) {
    Event e;
    e.generation = gen_;
    e.type = t;
    e.subject = subject;
    e.related = std::move(related);
    e.birth_mode = mode;
    return e;
  }

  void emit(Event e) {
    ++step_counts_[static_cast<int>(e.type)];
    events_.push_back(std::move(e));
  }

  void emit_variations(std::vector<Event> variations) {
    for (Event& e : variations) {
      e.generation = gen_;
      emit(std::move(e));
    }
  }

  // Phase 1: parts replicate inside their whole with probability
  // d * (1 - e); a replication blocked by enforcement is a suppression.
  void phase_cooperation() {
    if (!cfg_.cooperation_enabled) return;
    for (Holon& root : pop_) {
      if (root.parts.empty()) continue;
      const double e = root.mechanisms.enforcement_strength;
      const std::size_t n0 = root.parts.size();
      for (std::size_t i = 0; i < n0; ++i) {
        const double d = root.parts[i].traits.values.empty()
                             ? 0.0
                             : clamp01(root.parts[i].traits.values[0]);
        if (d <= 0.0) continue;
        const double u = rng_.uniform();
        if (u < d * (1.0 - e)) {
          if (root.parts.size() < static_cast<std::size_t>(cfg_.max_parts_cap)) {
            Holon copy = deep_copy(root.parts[i], ids_);
            copy.origin = Origin::asexual;
            emit(make_event(EventType::birth, copy.id, {root.parts[i].id, root.id},
                            BirthMode::internal));
            root.parts.push_back(std::move(copy));
          } else {
            ++skipped_internal_births_;
          }
        } else if (u < d) {
          emit(make_event(EventType::suppression, root.parts[i].id, {root.id}));
        }
      }
    }
  }

  std::vector<double> evaluate_fitness() const {
    std::vector<double> fit;
    fit.reserve(pop_.size());
    for (const Holon& h : pop_) {
      const double f = sc_.fitness(h, env_);
      if (!std::isfinite(f) || f < 0.0) {
        throw SimError("scenario fitness must be finite and non-negative");
      }
      fit.push_back(f);
    }
    return fit;
  }

  // Phase 4: each selected parent reproduces per its heritable mode.
  // Multiparent parents without enough similar partners fall back to the
  // single-parent path when it is enabled, otherwise skip this generation.
  std::vector<Holon> phase_reproduction(const std::vector<std::size_t>& parents) {
    std::vector<Holon> children;
    children.reserve(parents.size());
    // Mating pool = this generation's selected parents, multiplicity and all,
    // so partner draws carry the same fitness weighting selection applied.
    std::vector<const Holon*> pool;
    pool.reserve(parents.size());
    for (std::size_t idx : parents) pool.push_back(&pop_[idx]);
    for (std::size_t idx : parents) {
      const Holon& parent = pop_[idx];
      bool want_blend = parent.mechanisms.repro_mode == ReproMode::multiparent &&
                        cfg_.multiparent_enabled;
      if (want_blend) {
        auto partners = find_partners(parent, pool, cfg_.similarity_threshold,
                                      parent.mechanisms.n_parents, rng_);
        if (partners) {
          std::vector<const Holon*> group;
          group.reserve(partners->size() + 1);
          group.push_back(&parent);
          for (const Holon* p : *partners) group.push_back(p);
          // Partners each lie within theta of the parent, so any two lie
          // within 2*theta of each other; that is the operator's bound here.
          // Empty weights: the operator mixes each scalar on its own.
          ReproResult rr = reproduce_multiparent(group, {},
                                                 2.0 * cfg_.similarity_threshold, ms_, ids_, rng_);
          std::vector<HolonId> rel;
          rel.reserve(group.size());
          for (const Holon* p : group) rel.push_back(p->id);
          emit(make_event(EventType::birth, rr.child.id, std::move(rel),
                          BirthMode::multiparent));
          emit_variations(std::move(rr.variations));
          children.push_back(std::move(rr.child));
          continue;
        }
      }
      const bool asexual_allowed =
          cfg_.asexual_enabled &&
          (parent.mechanisms.repro_mode == ReproMode::asexual || want_blend ||
           !cfg_.multiparent_enabled);
      if (!asexual_allowed) continue;
      ReproResult rr = reproduce_asexual(parent, ms_, ids_, rng_);
      emit(make_event(EventType::birth, rr.child.id, {parent.id}, BirthMode::asexual));
      emit_variations(std::move(rr.variations));
      children.push_back(std::move(rr.child));
    }
    return children;
  }

  // Phase 5: a fresh child with parts may split before publication; its
  // fragments are published in its place and are not re-split this turn.
  std::vector<Holon> phase_fission(std::vector<Holon> children) {
    std::vector<Holon> published;
    published.reserve(children.size());
    for (Holon& child : children) {
      const bool splits = cfg_.fission_enabled && !child.parts.empty() &&
                          child.mechanisms.fission_rate > 0.0 &&
                          rng_.bernoulli(child.mechanisms.fission_rate);
      if (!splits) {
        published.push_back(std::move(child));
        continue;
      }
      std::vector<Holon> frags = fission(child);
      std::vector<HolonId> rel;
      rel.reserve(frags.size());
      for (const Holon& f : frags) rel.push_back(f.id);
      emit(make_event(EventType::fission, child.id, std::move(rel)));
      for (Holon& f : frags) published.push_back(std::move(f));
    }
    return published;
  }

  // Phase 6: bounded number of fusion attempts; each draws a uniform pair
  // and fuses it with probability affinity_i * affinity_j. A composite that
  // would breach the depth cap is skipped and counted.
  void phase_fusion() {
    if (!cfg_.fusion_enabled) return;
    const std::int64_t attempts = cfg_.capacity / 8;
    for (std::int64_t a = 0; a < attempts; ++a) {
      if (pop_.size() < 2) break;
      const std::size_t i = rng_.index(pop_.size());
      std::size_t j = rng_.index(pop_.size() - 1);
      if (j >= i) ++j;
      const double p = pop_[i].mechanisms.fusion_affinity * pop_[j].mechanisms.fusion_affinity;
      if (p <= 0.0 || !rng_.bernoulli(p)) continue;
      const int composite_depth = 1 + std::max(depth(pop_[i]), depth(pop_[j]));
      if (composite_depth > cfg_.max_depth_cap) {
        ++skipped_fusions_;
        continue;
      }
      std::vector<Holon> inputs;
      inputs.push_back(std::move(pop_[i]));
      inputs.push_back(std::move(pop_[j]));
      pop_.erase(pop_.begin() + static_cast<std::ptrdiff_t>(std::max(i, j)));
      pop_.erase(pop_.begin() + static_cast<std::ptrdiff_t>(std::min(i, j)));
      TraitVector root_traits;
      const TraitVector* rt = nullptr;
      if (sc_.fusion_root_traits) {
        root_traits = sc_.fusion_root_traits(inputs);
        rt = &root_traits;
      }
      Holon comp = fuse(std::move(inputs), ids_, rt);
      emit(make_event(EventType::fusion, comp.id, comp.parent_ids));
      pop_.push_back(std::move(comp));
    }
  }

  // Phase 7: uniform culling back to capacity; selection pressure lives in
  // phase 3 only.
  void phase_cull() {
    while (pop_.size() > static_cast<std::size_t>(cfg_.capacity)) {
      const std::size_t r = rng_.index(pop_.size());
      emit(make_event(EventType::death, pop_[r].id, {}));
      pop_.erase(pop_.begin() + static_cast<std::ptrdiff_t>(r));
    }
  }

  // Phase 8: refresh the environment, score the survivors, detect sustained
  // modal-depth rises, check the scenario goal, and append the metrics row.
  void close_generation() {
    sc_.env_update(env_, pop_);
    std::vector<double> fit = evaluate_fitness();

    MetricsRow row;
    row.generation = gen_;
    row.pop_size = static_cast<std::int64_t>(pop_.size());
    row.max_depth = max_depth(pop_);
    row.modal_depth = modal_depth(pop_);
    row.mean_depth = mean_depth(pop_);
    double mean = 0.0;
    for (double f : fit) mean += f;
    mean /= static_cast<double>(fit.size());
    double var = 0.0;
    for (double f : fit) var += (f - mean) * (f - mean);
    var /= static_cast<double>(fit.size());
    row.mean_fitness = mean;
    row.fitness_variance = var;
    row.diversity = diversity(pop_);
    if (sc_.observable) row.observable = sc_.observable(pop_, env_);
    double enf = 0.0;
    for (const Holon& h : pop_) enf += h.mechanisms.enforcement_strength;
    row.mean_enforcement = enf / static_cast<double>(pop_.size());

    modal_series_.push_back(row.modal_depth);
    const std::size_t last = modal_series_.size() - 1;
    if (last >= static_cast<std::size_t>(cfg_.transition_window)) {
      const std::size_t onset = last - static_cast<std::size_t>(cfg_.transition_window) + 1;
      int old_modal = 0;
      int new_modal = 0;
      if (transition_at(modal_series_, onset, cfg_.transition_window, old_modal, new_modal)) {
        Event e = make_event(EventType::transition, 0, {});
        e.note = "modal_rise old=" + std::to_string(old_modal) +
                 " new=" + std::to_string(new_modal) + " onset=" + std::to_string(onset);
        emit(std::move(e));
      }
    }
    if (sc_.goal && sc_.goal(pop_, env_)) {
      Event e = make_event(EventType::transition, 0, {});
      e.note = "goal";
      emit(std::move(e));
      status_ = RunStatus::goal_reached;
    }

    row.event_counts = step_counts_;
    rows_.push_back(row);
  }

  EngineConfig cfg_;
  Scenario sc_;
  MutationSettings ms_;
  Rng rng_;
  IdSource ids_;
  std::vector<Holon> pop_;
  Environment env_;
  std::int64_t gen_ = 0;
  RunStatus status_ = RunStatus::running;
  std::vector<Event> events_;
  std::vector<MetricsRow> rows_;
  std::vector<int> modal_series_;
  std::array<std::int64_t, 7> step_counts_{};
  std::int64_t skipped_fusions_ = 0;
  std::int64_t skipped_internal_births_ = 0;
};

}  // namespace oevo
