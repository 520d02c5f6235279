#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"
#include "events.hpp"
#include "holon.hpp"
#include "rng.hpp"

namespace oevo {

// Run-level variation knobs. Per-kind probabilities are heritable and live on
// each node's Mechanisms; this carries only what is not heritable: which kinds
// the experiment allows, step sizes, and the per-node part-count ceiling.
struct MutationSettings {
  std::array<bool, kVariationKindCount> kind_enabled{true, true, true, true, true, true};
  double sigma_trait = 0.1;
  double sigma_mech = 0.05;
  std::size_t max_parts_cap = 64;

  bool enabled(VariationKind k) const { return kind_enabled[static_cast<int>(k)]; }
  void set_enabled(VariationKind k, bool on) { kind_enabled[static_cast<int>(k)] = on; }
};

struct SelectionScheme {
  enum class Kind { fitness_proportional, tournament };
  Kind kind = Kind::fitness_proportional;
  int tournament_k = 2;  // >= 1
};

namespace detail {

inline double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// One pass over a private holon. Kinds fire in enum order at each node; a
// kind's chance is drawn only when the kind is enabled and applicable here.
// Children recurse before any subtree duplication appended at this node: a
// duplicate is not re-visited within the pass that created it.
inline void mutate_node(Holon& root, Holon& node, const MutationSettings& ms, IdSource& ids,
                        Rng& rng, std::vector<Event>& out) {
  const MutationRates& rates = node.mechanisms.mutation_rates;
  auto emit = [&](VariationKind k) {
    Event e;
    e.type = EventType::mutation;
    e.subject = root.id;
    e.node = node.id;
    e.variation = k;
    out.push_back(e);
  };

  if (ms.enabled(VariationKind::trait_change) && !node.traits.values.empty() &&
      rng.bernoulli(rates.trait_change)) {
    const std::size_t i = rng.index(node.traits.values.size());
    node.traits.values[i] += rng.gaussian(ms.sigma_trait);
    emit(VariationKind::trait_change);
  }
  if (ms.enabled(VariationKind::part_deletion) && node.parts.size() >= 2 &&
      rng.bernoulli(rates.part_deletion)) {
    const std::size_t i = rng.index(node.parts.size());
    node.parts.erase(node.parts.begin() + static_cast<std::ptrdiff_t>(i));
    emit(VariationKind::part_deletion);
  }
  std::size_t visit_count = node.parts.size();
  if (ms.enabled(VariationKind::part_duplication) && !node.parts.empty() &&
      node.parts.size() < ms.max_parts_cap && rng.bernoulli(rates.part_duplication)) {
    const std::size_t i = rng.index(node.parts.size());
    node.parts.push_back(deep_copy(node.parts[i], ids));
    emit(VariationKind::part_duplication);
  }
  if (ms.enabled(VariationKind::repro_mechanism) && rng.bernoulli(rates.repro_mechanism)) {
    if (rng.bernoulli(0.5)) {
      node.mechanisms.repro_mode = node.mechanisms.repro_mode == ReproMode::asexual
                                       ? ReproMode::multiparent
                                       : ReproMode::asexual;
    } else {
      node.mechanisms.n_parents += rng.bernoulli(0.5) ? -1 : 1;
      node.mechanisms.n_parents = std::max(2, node.mechanisms.n_parents);
    }
    emit(VariationKind::repro_mechanism);
  }
  if (ms.enabled(VariationKind::fission_fusion_mechanism) &&
      rng.bernoulli(rates.fission_fusion_mechanism)) {
    double& field = rng.bernoulli(0.5) ? node.mechanisms.fission_rate
                                       : node.mechanisms.fusion_affinity;
    field = clamp01(field + rng.gaussian(ms.sigma_mech));
    emit(VariationKind::fission_fusion_mechanism);
  }
  if (ms.enabled(VariationKind::enforcement_mechanism) &&
      rng.bernoulli(rates.enforcement_mechanism)) {
    node.mechanisms.enforcement_strength =
        clamp01(node.mechanisms.enforcement_strength + rng.gaussian(ms.sigma_mech));
    emit(VariationKind::enforcement_mechanism);
  }

  visit_count = std::min(visit_count, node.parts.size());
  for (std::size_t i = 0; i < visit_count; ++i) {
    mutate_node(root, node.parts[i], ms, ids, rng, out);
  }
}

}  // namespace detail

// In-place variation pass over an unpublished holon. Every applied variation
// yields one event (kind + node); generation is stamped by the engine.
inline std::vector<Event> mutate(Holon& h, const MutationSettings& ms, IdSource& ids, Rng& rng) {
  std::vector<Event> out;
  detail::mutate_node(h, h, ms, ids, rng, out);
  return out;
}

struct ReproResult {
  Holon child;
  std::vector<Event> variations;
};

// Single-parent copy plus one variation pass. Depth is preserved up to
// structural mutation kinds; with those disabled it is exact.
inline ReproResult reproduce_asexual(const Holon& parent, const MutationSettings& ms,
                                     IdSource& ids, Rng& rng) {
  ReproResult r;
  r.child = deep_copy(parent, ids);
  r.child.origin = Origin::asexual;
  r.child.parent_ids = {parent.id};
  r.variations = mutate(r.child, ms, ids, rng);
  return r;
}

// Blend of two or more similar parents. Parents must agree in structure and
// lie within `similarity_threshold` of each other (root trait distance).
// Explicit weights are normalized and shared by every blended scalar. Empty
// weights mean each continuous scalar comes whole from one uniformly drawn
// parent, independently per scalar, the same rule discrete fields always
// follow. Copying scalars instead of averaging them is what lets this
// operator reassemble progress scattered across lineages: averages decay
// toward the crowd, copies survive selection at full strength. Tags are
// equal across similar parents by construction.
inline ReproResult reproduce_multiparent(const std::vector<const Holon*>& parents,
                                         std::vector<double> weights,
                                         double similarity_threshold,
                                         const MutationSettings& ms, IdSource& ids, Rng& rng) {
  if (parents.size() < 2) throw DissimilarParents("multiparent reproduction needs at least 2 parents");
  for (std::size_t i = 0; i < parents.size(); ++i) {
    for (std::size_t j = i + 1; j < parents.size(); ++j) {
      if (!same_structure(*parents[i], *parents[j]) ||
          trait_distance(*parents[i], *parents[j]) > similarity_threshold) {
        throw DissimilarParents("parents " + std::to_string(parents[i]->id) + " and " +
                                std::to_string(parents[j]->id) + " are not similar");
      }
    }
  }
  const bool per_scalar = weights.empty();
  if (!per_scalar) {
    if (weights.size() != parents.size()) throw DissimilarParents("one blend weight per parent");
    double total = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw DissimilarParents("blend weights must be nonnegative");
      total += w;
    }
    if (total <= 0.0) throw DissimilarParents("blend weights must not all be zero");
    for (double& w : weights) w /= total;
  }

  const std::size_t n = parents.size();
  // Per-scalar mode picks one donor per scalar (a vertex of the hull); the
  // shared-weights mode averages. Draw order is fixed either way, so the
  // stream stays deterministic.
  const auto mix = [&](auto&& value_of) {
    if (per_scalar) return value_of(rng.index(n));
    double out = 0.0;
    for (std::size_t k = 0; k < n; ++k) out += weights[k] * value_of(k);
    return out;
  };

  // Corresponding nodes across parents align index-for-index (same structure).
  auto blend = [&](const std::vector<const Holon*>& nodes, auto&& self) -> Holon {
    Holon c;
    c.id = ids.fresh();
    c.origin = Origin::multiparent;
    c.parent_ids.reserve(nodes.size());
    for (const Holon* node : nodes) c.parent_ids.push_back(node->id);
    c.traits.tags = nodes[0]->traits.tags;
    c.traits.values.resize(nodes[0]->traits.values.size());
    for (std::size_t i = 0; i < c.traits.values.size(); ++i) {
      c.traits.values[i] = mix([&](std::size_t k) { return nodes[k]->traits.values[i]; });
    }
    Mechanisms& m = c.mechanisms;
    const auto mech = [&](auto field) { return mix([&](std::size_t k) { return nodes[k]->mechanisms.*field; }); };
    const auto rate = [&](auto field) {
      return mix([&](std::size_t k) { return nodes[k]->mechanisms.mutation_rates.*field; });
    };
    m.fission_rate = mech(&Mechanisms::fission_rate);
    m.fusion_affinity = mech(&Mechanisms::fusion_affinity);
    m.enforcement_strength = mech(&Mechanisms::enforcement_strength);
    m.mutation_rates.trait_change = rate(&MutationRates::trait_change);
    m.mutation_rates.part_deletion = rate(&MutationRates::part_deletion);
    m.mutation_rates.part_duplication = rate(&MutationRates::part_duplication);
    m.mutation_rates.repro_mechanism = rate(&MutationRates::repro_mechanism);
    m.mutation_rates.fission_fusion_mechanism = rate(&MutationRates::fission_fusion_mechanism);
    m.mutation_rates.enforcement_mechanism = rate(&MutationRates::enforcement_mechanism);
    const Holon* pick = nodes[rng.index(nodes.size())];
    m.repro_mode = pick->mechanisms.repro_mode;
    m.n_parents = pick->mechanisms.n_parents;

    c.parts.reserve(nodes[0]->parts.size());
    for (std::size_t i = 0; i < nodes[0]->parts.size(); ++i) {
      std::vector<const Holon*> sub;
      sub.reserve(nodes.size());
      for (const Holon* node : nodes) sub.push_back(&node->parts[i]);
      c.parts.push_back(self(sub, self));
    }
    return c;
  };

  ReproResult r;
  r.child = blend(parents, blend);
  r.variations = mutate(r.child, ms, ids, rng);
  return r;
}

// A whole splits into its direct parts, which become independent roots and
// keep their identities. The caller removes the whole from the population.
inline std::vector<Holon> fission(const Holon& h) {
  if (h.parts.empty()) throw LeafFission("holon " + std::to_string(h.id) + " has no parts");
  std::vector<Holon> out = h.parts;
  for (Holon& f : out) {
    f.origin = Origin::fission;
    f.parent_ids = {h.id};
  }
  return out;
}

// Two or more roots combine into a new whole; the inputs become its parts and
// stop existing independently. Root traits are the per-coordinate mean when
// the input root vectors align (same arity, same tags), otherwise
// `root_traits` (scenario initializer) or, failing that, the traits of the
// lowest-id input. Continuous mechanism fields average; discrete fields take
// the modal value, ties resolved toward the lowest-id input holding one.
inline Holon fuse(std::vector<Holon> inputs, IdSource& ids,
                  const TraitVector* root_traits = nullptr) {
  if (inputs.size() < 2) throw TooFewInputs("fusion needs at least 2 inputs");
  std::sort(inputs.begin(), inputs.end(),
            [](const Holon& a, const Holon& b) { return a.id < b.id; });

  Holon c;
  c.id = ids.fresh();
  c.origin = Origin::fusion;
  for (const Holon& in : inputs) c.parent_ids.push_back(in.id);

  bool aligned = true;
  for (const Holon& in : inputs) {
    if (in.traits.values.size() != inputs[0].traits.values.size() ||
        in.traits.tags != inputs[0].traits.tags) {
      aligned = false;
      break;
    }
  }
  if (aligned) {
    c.traits.tags = inputs[0].traits.tags;
    c.traits.values.assign(inputs[0].traits.values.size(), 0.0);
    for (const Holon& in : inputs) {
      for (std::size_t i = 0; i < c.traits.values.size(); ++i) {
        c.traits.values[i] += in.traits.values[i];
      }
    }
    for (double& v : c.traits.values) v /= static_cast<double>(inputs.size());
  } else if (root_traits != nullptr) {
    c.traits = *root_traits;
  } else {
    c.traits = inputs[0].traits;
  }

  Mechanisms& m = c.mechanisms;
  m.fission_rate = m.fusion_affinity = m.enforcement_strength = 0.0;
  m.mutation_rates = MutationRates{0, 0, 0, 0, 0, 0};
  const double n = static_cast<double>(inputs.size());
  for (const Holon& in : inputs) {
    const Mechanisms& pm = in.mechanisms;
    m.fission_rate += pm.fission_rate / n;
    m.fusion_affinity += pm.fusion_affinity / n;
    m.enforcement_strength += pm.enforcement_strength / n;
    m.mutation_rates.trait_change += pm.mutation_rates.trait_change / n;
    m.mutation_rates.part_deletion += pm.mutation_rates.part_deletion / n;
    m.mutation_rates.part_duplication += pm.mutation_rates.part_duplication / n;
    m.mutation_rates.repro_mechanism += pm.mutation_rates.repro_mechanism / n;
    m.mutation_rates.fission_fusion_mechanism += pm.mutation_rates.fission_fusion_mechanism / n;
    m.mutation_rates.enforcement_mechanism += pm.mutation_rates.enforcement_mechanism / n;
  }
  auto modal = [&](auto field) {
    std::size_t best_count = 0;
    auto best = field(inputs[0]);
    for (const Holon& in : inputs) {
      const auto v = field(in);
      std::size_t count = 0;
      for (const Holon& other : inputs) {
        if (field(other) == v) ++count;
      }
      if (count > best_count) {  // first (lowest-id) input wins ties
        best_count = count;
        best = v;
      }
    }
    return best;
  };
  m.repro_mode = modal([](const Holon& h) { return h.mechanisms.repro_mode; });
  m.n_parents = modal([](const Holon& h) { return h.mechanisms.n_parents; });

  c.parts = std::move(inputs);
  return c;
}

// k independent index draws over a fitness vector. Proportional: chance
// f_i / sum f. Tournament: best of tournament_k uniform candidates, distinct
// tied candidates resolved uniformly. All-zero total signals extinction.
inline std::vector<std::size_t> select(const std::vector<double>& fitnesses, std::size_t k,
                                       const SelectionScheme& scheme, Rng& rng) {
  for (double f : fitnesses) {
    if (!(f >= 0.0)) throw SimError("fitness values must be non-negative and finite");
  }
  double total = std::accumulate(fitnesses.begin(), fitnesses.end(), 0.0);
  if (fitnesses.empty() || !(total > 0.0)) throw AllZeroFitness("no positive fitness in population");

  std::vector<std::size_t> out;
  out.reserve(k);
  if (scheme.kind == SelectionScheme::Kind::fitness_proportional) {
    std::vector<double> cum(fitnesses.size());
    std::partial_sum(fitnesses.begin(), fitnesses.end(), cum.begin());
    const double span = cum.back();
    for (std::size_t d = 0; d < k; ++d) {
      const double x = rng.uniform() * span;
      auto it = std::upper_bound(cum.begin(), cum.end(), x);
      std::size_t i = it == cum.end() ? fitnesses.size() - 1
                                      : static_cast<std::size_t>(it - cum.begin());
      while (fitnesses[i] <= 0.0 && i > 0) --i;  // end-of-range rounding guard
      out.push_back(i);
    }
    return out;
  }

  const int t = std::max(1, scheme.tournament_k);
  std::vector<std::size_t> tied;
  for (std::size_t d = 0; d < k; ++d) {
    // Zero-fitness candidates never win; an all-zero tournament is redrawn.
    do {
      double best = 0.0;
      tied.clear();
      for (int c = 0; c < t; ++c) {
        const std::size_t i = rng.index(fitnesses.size());
        if (fitnesses[i] > best) {
          best = fitnesses[i];
          tied.assign(1, i);
        } else if (fitnesses[i] == best && best > 0.0 &&
                   std::find(tied.begin(), tied.end(), i) == tied.end()) {
          tied.push_back(i);
        }
      }
    } while (tied.empty());
    out.push_back(tied.size() == 1 ? tied[0] : tied[rng.index(tied.size())]);
  }
  return out;
}

// Within-holon replication weight of a direct part: defection propensity
// (designated trait coordinate, clamped to [0,1]) suppressed multiplicatively
// by the whole's enforcement strength.
inline double effective_contribution(const Holon& part, const Holon& whole,
                                     std::size_t defect_coord = 0) {
  const Holon* found = nullptr;
  for (const Holon& p : whole.parts) {
    if (p.id == part.id) {
      found = &p;
      break;
    }
  }
  if (found == nullptr) {
    throw NotAPart("holon " + std::to_string(part.id) + " is not a direct part of " +
                   std::to_string(whole.id));
  }
  const double d = defect_coord < found->traits.values.size()
                       ? detail::clamp01(found->traits.values[defect_coord])
                       : 0.0;
  return d * (1.0 - whole.mechanisms.enforcement_strength);
}

}  // namespace oevo
