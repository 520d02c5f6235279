#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_set>
#include <vector>

namespace oevo {

using HolonId = std::uint64_t;

enum class Origin { seed, asexual, multiparent, fission, fusion };

enum class ReproMode { asexual, multiparent };

// The six kinds of heritable variation an operator can apply to a holon.
// Fusion- and fission-heritability are not kinds here: they are realized by
// the fuse/fission operators themselves (the composite or fragment persists
// through later reproduction).
enum class VariationKind {
  trait_change,
  part_deletion,
  part_duplication,
  repro_mechanism,
  fission_fusion_mechanism,
  enforcement_mechanism,
};

inline constexpr int kVariationKindCount = 6;

inline const char* to_string(VariationKind k) {
  switch (k) {
    case VariationKind::trait_change: return "trait_change";
    case VariationKind::part_deletion: return "part_deletion";
    case VariationKind::part_duplication: return "part_duplication";
    case VariationKind::repro_mechanism: return "repro_mechanism";
    case VariationKind::fission_fusion_mechanism: return "fission_fusion_mechanism";
    case VariationKind::enforcement_mechanism: return "enforcement_mechanism";
  }
  return "?";
}

inline const char* to_string(Origin o) {
  switch (o) {
    case Origin::seed: return "seed";
    case Origin::asexual: return "asexual";
    case Origin::multiparent: return "multiparent";
    case Origin::fission: return "fission";
    case Origin::fusion: return "fusion";
  }
  return "?";
}

inline const char* to_string(ReproMode m) {
  return m == ReproMode::asexual ? "asexual" : "multiparent";
}

// Real-valued traits plus optional small-integer type labels. Trait meaning
// is scenario-defined; by convention values[0] is the defection propensity
// read by effective_contribution.
struct TraitVector {
  std::vector<double> values;
  std::vector<int> tags;

  bool operator==(const TraitVector&) const = default;
};

// Per-kind mutation probabilities. Heritable: every holon node carries its
// own copy, seeded from the run configuration.
struct MutationRates {
  double trait_change = 0.2;
  double part_deletion = 0.02;
  double part_duplication = 0.02;
  double repro_mechanism = 0.01;
  double fission_fusion_mechanism = 0.05;
  double enforcement_mechanism = 0.05;

  double of(VariationKind k) const {
    switch (k) {
      case VariationKind::trait_change: return trait_change;
      case VariationKind::part_deletion: return part_deletion;
      case VariationKind::part_duplication: return part_duplication;
      case VariationKind::repro_mechanism: return repro_mechanism;
      case VariationKind::fission_fusion_mechanism: return fission_fusion_mechanism;
      case VariationKind::enforcement_mechanism: return enforcement_mechanism;
    }
    return 0.0;
  }

  bool operator==(const MutationRates&) const = default;
};

// Heritable meta-genome: how this holon reproduces, splits, merges, and
// polices its parts. Every field is itself subject to variation.
struct Mechanisms {
  ReproMode repro_mode = ReproMode::asexual;
  int n_parents = 2;
  double fission_rate = 0.0;
  double fusion_affinity = 0.0;
  double enforcement_strength = 0.0;
  MutationRates mutation_rates{};

  bool operator==(const Mechanisms&) const = default;
};

// A node in the part-whole hierarchy: simultaneously a whole (its parts) and
// a part (of whatever contains it). Value semantics throughout; a holon is
// immutable once published to a population.
struct Holon {
  HolonId id = 0;
  TraitVector traits;
  Mechanisms mechanisms;
  std::vector<Holon> parts;
  std::vector<HolonId> parent_ids;
  Origin origin = Origin::seed;
};

struct LineageRecord {
  HolonId child_id = 0;
  std::vector<HolonId> parent_ids;
  std::int64_t generation = 0;
  Origin origin = Origin::seed;
};

// Monotone id counter scoped to one run. Ids are never reused.
struct IdSource {
  std::uint64_t next = 1;
  HolonId fresh() { return next++; }
};

// Level count: 1 for a leaf, 1 + max part depth otherwise.
inline int depth(const Holon& h) {
  int d = 0;
  for (const Holon& p : h.parts) d = std::max(d, depth(p));
  return 1 + d;
}

inline bool is_leaf(const Holon& h) { return h.parts.empty(); }

template <typename F>
void for_each_node(const Holon& h, F&& fn) {
  fn(h);
  for (const Holon& p : h.parts) for_each_node(p, fn);
}

template <typename F>
void for_each_node(Holon& h, F&& fn) {
  fn(h);
  for (Holon& p : h.parts) for_each_node(p, fn);
}

template <typename F>
void for_each_leaf(const Holon& h, F&& fn) {
  if (h.parts.empty()) {
    fn(h);
    return;
  }
  for (const Holon& p : h.parts) for_each_leaf(p, fn);
}

inline std::size_t node_count(const Holon& h) {
  std::size_t n = 0;
  for_each_node(h, [&](const Holon&) { ++n; });
  return n;
}

// Structural identity used by similarity checks and multi-parent blending:
// same part counts recursively, same trait arity, same tags at every node.
inline bool same_structure(const Holon& a, const Holon& b) {
  if (a.traits.values.size() != b.traits.values.size()) return false;
  if (a.traits.tags != b.traits.tags) return false;
  if (a.parts.size() != b.parts.size()) return false;
  for (std::size_t i = 0; i < a.parts.size(); ++i) {
    if (!same_structure(a.parts[i], b.parts[i])) return false;
  }
  return true;
}

// Euclidean distance between root trait vectors. Mismatched arity or tags
// yield +infinity: "not comparable" reads as "not similar".
inline double trait_distance(const Holon& a, const Holon& b) {
  if (a.traits.values.size() != b.traits.values.size() || a.traits.tags != b.traits.tags) {
    return std::numeric_limits<double>::infinity();
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < a.traits.values.size(); ++i) {
    const double d = a.traits.values[i] - b.traits.values[i];
    sq += d * d;
  }
  return std::sqrt(sq);
}

// Structural copy with fresh ids at every node. Each copied node records the
// node it was copied from as its single parent; the root's origin is set by
// the caller (asexual birth, internal replication, part duplication).
inline Holon deep_copy(const Holon& h, IdSource& ids) {
  Holon c;
  c.id = ids.fresh();
  c.traits = h.traits;
  c.mechanisms = h.mechanisms;
  c.parent_ids = {h.id};
  c.origin = h.origin;
  c.parts.reserve(h.parts.size());
  for (const Holon& p : h.parts) c.parts.push_back(deep_copy(p, ids));
  return c;
}

namespace detail {

inline bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

inline void validate_node(const Holon& h, const Holon& node, std::unordered_set<HolonId>& seen,
                          std::vector<std::string>& out) {
  if (!seen.insert(node.id).second) {
    out.push_back("duplicate id " + std::to_string(node.id) + " in hierarchy of holon " +
                  std::to_string(h.id) + " (cycle or shared part)");
  }
  if (node.traits.values.empty()) {
    out.push_back("node " + std::to_string(node.id) + ": empty trait vector");
  }
  for (double v : node.traits.values) {
    if (!std::isfinite(v)) {
      out.push_back("node " + std::to_string(node.id) + ": non-finite trait value");
      break;
    }
  }
  const Mechanisms& m = node.mechanisms;
  if (m.n_parents < 2) out.push_back("node " + std::to_string(node.id) + ": n_parents < 2");
  if (!in_unit(m.fission_rate)) out.push_back("node " + std::to_string(node.id) + ": fission_rate out of [0,1]");
  if (!in_unit(m.fusion_affinity)) out.push_back("node " + std::to_string(node.id) + ": fusion_affinity out of [0,1]");
  if (!in_unit(m.enforcement_strength)) out.push_back("node " + std::to_string(node.id) + ": enforcement_strength out of [0,1]");
  for (int k = 0; k < kVariationKindCount; ++k) {
    if (!in_unit(m.mutation_rates.of(static_cast<VariationKind>(k)))) {
      out.push_back("node " + std::to_string(node.id) + ": mutation rate out of [0,1]");
      break;
    }
  }
  for (const Holon& p : node.parts) validate_node(h, p, seen, out);
}

}  // namespace detail

// Reports every invariant violation in the hierarchy; empty means valid.
// Violations are data, not faults.
inline std::vector<std::string> validate(const Holon& h) {
  std::vector<std::string> out;
  std::unordered_set<HolonId> seen;
  detail::validate_node(h, h, seen, out);
  return out;
}

}  // namespace oevo
