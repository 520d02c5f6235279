#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "holon.hpp"

namespace oevo {

enum class EventType {
  birth,
  death,
  fission,
  fusion,
  mutation,
  suppression,
  transition,
};

inline const char* to_string(EventType t) {
  switch (t) {
    case EventType::birth: return "birth";
    case EventType::death: return "death";
    case EventType::fission: return "fission";
    case EventType::fusion: return "fusion";
    case EventType::mutation: return "mutation";
    case EventType::suppression: return "suppression";
    case EventType::transition: return "transition";
  }
  return "?";
}

enum class BirthMode { seed, asexual, multiparent, internal };

inline const char* to_string(BirthMode m) {
  switch (m) {
    case BirthMode::seed: return "seed";
    case BirthMode::asexual: return "asexual";
    case BirthMode::multiparent: return "multiparent";
    case BirthMode::internal: return "internal";
  }
  return "?";
}

// One line of the run log. `subject` is the holon acted on; `related` names
// the other participants (parents of a birth, inputs of a fusion, fragments
// of a fission, the containing whole of a suppression).
struct Event {
  std::int64_t generation = 0;
  EventType type = EventType::birth;
  HolonId subject = 0;
  std::vector<HolonId> related;
  std::optional<BirthMode> birth_mode;
  std::optional<VariationKind> variation;
  std::optional<HolonId> node;  // mutation: the node inside subject that changed
  std::string note;
};

}  // namespace oevo
