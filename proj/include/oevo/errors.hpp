#pragma once

#include <stdexcept>
#include <string>

namespace oevo {

struct SimError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Multi-parent reproduction was asked to blend parents that are not
// structurally identical or are too far apart in trait space.
struct DissimilarParents : SimError {
  using SimError::SimError;
};

// Fission of a holon that has no parts.
struct LeafFission : SimError {
  using SimError::SimError;
};

// Fusion of fewer than two holons.
struct TooFewInputs : SimError {
  using SimError::SimError;
};

// Selection over a population whose fitness mass is zero.
struct AllZeroFitness : SimError {
  using SimError::SimError;
};

// effective_contribution called with a holon that is not a direct part.
struct NotAPart : SimError {
  using SimError::SimError;
};

struct ConfigError : SimError {
  using SimError::SimError;
};

struct IoError : SimError {
  using SimError::SimError;
};

}  // namespace oevo
