#pragma once

#include <stdexcept>
#include <string>

namespace pilot {

// Violations of the model's own preconditions (nodes, spacelike currents,
// mass-shell blow-up). The CLI maps these to exit code 3.
struct ModelError : std::runtime_error {
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

struct NodeError : ModelError {
  explicit NodeError(const std::string& what) : ModelError(what) {}
};

} // namespace pilot
