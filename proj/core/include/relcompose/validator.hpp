#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "relcompose/model.hpp"

namespace relcompose {

struct ValidationFailure {
  std::size_t step = 0;  // plan step index; steps.size() for the goal
  std::string reason;
};

struct ValidationReport {
  bool accepted = false;
  std::vector<ValidationFailure> failures;
  std::size_t steps_replayed = 0;
  std::size_t objects = 0;
  std::size_t facts = 0;
};

/// Replays `plan` from scratch on a fresh knowledge base and checks every
/// binding, every produced name, every asserted fact and finally the goal.
/// Replay stops at the first failing step. Shares only the ontology and
/// knowledge primitives with the engine; it never searches for bindings.
ValidationReport validate_plan(const InstanceBundle& bundle, const PlanDocument& plan);

std::string format_validation(const ValidationReport& report);

}  // namespace relcompose
