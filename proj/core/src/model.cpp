#include "relcompose/model.hpp"

#include <algorithm>

namespace relcompose {

std::size_t service_step_count(const Composition& c) {
  return static_cast<std::size_t>(std::count_if(c.steps.begin(), c.steps.end(),
                                                [](const Invocation& s) { return s.kind == StepKind::service; }));
}

std::size_t rule_step_count(const Composition& c) {
  return static_cast<std::size_t>(
      std::count_if(c.steps.begin(), c.steps.end(), [](const Invocation& s) { return s.kind == StepKind::rule; }));
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::composed: return "composed";
    case Verdict::unsolvable: return "unsolvable";
    case Verdict::budget_exceeded: return "budget-exceeded";
  }
  return "?";
}

std::optional<Verdict> parse_verdict(std::string_view s) {
  if (s == "composed") return Verdict::composed;
  if (s == "unsolvable") return Verdict::unsolvable;
  if (s == "budget-exceeded") return Verdict::budget_exceeded;
  return std::nullopt;
}

const char* to_string(DedupMode m) { return m == DedupMode::identity ? "identity" : "type-level"; }

std::optional<DedupMode> parse_dedup_mode(std::string_view s) {
  if (s == "identity") return DedupMode::identity;
  if (s == "type-level") return DedupMode::type_level;
  return std::nullopt;
}

const char* to_string(StepKind k) {
  switch (k) {
    case StepKind::query: return "query";
    case StepKind::service: return "service";
    case StepKind::rule: return "rule";
  }
  return "?";
}

}  // namespace relcompose
