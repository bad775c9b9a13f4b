#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "relcompose/knowledge.hpp"
#include "relcompose/ontology.hpp"
#include "relcompose/types.hpp"

namespace relcompose {

/// Positions to bind: a concept per position (empty for untyped rule
/// variables) plus the relation atoms that must hold among them.
struct MatchSpec {
  std::vector<std::optional<ConceptId>> types;
  std::vector<LocalAtom> atoms;
};

struct MatchOptions {
  /// Forbid the same object at two positions.
  bool injective = false;
  /// Check each atom as soon as both of its endpoints are bound. Turning this
  /// off checks everything at the leaf; the result is the same, only slower.
  bool prune_levels = true;
};

/// Bindings already used by one service or rule. Tuples are stored exactly,
/// bucketed by match_hash, so a hash collision never hides an unseen tuple.
class CallHistory {
 public:
  bool contains(std::span<const ObjectId> binding) const;
  /// Returns false if the tuple was already present.
  bool record(std::span<const ObjectId> binding);
  std::size_t size() const { return size_; }

 private:
  std::unordered_map<std::uint64_t, std::vector<Binding>> buckets_;
  std::size_t size_ = 0;
};

/// True iff every atom whose higher endpoint is `level` holds between
/// `candidate` and the already-bound `partial[0..level)`.
bool relations_match(const Knowledge& knowledge, std::span<const LocalAtom> atoms, std::size_t level,
                     ObjectId candidate, std::span<const ObjectId> partial);

/// First binding in lexicographic (position, insertion) order that satisfies
/// types and atoms and is not in `history`. `fixed`, when non-empty, pins
/// positions to given objects (used by the goal test).
std::optional<Binding> find_match(const MatchSpec& spec, const Knowledge& knowledge, const CallHistory* history,
                                  const MatchOptions& options = {},
                                  std::span<const std::optional<ObjectId>> fixed = {});

/// Like find_match over the rule's untyped variables, additionally skipping
/// bindings whose conclusions are all present already.
std::optional<Binding> find_rule_match(const CompiledRule& rule, const Knowledge& knowledge,
                                       const CallHistory& history, const MatchOptions& options = {});

}  // namespace relcompose
