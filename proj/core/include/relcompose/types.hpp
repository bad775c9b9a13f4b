#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace relcompose {

/// Dense integer handle tagged by what it indexes, so object, concept and
/// relation ids cannot be mixed up.
template <class Tag>
struct Id {
  static constexpr std::uint32_t kInvalid = std::numeric_limits<std::uint32_t>::max();

  std::uint32_t value = kInvalid;

  constexpr Id() = default;
  constexpr explicit Id(std::uint32_t v) : value(v) {}

  constexpr bool valid() const { return value != kInvalid; }

  friend constexpr auto operator<=>(Id, Id) = default;
};

struct ObjectTag;
struct ConceptTag;
struct RelationTag;

using ObjectId = Id<ObjectTag>;
using ConceptId = Id<ConceptTag>;
using RelationId = Id<RelationTag>;

/// Positional assignment of knowledge objects to parameters (or rule variables).
using Binding = std::vector<ObjectId>;

/// Relation atom whose endpoints are positions in a parameter/variable list.
struct LocalAtom {
  RelationId relation;
  std::uint32_t source = 0;
  std::uint32_t target = 0;

  friend bool operator==(const LocalAtom&, const LocalAtom&) = default;
};

}  // namespace relcompose

template <class Tag>
struct std::hash<relcompose::Id<Tag>> {
  std::size_t operator()(relcompose::Id<Tag> id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};
