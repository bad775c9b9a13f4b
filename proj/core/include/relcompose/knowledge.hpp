#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "relcompose/ontology.hpp"
#include "relcompose/types.hpp"

namespace relcompose {

/// Who created an object: a service name (or "query") plus the output
/// parameter and the 1-based call count of that producer (0 for the query).
struct Provenance {
  std::string producer;
  std::string parameter;
  std::uint32_t call_index = 0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct ObjectRecord {
  ObjectId id;
  std::string name;
  ConceptId type;
  Provenance provenance;
  bool alive = true;
};

using TripleIndex = std::uint32_t;
inline constexpr TripleIndex kNoTriple = static_cast<TripleIndex>(-1);

/// One (relation, source, target) fact. `derived` marks facts added by
/// symmetric/transitive closure; `support` then names the one or two facts
/// it was derived from.
struct RelationInstance {
  RelationId relation;
  ObjectId source;
  ObjectId target;
  bool derived = false;
  bool alive = true;
  std::array<TripleIndex, 2> support{kNoTriple, kNoTriple};
};

/// How `dedup_new_objects` compares relation peers: by object identity, or by
/// the peer's concept only (coarser, merges more).
enum class DedupMode { identity, type_level };

/// Old id -> surviving id for every object merged by deduplication.
using MergeMap = std::unordered_map<ObjectId, ObjectId>;

/// Growing set of typed objects and relation facts for one composition run.
///
/// Facts stay closed under the symmetry/transitivity flags of their relation
/// after every `add_relation`. Objects and facts are never removed, except
/// that deduplication retires an object whose context duplicates an existing
/// one (its facts already hold on the survivor).
class Knowledge {
 public:
  explicit Knowledge(const Ontology& ontology);

  const Ontology& ontology() const { return *ontology_; }

  /// Creates an object named "<producer>.<parameter>.<call_index>".
  /// `second` is always true; merging is done separately by dedup_new_objects.
  std::pair<ObjectId, bool> add_object(ConceptId type, Provenance provenance);
  std::pair<ObjectId, bool> add_object(std::string_view type, Provenance provenance);

  /// Inserts a fact and restores closure. Returns every fact that was not
  /// present before (empty for a duplicate), the asserted one first.
  std::vector<TripleIndex> add_relation(RelationId relation, ObjectId source, ObjectId target);
  std::vector<TripleIndex> add_relation(std::string_view relation, ObjectId source, ObjectId target);

  bool has_relation(RelationId relation, ObjectId source, ObjectId target) const;
  bool has_relation(std::string_view relation, ObjectId source, ObjectId target) const;
  std::optional<TripleIndex> find_triple(RelationId relation, ObjectId source, ObjectId target) const;

  /// Live objects whose exact type is in `types`, in insertion order.
  std::vector<ObjectId> objects_of_types(std::span<const ConceptId> types) const;
  std::vector<ObjectId> objects_of_types(const std::set<std::string>& types) const;

  /// Live objects whose type is `type` or one of its subtypes, in insertion order.
  const std::vector<ObjectId>& objects_subsumed_by(ConceptId type) const;

  const std::vector<ObjectId>& live_objects() const { return live_; }

  /// Merges each new object whose context (type plus relation peers) equals
  /// that of an existing live object, or of an earlier kept new object, into
  /// it. Returns old id -> survivor. Facts added while re-pointing (only
  /// possible in type-level mode) are appended to `added` when given.
  MergeMap dedup_new_objects(std::span<const ObjectId> new_ids, DedupMode mode = DedupMode::identity,
                             std::vector<TripleIndex>* added = nullptr);

  const ObjectRecord& object(ObjectId id) const { return objects_.at(id.value); }
  bool is_live(ObjectId id) const { return id.value < objects_.size() && objects_[id.value].alive; }
  std::optional<ObjectId> find_object(std::string_view name) const;

  const std::vector<RelationInstance>& triples() const { return triples_; }
  const RelationInstance& triple(TripleIndex i) const { return triples_.at(i); }
  /// Live facts touching `id` (both directions), in insertion order.
  std::vector<TripleIndex> incident(ObjectId id) const;
  /// Live facts of one relation, in insertion order.
  std::vector<TripleIndex> relation_triples(RelationId relation) const;

  std::size_t object_count() const { return live_.size(); }
  /// One past the largest id ever issued, retired ones included.
  std::size_t id_bound() const { return objects_.size(); }
  std::size_t fact_count() const { return fact_count_; }

  /// One line per live object, ordered by id:
  /// `name: Type { rel(peer) out rel(peer) in ... }`.
  std::string dump() const;

 private:
  struct TripleKey {
    std::uint32_t relation;
    std::uint32_t source;
    std::uint32_t target;
    friend bool operator==(const TripleKey&, const TripleKey&) = default;
  };
  struct TripleKeyHash {
    std::size_t operator()(const TripleKey& k) const noexcept;
  };

  void check_live(ObjectId id) const;
  TripleIndex insert_triple(RelationId relation, ObjectId source, ObjectId target, bool derived,
                            std::array<TripleIndex, 2> support);
  void retire_triple(TripleIndex i);
  void retire_object(ObjectId id);
  std::vector<std::array<std::uint32_t, 3>> signature(ObjectId id, DedupMode mode) const;

  const Ontology* ontology_;
  std::vector<ObjectRecord> objects_;
  std::vector<ObjectId> live_;
  std::unordered_map<std::string, ObjectId> names_;
  std::vector<std::vector<ObjectId>> by_exact_type_;
  std::vector<std::vector<ObjectId>> subsumed_;
  std::vector<RelationInstance> triples_;
  std::unordered_map<TripleKey, TripleIndex, TripleKeyHash> triple_index_;
  std::vector<std::vector<TripleIndex>> incident_;
  std::vector<std::vector<TripleIndex>> by_relation_;
  std::size_t fact_count_ = 0;
};

/// Order-sensitive 64-bit FNV-1a digest of an object id sequence.
std::uint64_t match_hash(std::span<const ObjectId> objects);

}  // namespace relcompose
