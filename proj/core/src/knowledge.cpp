#include "relcompose/knowledge.hpp"

#include <algorithm>
#include <deque>

namespace relcompose {

namespace {

constexpr std::uint32_t kSelfPeer = Id<ObjectTag>::kInvalid - 1;

enum Direction : std::uint32_t { kOut = 0, kIn = 1, kLoop = 2 };

template <class T>
void erase_value(std::vector<T>& v, const T& x) {
  auto it = std::find(v.begin(), v.end(), x);
  if (it != v.end()) v.erase(it);
}

}  // namespace

std::size_t Knowledge::TripleKeyHash::operator()(const TripleKey& k) const noexcept {
  std::uint64_t h = (static_cast<std::uint64_t>(k.source) << 32) | k.target;
  h ^= static_cast<std::uint64_t>(k.relation) * 0x9E3779B97F4A7C15ull;
  h ^= h >> 29;
  h *= 0xBF58476D1CE4E5B9ull;
  h ^= h >> 32;
  return static_cast<std::size_t>(h);
}

Knowledge::Knowledge(const Ontology& ontology)
    : ontology_(&ontology),
      by_exact_type_(ontology.concept_count()),
      subsumed_(ontology.concept_count()),
      by_relation_(ontology.relation_count()) {}

std::pair<ObjectId, bool> Knowledge::add_object(ConceptId type, Provenance provenance) {
  if (type.value >= ontology_->concept_count()) throw Error("unknown concept id " + std::to_string(type.value));
  std::string name = provenance.producer + "." + provenance.parameter + "." + std::to_string(provenance.call_index);
  if (names_.contains(name)) throw Error("duplicate object name '" + name + "'");

  ObjectId id(static_cast<std::uint32_t>(objects_.size()));
  names_.emplace(name, id);
  objects_.push_back(ObjectRecord{id, std::move(name), type, std::move(provenance), true});
  incident_.emplace_back();
  live_.push_back(id);
  by_exact_type_[type.value].push_back(id);
  subsumed_[type.value].push_back(id);
  for (ConceptId a : ontology_->ancestors(type)) subsumed_[a.value].push_back(id);
  return {id, true};
}

std::pair<ObjectId, bool> Knowledge::add_object(std::string_view type, Provenance provenance) {
  return add_object(ontology_->concept_id(type), std::move(provenance));
}

void Knowledge::check_live(ObjectId id) const {
  if (!is_live(id)) throw Error("object id " + std::to_string(id.value) + " is not live");
}

TripleIndex Knowledge::insert_triple(RelationId relation, ObjectId source, ObjectId target, bool derived,
                                     std::array<TripleIndex, 2> support) {
  auto index = static_cast<TripleIndex>(triples_.size());
  triples_.push_back(RelationInstance{relation, source, target, derived, true, support});
  triple_index_.emplace(TripleKey{relation.value, source.value, target.value}, index);
  incident_[source.value].push_back(index);
  if (target != source) incident_[target.value].push_back(index);
  by_relation_[relation.value].push_back(index);
  ++fact_count_;
  return index;
}

void Knowledge::retire_triple(TripleIndex i) {
  auto& t = triples_[i];
  if (!t.alive) return;
  t.alive = false;
  triple_index_.erase(TripleKey{t.relation.value, t.source.value, t.target.value});
  --fact_count_;
}

std::vector<TripleIndex> Knowledge::add_relation(RelationId relation, ObjectId source, ObjectId target) {
  if (relation.value >= ontology_->relation_count()) {
    throw Error("unknown relation id " + std::to_string(relation.value));
  }
  check_live(source);
  check_live(target);

  std::vector<TripleIndex> added;
  if (find_triple(relation, source, target)) return added;

  const auto& type = ontology_->relation(relation);
  std::deque<TripleIndex> work;
  auto push = [&](ObjectId s, ObjectId t, bool derived, std::array<TripleIndex, 2> support) {
    if (find_triple(relation, s, t)) return;
    auto i = insert_triple(relation, s, t, derived, support);
    added.push_back(i);
    work.push_back(i);
  };
  push(source, target, false, {kNoTriple, kNoTriple});

  while (!work.empty()) {
    const TripleIndex cur = work.front();
    work.pop_front();
    const ObjectId x = triples_[cur].source;
    const ObjectId y = triples_[cur].target;
    if (type.symmetric) push(y, x, true, {cur, kNoTriple});
    if (!type.transitive) continue;
    // Copies: push() may grow the incident lists being scanned.
    const auto into_x = incident_[x.value];
    for (TripleIndex e : into_x) {
      const auto& t = triples_[e];
      if (t.alive && t.relation == relation && t.target == x) push(t.source, y, true, {e, cur});
    }
    const auto out_of_y = incident_[y.value];
    for (TripleIndex e : out_of_y) {
      const auto& t = triples_[e];
      if (t.alive && t.relation == relation && t.source == y) push(x, t.target, true, {cur, e});
    }
  }
  return added;
}

std::vector<TripleIndex> Knowledge::add_relation(std::string_view relation, ObjectId source, ObjectId target) {
  return add_relation(ontology_->relation_id(relation), source, target);
}

std::optional<TripleIndex> Knowledge::find_triple(RelationId relation, ObjectId source, ObjectId target) const {
  auto it = triple_index_.find(TripleKey{relation.value, source.value, target.value});
  if (it == triple_index_.end()) return std::nullopt;
  return it->second;
}

bool Knowledge::has_relation(RelationId relation, ObjectId source, ObjectId target) const {
  return triple_index_.contains(TripleKey{relation.value, source.value, target.value});
}

bool Knowledge::has_relation(std::string_view relation, ObjectId source, ObjectId target) const {
  return has_relation(ontology_->relation_id(relation), source, target);
}

std::vector<ObjectId> Knowledge::objects_of_types(std::span<const ConceptId> types) const {
  std::vector<ObjectId> out;
  std::vector<bool> seen(ontology_->concept_count(), false);
  for (ConceptId c : types) {
    if (c.value >= ontology_->concept_count()) throw Error("unknown concept id " + std::to_string(c.value));
    if (seen[c.value]) continue;
    seen[c.value] = true;
    out.insert(out.end(), by_exact_type_[c.value].begin(), by_exact_type_[c.value].end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ObjectId> Knowledge::objects_of_types(const std::set<std::string>& types) const {
  std::vector<ConceptId> ids;
  ids.reserve(types.size());
  for (const auto& t : types) ids.push_back(ontology_->concept_id(t));
  return objects_of_types(ids);
}

const std::vector<ObjectId>& Knowledge::objects_subsumed_by(ConceptId type) const {
  if (type.value >= subsumed_.size()) throw Error("unknown concept id " + std::to_string(type.value));
  return subsumed_[type.value];
}

std::optional<ObjectId> Knowledge::find_object(std::string_view name) const {
  auto it = names_.find(std::string(name));
  if (it == names_.end() || !objects_[it->second.value].alive) return std::nullopt;
  return it->second;
}

std::vector<TripleIndex> Knowledge::incident(ObjectId id) const {
  std::vector<TripleIndex> out;
  for (TripleIndex i : incident_.at(id.value)) {
    if (triples_[i].alive) out.push_back(i);
  }
  return out;
}

std::vector<TripleIndex> Knowledge::relation_triples(RelationId relation) const {
  std::vector<TripleIndex> out;
  for (TripleIndex i : by_relation_.at(relation.value)) {
    if (triples_[i].alive) out.push_back(i);
  }
  return out;
}

std::vector<std::array<std::uint32_t, 3>> Knowledge::signature(ObjectId id, DedupMode mode) const {
  std::vector<std::array<std::uint32_t, 3>> sig;
  auto peer_key = [&](ObjectId peer) {
    return mode == DedupMode::identity ? peer.value : objects_[peer.value].type.value;
  };
  for (TripleIndex i : incident_[id.value]) {
    const auto& t = triples_[i];
    if (!t.alive) continue;
    if (t.source == id && t.target == id) {
      sig.push_back({t.relation.value, kLoop, kSelfPeer});
    } else if (t.source == id) {
      sig.push_back({t.relation.value, kOut, peer_key(t.target)});
    } else {
      sig.push_back({t.relation.value, kIn, peer_key(t.source)});
    }
  }
  std::sort(sig.begin(), sig.end());
  sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
  return sig;
}

void Knowledge::retire_object(ObjectId id) {
  auto& rec = objects_[id.value];
  rec.alive = false;
  erase_value(live_, id);
  erase_value(by_exact_type_[rec.type.value], id);
  erase_value(subsumed_[rec.type.value], id);
  for (ConceptId a : ontology_->ancestors(rec.type)) erase_value(subsumed_[a.value], id);
}

MergeMap Knowledge::dedup_new_objects(std::span<const ObjectId> new_ids, DedupMode mode,
                                      std::vector<TripleIndex>* added) {
  MergeMap merged;
  std::vector<ObjectId> ordered(new_ids.begin(), new_ids.end());
  std::sort(ordered.begin(), ordered.end());
  ordered.erase(std::unique(ordered.begin(), ordered.end()), ordered.end());

  std::vector<bool> is_new(objects_.size(), false);
  for (ObjectId id : ordered) is_new[id.value] = true;
  std::vector<bool> kept(objects_.size(), false);

  for (ObjectId x : ordered) {
    if (!is_live(x)) continue;
    const auto sig = signature(x, mode);
    std::optional<ObjectId> survivor;
    for (ObjectId o : by_exact_type_[objects_[x.value].type.value]) {
      if (o == x) continue;
      if (is_new[o.value] && !kept[o.value]) continue;
      if (signature(o, mode) == sig) {
        survivor = o;
        break;
      }
    }
    if (!survivor) {
      kept[x.value] = true;
      continue;
    }

    const ObjectId o = *survivor;
    const auto facts = incident(x);
    for (TripleIndex i : facts) retire_triple(i);
    retire_object(x);
    merged.emplace(x, o);
    for (TripleIndex i : facts) {
      const auto t = triples_[i];
      const ObjectId s = t.source == x ? o : t.source;
      const ObjectId g = t.target == x ? o : t.target;
      if (!is_live(s) || !is_live(g)) continue;
      auto more = add_relation(t.relation, s, g);
      if (added) added->insert(added->end(), more.begin(), more.end());
    }
  }
  return merged;
}

std::string Knowledge::dump() const {
  std::string out;
  for (ObjectId id : live_) {
    const auto& rec = objects_[id.value];
    out += rec.name + ": " + ontology_->concept_name(rec.type) + " {";
    for (TripleIndex i : incident_[id.value]) {
      const auto& t = triples_[i];
      if (!t.alive) continue;
      const bool out_dir = t.source == id;
      const auto& peer = objects_[(out_dir ? t.target : t.source).value].name;
      out += " " + ontology_->relation_name(t.relation) + "(" + peer + ")" + (out_dir ? " out" : " in");
    }
    out += " }\n";
  }
  return out;
}

std::uint64_t match_hash(std::span<const ObjectId> objects) {
  std::uint64_t h = 14695981039346656037ull;
  for (ObjectId id : objects) {
    for (int b = 0; b < 4; ++b) {
      h ^= (id.value >> (8 * b)) & 0xFFu;
      h *= 1099511628211ull;
    }
  }
  return h;
}

}  // namespace relcompose
